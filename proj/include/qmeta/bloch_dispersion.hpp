#pragma once

#include "qmeta/types.hpp"

#include <Eigen/Dense>

namespace qmeta {

using Matrix2c = Eigen::Matrix2cd;

// p-polarization characteristic matrix of an isotropic slab.
// Throws BranchAmbiguity when |eps k0^2 - ky^2| < 1e-14.
Matrix2c layer_matrix(cplx eps, double thickness, double wavenumber, double ky);

// Same for a homogenized slab with separate tangential/normal moments:
// kz^2 = eps_par k0^2 - eps_par inv_ezz ky^2, q = kz/(eps_par k0).
Matrix2c layer_matrix_slab(const Slab& slab, double wavenumber, double ky);

// Ordered product of the slab matrices across one period.
Matrix2c period_matrix(const PermittivityProfile& profile, double wavenumber, double ky);

// kz = arccos(tr M / 2)/period with Im kz >= 0, then Re kz in [0, pi/period].
cplx bloch_kz(const Matrix2c& M, double period);

// Samples kz(ky) over the grid, flags propagating points
// (Im kz < threshold, default 1e-3 * pi/period), bisection-refines the
// propagating->evanescent transition, and classifies the topology.
// BranchAmbiguity at a grid point is handled by a small ky perturbation.
IsofrequencyContour isofrequency_contour(const PermittivityProfile& profile,
                                         double wavenumber,
                                         const std::vector<double>& ky_grid,
                                         double evanescence_threshold = -1.0);

// CLOSED when the band terminates with Re kz < 0.05 * zone edge; OPEN when it
// terminates at the zone edge (> 0.95) or propagates through the whole grid.
Topology classify_topology(const IsofrequencyContour& contour);

} // namespace qmeta
