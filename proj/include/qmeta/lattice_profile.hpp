#pragma once

#include "qmeta/types.hpp"

namespace qmeta {

// Gaussian site envelope: chi_peak * exp(-(z - z_alpha)^2 / w^2).
cplx chi_profile(cplx chi_peak, double z, double z_alpha, double w);

// Pointwise permittivity at z within one period (site centered at a/2),
// including the local-field correction.
cplx epsilon_profile_at(const LatticeGeometry& geometry, cplx chi_peak, double z);

// Midpoint-sampled slab discretization of one period: slabs_per_period equal
// slabs, eps = 1 + local_field(chi at slab midpoint); deep-tail slabs snap to
// exactly 1.
PermittivityProfile build_profile(const LatticeGeometry& geometry, cplx chi_peak);

// Moment-homogenized discretization: each slab carries the tangential mean
// <eps> and the principal-value mean <1/eps> (the latter regularized across
// Re eps = 0 crossings); slabs containing a crossing are subdivided 8x.
// This variant keeps the Bloch bands convergent through epsilon-near-zero
// points where midpoint sampling does not converge.
PermittivityProfile build_uniaxial_profile(const LatticeGeometry& geometry,
                                           cplx chi_peak);

// <eps> and PV <1/eps> over [z0, z1] of the single-site profile.
Slab slab_moments(const LatticeGeometry& geometry, cplx chi_peak, double z0, double z1);

// Emitter-side geometry: the envelope is cut where it falls to 1e-9 of its
// peak, defining a vacuum gap around the period boundary; the remaining core
// is sliced into slabs_per_period moment-homogenized slabs.
// Throws DipoleInsideMedium when the envelope leaves no vacuum gap.
EmitterStack build_emitter_stack(const LatticeGeometry& geometry, cplx chi_peak);

} // namespace qmeta
