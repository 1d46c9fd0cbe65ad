#pragma once

#include "qmeta/types.hpp"

#include <functional>

namespace qmeta {

// Side reflection seen by the emitter, as a function of the (possibly complex)
// normalized transverse wavevector s = k_par/k0 and the vacuum normal
// component w supplied by the integrator (branch handled by the caller).
using ReflectFn = std::function<cplx(cplx s, cplx w)>;

// p-polarization reflection of num_periods repetitions of the profile bounded
// by vacuum on both sides, at real s >= 0 (stable layer-recursion evaluation).
cplx stack_reflection(const PermittivityProfile& profile, int num_periods,
                      double wavenumber, double s);

// Normalized decay rate of a z-oriented dipole between two reflectors at
// vacuum gaps d_plus/d_minus:
//   gamma/gamma0 = 1 + (3/2) Re I,
//   I = Int_0^inf ds s^3/w [r+ p+ + r- p- + 2 r+ r- p+ p-]/[1 - r+ r- p+ p-],
// with p± = exp(2 i k0 w d±) and w(s) = sqrt(1-s^2), Im w >= 0.
// The s > 1 range is evaluated on a contour lowered into Im s < 0 (descent ray
// off s = 1 plus a horizontal section), which is the limiting-absorption
// prescription: for lossless stacks the real axis carries bound-mode poles and
// direct quadrature there is ill-defined, while the lowered contour gives the
// unique loss->0 limit and agrees with the real axis for lossy stacks.
DecayRateResult reflected_decay_rate(const ReflectFn& r_plus, const ReflectFn& r_minus,
                                     double d_plus, double d_minus,
                                     double quad_tol = 1e-9);

// Full pipeline step: dipole at the period boundary of a finite lattice stack
// (context.stack_left/right periods per side, vacuum gaps stack.gap).
DecayRateResult decay_rate_z(const DipoleContext& context, const EmitterStack& stack,
                             double quad_tol = 1e-9);

// xi = gamma3/gamma2 with gamma2 the unmodified vacuum rate of the
// far-off-resonant second transition, so xi equals the normalized gamma3.
double branching_ratio(const DipoleContext& context, const EmitterStack& stack_at_omega3,
                       double quad_tol = 1e-9);

// Re-runs the full chain (steady-state chi -> envelope stack -> decay) per
// omega_a value; rows that fail record the error and the scan continues.
std::vector<BranchingRow> scan_branching(const LevelScheme& levels,
                                         const DriveConfig& drive,
                                         const CouplingStrength& coupling,
                                         const LatticeGeometry& geometry,
                                         const DipoleContext& context, double delta_b,
                                         const std::vector<double>& omega_a_grid,
                                         double quad_tol = 1e-9);

} // namespace qmeta
