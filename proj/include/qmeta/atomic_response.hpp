#pragma once

#include "qmeta/types.hpp"

namespace qmeta {

// Complex off-diagonal relaxation rates at the given detunings.
ComplexRelaxationSet complex_relaxation(const LevelScheme& levels, double delta_a,
                                        double delta_b, double delta_d);

// Closed-form susceptibility of the doubly driven four-level atom.
// Reduces exactly to i*zeta/Gamma_ab when omega_a == 0 and to the
// single-drive transparency formula when omega_d == 0.
// Throws DegenerateDenominator on a resonance pole.
cplx chi_ddr(const CouplingStrength& coupling, const ComplexRelaxationSet& rates,
             double omega_a, double omega_d);

// Lorentz local-field correction chi -> chi/(1 - chi/3).
// Throws LorentzPole when |1 - chi/3| < 1e-12.
cplx local_field(cplx chi);

// Algebraic inverse of local_field: chi_l -> chi_l/(1 + chi_l/3).
cplx local_field_inverse(cplx chi_local);

// eps = 1 + chi_local.
cplx epsilon_at(cplx chi_local);

// Convenience: raw susceptibility -> permittivity with the local-field step.
cplx epsilon_from_chi(cplx chi);

// eta = |Re eps| / Im eps; +infinity when Im eps <= 1e-15 with |Re eps| > 0.
// Gain (Im eps < -1e-15) sets the flag and still reports +infinity.
FigureOfMerit figure_of_merit(cplx epsilon);

// Finds (delta_b*, pump_rate*) in [db_lo, db_hi] x [0, 0.1] where the
// steady-state susceptibility has |Im eps| < 1e-8 and Re eps is most negative,
// alternating pump bisection at fixed delta_b with a golden-section refinement
// of delta_b. Throws NoLosslessPoint when the window contains no such point.
OperatingPoint find_operating_point(const LevelScheme& levels, const DriveConfig& drive,
                                    const CouplingStrength& coupling, double db_lo,
                                    double db_hi);

// Pump rate nulling Im chi at fixed delta_b, or negative if infeasible in
// [0, pump_max]. Monotone decrease of Im chi up to its first zero crossing is
// verified before bisecting.
double solve_pump_rate(const LevelScheme& levels, const DriveConfig& drive,
                       const CouplingStrength& coupling, double delta_b,
                       double pump_max = 0.1);

} // namespace qmeta
