#pragma once

#include "qmeta/types.hpp"

#include <Eigen/Dense>

namespace qmeta {

using Matrix4c = Eigen::Matrix4cd;
using Matrix16c = Eigen::Matrix<cplx, 16, 16>;

// Rotating-frame Hamiltonian on the basis {|a>, |b>, |c>, |d>}:
// diagonal (-delta_a, -(delta_a+delta_b), 0, -delta_d), couplings
// -omega_b|a><b|, -omega_a|c><a|, -omega_d|c><d| plus Hermitian conjugates.
Matrix4c build_hamiltonian(const DriveConfig& drive, const ProbeConfig& probe);

// Liouvillian acting on the column-stacked density matrix: coherent part
// -i(I (x) H - H^T (x) I) plus Lindblad dissipators with jump operators
// |a><c| (gamma_a), |b><a| (gamma_b), |d><c| (gamma_d) and |a><b| (pump).
Matrix16c build_liouvillian(const Matrix4c& H, const LevelScheme& levels,
                            double pump_rate);

// Kernel vector of L via SVD, reshaped column-wise, Hermitized and
// trace-normalized. Throws DegenerateSteadyState unless the second-smallest
// singular value exceeds 1e-8 times the largest (one-dimensional kernel).
Matrix4c steady_state(const Matrix16c& L);

// Linear-response susceptibility zeta * rho_ab / omega_b from the steady
// state, starting at probe.omega_b and halving the probe until two successive
// values agree to 1e-6 relative. Throws NonlinearProbe if the check never
// passes.
cplx numeric_chi(const LevelScheme& levels, const DriveConfig& drive,
                 const ProbeConfig& probe, const CouplingStrength& coupling);

} // namespace qmeta
