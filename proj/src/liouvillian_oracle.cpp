#include "qmeta/liouvillian_oracle.hpp"

#include "qmeta/errors.hpp"

#include <Eigen/SVD>

namespace qmeta {

namespace {

constexpr cplx I_UNIT{0.0, 1.0};

Matrix16c kron4(const Matrix4c& A, const Matrix4c& B) {
    Matrix16c out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out.block<4, 4>(4 * i, 4 * j) = A(i, j) * B;
    return out;
}

// Column-stacking dissipator: sigma rho sigma^dag - (1/2){sigma^dag sigma, rho}
// vectorizes to conj(sigma) (x) sigma - (1/2)(I (x) sigma^dag sigma
// + (sigma^dag sigma)^T (x) I).
void add_dissipator(Matrix16c& L, const Matrix4c& sigma, double rate) {
    if (rate == 0.0) return;
    const Matrix4c id = Matrix4c::Identity();
    const Matrix4c ss = sigma.adjoint() * sigma;
    L += rate * (kron4(sigma.conjugate(), sigma) -
                 0.5 * (kron4(id, ss) + kron4(ss.transpose(), id)));
}

Matrix4c projector(int i, int j) {
    Matrix4c s = Matrix4c::Zero();
    s(i, j) = 1.0;
    return s;
}

} // namespace

Matrix4c build_hamiltonian(const DriveConfig& drive, const ProbeConfig& probe) {
    Matrix4c H = Matrix4c::Zero();
    H(0, 0) = -drive.delta_a;
    H(1, 1) = -(drive.delta_a + probe.delta_b);
    H(3, 3) = -drive.delta_d;
    H(0, 1) = -probe.omega_b;
    H(1, 0) = -probe.omega_b;
    H(2, 0) = -drive.omega_a;
    H(0, 2) = -drive.omega_a;
    H(2, 3) = -drive.omega_d;
    H(3, 2) = -drive.omega_d;
    return H;
}

Matrix16c build_liouvillian(const Matrix4c& H, const LevelScheme& levels,
                            double pump_rate) {
    const Matrix4c id = Matrix4c::Identity();
    Matrix16c L = -I_UNIT * (kron4(id, H) - kron4(H.transpose(), id));
    add_dissipator(L, projector(0, 2), levels.gamma_a); // |a><c|
    add_dissipator(L, projector(1, 0), levels.gamma_b); // |b><a|
    add_dissipator(L, projector(3, 2), levels.gamma_d); // |d><c|
    add_dissipator(L, projector(0, 1), pump_rate);      // repump |a><b|
    return L;
}

Matrix4c steady_state(const Matrix16c& L) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(L, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // Singular values are sorted descending; a one-dimensional kernel means
    // sv[15] ~ 0 while sv[14] stays well above the noise floor.
    if (!(sv(14) > 1e-8 * sv(0))) {
        throw DegenerateSteadyState("steady state is not unique (kernel dimension != 1)");
    }
    Eigen::VectorXcd v = svd.matrixV().col(15);
    Matrix4c rho;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i)
            rho(i, j) = v(4 * j + i);
    rho = 0.5 * (rho + rho.adjoint().eval());
    const double tr = rho.trace().real();
    if (std::abs(tr) < 1e-12) {
        throw DegenerateSteadyState("steady state has vanishing trace");
    }
    rho /= tr;
    return rho;
}

cplx numeric_chi(const LevelScheme& levels, const DriveConfig& drive,
                 const ProbeConfig& probe, const CouplingStrength& coupling) {
    if (!(probe.omega_b > 0.0) || probe.omega_b > 1e-3) {
        throw NonlinearProbe("probe omega_b must be in (0, 1e-3]");
    }
    auto solve = [&](double ob) {
        ProbeConfig p = probe;
        p.omega_b = ob;
        const Matrix4c H = build_hamiltonian(drive, p);
        const Matrix16c L = build_liouvillian(H, levels, drive.pump_rate);
        const Matrix4c rho = steady_state(L);
        return coupling.zeta * rho(0, 1) / ob;
    };
    double ob = probe.omega_b;
    cplx prev = solve(ob);
    for (int iter = 0; iter < 12; ++iter) {
        ob *= 0.5;
        const cplx cur = solve(ob);
        if (std::abs(cur - prev) <= 1e-6 * std::abs(cur)) return cur;
        prev = cur;
    }
    throw NonlinearProbe("linear-response halving check failed to converge");
}

} // namespace qmeta
