#include "qmeta/emitter_decay.hpp"

#include "qmeta/errors.hpp"
#include "qmeta/lattice_profile.hpp"
#include "qmeta/liouvillian_oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace qmeta {

namespace {

constexpr cplx I_UNIT{0.0, 1.0};

// Layer normal wavevector at complex ky^2 with Im kz >= 0 forced per layer.
// The stack reflection is invariant under interior branch flips, and the
// decaying branch keeps every exponential in the recursion bounded.
void kz_q(const Slab& sl, cplx ky2, double k, cplx& kz, cplx& q) {
    kz = std::sqrt(sl.eps_par * k * k - sl.eps_par * sl.inv_ezz * ky2);
    if (kz.imag() < 0.0) kz = -kz;
    if (kz.imag() == 0.0 && kz.real() < 0.0) kz = -kz;
    q = kz / (sl.eps_par * k);
}

// Backward layer recursion for the vacuum-bounded stack: only decaying
// exponentials appear, so large-|s| evaluation stays finite where a raw
// transfer-matrix product overflows.
cplx parratt(const std::vector<Slab>& seq, cplx ky2, cplx w0, double k) {
    const std::size_t n = seq.size();
    if (n == 0) return 0.0;
    std::vector<cplx> kzs(n), qs(n);
    for (std::size_t j = 0; j < n; ++j) kz_q(seq[j], ky2, k, kzs[j], qs[j]);
    cplx R = 0.0;
    for (std::size_t j = n; j-- > 0;) {
        const cplx qb = (j + 1 < n) ? qs[j + 1] : w0;
        const cplx rho = (qs[j] - qb) / (qs[j] + qb);
        R = (rho + R) / (1.0 + rho * R);
        R *= std::exp(2.0 * I_UNIT * kzs[j] * seq[j].thickness);
    }
    const cplx rho = (w0 - qs[0]) / (w0 + qs[0]);
    return (rho + R) / (1.0 + rho * R);
}

std::vector<Slab> side_sequence(const EmitterStack& stack, int periods) {
    std::vector<Slab> seq;
    seq.reserve(stack.core.size() * periods + periods);
    for (int p = 0; p < periods; ++p) {
        if (p > 0) seq.push_back({1.0, 1.0, 2.0 * stack.gap}); // intra-stack vacuum
        seq.insert(seq.end(), stack.core.begin(), stack.core.end());
    }
    return seq;
}

// Multiple-reflection factor without the s^3/w prefactor.
struct Combiner {
    const ReflectFn& rp;
    const ReflectFn& rm;
    double dp, dm;

    cplx operator()(cplx s, cplx w) const {
        const cplx php = std::exp(2.0 * I_UNIT * k0 * w * dp);
        const cplx phm = std::exp(2.0 * I_UNIT * k0 * w * dm);
        const cplx a = rp(s, w) * php;
        const cplx b = rm(s, w) * phm;
        cplx den = 1.0 - a * b;
        if (std::abs(den) < 1e-10) {
            // Guided-mode pole at a quadrature node: nudge and retry once.
            const cplx s2 = s + 1e-6;
            const cplx w2 = (std::abs(s2) < 1.0 && s2.imag() == 0.0)
                                ? std::sqrt(cplx(1.0) - s2 * s2)
                                : I_UNIT * std::sqrt(s2 * s2 - 1.0);
            const cplx a2 = rp(s2, w2) * std::exp(2.0 * I_UNIT * k0 * w2 * dp);
            const cplx b2 = rm(s2, w2) * std::exp(2.0 * I_UNIT * k0 * w2 * dm);
            den = 1.0 - a2 * b2;
            if (std::abs(den) < 1e-10) {
                throw ResonantDenominator("multiple-reflection denominator vanished persistently");
            }
            return (a2 + b2 + 2.0 * a2 * b2) / den;
        }
        return (a + b + 2.0 * a * b) / den;
    }
};

} // namespace

cplx stack_reflection(const PermittivityProfile& profile, int num_periods,
                      double wavenumber, double s) {
    std::vector<Slab> seq;
    seq.reserve(profile.slabs.size() * num_periods);
    for (int p = 0; p < num_periods; ++p)
        seq.insert(seq.end(), profile.slabs.begin(), profile.slabs.end());
    const cplx w0 = s < 1.0 ? cplx(std::sqrt(1.0 - s * s))
                            : I_UNIT * std::sqrt(cplx(s * s - 1.0));
    return parratt(seq, cplx(s * s) * wavenumber * wavenumber, w0, wavenumber);
}

DecayRateResult reflected_decay_rate(const ReflectFn& r_plus, const ReflectFn& r_minus,
                                     double d_plus, double d_minus, double quad_tol) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const Combiner num{r_plus, r_minus, d_plus, d_minus};

    // Radiative range s in (0,1): substitution s = sin t removes the
    // inverse-square-root edge at s = 1 (s^3/w * ds = sin^3 t dt).
    auto g1 = [&](double t) {
        const double s = std::sin(t), w = std::cos(t);
        return (num(s, w) * (s * s * s)).real();
    };
    double e1 = 0.0;
    const double I1 = GK::integrate(g1, 0.0, 0.5 * std::numbers::pi, 12, quad_tol, &e1);

    // Descent ray off the branch point: s = 1 + tau^2 e^{-2 i alpha}. The
    // factor ds/w = 2 e2 / sqrt(e2 (2 + tau^2 e2)) is taken in factored form
    // so the tau -> 0 cancellation is exact.
    const double alpha = 0.125 * std::numbers::pi;
    const double mu0 = 0.05;
    const cplx e2 = std::exp(-2.0 * I_UNIT * alpha);
    const double T = std::sqrt(mu0 / std::sin(2.0 * alpha));
    auto g2 = [&](double tau) {
        const cplx s = 1.0 + tau * tau * e2;
        const cplx w = I_UNIT * tau * std::sqrt(e2 * (2.0 + tau * tau * e2));
        const cplx pref = 2.0 * e2 / (I_UNIT * std::sqrt(e2 * (2.0 + tau * tau * e2)));
        return (s * s * s * num(s, w) * pref).real();
    };
    double e2err = 0.0;
    const double I2 = GK::integrate(g2, 0.0, T, 12, quad_tol, &e2err);

    // Horizontal section at depth mu below the axis out to where the
    // evanescent tail is < 1e-10; substitution sig = s0 + sinh v compresses it.
    const double mu = T * T * std::sin(2.0 * alpha);
    const double s0h = 1.0 + T * T * std::cos(2.0 * alpha);
    // cut where the slowest single-bounce term exp(-2 k0 dmin s) < 1e-13
    const double dmin = std::max(std::min(d_plus, d_minus), 1e-6);
    const double smax = std::max(30.0 / (2.0 * k0 * dmin), 3.0);
    const double vmax = std::asinh(smax - s0h);
    auto g3 = [&](double v) {
        const cplx s = s0h + std::sinh(v) - I_UNIT * mu;
        const cplx w = I_UNIT * std::sqrt(s * s - 1.0);
        return ((s * s * s / w) * num(s, w) * std::cosh(v)).real();
    };
    double e3 = 0.0;
    const double I3 = GK::integrate(g3, 0.0, vmax, 12, quad_tol, &e3);

    DecayRateResult res;
    res.propagating_part = 1.5 * I1;
    res.evanescent_part = 1.5 * (I2 + I3);
    res.gamma_normalized = 1.0 + res.propagating_part + res.evanescent_part;
    res.quad_error = 1.5 * (e1 + e2err + e3);
    return res;
}

DecayRateResult decay_rate_z(const DipoleContext& context, const EmitterStack& stack,
                             double quad_tol) {
    const std::vector<Slab> seq_l = side_sequence(stack, context.stack_left);
    const std::vector<Slab> seq_r = side_sequence(stack, context.stack_right);
    auto make_side = [](const std::vector<Slab>& seq) {
        return [&seq](cplx s, cplx w) { return parratt(seq, s * s * k0 * k0, w, k0); };
    };
    return reflected_decay_rate(make_side(seq_r), make_side(seq_l), stack.gap,
                                stack.gap, quad_tol);
}

double branching_ratio(const DipoleContext& context, const EmitterStack& stack_at_omega3,
                       double quad_tol) {
    return decay_rate_z(context, stack_at_omega3, quad_tol).gamma_normalized;
}

std::vector<BranchingRow> scan_branching(const LevelScheme& levels,
                                         const DriveConfig& drive,
                                         const CouplingStrength& coupling,
                                         const LatticeGeometry& geometry,
                                         const DipoleContext& context, double delta_b,
                                         const std::vector<double>& omega_a_grid,
                                         double quad_tol) {
    std::vector<BranchingRow> rows;
    rows.reserve(omega_a_grid.size());
    for (double oa : omega_a_grid) {
        BranchingRow row;
        row.omega_a = oa;
        try {
            DriveConfig d = drive;
            d.omega_a = oa;
            ProbeConfig p;
            p.delta_b = delta_b;
            const cplx chi = numeric_chi(levels, d, p, coupling);
            const EmitterStack stack = build_emitter_stack(geometry, chi);
            const DecayRateResult r = decay_rate_z(context, stack, quad_tol);
            row.gamma3 = r.gamma_normalized;
            row.xi = r.gamma_normalized; // gamma2 is the bare vacuum rate
            row.quad_error = r.quad_error;
        } catch (const std::exception& ex) {
            row.error = ex.what();
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace qmeta
