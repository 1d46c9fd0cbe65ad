#include "qmeta/lattice_profile.hpp"

#include "qmeta/atomic_response.hpp"
#include "qmeta/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

namespace qmeta {

namespace {

// Envelope level at which the density is treated as exactly zero; defines the
// vacuum gap seen by the emitter. An analytic cut (rather than a per-slab
// threshold) keeps the gap width a smooth function of the drive parameters.
constexpr double ENV_CUT = 1e-9;

struct Gauss20 {
    double x[20];
    double w[20];
    Gauss20() {
        using G = boost::math::quadrature::gauss<double, 20>;
        const auto& ab = G::abscissa(); // non-negative half, ascending
        const auto& wt = G::weights();
        for (int i = 0; i < 10; ++i) {
            x[i] = -ab[9 - i];
            w[i] = wt[9 - i];
            x[10 + i] = ab[i];
            w[10 + i] = wt[i];
        }
    }
};

const Gauss20& gauss20() {
    static const Gauss20 g;
    return g;
}

cplx eps_raw(const LatticeGeometry& g, cplx chi_peak, double z) {
    const double w_abs = g.gauss_w * g.period_a;
    const cplx chi = chi_profile(chi_peak, z, 0.5 * g.period_a, w_abs);
    return epsilon_at(local_field(chi));
}

// Re eps crossing inside [z0, z1] by bisection (signs at the ends differ).
double crossing_z(const LatticeGeometry& g, cplx chi_peak, double z0, double z1) {
    double f0 = eps_raw(g, chi_peak, z0).real();
    double lo = z0, hi = z1;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = eps_raw(g, chi_peak, mid).real();
        if ((f0 < 0.0) == (fm < 0.0)) {
            lo = mid;
            f0 = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

cplx gl_integrate(const LatticeGeometry& g, cplx chi_peak, double z0, double z1,
                  bool inverse, double zc, double depsdz) {
    const auto& q = gauss20();
    const double mid = 0.5 * (z0 + z1), half = 0.5 * (z1 - z0);
    cplx acc = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double z = mid + half * q.x[i];
        const cplx e = eps_raw(g, chi_peak, z);
        cplx v = inverse ? 1.0 / e : e;
        if (depsdz != 0.0) v -= 1.0 / (depsdz * (z - zc)); // pole subtraction
        acc += q.w[i] * v;
    }
    return acc * half;
}

// The lossless limit of the crossing-slab inverse moment is discontinuous in
// Im eps: any nonzero loss switches on an O(i pi / eps') absorption term that
// a real-eigenvalue band treatment must not contain. Imaginary parts at the
// level of root-finder noise therefore snap to zero before profile building;
// genuinely lossy media (relative Im above 1e-6) pass through unchanged.
cplx snap_lossless(cplx chi) {
    if (std::abs(chi.imag()) < 1e-6 * std::abs(chi)) return cplx(chi.real(), 0.0);
    return chi;
}

} // namespace

cplx chi_profile(cplx chi_peak, double z, double z_alpha, double w) {
    const double u = (z - z_alpha) / w;
    return chi_peak * std::exp(-u * u);
}

cplx epsilon_profile_at(const LatticeGeometry& geometry, cplx chi_peak, double z) {
    return eps_raw(geometry, chi_peak, z);
}

PermittivityProfile build_profile(const LatticeGeometry& geometry, cplx chi_peak) {
    chi_peak = snap_lossless(chi_peak);
    PermittivityProfile prof;
    prof.period = geometry.period_a;
    const int n = geometry.slabs_per_period;
    const double dz = geometry.period_a / n;
    const double w_abs = geometry.gauss_w * geometry.period_a;
    prof.slabs.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double z = (k + 0.5) * dz;
        const cplx chi = chi_profile(chi_peak, z, 0.5 * geometry.period_a, w_abs);
        cplx eps = 1.0;
        if (std::abs(chi) >= 1e-12 * std::max(std::abs(chi_peak), 1.0)) {
            eps = epsilon_at(local_field(chi));
        }
        prof.slabs.push_back({eps, 1.0 / eps, dz});
    }
    return prof;
}

Slab slab_moments(const LatticeGeometry& geometry, cplx chi_peak, double z0, double z1) {
    chi_peak = snap_lossless(chi_peak);
    Slab s;
    s.thickness = z1 - z0;
    s.eps_par = gl_integrate(geometry, chi_peak, z0, z1, false, 0.0, 0.0) / (z1 - z0);
    const double f0 = eps_raw(geometry, chi_peak, z0).real();
    const double f1 = eps_raw(geometry, chi_peak, z1).real();
    if (f0 * f1 < 0.0) {
        // Principal-value mean of 1/eps across the Re eps = 0 crossing: subtract
        // the linearized real pole, integrate the regular remainder on each
        // side, and add the pole's PV integral analytically. This is the
        // real-band convention: the crossing contributes no anomalous
        // absorption, matching a real-eigenvalue treatment of the lossless
        // lattice.
        const double zc = crossing_z(geometry, chi_peak, z0, z1);
        const double h = 1e-6 * (z1 - z0);
        const double depsdz = (eps_raw(geometry, chi_peak, zc + h).real() -
                               eps_raw(geometry, chi_peak, zc - h).real()) /
                              (2.0 * h);
        const cplx reg = gl_integrate(geometry, chi_peak, z0, zc, true, zc, depsdz) +
                         gl_integrate(geometry, chi_peak, zc, z1, true, zc, depsdz);
        const double pv = std::log(std::abs(z1 - zc) / std::abs(zc - z0)) / depsdz;
        s.inv_ezz = (reg + pv) / (z1 - z0);
    } else {
        s.inv_ezz = gl_integrate(geometry, chi_peak, z0, z1, true, 0.0, 0.0) / (z1 - z0);
    }
    return s;
}

PermittivityProfile build_uniaxial_profile(const LatticeGeometry& geometry,
                                           cplx chi_peak) {
    PermittivityProfile prof;
    prof.period = geometry.period_a;
    const int n = geometry.slabs_per_period;
    const double dz = geometry.period_a / n;
    for (int k = 0; k < n; ++k) {
        const double z0 = k * dz, z1 = (k + 1) * dz;
        const double f0 = eps_raw(geometry, chi_peak, z0).real();
        const double f1 = eps_raw(geometry, chi_peak, z1).real();
        const int sub = (f0 * f1 < 0.0) ? 8 : 1;
        for (int j = 0; j < sub; ++j) {
            const double s0 = z0 + (z1 - z0) * j / sub;
            const double s1 = z0 + (z1 - z0) * (j + 1) / sub;
            prof.slabs.push_back(slab_moments(geometry, chi_peak, s0, s1));
        }
    }
    return prof;
}

EmitterStack build_emitter_stack(const LatticeGeometry& geometry, cplx chi_peak) {
    chi_peak = snap_lossless(chi_peak);
    const double a = geometry.period_a;
    const double w_abs = geometry.gauss_w * a;
    const double half = w_abs * std::sqrt(std::log(1.0 / ENV_CUT));
    const double zcut = 0.5 * a - half;
    if (!(zcut > 0.0)) {
        throw DipoleInsideMedium("site envelope leaves no vacuum gap at the period boundary");
    }
    if (std::abs(eps_raw(geometry, chi_peak, 0.0) - 1.0) >= 1e-6) {
        throw DipoleInsideMedium("permittivity at the emitter position deviates from vacuum");
    }
    EmitterStack st;
    st.gap = zcut;
    const int n = geometry.slabs_per_period;
    const double dz = (a - 2.0 * zcut) / n;
    st.core.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double z0 = zcut + k * dz;
        st.core.push_back(slab_moments(geometry, chi_peak, z0, z0 + dz));
    }
    return st;
}

} // namespace qmeta
