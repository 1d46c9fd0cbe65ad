#include "qmeta/bloch_dispersion.hpp"

#include "qmeta/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qmeta {

namespace {

constexpr cplx I_UNIT{0.0, 1.0};

// Principal layer wavevector: Im >= 0, and Re >= 0 on the real axis.
cplx branch_kz(cplx kz2) {
    if (std::abs(kz2) < 1e-14) {
        throw BranchAmbiguity("layer wavevector at a branch-point degeneracy");
    }
    cplx kz = std::sqrt(kz2);
    if (kz.imag() < 0.0) kz = -kz;
    if (kz.imag() == 0.0 && kz.real() < 0.0) kz = -kz;
    return kz;
}

Matrix2c characteristic(cplx kz, cplx q, double t) {
    const cplx c = std::cos(kz * t);
    const cplx s = std::sin(kz * t);
    Matrix2c M;
    M << c, -I_UNIT * s / q, -I_UNIT * q * s, c;
    return M;
}

} // namespace

Matrix2c layer_matrix(cplx eps, double thickness, double wavenumber, double ky) {
    const cplx kz = branch_kz(eps * wavenumber * wavenumber - ky * ky);
    return characteristic(kz, kz / (eps * wavenumber), thickness);
}

Matrix2c layer_matrix_slab(const Slab& slab, double wavenumber, double ky) {
    const cplx kz = branch_kz(slab.eps_par * wavenumber * wavenumber -
                              slab.eps_par * slab.inv_ezz * ky * ky);
    return characteristic(kz, kz / (slab.eps_par * wavenumber), slab.thickness);
}

Matrix2c period_matrix(const PermittivityProfile& profile, double wavenumber, double ky) {
    Matrix2c M = Matrix2c::Identity();
    for (const Slab& s : profile.slabs) {
        M = layer_matrix_slab(s, wavenumber, ky) * M;
    }
    return M;
}

cplx bloch_kz(const Matrix2c& M, double period) {
    const cplx tr2 = 0.5 * M.trace();
    cplx w = std::acos(tr2);
    if (w.imag() < 0.0) w = -w;
    if (w.real() < 0.0) w = cplx(-w.real(), w.imag());
    return w / period;
}

IsofrequencyContour isofrequency_contour(const PermittivityProfile& profile,
                                         double wavenumber,
                                         const std::vector<double>& ky_grid,
                                         double evanescence_threshold) {
    IsofrequencyContour c;
    c.period = profile.period;
    const double edge = std::numbers::pi / profile.period;
    c.evanescence_threshold =
        evanescence_threshold > 0.0 ? evanescence_threshold : 1e-3 * edge;

    auto kz_at = [&](double ky) {
        for (int attempt = 0;; ++attempt) {
            try {
                return bloch_kz(period_matrix(profile, wavenumber, ky), profile.period);
            } catch (const BranchAmbiguity&) {
                if (attempt >= 4) throw;
                ky += 1e-9 * edge; // nudge off the degeneracy
            }
        }
    };

    c.points.reserve(ky_grid.size());
    for (double ky : ky_grid) {
        BlochPoint p;
        p.ky = ky;
        p.kz = kz_at(ky);
        p.propagating = p.kz.imag() < c.evanescence_threshold;
        c.points.push_back(p);
    }

    double kmax = 0.0;
    for (const BlochPoint& p : c.points) {
        if (p.propagating) kmax = std::max(kmax, std::hypot(p.ky, p.kz.real()));
    }

    // Refine the first propagating -> evanescent flip along the grid.
    std::size_t idx = c.points.size();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        if (!c.points[i].propagating) {
            idx = i;
            break;
        }
    }
    if (idx != c.points.size() && idx > 0) {
        double lo = c.points[idx - 1].ky, hi = c.points[idx].ky;
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (kz_at(mid).imag() < c.evanescence_threshold)
                lo = mid;
            else
                hi = mid;
        }
        const cplx kzc = kz_at(lo);
        c.has_transition = true;
        c.transition_ky = lo;
        c.transition_re_kz = kzc.real();
        kmax = std::max(kmax, std::hypot(lo, kzc.real()));
    }
    c.k_max_propagating = kmax;
    c.topology = classify_topology(c);
    return c;
}

Topology classify_topology(const IsofrequencyContour& contour) {
    if (contour.points.size() < 32 || contour.points.empty() ||
        !contour.points.front().propagating) {
        return Topology::Indeterminate;
    }
    const double edge = std::numbers::pi / contour.period;
    if (!contour.has_transition) {
        // The band propagates across the entire transverse grid: the contour
        // never closes onto the ky axis inside the zone, i.e. it is open.
        return Topology::Open;
    }
    const double frac = contour.transition_re_kz / edge;
    if (frac < 0.05) return Topology::Closed;
    if (frac > 0.95) return Topology::Open;
    return Topology::Indeterminate;
}

} // namespace qmeta
