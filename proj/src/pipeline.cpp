#include "qmeta/pipeline.hpp"

#include "qmeta/atomic_response.hpp"
#include "qmeta/bloch_dispersion.hpp"
#include "qmeta/emitter_decay.hpp"
#include "qmeta/errors.hpp"
#include "qmeta/lattice_profile.hpp"
#include "qmeta/liouvillian_oracle.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

namespace qmeta {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& scope) {
    if (!j.is_object()) throw ConfigError("config section '" + scope + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError("unknown config key '" + scope + "." + it.key() + "'");
    }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

void parse_levels(const json& j, LevelScheme& l) {
    check_keys(j, {"gamma_a", "gamma_b", "gamma_d"}, "levels");
    get_if(j, "gamma_a", l.gamma_a);
    get_if(j, "gamma_b", l.gamma_b);
    get_if(j, "gamma_d", l.gamma_d);
    if (l.gamma_a < 0 || l.gamma_b < 0 || l.gamma_d < 0)
        throw ConfigError("levels: decay rates must be >= 0");
}

void parse_drive(const json& j, DriveConfig& d, const std::string& scope) {
    check_keys(j, {"omega_a", "omega_d", "delta_a", "delta_d", "pump_rate"}, scope);
    get_if(j, "omega_a", d.omega_a);
    get_if(j, "omega_d", d.omega_d);
    get_if(j, "delta_a", d.delta_a);
    get_if(j, "delta_d", d.delta_d);
    get_if(j, "pump_rate", d.pump_rate);
    if (d.omega_a < 0 || d.omega_d < 0 || d.pump_rate < 0)
        throw ConfigError(scope + ": omega_a, omega_d, pump_rate must be >= 0");
}

} // namespace

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    check_keys(j,
               {"levels", "drive", "drive_b", "probe", "coupling", "lattice", "dipole",
                "scan", "search", "tolerances", "workers", "seed"},
               "root");
    if (j.contains("levels")) parse_levels(j.at("levels"), cfg.levels);
    if (j.contains("drive")) parse_drive(j.at("drive"), cfg.drive, "drive");
    if (j.contains("drive_b")) parse_drive(j.at("drive_b"), cfg.drive_b, "drive_b");
    if (j.contains("probe")) {
        const json& p = j.at("probe");
        check_keys(p, {"delta_b", "omega_b"}, "probe");
        get_if(p, "delta_b", cfg.probe.delta_b);
        get_if(p, "omega_b", cfg.probe.omega_b);
        if (!(cfg.probe.omega_b > 0)) throw ConfigError("probe.omega_b must be > 0");
    }
    if (j.contains("coupling")) {
        const json& c = j.at("coupling");
        check_keys(c, {"zeta"}, "coupling");
        get_if(c, "zeta", cfg.coupling.zeta);
        if (!(cfg.coupling.zeta >= 5.0 && cfg.coupling.zeta <= 30.0))
            throw ConfigError("coupling.zeta must lie in [5, 30]");
    }
    if (j.contains("lattice")) {
        const json& l = j.at("lattice");
        check_keys(l, {"period_a", "gauss_w", "slabs_per_period", "num_periods"}, "lattice");
        get_if(l, "period_a", cfg.lattice.period_a);
        get_if(l, "gauss_w", cfg.lattice.gauss_w);
        get_if(l, "slabs_per_period", cfg.lattice.slabs_per_period);
        get_if(l, "num_periods", cfg.lattice.num_periods);
        if (!(cfg.lattice.period_a > 0) || !(cfg.lattice.gauss_w > 0) ||
            cfg.lattice.gauss_w >= 0.5 || cfg.lattice.slabs_per_period < 16 ||
            cfg.lattice.num_periods < 1)
            throw ConfigError("lattice: need period_a > 0, 0 < gauss_w < 0.5, "
                              "slabs_per_period >= 16, num_periods >= 1");
    }
    if (j.contains("dipole")) {
        const json& d = j.at("dipole");
        check_keys(d, {"position", "stack_left", "stack_right"}, "dipole");
        get_if(d, "position", cfg.dipole.position);
        get_if(d, "stack_left", cfg.dipole.stack_left);
        get_if(d, "stack_right", cfg.dipole.stack_right);
        if (cfg.dipole.stack_left < 1 || cfg.dipole.stack_right < 1 ||
            cfg.dipole.position < 0 || cfg.dipole.position >= 1)
            throw ConfigError("dipole: stacks >= 1, position in [0, 1)");
    }
    if (j.contains("scan")) {
        const json& s = j.at("scan");
        check_keys(s,
                   {"delta_b_min", "delta_b_max", "delta_b_points", "omega_d_list",
                    "omega_a_min", "omega_a_max", "omega_a_points", "ky_points"},
                   "scan");
        get_if(s, "delta_b_min", cfg.scan.delta_b_min);
        get_if(s, "delta_b_max", cfg.scan.delta_b_max);
        get_if(s, "delta_b_points", cfg.scan.delta_b_points);
        get_if(s, "omega_d_list", cfg.scan.omega_d_list);
        get_if(s, "omega_a_min", cfg.scan.omega_a_min);
        get_if(s, "omega_a_max", cfg.scan.omega_a_max);
        get_if(s, "omega_a_points", cfg.scan.omega_a_points);
        get_if(s, "ky_points", cfg.scan.ky_points);
        if (cfg.scan.delta_b_points < 2 || cfg.scan.omega_a_points < 1 ||
            cfg.scan.ky_points < 32 || !(cfg.scan.delta_b_min < cfg.scan.delta_b_max))
            throw ConfigError("scan: empty or inverted grid");
    }
    if (j.contains("search")) {
        const json& s = j.at("search");
        check_keys(s, {"delta_b_lo", "delta_b_hi"}, "search");
        get_if(s, "delta_b_lo", cfg.search.delta_b_lo);
        get_if(s, "delta_b_hi", cfg.search.delta_b_hi);
        if (!(cfg.search.delta_b_lo < cfg.search.delta_b_hi))
            throw ConfigError("search: window is empty");
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        check_keys(t, {"quad_tol", "evanescence_threshold"}, "tolerances");
        get_if(t, "quad_tol", cfg.tol.quad_tol);
        get_if(t, "evanescence_threshold", cfg.tol.evanescence_threshold);
        if (!(cfg.tol.quad_tol > 0)) throw ConfigError("tolerances.quad_tol must be > 0");
    }
    get_if(j, "workers", cfg.workers);
    get_if(j, "seed", cfg.seed);
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    return cfg;
}

json to_json(const RunConfig& cfg) {
    json j;
    j["levels"] = {{"gamma_a", cfg.levels.gamma_a},
                   {"gamma_b", cfg.levels.gamma_b},
                   {"gamma_d", cfg.levels.gamma_d}};
    auto drive_json = [](const DriveConfig& d) {
        return json{{"omega_a", d.omega_a},
                    {"omega_d", d.omega_d},
                    {"delta_a", d.delta_a},
                    {"delta_d", d.delta_d},
                    {"pump_rate", d.pump_rate}};
    };
    j["drive"] = drive_json(cfg.drive);
    j["drive_b"] = drive_json(cfg.drive_b);
    j["probe"] = {{"delta_b", cfg.probe.delta_b}, {"omega_b", cfg.probe.omega_b}};
    j["coupling"] = {{"zeta", cfg.coupling.zeta}};
    j["lattice"] = {{"period_a", cfg.lattice.period_a},
                    {"gauss_w", cfg.lattice.gauss_w},
                    {"slabs_per_period", cfg.lattice.slabs_per_period},
                    {"num_periods", cfg.lattice.num_periods}};
    j["dipole"] = {{"position", cfg.dipole.position},
                   {"stack_left", cfg.dipole.stack_left},
                   {"stack_right", cfg.dipole.stack_right}};
    j["scan"] = {{"delta_b_min", cfg.scan.delta_b_min},
                 {"delta_b_max", cfg.scan.delta_b_max},
                 {"delta_b_points", cfg.scan.delta_b_points},
                 {"omega_d_list", cfg.scan.omega_d_list},
                 {"omega_a_min", cfg.scan.omega_a_min},
                 {"omega_a_max", cfg.scan.omega_a_max},
                 {"omega_a_points", cfg.scan.omega_a_points},
                 {"ky_points", cfg.scan.ky_points}};
    j["search"] = {{"delta_b_lo", cfg.search.delta_b_lo},
                   {"delta_b_hi", cfg.search.delta_b_hi}};
    j["tolerances"] = {{"quad_tol", cfg.tol.quad_tol},
                       {"evanescence_threshold", cfg.tol.evanescence_threshold}};
    j["workers"] = cfg.workers;
    j["seed"] = cfg.seed;
    return j;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("config parse error: ") + ex.what());
    }
    return parse_config(j);
}

void parallel_for(int n, int workers, const std::function<void(int)>& f) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::min(workers, n);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<SusceptibilityRow> run_susceptibility_scan(const RunConfig& cfg) {
    const int n = cfg.scan.delta_b_points;
    std::vector<SusceptibilityRow> rows(n);
    parallel_for(n, cfg.workers, [&](int i) {
        const double db = cfg.scan.delta_b_min +
                          (cfg.scan.delta_b_max - cfg.scan.delta_b_min) * i / (n - 1);
        SusceptibilityRow row;
        row.delta_b = db;
        const ComplexRelaxationSet rates =
            complex_relaxation(cfg.levels, cfg.drive.delta_a, db, cfg.drive.delta_d);
        row.eps_formula = epsilon_from_chi(
            chi_ddr(cfg.coupling, rates, cfg.drive.omega_a, cfg.drive.omega_d));
        if (cfg.drive.pump_rate > 0.0) {
            ProbeConfig p = cfg.probe;
            p.delta_b = db;
            row.eps_oracle =
                epsilon_from_chi(numeric_chi(cfg.levels, cfg.drive, p, cfg.coupling));
        }
        rows[i] = row;
    });
    return rows;
}

FomScanResult run_fom_scan(const RunConfig& cfg) {
    FomScanResult out;
    const int n = cfg.scan.delta_b_points;
    const double step = (cfg.scan.delta_b_max - cfg.scan.delta_b_min) / (n - 1);
    for (double od : cfg.scan.omega_d_list) {
        std::vector<FomRow> rows(n);
        parallel_for(n, cfg.workers, [&](int i) {
            const double db = cfg.scan.delta_b_min + step * i;
            DriveConfig d = cfg.drive;
            d.omega_d = od;
            cplx eps;
            if (d.pump_rate > 0.0) {
                ProbeConfig p = cfg.probe;
                p.delta_b = db;
                eps = epsilon_from_chi(numeric_chi(cfg.levels, d, p, cfg.coupling));
            } else {
                const ComplexRelaxationSet rates =
                    complex_relaxation(cfg.levels, d.delta_a, db, d.delta_d);
                eps = epsilon_from_chi(chi_ddr(cfg.coupling, rates, d.omega_a, d.omega_d));
            }
            const FigureOfMerit fom = figure_of_merit(eps);
            rows[i] = {od, db, fom.eta, fom.gain_flag, std::isinf(fom.eta)};
        });
        FomSummary s;
        s.omega_d = od;
        s.peak_eta_finite = 0.0;
        s.any_diverged = false;
        for (const FomRow& r : rows) {
            if (r.diverged)
                s.any_diverged = true;
            else
                s.peak_eta_finite = std::max(s.peak_eta_finite, r.eta);
        }
        int above = 0;
        for (const FomRow& r : rows) {
            if (r.diverged || r.eta >= 0.5 * s.peak_eta_finite) ++above;
        }
        s.half_max_bandwidth = above * step;
        out.summaries.push_back(s);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }
    return out;
}

ContourRunResult run_contour(const RunConfig& cfg) {
    ContourRunResult res;
    res.op = find_operating_point(cfg.levels, cfg.drive, cfg.coupling,
                                  cfg.search.delta_b_lo, cfg.search.delta_b_hi);
    res.chi_a = res.op.chi_star;

    const double edge = std::numbers::pi / cfg.lattice.period_a;
    std::vector<double> ky_grid(cfg.scan.ky_points);
    for (int i = 0; i < cfg.scan.ky_points; ++i) {
        ky_grid[i] = edge * 0.999999 * i / (cfg.scan.ky_points - 1);
    }
    const PermittivityProfile prof_a = build_uniaxial_profile(cfg.lattice, res.chi_a);
    res.contour_a =
        isofrequency_contour(prof_a, k0, ky_grid, cfg.tol.evanescence_threshold);

    if (cfg.drive_b.omega_a > 0.0 || cfg.drive_b.omega_d > 0.0) {
        res.has_b = true;
        res.pump_b = solve_pump_rate(cfg.levels, cfg.drive_b, cfg.coupling,
                                     res.op.delta_b_star);
        DriveConfig db = cfg.drive_b;
        db.pump_rate = res.pump_b > 0.0 ? res.pump_b : 0.0;
        ProbeConfig p = cfg.probe;
        p.delta_b = res.op.delta_b_star;
        res.chi_b = numeric_chi(cfg.levels, db, p, cfg.coupling);
        const PermittivityProfile prof_b = build_uniaxial_profile(cfg.lattice, res.chi_b);
        res.contour_b =
            isofrequency_contour(prof_b, k0, ky_grid, cfg.tol.evanescence_threshold);
    }
    return res;
}

DecayScanResult run_decay_scan(const RunConfig& cfg) {
    DecayScanResult res;
    res.op = find_operating_point(cfg.levels, cfg.drive, cfg.coupling,
                                  cfg.search.delta_b_lo, cfg.search.delta_b_hi);
    std::vector<double> grid(cfg.scan.omega_a_points);
    for (int i = 0; i < cfg.scan.omega_a_points; ++i) {
        grid[i] = cfg.scan.omega_a_points == 1
                      ? cfg.scan.omega_a_min
                      : cfg.scan.omega_a_min + (cfg.scan.omega_a_max - cfg.scan.omega_a_min) *
                                                   i / (cfg.scan.omega_a_points - 1);
    }
    DriveConfig d = cfg.drive;
    d.pump_rate = res.op.pump_rate_star;
    res.rows = scan_branching(cfg.levels, d, cfg.coupling, cfg.lattice, cfg.dipole,
                              res.op.delta_b_star, grid, cfg.tol.quad_tol);
    double xi0 = 0.0, xi_min = 0.0, xi_max = 0.0;
    bool have = false;
    const BranchingRow* prev = nullptr;
    for (const BranchingRow& r : res.rows) {
        if (!r.error.empty()) {
            prev = nullptr;
            continue;
        }
        if (!have) {
            xi_min = xi_max = r.xi;
            have = true;
        }
        xi_min = std::min(xi_min, r.xi);
        xi_max = std::max(xi_max, r.xi);
        if (r.omega_a == res.rows.front().omega_a) xi0 = r.xi;
        if (prev && (prev->xi - 1.0) * (r.xi - 1.0) < 0.0 && !res.has_crossing) {
            // linear interpolation of the xi = 1 crossing
            const double t = (1.0 - prev->xi) / (r.xi - prev->xi);
            res.crossing_omega_a = prev->omega_a + t * (r.omega_a - prev->omega_a);
            res.has_crossing = true;
        }
        prev = &r;
    }
    if (have && xi0 > 0.0 && xi_min > 0.0) {
        res.fold_change = std::max(xi_max / xi0, xi0 / xi_min);
    }
    return res;
}

OracleVerifyResult run_oracle_verify(const RunConfig& cfg, int points) {
    OracleVerifyResult res;
    res.points = points;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int done = 0;
    while (done < points) {
        const double db = -2.0 + 4.0 * u01(rng);
        const double oa = 0.2 + 1.8 * u01(rng);
        // omega_d is bounded away from zero: below ~1e-3 the |d> recycling
        // rate (~ omega_d^2) falls under the steady-state kernel gap and the
        // undriven-trap degeneracy takes over
        const double od = 0.002 + 0.048 * u01(rng);
        try {
            const ComplexRelaxationSet rates =
                complex_relaxation(cfg.levels, cfg.drive.delta_a, db, cfg.drive.delta_d);
            const cplx formula = chi_ddr(cfg.coupling, rates, oa, od);
            DriveConfig d = cfg.drive;
            d.omega_a = oa;
            d.omega_d = od;
            d.pump_rate = 0.0;
            ProbeConfig p;
            p.delta_b = db;
            p.omega_b = 1e-4;
            const cplx oracle = numeric_chi(cfg.levels, d, p, cfg.coupling);
            const double dev = std::abs(formula - oracle) / std::abs(formula);
            if (dev > res.max_rel_dev) {
                res.max_rel_dev = dev;
                res.worst_delta_b = db;
                res.worst_omega_a = oa;
                res.worst_omega_d = od;
            }
            ++done;
        } catch (const DegenerateDenominator&) {
            // resonance pole on the random draw: skip deterministically
        } catch (const DegenerateSteadyState&) {
            // near-trap draw whose kernel gap closed: skip deterministically
        }
    }
    return res;
}

} // namespace qmeta
