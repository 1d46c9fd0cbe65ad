#include "qmeta/atomic_response.hpp"
#include "qmeta/bloch_dispersion.hpp"
#include "qmeta/emitter_decay.hpp"
#include "qmeta/errors.hpp"
#include "qmeta/lattice_profile.hpp"
#include "qmeta/liouvillian_oracle.hpp"
#include "qmeta/output.hpp"
#include "qmeta/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace qmeta;
using nlohmann::json;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0; // 0: keep config value
    long long seed = -1;
    std::string format = "csv";
};

std::string out_path(const CliOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    return (std::filesystem::path(opt.out_dir) / name).string();
}

RunConfig load(const CliOptions& opt, bool contour_defaults = false) {
    json j = json::object();
    if (!opt.config_path.empty()) {
        std::ifstream f(opt.config_path);
        if (!f) throw ConfigError("cannot open config file: " + opt.config_path);
        try {
            f >> j;
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("config parse error: ") + ex.what());
        }
    }
    if (contour_defaults && !j.contains("lattice")) {
        // The transition geometry needs the wider site envelope and the finer
        // slab count; an explicit lattice section always wins.
        j["lattice"] = {{"gauss_w", 0.30}, {"slabs_per_period", 128}};
    }
    RunConfig cfg = parse_config(j);
    if (opt.workers > 0) cfg.workers = opt.workers;
    if (opt.seed >= 0) cfg.seed = static_cast<unsigned long long>(opt.seed);
    return cfg;
}

std::vector<std::string> config_header(const RunConfig& cfg, const std::string& units) {
    return {units, "config: " + to_json(cfg).dump()};
}

void emit_table(const CliOptions& opt, const RunConfig& cfg, const std::string& stem,
                const CsvTable& table) {
    if (opt.format == "json") {
        json j;
        j["config"] = to_json(cfg);
        j["columns"] = table.columns;
        json rows = json::array();
        for (const auto& r : table.rows) rows.push_back(r);
        j["rows"] = rows;
        write_file(out_path(opt, stem + ".json"), j.dump(2) + "\n");
    } else {
        write_file(out_path(opt, stem + ".csv"), render_csv(table));
    }
}

int cmd_susceptibility(const CliOptions& opt) {
    const RunConfig cfg = load(opt);
    const auto rows = run_susceptibility_scan(cfg);
    CsvTable t;
    t.header_comments = config_header(cfg, "units: delta_b in gamma0; permittivity dimensionless");
    t.columns = {"delta_b", "re_eps", "im_eps"};
    const bool oracle = cfg.drive.pump_rate > 0.0;
    if (oracle) {
        t.columns.push_back("re_eps_oracle");
        t.columns.push_back("im_eps_oracle");
    }
    PlotSeries sre{"Re eps", "#1f77b4", {}}, sim{"Im eps", "#d62728", {}};
    PlotSeries ore{"Re eps (oracle)", "#2ca02c", {}}, oim{"Im eps (oracle)", "#9467bd", {}};
    for (const auto& r : rows) {
        std::vector<std::string> row{format_num(r.delta_b), format_num(r.eps_formula.real()),
                                     format_num(r.eps_formula.imag())};
        sre.points.push_back({r.delta_b, r.eps_formula.real()});
        sim.points.push_back({r.delta_b, r.eps_formula.imag()});
        if (oracle) {
            row.push_back(format_num(r.eps_oracle->real()));
            row.push_back(format_num(r.eps_oracle->imag()));
            ore.points.push_back({r.delta_b, r.eps_oracle->real()});
            oim.points.push_back({r.delta_b, r.eps_oracle->imag()});
        }
        t.rows.push_back(row);
    }
    emit_table(opt, cfg, "susceptibility", t);
    PlotSpec plot;
    plot.title = "Permittivity vs probe detuning";
    plot.xlabel = "delta_b / gamma0";
    plot.ylabel = "eps";
    plot.series = {sre, sim};
    if (oracle) {
        plot.series.push_back(ore);
        plot.series.push_back(oim);
    }
    write_file(out_path(opt, "susceptibility.svg"), render_svg(plot));
    return 0;
}

int cmd_fom(const CliOptions& opt) {
    const RunConfig cfg = load(opt);
    const FomScanResult res = run_fom_scan(cfg);
    CsvTable t;
    t.header_comments = config_header(cfg, "units: omega_d, delta_b in gamma0; eta dimensionless");
    t.columns = {"omega_d", "delta_b", "eta", "gain_flag"};
    for (const auto& r : res.rows) {
        t.rows.push_back({format_num(r.omega_d), format_num(r.delta_b), format_num(r.eta),
                          r.gain ? "1" : "0"});
    }
    emit_table(opt, cfg, "fom", t);
    json summary;
    summary["config"] = to_json(cfg);
    summary["curves"] = json::array();
    for (const auto& s : res.summaries) {
        summary["curves"].push_back({{"omega_d", s.omega_d},
                                     {"peak_eta_finite", s.peak_eta_finite},
                                     {"diverged", s.any_diverged},
                                     {"half_max_bandwidth", s.half_max_bandwidth}});
    }
    write_file(out_path(opt, "fom_summary.json"), summary.dump(2) + "\n");
    PlotSpec plot;
    plot.title = "Figure of merit vs probe detuning";
    plot.xlabel = "delta_b / gamma0";
    plot.ylabel = "eta";
    plot.logy = true;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    int ci = 0;
    for (const auto& s : res.summaries) {
        PlotSeries ps{"omega_d=" + format_num(s.omega_d), colors[ci % 5], {}};
        for (const auto& r : res.rows) {
            if (r.omega_d == s.omega_d && std::isfinite(r.eta))
                ps.points.push_back({r.delta_b, r.eta});
        }
        plot.series.push_back(ps);
        ++ci;
    }
    write_file(out_path(opt, "fom.svg"), render_svg(plot));
    return 0;
}

const char* topology_name(Topology t) {
    switch (t) {
        case Topology::Open: return "OPEN";
        case Topology::Closed: return "CLOSED";
        default: return "INDETERMINATE";
    }
}

CsvTable contour_table(const RunConfig& cfg, const IsofrequencyContour& c) {
    CsvTable t;
    t.header_comments = config_header(cfg, "units: wavevectors in k0 = 2*pi/lambda_b");
    t.columns = {"ky_over_k0", "re_kz_over_k0", "im_kz_over_k0", "propagating"};
    for (const auto& p : c.points) {
        t.rows.push_back({format_num(p.ky / k0), format_num(p.kz.real() / k0),
                          format_num(p.kz.imag() / k0), p.propagating ? "1" : "0"});
    }
    return t;
}

CsvTable profile_table(const RunConfig& cfg, const PermittivityProfile& prof) {
    CsvTable t;
    t.header_comments = config_header(cfg, "units: z in lambda_b; permittivity dimensionless");
    t.columns = {"z_midpoint", "re_eps", "im_eps"};
    double z = 0.0;
    for (const auto& s : prof.slabs) {
        const double zm = z + 0.5 * s.thickness;
        t.rows.push_back({format_num(zm), format_num(s.eps_par.real()),
                          format_num(s.eps_par.imag())});
        z += s.thickness;
    }
    return t;
}

int cmd_contour(const CliOptions& opt) {
    const RunConfig cfg = load(opt, /*contour_defaults=*/true);
    const ContourRunResult res = run_contour(cfg);
    emit_table(opt, cfg, "contour_a", contour_table(cfg, res.contour_a));
    emit_table(opt, cfg, "epsilon_profile_a",
               profile_table(cfg, build_uniaxial_profile(cfg.lattice, res.chi_a)));
    json verdict;
    verdict["config"] = to_json(cfg);
    verdict["operating_point"] = {{"delta_b_star", res.op.delta_b_star},
                                  {"pump_rate_star", res.op.pump_rate_star},
                                  {"re_eps", res.op.epsilon_star.real()},
                                  {"im_eps", res.op.epsilon_star.imag()}};
    verdict["contour_a"] = {{"topology", topology_name(res.contour_a.topology)},
                            {"k_max_over_k0", res.contour_a.k_max_propagating / k0}};
    PlotSpec plot;
    plot.title = "Isofrequency contours";
    plot.xlabel = "ky / k0";
    plot.ylabel = "Re kz / k0";
    PlotSeries sa{"drive A", "#1f77b4", {}};
    for (const auto& p : res.contour_a.points)
        if (p.propagating) sa.points.push_back({p.ky / k0, p.kz.real() / k0});
    plot.series.push_back(sa);
    bool indeterminate = res.contour_a.topology == Topology::Indeterminate;
    if (res.has_b) {
        emit_table(opt, cfg, "contour_b", contour_table(cfg, res.contour_b));
        emit_table(opt, cfg, "epsilon_profile_b",
                   profile_table(cfg, build_uniaxial_profile(cfg.lattice, res.chi_b)));
        verdict["contour_b"] = {{"topology", topology_name(res.contour_b.topology)},
                                {"k_max_over_k0", res.contour_b.k_max_propagating / k0},
                                {"pump_rate", res.pump_b}};
        verdict["transition"] =
            res.contour_a.topology == Topology::Open &&
            res.contour_b.topology == Topology::Closed;
        PlotSeries sb{"drive B", "#d62728", {}};
        for (const auto& p : res.contour_b.points)
            if (p.propagating) sb.points.push_back({p.ky / k0, p.kz.real() / k0});
        plot.series.push_back(sb);
        indeterminate = indeterminate || res.contour_b.topology == Topology::Indeterminate;
    }
    write_file(out_path(opt, "contour_verdict.json"), verdict.dump(2) + "\n");
    write_file(out_path(opt, "contour.svg"), render_svg(plot));
    return indeterminate ? 3 : 0;
}

int cmd_decay(const CliOptions& opt) {
    const RunConfig cfg = load(opt);
    const DecayScanResult res = run_decay_scan(cfg);
    CsvTable t;
    t.header_comments = config_header(cfg, "units: omega_a in gamma0; xi, gamma3 normalized");
    t.columns = {"omega_a", "xi", "gamma3_over_gamma0", "quadrature_error", "error"};
    PlotSeries sx{"xi", "#1f77b4", {}};
    for (const auto& r : res.rows) {
        t.rows.push_back({format_num(r.omega_a), format_num(r.xi), format_num(r.gamma3),
                          format_num(r.quad_error), r.error});
        if (r.error.empty()) sx.points.push_back({r.omega_a, r.xi});
    }
    emit_table(opt, cfg, "branching", t);
    json summary;
    summary["config"] = to_json(cfg);
    summary["operating_point"] = {{"delta_b_star", res.op.delta_b_star},
                                  {"pump_rate_star", res.op.pump_rate_star}};
    summary["fold_change"] = res.fold_change;
    summary["has_xi1_crossing"] = res.has_crossing;
    if (res.has_crossing) summary["crossing_omega_a"] = res.crossing_omega_a;
    write_file(out_path(opt, "branching_summary.json"), summary.dump(2) + "\n");
    PlotSpec plot;
    plot.title = "Branching ratio vs drive strength";
    plot.xlabel = "omega_a / gamma0";
    plot.ylabel = "xi";
    PlotSeries unit{"xi = 1", "#7f7f7f", {}};
    if (!res.rows.empty()) {
        unit.points.push_back({res.rows.front().omega_a, 1.0});
        unit.points.push_back({res.rows.back().omega_a, 1.0});
    }
    plot.series = {sx, unit};
    write_file(out_path(opt, "branching.svg"), render_svg(plot));
    return 0;
}

int cmd_oracle_verify(const CliOptions& opt) {
    const RunConfig cfg = load(opt);
    json report;
    report["config"] = to_json(cfg);
    if (cfg.drive.pump_rate > 0.0) {
        // The closed form has no pump term, so equivalence is undefined here;
        // characterize the pump response instead.
        report["mode"] = "pump-characterization";
        json rows = json::array();
        for (int i = 0; i <= 10; ++i) {
            const double lam = cfg.drive.pump_rate * i / 10.0;
            DriveConfig d = cfg.drive;
            d.pump_rate = lam;
            const cplx chi = numeric_chi(cfg.levels, d, cfg.probe, cfg.coupling);
            rows.push_back({{"pump_rate", lam}, {"re_chi", chi.real()}, {"im_chi", chi.imag()}});
        }
        report["pump_response"] = rows;
        write_file(out_path(opt, "oracle_verify.json"), report.dump(2) + "\n");
        return 0;
    }
    const OracleVerifyResult res = run_oracle_verify(cfg, 100);
    report["mode"] = "equivalence";
    report["points"] = res.points;
    report["max_rel_dev"] = res.max_rel_dev;
    report["worst_point"] = {{"delta_b", res.worst_delta_b},
                             {"omega_a", res.worst_omega_a},
                             {"omega_d", res.worst_omega_d}};
    report["pass"] = res.max_rel_dev < 1e-6;
    write_file(out_path(opt, "oracle_verify.json"), report.dump(2) + "\n");
    if (res.max_rel_dev >= 1e-6) {
        std::cerr << report.dump(2) << "\n";
        return 1;
    }
    return 0;
}

int cmd_operating_point(const CliOptions& opt) {
    const RunConfig cfg = load(opt);
    const OperatingPoint op = find_operating_point(cfg.levels, cfg.drive, cfg.coupling,
                                                   cfg.search.delta_b_lo,
                                                   cfg.search.delta_b_hi);
    json j;
    j["config"] = to_json(cfg);
    j["delta_b_star"] = op.delta_b_star;
    j["pump_rate_star"] = op.pump_rate_star;
    j["re_chi"] = op.chi_star.real();
    j["im_chi"] = op.chi_star.imag();
    j["re_eps"] = op.epsilon_star.real();
    j["im_eps"] = op.epsilon_star.imag();
    write_file(out_path(opt, "operating_point.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-coherence lattice engine: susceptibility, band topology and "
                 "emitter decay scans"};
    app.require_subcommand(1);
    CliOptions opt;
    std::string command;
    for (const char* name : {"susceptibility-scan", "fom-scan", "contour", "decay-scan",
                             "oracle-verify", "operating-point"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config_path, "path to a JSON run configuration");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--workers", opt.workers, "worker thread count");
        sub->add_option("--seed", opt.seed, "seed for randomized verification grids");
        sub->add_option("--format", opt.format, "data format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&command, name] { command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (command == "susceptibility-scan") return cmd_susceptibility(opt);
        if (command == "fom-scan") return cmd_fom(opt);
        if (command == "contour") return cmd_contour(opt);
        if (command == "decay-scan") return cmd_decay(opt);
        if (command == "oracle-verify") return cmd_oracle_verify(opt);
        if (command == "operating-point") return cmd_operating_point(opt);
        std::cerr << "{\"error\":\"usage\",\"message\":\"no subcommand\"}\n";
        return 2;
    } catch (const ConfigError& ex) {
        std::cerr << "{\"error\":\"config\",\"message\":\"" << ex.what() << "\"}\n";
        return 2;
    } catch (const EngineError& ex) {
        std::cerr << "{\"error\":\"engine\",\"message\":\"" << ex.what() << "\"}\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "{\"error\":\"internal\",\"message\":\"" << ex.what() << "\"}\n";
        return 1;
    }
}
