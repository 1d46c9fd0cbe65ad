#pragma once

#include "qmeta/types.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qmeta {

struct ScanSettings {
    double delta_b_min = -1.41;
    double delta_b_max = -1.39;
    int delta_b_points = 801;
    std::vector<double> omega_d_list{0.020, 0.022, 0.024};
    double omega_a_min = 0.0;
    double omega_a_max = 1.3;
    int omega_a_points = 14;
    int ky_points = 256;
};

struct SearchSettings {
    double delta_b_lo = -1.4012;
    double delta_b_hi = -1.4003;
};

struct ToleranceSettings {
    double quad_tol = 1e-9;
    double evanescence_threshold = -1.0; // <0: use 1e-3 * zone edge
};

struct RunConfig {
    LevelScheme levels;
    DriveConfig drive;
    ProbeConfig probe;
    CouplingStrength coupling;
    LatticeGeometry lattice;
    DipoleContext dipole;
    DriveConfig drive_b{1.15, 0.0189, 0.0, -1.40073, 0.0}; // second drive pair
    ScanSettings scan;
    SearchSettings search;
    ToleranceSettings tol;
    int workers = 1;
    unsigned long long seed = 12345;
};

// Strict parse: unknown keys anywhere reject with ConfigError; missing keys
// take defaults. to_json emits every resolved value so outputs are
// self-describing.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_config_file(const std::string& path);

// Deterministic scan helper: f(i) for i in [0, n) on `workers` threads, with
// results stored by index by the caller (assembly order never depends on
// completion order). The first exception is rethrown after all threads join.
void parallel_for(int n, int workers, const std::function<void(int)>& f);

// --- scan orchestration ----------------------------------------------------

struct SusceptibilityRow {
    double delta_b;
    cplx eps_formula;
    std::optional<cplx> eps_oracle;
};
std::vector<SusceptibilityRow> run_susceptibility_scan(const RunConfig& cfg);

struct FomRow {
    double omega_d;
    double delta_b;
    double eta;
    bool gain;
    bool diverged;
};
struct FomSummary {
    double omega_d;
    double peak_eta_finite;
    bool any_diverged;
    double half_max_bandwidth; // width of the region with eta >= peak/2
};
struct FomScanResult {
    std::vector<FomRow> rows;
    std::vector<FomSummary> summaries;
};
FomScanResult run_fom_scan(const RunConfig& cfg);

struct ContourRunResult {
    OperatingPoint op;
    cplx chi_a;
    cplx chi_b;
    double pump_b; // re-solved pump for the second drive pair
    IsofrequencyContour contour_a;
    IsofrequencyContour contour_b;
    bool has_b = false;
};
ContourRunResult run_contour(const RunConfig& cfg);

struct DecayScanResult {
    OperatingPoint op;
    std::vector<BranchingRow> rows;
    bool has_crossing = false;
    double crossing_omega_a = 0.0;
    double fold_change = 0.0; // max(xi_max/xi_0, xi_0/xi_min)
};
DecayScanResult run_decay_scan(const RunConfig& cfg);

struct OracleVerifyResult {
    double max_rel_dev = 0.0;
    double worst_delta_b = 0.0;
    double worst_omega_a = 0.0;
    double worst_omega_d = 0.0;
    int points = 0;
};
OracleVerifyResult run_oracle_verify(const RunConfig& cfg, int points = 100);

} // namespace qmeta
