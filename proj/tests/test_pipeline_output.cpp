#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmeta/errors.hpp"
#include "qmeta/output.hpp"
#include "qmeta/pipeline.hpp"

#include <atomic>

using namespace qmeta;
using nlohmann::json;

TEST_CASE("config parsing") {
    SUBCASE("empty object yields the documented defaults") {
        const RunConfig cfg = parse_config(json::object());
        CHECK(cfg.levels.gamma_b == 0.62);
        CHECK(cfg.drive.omega_a == 1.3);
        CHECK(cfg.drive_b.omega_a == 1.15);
        CHECK(cfg.lattice.period_a == 0.25);
        CHECK(cfg.coupling.zeta == 15.0);
        CHECK(cfg.workers == 1);
    }
    SUBCASE("unknown keys are rejected anywhere") {
        CHECK_THROWS_AS(parse_config(json{{"bogus", 1}}), ConfigError);
        CHECK_THROWS_AS(parse_config(json{{"drive", {{"omega_q", 1.0}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(json{{"lattice", {{"width", 0.1}}}}), ConfigError);
    }
    SUBCASE("invariant violations are rejected") {
        CHECK_THROWS_AS(parse_config(json{{"levels", {{"gamma_a", -1.0}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(json{{"coupling", {{"zeta", 50.0}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(json{{"lattice", {{"gauss_w", 0.6}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(json{{"scan", {{"delta_b_points", 1}}}}), ConfigError);
        CHECK_THROWS_AS(parse_config(json{{"workers", 0}}), ConfigError);
    }
    SUBCASE("round trip through to_json is stable") {
        RunConfig cfg = parse_config(json::object());
        cfg.drive.omega_d = 0.02;
        cfg.scan.ky_points = 64;
        const RunConfig back = parse_config(to_json(cfg));
        CHECK(to_json(back) == to_json(cfg));
    }
}

TEST_CASE("number formatting is fixed-width snprintf") {
    CHECK(format_num(0.1) == "0.1");
    CHECK(format_num(-1.40083) == "-1.40083");
    CHECK(format_num(1.0 / 3.0) == "0.333333333333");
    CHECK(format_num(1e-12) == "1e-12");
}

TEST_CASE("csv rendering") {
    CsvTable t;
    t.header_comments = {"units: test", "config: {}"};
    t.columns = {"a", "b"};
    t.rows = {{"1", "2"}, {"3", "4"}};
    CHECK(render_csv(t) == "# units: test\n# config: {}\na,b\n1,2\n3,4\n");
}

TEST_CASE("svg rendering is deterministic and standalone") {
    PlotSpec spec;
    spec.title = "t";
    spec.xlabel = "x";
    spec.ylabel = "y";
    spec.series = {{"s", "#1f77b4", {{0.0, 1.0}, {1.0, 2.0}, {2.0, 1.5}}}};
    const std::string a = render_svg(spec);
    CHECK(a == render_svg(spec));
    CHECK(a.find("<svg xmlns=") != std::string::npos);
    CHECK(a.find("http://") == a.find("http://www.w3.org/2000/svg"));
}

TEST_CASE("parallel_for covers every index exactly once and rethrows") {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 4, [&](int i) { hits[i].fetch_add(1); });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, 4,
                                 [](int i) {
                                     if (i == 7) throw EngineError("boom");
                                 }),
                    EngineError);
}

TEST_CASE("scan assembly does not depend on the worker count") {
    RunConfig cfg = parse_config(json::object());
    cfg.scan.delta_b_min = -1.41;
    cfg.scan.delta_b_max = -1.39;
    cfg.scan.delta_b_points = 41;
    cfg.workers = 1;
    const auto serial = run_susceptibility_scan(cfg);
    cfg.workers = 4;
    const auto parallel = run_susceptibility_scan(cfg);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].delta_b == parallel[i].delta_b);
        CHECK(serial[i].eps_formula == parallel[i].eps_formula);
    }
}

TEST_CASE("oracle verification is seed-reproducible") {
    RunConfig cfg = parse_config(json::object());
    cfg.seed = 777;
    const OracleVerifyResult a = run_oracle_verify(cfg, 5);
    const OracleVerifyResult b = run_oracle_verify(cfg, 5);
    CHECK(a.max_rel_dev == b.max_rel_dev);
    CHECK(a.worst_delta_b == b.worst_delta_b);
    CHECK(a.max_rel_dev < 1e-6);
}
