#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "breathe/harness.hpp"
#include "breathe/io.hpp"

using namespace breathe;
namespace fs = std::filesystem;

namespace {

Scenario small(int periods) {
    GridOptions g;
    g.rows = 2;
    g.cols = 3;
    return tidal_scenario(g, periods, 5000, 2);
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / "breathe_unit" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("grid topology") {
    GridOptions g;
    g.rows = 2;
    g.cols = 3;
    auto t = grid_topology(g);
    CHECK(t.size() == 6);
    CHECK(validate_topology(t).ok());
    // Corner: right, below and the diagonal (within 1.5 spacings).
    CHECK(t.neighbours[0].size() == 3);
    CHECK(t.antennas[4].position.x == doctest::Approx(400));
}

TEST_CASE("static baseline keeps powers and records every period") {
    ExperimentSpec spec;
    spec.scenario = small(3);
    spec.periods = 3;
    auto r = run_experiment(spec);
    CHECK(r.metrics.size() == 3);
    CHECK(r.steps.empty());
    for (const auto& p : r.powers) CHECK(p == spec.scenario.topology.powers());
    CHECK(r.metrics.min_coverage() <= 1.0);
    auto red = compare_runs(r.metrics, r.metrics);
    CHECK(red.std_dev_pct == 0.0);
    spec.periods = 4;
    CHECK_THROWS_AS(spec.check(), InvalidArgument);
}

TEST_CASE("compare_runs percentages") {
    MetricsSeries a, b;
    a.periods = {{1, 0.4, 0.5, 0, 1, 0.2}, {2, 0.2, 0.5, 0, 1, 0.2}};
    b.periods = {{1, 0.15, 0.2, 0, 1, 0.1}, {2, 0.15, 0.3, 0, 1, 0.1}};
    auto r = compare_runs(a, b);
    CHECK(r.std_dev_pct == doctest::Approx(50));
    CHECK(r.over_busy_pct == doctest::Approx(50));
    CHECK(r.step_time_pct == doctest::Approx(50));
    b.periods.pop_back();
    CHECK_THROWS_AS(compare_runs(a, b), InvalidArgument);
}

TEST_CASE("results directory round trip") {
    ExperimentSpec spec;
    spec.scenario = small(3);
    spec.periods = 3;
    spec.algorithm = Algorithm::bfdba;
    spec.cfg.gamma = 0.5;
    auto r = run_experiment(spec);
    CHECK(r.steps.size() == 3);
    auto dir = scratch("results");
    write_results(dir, spec, r);
    for (auto f : {"metrics.csv", "steps.jsonl", "busy.csv", "manifest.json", "charts/std_dev.svg"})
        CHECK(fs::exists(dir / f));
    auto back = read_metrics_csv(dir / "metrics.csv");
    REQUIRE(back.size() == 3);
    CHECK(back.periods[2].std_dev == r.metrics.periods[2].std_dev);
    std::ifstream steps(dir / "steps.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(steps, line)) {
        auto j = Json::parse(line);
        CHECK(j.at("algorithm") == "bfdba");
        CHECK(j.at("p_next").size() == 6);
        ++lines;
    }
    CHECK(lines == 3);
    auto manifest = read_json(dir / "manifest.json");
    CHECK(manifest.at("periods_completed") == 3);
}

TEST_CASE("scenario json accepts watts and dbm") {
    auto j = Json::parse(R"({
      "name": "two",
      "topology": {"antennas": [
        {"id": 1, "power": {"value": 20, "unit": "watts"}, "max_power": {"value": 49, "unit": "dbm"},
         "prbs": 50, "position": [0, 0], "neighbours": [2]},
        {"id": 2, "power": {"value": 40, "unit": "dbm"}, "max_power": {"value": 80, "unit": "watts"},
         "prbs": 50, "position": [500, 0], "neighbours": [1]}]},
      "traffic": {"periods": 2, "background_weight": 1, "area": [[0, -100], [500, 100]], "base_users": 100},
      "config": {"gamma": 0.5, "power_floor": {"value": 0.1, "unit": "watts"}}
    })");
    auto s = scenario_from_json(j);
    CHECK(s.topology.antennas[0].power_dbm == doctest::Approx(43.0103).epsilon(1e-5));
    CHECK(s.topology.antennas[1].max_power_dbm == doctest::Approx(49.0309).epsilon(1e-5));
    CHECK(s.config.gamma == 0.5);
    CHECK(s.config.power_floor_dbm == doctest::Approx(20.0));
    auto again = scenario_from_json(to_json(s));
    CHECK(again.topology.antennas[0].power_dbm == s.topology.antennas[0].power_dbm);
    CHECK(again.traffic.area_max.x == 500);

    CHECK_THROWS_AS(power_from_json(Json::parse(R"({"value": 3})")), InvalidArgument);
    CHECK_THROWS_AS(power_from_json(Json::parse(R"({"value": 3, "unit": "mw"})")), InvalidArgument);
    j["topology"]["antennas"][1]["id"] = 7;
    CHECK_THROWS_AS(scenario_from_json(j), InvalidArgument);
}

TEST_CASE("experiment spec resolves scenario paths") {
    auto dir = scratch("spec");
    save_scenario(dir / "s.json", small(4));
    std::ofstream(dir / "exp.json") << R"({"scenario": "s.json", "algorithm": "bdba", "periods": 2,
                                           "config": {"gamma": 0.25}})";
    auto spec = load_experiment(dir / "exp.json");
    CHECK(spec.algorithm == Algorithm::bdba);
    CHECK(spec.periods == 2);
    CHECK(spec.cfg.gamma == 0.25);
    CHECK(spec.scenario.topology.size() == 6);
}

TEST_CASE("aborted run keeps committed periods") {
    ExperimentSpec spec;
    spec.scenario = small(3);
    spec.periods = 3;
    spec.algorithm = Algorithm::bdba;
    // A coverage target that no power can meet aborts the first step.
    spec.cfg.r_c = 200.0;
    spec.measure_coverage = false;
    try {
        run_experiment(spec);
        FAIL("expected abort");
    } catch (const ExperimentAborted& e) {
        CHECK(e.last_committed_period() == 0);
        CHECK(e.partial().metrics.size() == 0);
    }
}

TEST_CASE("property suite on a small proportional scenario") {
    GridOptions g;
    g.rows = 2;
    g.cols = 3;
    auto sc = proportional_scenario(g, 6, 20000, 3);
    AlgorithmConfig cfg;
    cfg.gamma = 0.5;
    PropertyOptions opt;
    opt.periods = 6;
    opt.consensus_tolerance = 1.0;
    auto ledger = property_suite(sc, cfg, opt);
    REQUIRE(ledger.checks.size() == 7);
    for (const auto& c : ledger.checks)
        if (c.name != "jacobian.row_sums") CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
}
