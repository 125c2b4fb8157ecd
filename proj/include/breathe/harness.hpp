#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "breathe/balancer.hpp"
#include "breathe/busy.hpp"
#include "breathe/coverage.hpp"
#include "breathe/core.hpp"
#include "breathe/traffic.hpp"

namespace breathe {

/// Everything needed to regenerate a run: network, traffic, propagation and
/// default algorithm settings.
struct Scenario {
    std::string name = "scenario";
    NetworkTopology topology;
    TrafficScenario traffic;
    PathlossModel pathloss;
    AlgorithmConfig config;
};

struct ExperimentSpec {
    Scenario scenario;
    std::string scenario_ref;  // file the scenario came from, if any
    Algorithm algorithm = Algorithm::none;
    int periods = 1;
    AlgorithmConfig cfg;
    // Evaluate network coverage on every period's MR batch (costs one
    // preprocessing pass per period).
    bool measure_coverage = true;
    bool keep_jacobians = false;
    std::filesystem::path output;
    // Used by the minimum-power search when cfg.use_surrogate is set.
    std::shared_ptr<const SurrogateBank> surrogates;

    void check() const;
};

struct PeriodMetrics {
    int period = 1;
    double std_dev = 0.0;
    double over_busy = 0.0;
    double d_inf = 0.0;
    double coverage = 1.0;
    double step_seconds = 0.0;
};

struct MetricsSeries {
    std::vector<PeriodMetrics> periods;

    std::size_t size() const { return periods.size(); }
    double mean_std_dev() const;
    double mean_over_busy() const;
    double mean_step_seconds() const;
    double min_coverage() const;
    std::vector<double> column(const std::string& name) const;
};

struct ExperimentResult {
    MetricsSeries metrics;
    std::vector<BalanceStep> steps;
    std::vector<BusyState> busy;
    std::vector<std::vector<double>> powers;  // powers in force, per period
    std::vector<double> relative_busy_max;    // max_i |f_i / (z / sum r) - 1|, per period
};

class ExperimentAborted : public Error {
  public:
    ExperimentAborted(const std::string& what, int last_committed, ExperimentResult partial)
        : Error(what), last_committed_(last_committed), partial_(std::move(partial)) {}
    int last_committed_period() const { return last_committed_; }
    const ExperimentResult& partial() const { return partial_; }

  private:
    int last_committed_;
    ExperimentResult partial_;
};

/// Runs the periods in order. Period k samples its users, records metrics at
/// the powers in force and, unless the algorithm is none, takes one step
/// whose output is in force at k + 1.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct Reduction {
    double mean_std_dev_a = 0.0, mean_std_dev_b = 0.0;
    double mean_over_busy_a = 0.0, mean_over_busy_b = 0.0;
    double mean_step_seconds_a = 0.0, mean_step_seconds_b = 0.0;
    // Percentage reduction from a to b; positive when b is lower.
    double std_dev_pct = 0.0;
    double over_busy_pct = 0.0;
    double step_time_pct = 0.0;
};

Reduction compare_runs(const MetricsSeries& a, const MetricsSeries& b);

struct PropertyCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct PropertyLedger {
    std::vector<PropertyCheck> checks;
    bool all_passed() const;
};

struct PropertyOptions {
    int periods = 50;  // length of the convergence run
    double consensus_tolerance = 0.05;
    double drift_bound = 0.25;
    int drift_from = 20;
};

/// Jacobian structure, zero-sum adjustment, BFDBA fixed point and a BDBA
/// run on the scenario. Proportional-mode scenarios are checked for
/// consensus, others for bounded disagreement.
PropertyLedger property_suite(const Scenario& scenario, const AlgorithmConfig& cfg, const PropertyOptions& options = {});

// Results directory.

void write_results(const std::filesystem::path& dir, const ExperimentSpec& spec, const ExperimentResult& result);
MetricsSeries read_metrics_csv(const std::filesystem::path& path);
void write_line_chart(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                      const std::vector<std::pair<std::string, std::vector<double>>>& series);

// Synthetic scenarios.

struct GridOptions {
    std::size_t rows = 4;
    std::size_t cols = 5;
    double spacing = 400.0;  // meters
    double power_dbm = 40.0;
    double max_power_dbm = 49.03;
    int prbs = 100;
};

/// Antennas on a rectangular grid, neighbours within 1.5 spacings.
NetworkTopology grid_topology(const GridOptions& options);

/// Two hotspot clusters that drift across the area and swap dominance over
/// the day.
Scenario tidal_scenario(const GridOptions& grid, int periods, std::size_t users_per_period, std::uint64_t seed);

/// Geometry frozen after period 1, user counts scaled by beta_k.
Scenario proportional_scenario(const GridOptions& grid, int periods, std::size_t base_users, std::uint64_t seed);

/// A single hotspot moving slowly, bounding the per-period density change.
Scenario drift_scenario(const GridOptions& grid, int periods, std::size_t users_per_period, double step_fraction,
                        std::uint64_t seed);

}  // namespace breathe
