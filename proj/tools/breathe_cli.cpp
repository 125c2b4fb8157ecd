#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "breathe/coverage.hpp"
#include "breathe/harness.hpp"
#include "breathe/io.hpp"
#include "breathe/mr.hpp"

using namespace breathe;
namespace fs = std::filesystem;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kPropertyFailed = 1;
constexpr int kBadInput = 2;
constexpr int kAborted = 3;

// Flags that override AlgorithmConfig fields. Only the flags actually given
// are applied, so file values survive otherwise.
struct ConfigFlags {
    std::optional<double> epsilon, gamma, tau, delta_p, f_con, r_c, over_busy, floor;
    std::optional<std::size_t> n_s, top_m, dense_limit;
    std::optional<std::string> target_mode;
    std::optional<unsigned long long> seed;
    bool coverage = false, no_coverage = false;

    void attach(CLI::App* app) {
        app->add_option("--epsilon", epsilon, "perturbation fraction of the power in dBm");
        app->add_option("--gamma", gamma, "step size in (0, 1]");
        app->add_option("--tau", tau, "BFDBA offset");
        app->add_option("--delta-p", delta_p, "coverage search increment, dB");
        app->add_option("--n-s", n_s, "MR records sampled per antenna");
        app->add_option("--f-con", f_con, "coverage target");
        app->add_option("--r-c", r_c, "coverage threshold, dBm");
        app->add_option("--target-mode", target_mode, "global or local")->check(CLI::IsMember({"global", "local"}));
        app->add_option("--top-m", top_m, "antennas per measurement report");
        app->add_option("--over-busy", over_busy, "over-busy threshold");
        app->add_option("--power-floor", floor, "lowest allowed power, dBm");
        app->add_option("--dense-limit", dense_limit, "largest n solved by dense SVD");
        app->add_option("--seed", seed, "sampling seed");
        app->add_flag("--coverage", coverage, "enable the coverage constraint");
        app->add_flag("--no-coverage", no_coverage, "disable the coverage constraint");
    }

    AlgorithmConfig apply(AlgorithmConfig c) const {
        if (epsilon) c.epsilon = *epsilon;
        if (gamma) c.gamma = *gamma;
        if (tau) c.tau = *tau;
        if (delta_p) c.delta_p = *delta_p;
        if (n_s) c.n_s = *n_s;
        if (f_con) c.f_con = *f_con;
        if (r_c) c.r_c = *r_c;
        if (target_mode) c.target_mode = parse_target_mode(*target_mode);
        if (top_m) c.top_m = *top_m;
        if (over_busy) c.over_busy_threshold = *over_busy;
        if (floor) c.power_floor_dbm = *floor;
        if (dense_limit) c.dense_limit = *dense_limit;
        if (seed) c.seed = *seed;
        if (coverage) c.coverage_enabled = true;
        if (no_coverage) c.coverage_enabled = false;
        c.check();
        return c;
    }
};

void print_summary(const MetricsSeries& m) {
    std::cout << std::setprecision(6) << "periods " << m.size() << ", mean std-dev " << m.mean_std_dev()
              << ", mean over-busy " << m.mean_over_busy() << ", min coverage " << m.min_coverage()
              << ", mean step " << m.mean_step_seconds() << " s\n";
}

int run_command(const std::string& spec_path, const std::optional<std::string>& algorithm,
                const std::optional<int>& periods, const std::optional<std::string>& out,
                const std::optional<std::string>& surrogates, bool no_measure, const ConfigFlags& flags,
                const std::optional<std::string>& mr_out, const std::optional<std::string>& users_out) {
    auto spec = load_experiment(spec_path);
    if (algorithm) spec.algorithm = parse_algorithm(*algorithm);
    if (periods) spec.periods = *periods;
    if (out) spec.output = *out;
    if (spec.output.empty()) spec.output = "results";
    if (no_measure) spec.measure_coverage = false;
    spec.cfg = flags.apply(spec.cfg);
    if (surrogates) {
        spec.surrogates = std::make_shared<SurrogateBank>(load_surrogate_bank(*surrogates));
        spec.cfg.use_surrogate = true;
    }
    spec.check();
    if (mr_out || users_out) {
        // Period-1 batch at the initial powers, e.g. as train-coverage input.
        const auto& sc = spec.scenario;
        const auto users = sample_users(sc.traffic, sc.pathloss, sc.topology, 1);
        if (mr_out) {
            std::ofstream os(*mr_out);
            if (!os) throw InvalidArgument("cannot write " + *mr_out);
            write_mr_csv(os, generate_mr(users, sc.topology.powers(), spec.cfg.top_m));
        }
        if (users_out) {
            std::ofstream os(*users_out);
            if (!os) throw InvalidArgument("cannot write " + *users_out);
            write_users_csv(os, users, 1);
        }
    }
    try {
        auto result = run_experiment(spec);
        write_results(spec.output, spec, result);
        for (const auto& s : result.steps)
            for (const auto& w : s.warnings) std::cerr << "warning: period " << s.period << ": " << w << '\n';
        print_summary(result.metrics);
        std::cout << "results written to " << spec.output.string() << '\n';
        return kOk;
    } catch (const ExperimentAborted& e) {
        write_results(spec.output, spec, e.partial());
        std::cerr << "run aborted after period " << e.last_committed_period() << ": " << e.what() << '\n';
        std::cerr << "partial results written to " << spec.output.string() << '\n';
        return kAborted;
    }
}

int compare_command(const std::string& a, const std::string& b, const std::optional<std::string>& chart) {
    const auto ma = read_metrics_csv(fs::path(a) / "metrics.csv");
    const auto mb = read_metrics_csv(fs::path(b) / "metrics.csv");
    const auto r = compare_runs(ma, mb);
    std::cout << std::setprecision(6);
    std::cout << "metric,a,b,reduction_pct\n";
    std::cout << "mean_std_dev," << r.mean_std_dev_a << ',' << r.mean_std_dev_b << ',' << r.std_dev_pct << '\n';
    std::cout << "mean_over_busy," << r.mean_over_busy_a << ',' << r.mean_over_busy_b << ',' << r.over_busy_pct << '\n';
    std::cout << "mean_step_seconds," << r.mean_step_seconds_a << ',' << r.mean_step_seconds_b << ','
              << r.step_time_pct << '\n';
    std::cout << "min_coverage," << ma.min_coverage() << ',' << mb.min_coverage() << ",\n";
    if (chart)
        write_line_chart(*chart, "busy-degree std-dev", "std-dev",
                         {{fs::path(a).filename().string(), ma.column("std_dev")},
                          {fs::path(b).filename().string(), mb.column("std_dev")}});
    return kOk;
}

int properties_command(const std::string& scenario_path, const PropertyOptions& options,
                       const std::optional<std::string>& json_out, const ConfigFlags& flags) {
    const auto scenario = load_scenario(scenario_path);
    const auto cfg = flags.apply(scenario.config);
    const auto ledger = property_suite(scenario, cfg, options);
    Json out = Json::array();
    for (const auto& c : ledger.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": measured " << c.measured << ", threshold "
                  << c.threshold;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << '\n';
        out.push_back({{"name", c.name},
                       {"passed", c.passed},
                       {"measured", c.measured},
                       {"threshold", c.threshold},
                       {"detail", c.detail}});
    }
    if (json_out) std::ofstream(*json_out) << out.dump(2) << '\n';
    return ledger.all_passed() ? kOk : kPropertyFailed;
}

struct TrainFlags {
    std::optional<std::string> scenario;
    std::optional<std::size_t> antennas;
    double power = 43.0;
    std::optional<double> p_low, p_high;
    std::size_t samples = 400;
    std::size_t epochs = 400;
    std::uint64_t seed = 1;
    double r_c = -90.0;
    std::string out = "surrogates";
};

int train_command(const std::string& mr_path, const TrainFlags& t) {
    std::vector<double> recorded, low, high;
    std::size_t n = 0;
    if (t.scenario) {
        const auto s = load_scenario(*t.scenario);
        n = s.topology.size();
        recorded = s.topology.powers();
        high = s.topology.max_powers();
        low.assign(n, s.config.power_floor_dbm);
    } else if (t.antennas) {
        n = *t.antennas;
        recorded.assign(n, t.power);
        high.assign(n, t.power + 6.0);
        low.assign(n, t.power - 20.0);
    } else {
        throw InvalidArgument("train-coverage needs --scenario or --antennas");
    }
    if (t.p_low) low.assign(n, *t.p_low);
    if (t.p_high) high.assign(n, *t.p_high);

    std::ifstream is(mr_path);
    if (!is) throw InvalidArgument("cannot open " + mr_path);
    auto loaded = read_mr_csv(is, n);
    if (loaded.rejected_records)
        std::cerr << "warning: rejected " << loaded.rejected_records << " records (" << loaded.rejected_rows
                  << " rows)\n";
    auto ds = std::move(loaded.dataset);
    if (ds.domain == MrDomain::signal) ds = to_attenuation(std::move(ds), recorded);
    ds.recorded_powers = recorded;
    ds = build_per_antenna_tables(remove_redundant(std::move(ds)));

    BankOptions opt;
    opt.samples_per_antenna = t.samples;
    opt.train.epochs = t.epochs;
    opt.train.seed = t.seed;
    const auto bank = train_surrogate_bank(ds, low, high, t.r_c, opt);
    save_surrogate_bank(t.out, bank, t.seed);
    std::size_t trained = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (bank.models[i]) {
            ++trained;
            worst = std::max(worst, bank.training_mse[i]);
        }
    std::cout << "trained " << trained << " surrogates on K' = " << ds.k_prime() << " records, worst training MSE "
              << worst << "; written to " << t.out << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Busy-degree balancing simulator"};
    app.require_subcommand(1);

    ConfigFlags run_flags, prop_flags;
    std::string spec_path;
    std::optional<std::string> algorithm, out, surrogates, mr_out, users_out;
    std::optional<int> periods;
    bool no_measure = false;
    auto* run = app.add_subcommand("run", "run an experiment spec and write a results directory");
    run->add_option("spec", spec_path, "experiment spec JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--algorithm", algorithm, "none, bdba or bfdba")->check(CLI::IsMember({"none", "bdba", "bfdba"}));
    run->add_option("--periods", periods, "number of periods");
    run->add_option("--out", out, "results directory");
    run->add_option("--surrogates", surrogates, "trained surrogate directory for the coverage search")
        ->check(CLI::ExistingDirectory);
    run->add_flag("--no-measure-coverage", no_measure, "skip the per-period network coverage metric");
    run->add_option("--mr-out", mr_out, "also write the period-1 MR batch as CSV");
    run->add_option("--users-out", users_out, "also write the period-1 users as CSV");
    run_flags.attach(run);

    std::string dir_a, dir_b;
    std::optional<std::string> chart;
    auto* compare = app.add_subcommand("compare", "compare two results directories (reduction from a to b)");
    compare->add_option("a", dir_a, "baseline results")->required()->check(CLI::ExistingDirectory);
    compare->add_option("b", dir_b, "candidate results")->required()->check(CLI::ExistingDirectory);
    compare->add_option("--chart", chart, "write an SVG overlay of both std-dev series");

    std::string scenario_path;
    PropertyOptions prop_opts;
    std::optional<std::string> json_out;
    auto* props = app.add_subcommand("properties", "run the property checks on a scenario");
    props->add_option("scenario", scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    props->add_option("--periods", prop_opts.periods, "length of the convergence run");
    props->add_option("--consensus-tolerance", prop_opts.consensus_tolerance, "final ||d||_inf bound");
    props->add_option("--drift-bound", prop_opts.drift_bound, "running ||d||_inf bound under drift");
    props->add_option("--drift-from", prop_opts.drift_from, "first period of the drift window");
    props->add_option("--json", json_out, "also write the ledger as JSON");
    prop_flags.attach(props);

    std::string mr_path;
    TrainFlags train_flags;
    auto* train = app.add_subcommand("train-coverage", "train per-antenna monotone coverage surrogates on an MR batch");
    train->add_option("mr", mr_path, "MR CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--scenario", train_flags.scenario, "scenario supplying powers and limits");
    train->add_option("--antennas", train_flags.antennas, "antenna count when no scenario is given");
    train->add_option("--power", train_flags.power, "recording power in dBm when no scenario is given");
    train->add_option("--p-low", train_flags.p_low, "lowest sampled power, dBm");
    train->add_option("--p-high", train_flags.p_high, "highest sampled power, dBm");
    train->add_option("--samples", train_flags.samples, "training samples per antenna");
    train->add_option("--epochs", train_flags.epochs, "training epochs");
    train->add_option("--seed", train_flags.seed, "training seed");
    train->add_option("--r-c", train_flags.r_c, "coverage threshold, dBm");
    train->add_option("--out", train_flags.out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_command(spec_path, algorithm, periods, out, surrogates, no_measure, run_flags, mr_out,
                                       users_out);
        if (*compare) return compare_command(dir_a, dir_b, chart);
        if (*props) return properties_command(scenario_path, prop_opts, json_out, prop_flags);
        if (*train) return train_command(mr_path, train_flags);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kBadInput;
}
