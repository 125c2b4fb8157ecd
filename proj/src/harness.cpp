#include "breathe/harness.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "breathe/coverage.hpp"
#include "breathe/io.hpp"
#include "breathe/mr.hpp"

namespace breathe {

namespace {

constexpr const char* kVersion = "0.1.0";

double mean_of(const std::vector<PeriodMetrics>& v, double PeriodMetrics::*field) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (const auto& m : v) s += m.*field;
    return s / static_cast<double>(v.size());
}

double pct_reduction(double a, double b) {
    if (a == 0.0) return 0.0;
    return 100.0 * (a - b) / a;
}

double network_coverage(std::span<const UserSample> users, std::span<const double> powers, const AlgorithmConfig& cfg) {
    auto ds = preprocess_for_coverage(generate_mr(users, powers, cfg.top_m), powers);
    return exact_coverage(ds, powers, cfg.r_c).F;
}

}  // namespace

void ExperimentSpec::check() const {
    if (periods < 1) throw InvalidArgument("experiment: periods must be >= 1");
    if (periods > scenario.traffic.periods)
        throw InvalidArgument("experiment: periods exceed the traffic scenario horizon");
    cfg.check();
    scenario.topology.check();
    if (cfg.use_surrogate && !surrogates) throw InvalidArgument("experiment: use_surrogate needs a surrogate bank");
    if (surrogates && surrogates->neighbourhoods.size() != scenario.topology.size())
        throw InvalidArgument("experiment: surrogate bank does not match the topology");
}

double MetricsSeries::mean_std_dev() const { return mean_of(periods, &PeriodMetrics::std_dev); }
double MetricsSeries::mean_over_busy() const { return mean_of(periods, &PeriodMetrics::over_busy); }
double MetricsSeries::mean_step_seconds() const { return mean_of(periods, &PeriodMetrics::step_seconds); }

double MetricsSeries::min_coverage() const {
    double m = 1.0;
    for (const auto& p : periods) m = std::min(m, p.coverage);
    return m;
}

std::vector<double> MetricsSeries::column(const std::string& name) const {
    double PeriodMetrics::*field = nullptr;
    if (name == "std_dev") field = &PeriodMetrics::std_dev;
    else if (name == "over_busy") field = &PeriodMetrics::over_busy;
    else if (name == "d_inf") field = &PeriodMetrics::d_inf;
    else if (name == "coverage") field = &PeriodMetrics::coverage;
    else if (name == "step_seconds") field = &PeriodMetrics::step_seconds;
    else throw InvalidArgument("unknown metric: " + name);
    std::vector<double> out;
    for (const auto& p : periods) out.push_back(p.*field);
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.check();
    const auto& cfg = spec.cfg;
    NetworkTopology topo = spec.scenario.topology;
    ExperimentResult out;
    int k = 1;
    try {
        for (; k <= spec.periods; ++k) {
            const auto users = sample_users(spec.scenario.traffic, spec.scenario.pathloss, topo, k);
            const auto powers = topo.powers();
            const auto assignment = assign_users(users, powers);
            const auto f = busy_degrees(assignment, users, topo);
            const auto f_bar = targets(f, topo, cfg.target_mode);
            const auto d = disagreement(f, f_bar);

            PeriodMetrics m;
            m.period = k;
            m.std_dev = busy_std_dev(f, f_bar);
            m.over_busy = over_busy_fraction(f, cfg.over_busy_threshold);
            m.d_inf = max_abs(d);
            if (spec.measure_coverage) m.coverage = network_coverage(users, powers, cfg);
            const auto rel = relative_busy(f, static_cast<double>(total_traffic(users)), topo);
            double worst = 0.0;
            for (double r : rel) worst = std::max(worst, std::abs(r - 1.0));

            std::optional<BalanceStep> s;
            if (spec.algorithm != Algorithm::none) {
                s = step(topo, users, k, cfg, spec.algorithm, cfg.use_surrogate ? spec.surrogates.get() : nullptr);
                m.step_seconds = s->duration_seconds;
                for (std::size_t i = 0; i < topo.size(); ++i) topo.antennas[i].power_dbm = s->p_next[i];
                if (!spec.keep_jacobians) s->jacobian.reset();
            }
            // Commit the period.
            out.metrics.periods.push_back(m);
            out.busy.push_back(BusyState{f, f_bar, d, k});
            out.powers.push_back(powers);
            out.relative_busy_max.push_back(worst);
            if (s) out.steps.push_back(std::move(*s));
        }
    } catch (const Error& e) {
        throw ExperimentAborted(e.what(), k - 1, std::move(out));
    }
    return out;
}

Reduction compare_runs(const MetricsSeries& a, const MetricsSeries& b) {
    if (a.size() != b.size())
        throw InvalidArgument("compare_runs: period counts differ (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    Reduction r;
    r.mean_std_dev_a = a.mean_std_dev();
    r.mean_std_dev_b = b.mean_std_dev();
    r.mean_over_busy_a = a.mean_over_busy();
    r.mean_over_busy_b = b.mean_over_busy();
    r.mean_step_seconds_a = a.mean_step_seconds();
    r.mean_step_seconds_b = b.mean_step_seconds();
    r.std_dev_pct = pct_reduction(r.mean_std_dev_a, r.mean_std_dev_b);
    r.over_busy_pct = pct_reduction(r.mean_over_busy_a, r.mean_over_busy_b);
    r.step_time_pct = pct_reduction(r.mean_step_seconds_a, r.mean_step_seconds_b);
    return r;
}

bool PropertyLedger::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

PropertyLedger property_suite(const Scenario& scenario, const AlgorithmConfig& cfg, const PropertyOptions& options) {
    PropertyLedger ledger;
    auto add = [&](std::string name, bool passed, double measured, double threshold, std::string detail = {}) {
        ledger.checks.push_back({std::move(name), passed, measured, threshold, std::move(detail)});
    };
    const auto& topo = scenario.topology;
    const std::size_t n = topo.size();

    std::optional<JacobianApprox> jac;
    std::vector<double> d;
    try {
        const auto users = sample_users(scenario.traffic, scenario.pathloss, topo, 1);
        const auto powers = topo.powers();
        const auto f = busy_degrees(assign_users(users, powers), users, topo);
        const auto f_bar = targets(f, topo, TargetMode::global);
        d = disagreement(f, f_bar);
        jac = estimate_jacobian(generate_mr(users, powers, cfg.top_m), powers, f, f_bar, topo,
                                JacobianOptions{cfg.epsilon, cfg.n_s, cfg.seed});
    } catch (const Error& e) {
        add("jacobian.estimate", false, 0.0, 0.0, e.what());
        return ledger;
    }

    const auto rep = laplacian_check(*jac);
    add("jacobian.sign_pattern", rep.sign_violations.empty(), static_cast<double>(rep.sign_violations.size()), 0.0,
        "sign violations");
    add("jacobian.row_sums", rep.max_relative_row_residual <= 0.05, rep.max_relative_row_residual, 0.05,
        "max |row sum| / max |row entry|");
    const bool connected = support_graph(*jac).strongly_connected;
    add("jacobian.rank", n <= 1 || rep.numerical_rank + 1 >= n, static_cast<double>(rep.numerical_rank),
        static_cast<double>(n > 0 ? n - 1 : 0),
        "second smallest singular value " + std::to_string(rep.second_smallest_singular_value) +
            (connected ? ", support strongly connected" : ", support not strongly connected"));

    try {
        const auto solved = bdba_solve(*jac, d);
        double sum = 0.0, l1 = 0.0;
        for (double v : solved.u) {
            sum += v;
            l1 += std::abs(v);
        }
        const double ratio = l1 > 0.0 ? std::abs(sum) / l1 : 0.0;
        add("bdba.zero_sum", ratio <= 1e-9, ratio, 1e-9, "|sum u| / ||u||_1");
    } catch (const SingularJacobian& e) {
        add("bdba.zero_sum", false, 0.0, 1e-9, std::string("SingularJacobian: ") + e.what());
    }

    try {
        // At the limit f_i = (1 - tau p_i) z / sum r the disagreement is tau p_i.
        const auto powers = topo.powers();
        std::vector<double> d_limit(n);
        for (std::size_t i = 0; i < n; ++i) d_limit[i] = cfg.tau * powers[i];
        const auto solved = bfdba_solve(*jac, d_limit, powers, cfg.tau);
        const double worst = max_abs(solved.u);
        add("bfdba.fixed_point", worst <= 1e-12, worst, 1e-12, "max |u| at the analytic limit");
    } catch (const DegenerateDiagonal& e) {
        add("bfdba.fixed_point", false, 0.0, 1e-12, std::string("DegenerateDiagonal: ") + e.what());
    }

    ExperimentSpec spec;
    spec.scenario = scenario;
    spec.cfg = cfg;
    spec.measure_coverage = false;
    spec.periods = std::min(options.periods, scenario.traffic.periods);

    spec.algorithm = Algorithm::none;
    spec.periods = std::min(spec.periods, 2);
    try {
        const auto base = run_experiment(spec);
        bool fixed = true;
        for (const auto& p : base.powers) fixed = fixed && p == topo.powers();
        add("baseline.neutral", fixed, 0.0, 0.0, "static baseline keeps powers");
    } catch (const Error& e) {
        add("baseline.neutral", false, 0.0, 0.0, e.what());
    }

    spec.algorithm = Algorithm::bdba;
    spec.periods = std::min(options.periods, scenario.traffic.periods);
    const bool proportional = scenario.traffic.mode == TrafficMode::proportional;
    const std::string run_name = proportional ? "run.consensus" : "run.bounded_disagreement";
    try {
        const auto run = run_experiment(spec);
        const auto series = run.metrics.column("d_inf");
        if (proportional) {
            const double last = series.back();
            add(run_name, last <= options.consensus_tolerance, last, options.consensus_tolerance,
                "||d||_inf at period " + std::to_string(series.size()));
        } else {
            const std::size_t from = std::min<std::size_t>(static_cast<std::size_t>(std::max(options.drift_from, 1)),
                                                           series.size()) - 1;
            const double worst = *std::max_element(series.begin() + static_cast<std::ptrdiff_t>(from), series.end());
            add(run_name, worst <= options.drift_bound, worst, options.drift_bound,
                "max ||d||_inf from period " + std::to_string(from + 1));
        }
    } catch (const ExperimentAborted& e) {
        add(run_name, false, static_cast<double>(e.last_committed_period()), 0.0, e.what());
    }
    return ledger;
}

// Results.

namespace {

void write_metrics_csv(const std::filesystem::path& path, const MetricsSeries& m) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << "period,std_dev,over_busy,d_inf,coverage,step_seconds\n" << std::setprecision(17);
    for (const auto& p : m.periods)
        out << p.period << ',' << p.std_dev << ',' << p.over_busy << ',' << p.d_inf << ',' << p.coverage << ','
            << p.step_seconds << '\n';
}

Json step_to_json(const BalanceStep& s) {
    std::vector<std::string> flags;
    for (auto f : s.clamp_flags) flags.push_back(to_string(f));
    return {{"period", s.period},
            {"algorithm", to_string(s.algorithm)},
            {"fell_back", s.fell_back},
            {"u", s.u},
            {"p", s.p},
            {"p_min", s.p_min},
            {"p_next", s.p_next},
            {"clamp_flags", flags},
            {"residual", s.residual},
            {"coverage_rounds", s.coverage_rounds},
            {"wall_clock_seconds", s.duration_seconds},
            {"warnings", s.warnings}};
}

}  // namespace

void write_results(const std::filesystem::path& dir, const ExperimentSpec& spec, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "charts");
    write_metrics_csv(dir / "metrics.csv", result.metrics);
    {
        std::ofstream out(dir / "steps.jsonl");
        for (const auto& s : result.steps) out << step_to_json(s).dump() << '\n';
    }
    {
        std::ofstream out(dir / "busy.csv");
        write_busy_csv_header(out);
        for (const auto& b : result.busy) write_busy_csv_rows(out, b);
    }
    {
        Json manifest = {
            {"spec", to_json(spec)},
            {"versions",
             {{"breathe", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"compiler", __VERSION__},
              {"cplusplus", __cplusplus}}},
            {"seeds",
             {{"traffic", spec.scenario.traffic.seed},
              {"shadowing", spec.scenario.pathloss.seed},
              {"algorithm", spec.cfg.seed}}},
            {"periods_completed", result.metrics.size()}};
        std::ofstream out(dir / "manifest.json");
        out << manifest.dump(2) << '\n';
    }
    const std::string label = to_string(spec.algorithm);
    const std::pair<const char*, const char*> charts[] = {{"std_dev", "busy-degree std-dev"},
                                                         {"over_busy", "over-busy proportion"},
                                                         {"d_inf", "max |d|"},
                                                         {"coverage", "coverage rate"},
                                                         {"step_seconds", "step wall-clock (s)"}};
    for (const auto& [name, title] : charts)
        write_line_chart(dir / "charts" / (std::string(name) + ".svg"), title, name,
                         {{label, result.metrics.column(name)}});
}

MetricsSeries read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("period,std_dev,over_busy,d_inf,coverage,step_seconds", 0) != 0)
        throw InvalidArgument(path.string() + ": unexpected header");
    MetricsSeries m;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 6) throw InvalidArgument(path.string() + ": bad row " + std::to_string(row));
        m.periods.push_back({static_cast<int>(v[0]), v[1], v[2], v[3], v[4], v[5]});
    }
    return m;
}

void write_line_chart(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                      const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    const double width = 640, height = 360, left = 70, right = 20, top = 40, bottom = 50;
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t count = 0;
    for (const auto& [name, values] : series) {
        count = std::max(count, values.size());
        for (double v : values)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pw = width - left - right, ph = height - top - bottom;
    auto x_at = [&](std::size_t i) { return left + (count > 1 ? pw * static_cast<double>(i) / static_cast<double>(count - 1) : pw / 2); };
    auto y_at = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };

    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << std::setprecision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << y_at(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
    }
    out << "<text x=\"" << left << "\" y=\"" << height - 15 << "\">1</text>\n";
    out << "<text x=\"" << left + pw << "\" y=\"" << height - 15 << "\" text-anchor=\"end\">" << count << "</text>\n";
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">period</text>\n";
    out << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << y_label
        << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& [name, values] = series[s];
        const char* color = colors[s % 5];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < values.size(); ++i)
            if (std::isfinite(values[i])) out << x_at(i) << ',' << y_at(values[i]) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << left + pw - 4 << "\" y=\"" << top + 14 * (s + 1) << "\" text-anchor=\"end\" fill=\""
            << color << "\">" << name << "</text>\n";
    }
    out << "</svg>\n";
}

// Synthetic scenarios.

NetworkTopology grid_topology(const GridOptions& o) {
    if (o.rows == 0 || o.cols == 0) throw InvalidArgument("grid: rows and cols must be positive");
    NetworkTopology topo;
    const std::size_t n = o.rows * o.cols;
    topo.antennas.resize(n);
    topo.neighbours.resize(n);
    for (std::size_t r = 0; r < o.rows; ++r)
        for (std::size_t c = 0; c < o.cols; ++c) {
            auto& a = topo.antennas[r * o.cols + c];
            a.power_dbm = o.power_dbm;
            a.max_power_dbm = o.max_power_dbm;
            a.prbs = o.prbs;
            a.position = {static_cast<double>(c) * o.spacing, static_cast<double>(r) * o.spacing};
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && distance(topo.antennas[i].position, topo.antennas[j].position) <= 1.5 * o.spacing)
                topo.neighbours[i].push_back(j);
    topo.check();
    return topo;
}

namespace {

Scenario grid_scenario(const GridOptions& grid, int periods, std::uint64_t seed) {
    Scenario s;
    s.topology = grid_topology(grid);
    s.traffic.periods = periods;
    s.traffic.area_min = {-grid.spacing / 2, -grid.spacing / 2};
    s.traffic.area_max = {(static_cast<double>(grid.cols) - 0.5) * grid.spacing,
                          (static_cast<double>(grid.rows) - 0.5) * grid.spacing};
    s.traffic.seed = seed;
    s.pathloss.seed = seed + 1;
    return s;
}

Vec2 area_point(const Scenario& s, double fx, double fy) {
    const auto& t = s.traffic;
    return {t.area_min.x + fx * (t.area_max.x - t.area_min.x), t.area_min.y + fy * (t.area_max.y - t.area_min.y)};
}

}  // namespace

Scenario tidal_scenario(const GridOptions& grid, int periods, std::size_t users_per_period, std::uint64_t seed) {
    Scenario s = grid_scenario(grid, periods, seed);
    s.name = "tidal";
    s.traffic.base_users = users_per_period;
    s.traffic.background_weight = 0.5;
    const int mid = std::max(2, (periods + 1) / 2);
    const int last = std::max(mid + 1, periods);
    const double spread = 1.5 * grid.spacing;
    // Business district peaks mid-horizon, residential area at both ends.
    HotspotTrack business{{{1, {area_point(s, 0.25, 0.3), 0.2, spread}},
                           {mid, {area_point(s, 0.3, 0.35), 1.0, spread}},
                           {last, {area_point(s, 0.35, 0.4), 0.2, spread}}}};
    HotspotTrack residential{{{1, {area_point(s, 0.75, 0.7), 1.0, spread}},
                              {mid, {area_point(s, 0.7, 0.65), 0.2, spread}},
                              {last, {area_point(s, 0.65, 0.6), 1.0, spread}}}};
    s.traffic.tracks = {business, residential};
    s.traffic.check();
    return s;
}

Scenario proportional_scenario(const GridOptions& grid, int periods, std::size_t base_users, std::uint64_t seed) {
    Scenario s = grid_scenario(grid, periods, seed);
    s.name = "proportional";
    s.traffic.mode = TrafficMode::proportional;
    s.traffic.k_star = 1;
    s.traffic.base_users = base_users;
    s.traffic.background_weight = 1.0;
    s.traffic.tracks = {HotspotTrack{{{1, {area_point(s, 0.5, 0.5), 0.3, 0.8 * grid.spacing}}}}};
    s.traffic.beta.resize(static_cast<std::size_t>(periods));
    for (int k = 1; k <= periods; ++k)
        s.traffic.beta[static_cast<std::size_t>(k - 1)] = 1.0 + 0.1 * std::sin(2.0 * std::numbers::pi * k / 24.0);
    s.traffic.check();
    return s;
}

Scenario drift_scenario(const GridOptions& grid, int periods, std::size_t users_per_period, double step_fraction,
                        std::uint64_t seed) {
    Scenario s = grid_scenario(grid, periods, seed);
    s.name = "drift";
    s.traffic.base_users = users_per_period;
    s.traffic.background_weight = 0.5;
    const Vec2 start = area_point(s, 0.3, 0.4);
    const double travel = step_fraction * grid.spacing * static_cast<double>(std::max(periods - 1, 1));
    s.traffic.tracks = {HotspotTrack{{{1, {start, 1.0, 0.6 * grid.spacing}},
                                      {std::max(periods, 2), {{start.x + travel, start.y}, 1.0, 0.6 * grid.spacing}}}}};
    s.traffic.check();
    return s;
}

}  // namespace breathe
