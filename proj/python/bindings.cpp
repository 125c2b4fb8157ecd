#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "breathe/balancer.hpp"
#include "breathe/harness.hpp"
#include "breathe/io.hpp"

namespace py = pybind11;
using namespace breathe;

namespace {

py::dict metrics_dict(const MetricsSeries& m) {
    py::dict out;
    for (const char* name : {"std_dev", "over_busy", "d_inf", "coverage", "step_seconds"}) out[name] = m.column(name);
    return out;
}

py::dict run(const Scenario& scenario, const std::string& algorithm, int periods, const AlgorithmConfig& cfg,
             bool measure_coverage) {
    ExperimentSpec spec;
    spec.scenario = scenario;
    spec.algorithm = parse_algorithm(algorithm);
    spec.periods = periods > 0 ? periods : scenario.traffic.periods;
    spec.cfg = cfg;
    spec.measure_coverage = measure_coverage;
    ExperimentResult r;
    {
        py::gil_scoped_release release;
        r = run_experiment(spec);
    }
    py::dict out = metrics_dict(r.metrics);
    out["powers"] = r.powers;
    std::vector<std::vector<double>> f;
    for (const auto& b : r.busy) f.push_back(b.f);
    out["busy_degrees"] = f;
    return out;
}

Eigen::MatrixXd jacobian_at(const Scenario& s, int period, const AlgorithmConfig& cfg) {
    const auto users = sample_users(s.traffic, s.pathloss, s.topology, period);
    const auto p = s.topology.powers();
    const auto f = busy_degrees(assign_users(users, p), users, s.topology);
    const auto fb = targets(f, s.topology, cfg.target_mode);
    return estimate_jacobian(generate_mr(users, p, cfg.top_m), p, f, fb, s.topology, {cfg.epsilon, cfg.n_s, cfg.seed})
        .dense();
}

}  // namespace

PYBIND11_MODULE(_breathe, m) {
    m.doc() = "Busy-degree balancing simulator";

    py::register_exception<Error>(m, "BreatheError", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def("watts_to_dbm", [](double w) { return watts_to_dbm(Watts{w}).value; });
    m.def("dbm_to_watts", [](double d) { return dbm_to_watts(Dbm{d}).value; });

    py::class_<AlgorithmConfig>(m, "AlgorithmConfig")
        .def(py::init<>())
        .def_readwrite("epsilon", &AlgorithmConfig::epsilon)
        .def_readwrite("gamma", &AlgorithmConfig::gamma)
        .def_readwrite("tau", &AlgorithmConfig::tau)
        .def_readwrite("delta_p", &AlgorithmConfig::delta_p)
        .def_readwrite("n_s", &AlgorithmConfig::n_s)
        .def_readwrite("f_con", &AlgorithmConfig::f_con)
        .def_readwrite("r_c", &AlgorithmConfig::r_c)
        .def_readwrite("top_m", &AlgorithmConfig::top_m)
        .def_readwrite("over_busy_threshold", &AlgorithmConfig::over_busy_threshold)
        .def_readwrite("power_floor_dbm", &AlgorithmConfig::power_floor_dbm)
        .def_readwrite("coverage_enabled", &AlgorithmConfig::coverage_enabled)
        .def_readwrite("dense_limit", &AlgorithmConfig::dense_limit)
        .def_readwrite("seed", &AlgorithmConfig::seed)
        .def("check", &AlgorithmConfig::check);

    py::class_<GridOptions>(m, "GridOptions")
        .def(py::init<>())
        .def_readwrite("rows", &GridOptions::rows)
        .def_readwrite("cols", &GridOptions::cols)
        .def_readwrite("spacing", &GridOptions::spacing)
        .def_readwrite("power_dbm", &GridOptions::power_dbm)
        .def_readwrite("max_power_dbm", &GridOptions::max_power_dbm)
        .def_readwrite("prbs", &GridOptions::prbs);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("config", &Scenario::config)
        .def_property_readonly("size", [](const Scenario& s) { return s.topology.size(); })
        .def_property_readonly("periods", [](const Scenario& s) { return s.traffic.periods; })
        .def_property_readonly("powers", [](const Scenario& s) { return s.topology.powers(); })
        .def("to_json", [](const Scenario& s) { return to_json(s).dump(); });

    m.def("tidal_scenario", &tidal_scenario, py::arg("grid"), py::arg("periods"), py::arg("users"), py::arg("seed"));
    m.def("proportional_scenario", &proportional_scenario, py::arg("grid"), py::arg("periods"), py::arg("users"),
          py::arg("seed"));
    m.def("drift_scenario", &drift_scenario, py::arg("grid"), py::arg("periods"), py::arg("users"),
          py::arg("step_fraction"), py::arg("seed"));
    m.def("load_scenario", &load_scenario);
    m.def("save_scenario", &save_scenario);
    m.def("scenario_from_json", [](const std::string& text) { return scenario_from_json(Json::parse(text)); });

    m.def("run_experiment", &run, py::arg("scenario"), py::arg("algorithm") = "none", py::arg("periods") = 0,
          py::arg("cfg") = AlgorithmConfig{}, py::arg("measure_coverage") = true,
          "Runs the control loop; returns per-period metric lists, powers and busy-degrees.");

    m.def(
        "compare",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            if (a.size() != b.size()) throw InvalidArgument("series lengths differ");
            double ma = 0, mb = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                ma += a[i];
                mb += b[i];
            }
            return ma == 0.0 ? 0.0 : 100.0 * (ma - mb) / ma;
        },
        "Percentage reduction of the mean from series a to series b.");

    m.def("jacobian", &jacobian_at, py::arg("scenario"), py::arg("period") = 1, py::arg("cfg") = AlgorithmConfig{},
          "Normalized Jacobian estimate at the scenario's initial powers.");

    m.def(
        "bdba_solve",
        [](const Eigen::MatrixXd& a, const std::vector<double>& d) { return bdba_solve(jacobian_from_dense(a), d).u; },
        py::arg("jacobian"), py::arg("d"));
    m.def(
        "bfdba_solve",
        [](const Eigen::MatrixXd& a, const std::vector<double>& d, const std::vector<double>& p, double tau) {
            return bfdba_solve(jacobian_from_dense(a), d, p, tau).u;
        },
        py::arg("jacobian"), py::arg("d"), py::arg("powers"), py::arg("tau"));

    m.def(
        "property_suite",
        [](const Scenario& s, const AlgorithmConfig& cfg, int periods) {
            PropertyOptions opt;
            opt.periods = periods;
            py::list out;
            for (const auto& c : property_suite(s, cfg, opt).checks) {
                py::dict d;
                d["name"] = c.name;
                d["passed"] = c.passed;
                d["measured"] = c.measured;
                d["threshold"] = c.threshold;
                d["detail"] = c.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("scenario"), py::arg("cfg") = AlgorithmConfig{}, py::arg("periods") = 50);
}
