#include "breathe/io.hpp"

#include <fstream>

namespace breathe {

namespace {

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Vec2 vec_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw InvalidArgument("expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json vec_to_json(Vec2 v) { return Json::array({v.x, v.y}); }

}  // namespace

double power_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("value") || !j.contains("unit"))
        throw InvalidArgument("power needs {\"value\", \"unit\"}: " + j.dump());
    const double v = j.at("value").get<double>();
    const auto unit = j.at("unit").get<std::string>();
    if (unit == "dbm") return v;
    if (unit == "watts") return watts_to_dbm(Watts{v}).value;
    throw InvalidArgument("unknown power unit: " + unit);
}

Json power_to_json(double dbm) { return {{"value", dbm}, {"unit", "dbm"}}; }

NetworkTopology topology_from_json(const Json& j) {
    NetworkTopology topo;
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        GridOptions o;
        read_opt(g, "rows", o.rows);
        read_opt(g, "cols", o.cols);
        read_opt(g, "spacing", o.spacing);
        read_opt(g, "prbs", o.prbs);
        if (g.contains("power")) o.power_dbm = power_from_json(g.at("power"));
        if (g.contains("max_power")) o.max_power_dbm = power_from_json(g.at("max_power"));
        topo = grid_topology(o);
    } else {
        const auto& list = j.at("antennas");
        topo.antennas.resize(list.size());
        topo.neighbours.resize(list.size());
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& a = list[i];
            if (a.contains("id") && a.at("id").get<int>() != antenna_id(i))
                throw InvalidArgument("antenna ids must be dense and ordered 1..n");
            topo.antennas[i].power_dbm = power_from_json(a.at("power"));
            topo.antennas[i].max_power_dbm = power_from_json(a.at("max_power"));
            read_opt(a, "prbs", topo.antennas[i].prbs);
            if (a.contains("position")) topo.antennas[i].position = vec_from_json(a.at("position"));
            if (a.contains("neighbours"))
                for (int id : a.at("neighbours").get<std::vector<int>>()) {
                    if (id < 1 || id > static_cast<int>(list.size()))
                        throw InvalidArgument("neighbour id out of range: " + std::to_string(id));
                    topo.neighbours[i].push_back(static_cast<AntennaIndex>(id - 1));
                }
        }
    }
    topo.check();
    return topo;
}

Json to_json(const NetworkTopology& topo) {
    Json list = Json::array();
    for (std::size_t i = 0; i < topo.size(); ++i) {
        const auto& a = topo.antennas[i];
        Json nb = Json::array();
        for (auto k : topo.neighbours[i]) nb.push_back(antenna_id(k));
        list.push_back({{"id", antenna_id(i)},
                        {"power", power_to_json(a.power_dbm)},
                        {"max_power", power_to_json(a.max_power_dbm)},
                        {"prbs", a.prbs},
                        {"position", vec_to_json(a.position)},
                        {"neighbours", nb}});
    }
    return {{"antennas", list}};
}

TrafficScenario traffic_from_json(const Json& j) {
    TrafficScenario t;
    read_opt(j, "periods", t.periods);
    read_opt(j, "background_weight", t.background_weight);
    if (j.contains("area")) {
        t.area_min = vec_from_json(j.at("area").at(0));
        t.area_max = vec_from_json(j.at("area").at(1));
    }
    read_opt(j, "total_users", t.total_users);
    read_opt(j, "base_users", t.base_users);
    if (j.contains("mode")) {
        const auto m = j.at("mode").get<std::string>();
        if (m == "free")
            t.mode = TrafficMode::free;
        else if (m == "proportional")
            t.mode = TrafficMode::proportional;
        else
            throw InvalidArgument("unknown traffic mode: " + m);
    }
    read_opt(j, "k_star", t.k_star);
    read_opt(j, "beta", t.beta);
    read_opt(j, "demand", t.demand);
    read_opt(j, "seed", t.seed);
    if (j.contains("hotspots"))
        for (const auto& h : j.at("hotspots")) {
            HotspotTrack track;
            // A static hotspot is a single keyframe.
            const Json keys = h.contains("keys") ? h.at("keys") : Json::array({h});
            for (const auto& k : keys) {
                HotspotKeyframe kf;
                read_opt(k, "period", kf.period);
                kf.hotspot.center = vec_from_json(k.at("center"));
                read_opt(k, "weight", kf.hotspot.weight);
                read_opt(k, "spread", kf.hotspot.spread);
                track.keys.push_back(kf);
            }
            t.tracks.push_back(track);
        }
    t.check();
    return t;
}

Json to_json(const TrafficScenario& t) {
    Json tracks = Json::array();
    for (const auto& tr : t.tracks) {
        Json keys = Json::array();
        for (const auto& k : tr.keys)
            keys.push_back({{"period", k.period},
                            {"center", vec_to_json(k.hotspot.center)},
                            {"weight", k.hotspot.weight},
                            {"spread", k.hotspot.spread}});
        tracks.push_back({{"keys", keys}});
    }
    return {{"periods", t.periods},
            {"hotspots", tracks},
            {"background_weight", t.background_weight},
            {"area", Json::array({vec_to_json(t.area_min), vec_to_json(t.area_max)})},
            {"total_users", t.total_users},
            {"base_users", t.base_users},
            {"mode", t.mode == TrafficMode::free ? "free" : "proportional"},
            {"k_star", t.k_star},
            {"beta", t.beta},
            {"demand", t.demand},
            {"seed", t.seed}};
}

PathlossModel pathloss_from_json(const Json& j) {
    PathlossModel m;
    read_opt(j, "exponent", m.exponent);
    read_opt(j, "reference_loss", m.reference_loss);
    read_opt(j, "shadowing_sigma", m.shadowing_sigma);
    read_opt(j, "seed", m.seed);
    m.check();
    return m;
}

Json to_json(const PathlossModel& m) {
    return {{"exponent", m.exponent},
            {"reference_loss", m.reference_loss},
            {"shadowing_sigma", m.shadowing_sigma},
            {"seed", m.seed}};
}

AlgorithmConfig config_from_json(const Json& j, AlgorithmConfig c) {
    read_opt(j, "epsilon", c.epsilon);
    read_opt(j, "gamma", c.gamma);
    read_opt(j, "tau", c.tau);
    read_opt(j, "delta_p", c.delta_p);
    read_opt(j, "n_s", c.n_s);
    read_opt(j, "f_con", c.f_con);
    if (j.contains("r_c")) c.r_c = j.at("r_c").is_object() ? power_from_json(j.at("r_c")) : j.at("r_c").get<double>();
    if (j.contains("target_mode")) c.target_mode = parse_target_mode(j.at("target_mode").get<std::string>());
    read_opt(j, "top_m", c.top_m);
    read_opt(j, "over_busy_threshold", c.over_busy_threshold);
    if (j.contains("power_floor")) c.power_floor_dbm = power_from_json(j.at("power_floor"));
    read_opt(j, "coverage_enabled", c.coverage_enabled);
    read_opt(j, "use_surrogate", c.use_surrogate);
    read_opt(j, "dense_limit", c.dense_limit);
    read_opt(j, "seed", c.seed);
    c.check();
    return c;
}

Json to_json(const AlgorithmConfig& c) {
    return {{"epsilon", c.epsilon},
            {"gamma", c.gamma},
            {"tau", c.tau},
            {"delta_p", c.delta_p},
            {"n_s", c.n_s},
            {"f_con", c.f_con},
            {"r_c", power_to_json(c.r_c)},
            {"target_mode", to_string(c.target_mode)},
            {"top_m", c.top_m},
            {"over_busy_threshold", c.over_busy_threshold},
            {"power_floor", power_to_json(c.power_floor_dbm)},
            {"coverage_enabled", c.coverage_enabled},
            {"use_surrogate", c.use_surrogate},
            {"dense_limit", c.dense_limit},
            {"seed", c.seed}};
}

Scenario scenario_from_json(const Json& j) {
    Scenario s;
    read_opt(j, "name", s.name);
    s.topology = topology_from_json(j.at("topology"));
    s.traffic = traffic_from_json(j.at("traffic"));
    if (j.contains("pathloss")) s.pathloss = pathloss_from_json(j.at("pathloss"));
    if (j.contains("config")) s.config = config_from_json(j.at("config"));
    return s;
}

Json to_json(const Scenario& s) {
    return {{"name", s.name},
            {"topology", to_json(s.topology)},
            {"traffic", to_json(s.traffic)},
            {"pathloss", to_json(s.pathloss)},
            {"config", to_json(s.config)}};
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    try {
        return scenario_from_json(read_json(path));
    } catch (const Json::exception& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

void save_scenario(const std::filesystem::path& path, const Scenario& scenario) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << to_json(scenario).dump(2) << '\n';
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
    const Json j = read_json(path);
    ExperimentSpec spec;
    try {
        const auto& sc = j.at("scenario");
        if (sc.is_string()) {
            auto ref = std::filesystem::path(sc.get<std::string>());
            if (ref.is_relative()) ref = path.parent_path() / ref;
            spec.scenario = load_scenario(ref);
            spec.scenario_ref = ref.string();
        } else {
            spec.scenario = scenario_from_json(sc);
        }
        if (j.contains("algorithm")) spec.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        spec.periods = spec.scenario.traffic.periods;
        read_opt(j, "periods", spec.periods);
        spec.cfg = j.contains("config") ? config_from_json(j.at("config"), spec.scenario.config) : spec.scenario.config;
        read_opt(j, "measure_coverage", spec.measure_coverage);
        if (j.contains("output")) spec.output = j.at("output").get<std::string>();
    } catch (const Json::exception& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
    spec.check();
    return spec;
}

Json to_json(const ExperimentSpec& spec) {
    return {{"scenario_ref", spec.scenario_ref},
            {"scenario", to_json(spec.scenario)},
            {"algorithm", to_string(spec.algorithm)},
            {"periods", spec.periods},
            {"config", to_json(spec.cfg)},
            {"measure_coverage", spec.measure_coverage},
            {"output", spec.output.string()}};
}

}  // namespace breathe
