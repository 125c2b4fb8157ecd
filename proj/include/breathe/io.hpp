#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "breathe/harness.hpp"

namespace breathe {

using Json = nlohmann::json;

/// A power is an object {"value": x, "unit": "watts" | "dbm"}; returns dBm.
double power_from_json(const Json& j);
Json power_to_json(double dbm);

NetworkTopology topology_from_json(const Json& j);
TrafficScenario traffic_from_json(const Json& j);
PathlossModel pathloss_from_json(const Json& j);
/// Fields present in j override `base`.
AlgorithmConfig config_from_json(const Json& j, AlgorithmConfig base = {});
Scenario scenario_from_json(const Json& j);

Json to_json(const NetworkTopology& topo);
Json to_json(const TrafficScenario& traffic);
Json to_json(const PathlossModel& model);
Json to_json(const AlgorithmConfig& cfg);
Json to_json(const Scenario& scenario);

Json read_json(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& scenario);

/// {"scenario": path or inline object, "algorithm", "periods", "config",
/// "output", "measure_coverage"}. Relative scenario paths resolve against
/// the spec file's directory.
ExperimentSpec load_experiment(const std::filesystem::path& path);
Json to_json(const ExperimentSpec& spec);

}  // namespace breathe
