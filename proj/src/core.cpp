#include "breathe/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace breathe {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Dbm watts_to_dbm(Watts p) {
    if (!(p.value > 0.0)) throw InvalidArgument("watts_to_dbm: power must be positive");
    return Dbm{10.0 * std::log10(p.value * 1000.0)};
}

Watts dbm_to_watts(Dbm p) { return Watts{std::pow(10.0, p.value / 10.0) / 1000.0}; }

std::vector<double> NetworkTopology::powers() const {
    std::vector<double> out;
    out.reserve(antennas.size());
    for (const auto& a : antennas) out.push_back(a.power_dbm);
    return out;
}

std::vector<double> NetworkTopology::max_powers() const {
    std::vector<double> out;
    out.reserve(antennas.size());
    for (const auto& a : antennas) out.push_back(a.max_power_dbm);
    return out;
}

std::vector<int> NetworkTopology::prbs() const {
    std::vector<int> out;
    out.reserve(antennas.size());
    for (const auto& a : antennas) out.push_back(a.prbs);
    return out;
}

void NetworkTopology::check() const {
    if (neighbours.size() != antennas.size())
        throw InvalidArgument("topology: neighbour table size differs from antenna count");
    for (std::size_t i = 0; i < antennas.size(); ++i) {
        const auto& a = antennas[i];
        if (a.prbs < 1)
            throw InvalidArgument("topology: antenna " + std::to_string(antenna_id(i)) + " has no PRBs");
        if (!(a.power_dbm > 0.0) || a.power_dbm > a.max_power_dbm)
            throw InvalidArgument("topology: antenna " + std::to_string(antenna_id(i)) +
                                  " power outside (0, p_max]");
        for (auto j : neighbours[i]) {
            if (j >= antennas.size() || j == i)
                throw InvalidArgument("topology: antenna " + std::to_string(antenna_id(i)) +
                                      " has an invalid neighbour");
        }
    }
}

namespace {

// Iterative Kosaraju.
std::vector<int> component_labels(const std::vector<std::vector<AntennaIndex>>& adj, int& count) {
    const std::size_t n = adj.size();
    std::vector<std::vector<AntennaIndex>> rev(n);
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : adj[i]) rev[j].push_back(i);

    std::vector<AntennaIndex> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    std::vector<std::pair<AntennaIndex, std::size_t>> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        seen[s] = 1;
        stack.emplace_back(s, 0);
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < adj[v].size()) {
                auto w = adj[v][next++];
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.emplace_back(w, 0);
                }
            } else {
                order.push_back(v);
                stack.pop_back();
            }
        }
    }

    std::vector<int> label(n, -1);
    count = 0;
    std::vector<AntennaIndex> work;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (label[*it] >= 0) continue;
        work.push_back(*it);
        label[*it] = count;
        while (!work.empty()) {
            auto v = work.back();
            work.pop_back();
            for (auto w : rev[v]) {
                if (label[w] < 0) {
                    label[w] = count;
                    work.push_back(w);
                }
            }
        }
        ++count;
    }
    return label;
}

}  // namespace

std::vector<std::vector<AntennaIndex>> strong_components(
    const std::vector<std::vector<AntennaIndex>>& adjacency) {
    int count = 0;
    auto label = component_labels(adjacency, count);
    std::vector<std::vector<AntennaIndex>> comps(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < label.size(); ++i) comps[static_cast<std::size_t>(label[i])].push_back(i);
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

bool strongly_connected(const std::vector<std::vector<AntennaIndex>>& adjacency) {
    if (adjacency.empty()) return false;
    int count = 0;
    component_labels(adjacency, count);
    return count == 1;
}

ValidationReport validate_topology(const NetworkTopology& topo) {
    ValidationReport report;
    const auto n = topo.neighbours.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j : topo.neighbours[i]) {
            if (j >= n) continue;
            const auto& back = topo.neighbours[j];
            if (std::find(back.begin(), back.end(), i) == back.end())
                report.symmetry_violations.emplace_back(antenna_id(i), antenna_id(j));
        }
        if (n > 1 && topo.neighbours[i].empty()) report.isolated.push_back(antenna_id(i));
    }
    report.connected = strongly_connected(topo.neighbours);
    return report;
}

NetworkTopology symmetrized(NetworkTopology topo) {
    const auto n = topo.neighbours.size();
    auto adj = topo.neighbours;
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : topo.neighbours[i])
            if (j < n && std::find(adj[j].begin(), adj[j].end(), i) == adj[j].end()) adj[j].push_back(i);
    for (auto& row : adj) std::sort(row.begin(), row.end());
    topo.neighbours = std::move(adj);
    return topo;
}

void SimulationClock::check() const {
    if (period < 1) throw InvalidArgument("clock: period index must be >= 1");
    if (!(prb_timescale_seconds > 0.0) || !(period_seconds > 0.0))
        throw InvalidArgument("clock: durations must be positive");
    double ratio = period_seconds / prb_timescale_seconds;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw InvalidArgument("clock: T must be an integer multiple of H");
}

void AlgorithmConfig::check() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("config: gamma must lie in (0, 1]");
    if (!(epsilon > 0.0)) throw InvalidArgument("config: epsilon must be positive");
    if (!(tau > 0.0)) throw InvalidArgument("config: tau must be positive");
    if (!(delta_p > 0.0)) throw InvalidArgument("config: delta_p must be positive");
    if (!(f_con > 0.0 && f_con <= 1.0)) throw InvalidArgument("config: f_con must lie in (0, 1]");
    if (n_s < 1) throw InvalidArgument("config: n_s must be >= 1");
    if (top_m < 1) throw InvalidArgument("config: top_m must be >= 1");
}

std::string to_string(TargetMode mode) { return mode == TargetMode::global ? "global" : "local"; }

TargetMode parse_target_mode(const std::string& s) {
    if (s == "global") return TargetMode::global;
    if (s == "local") return TargetMode::local;
    throw InvalidArgument("unknown target mode: " + s);
}

}  // namespace breathe
