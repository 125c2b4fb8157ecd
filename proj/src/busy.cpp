#include "breathe/busy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace breathe {

std::vector<long long> served_demand(std::span<const AntennaIndex> assignment, std::span<const UserSample> users,
                                     std::size_t n) {
    if (assignment.size() != users.size()) throw InvalidArgument("assignment does not cover all users");
    std::vector<long long> load(n, 0);
    for (std::size_t u = 0; u < users.size(); ++u) {
        if (assignment[u] >= n) throw InvalidArgument("assignment references unknown antenna");
        load[assignment[u]] += users[u].demand;
    }
    return load;
}

std::vector<double> busy_degrees(std::span<const AntennaIndex> assignment, std::span<const UserSample> users,
                                 const NetworkTopology& topo) {
    auto load = served_demand(assignment, users, topo.size());
    std::vector<double> f(load.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = static_cast<double>(load[i]) / static_cast<double>(topo.antennas[i].prbs);
    return f;
}

std::vector<double> targets(std::span<const double> f, const NetworkTopology& topo, TargetMode mode) {
    const std::size_t n = topo.size();
    if (f.size() != n) throw InvalidArgument("targets: busy-degree vector has the wrong length");
    double mass = 0.0;
    double capacity = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mass += topo.antennas[i].prbs * f[i];
        capacity += topo.antennas[i].prbs;
    }
    if (!(mass > 0.0)) throw InvalidArgument("targets: no traffic, targets undefined");
    std::vector<double> out(n, mass / capacity);
    if (mode == TargetMode::global) return out;

    for (std::size_t i = 0; i < n; ++i) {
        double m = topo.antennas[i].prbs * f[i];
        double c = topo.antennas[i].prbs;
        for (auto j : topo.neighbours[i]) {
            m += topo.antennas[j].prbs * f[j];
            c += topo.antennas[j].prbs;
        }
        if (!(m > 0.0))
            throw InvalidArgument("targets: neighbourhood of antenna " + std::to_string(antenna_id(i)) +
                                  " carries no traffic");
        out[i] = m / c;
    }
    return out;
}

std::vector<double> disagreement(std::span<const double> f, std::span<const double> f_bar) {
    if (f.size() != f_bar.size()) throw InvalidArgument("disagreement: length mismatch");
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f_bar[i] > 0.0)) throw InvalidArgument("disagreement: target busy-degree must be positive");
        d[i] = 1.0 - f[i] / f_bar[i];
    }
    return d;
}

std::vector<double> relative_busy(std::span<const double> f, double z, const NetworkTopology& topo) {
    if (!(z > 0.0)) throw InvalidArgument("relative_busy: total traffic must be positive");
    double capacity = 0.0;
    for (const auto& a : topo.antennas) capacity += a.prbs;
    const double fair = z / capacity;
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] / fair;
    return out;
}

BusyState busy_state(std::span<const double> f, const NetworkTopology& topo, TargetMode mode, int period) {
    BusyState s;
    s.f.assign(f.begin(), f.end());
    s.f_bar = targets(f, topo, mode);
    s.d = disagreement(s.f, s.f_bar);
    s.period = period;
    return s;
}

double busy_std_dev(std::span<const double> f, std::span<const double> f_bar) {
    if (f.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += (f[i] - f_bar[i]) * (f[i] - f_bar[i]);
    return std::sqrt(acc / static_cast<double>(f.size()));
}

double over_busy_fraction(std::span<const double> f, double threshold) {
    if (f.empty()) return 0.0;
    auto count = std::count_if(f.begin(), f.end(), [&](double v) { return v >= threshold; });
    return static_cast<double>(count) / static_cast<double>(f.size());
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void write_busy_csv_header(std::ostream& os) { os << "period,antenna_id,f,f_bar,d\n"; }

void write_busy_csv_rows(std::ostream& os, const BusyState& state) {
    for (std::size_t i = 0; i < state.f.size(); ++i)
        os << state.period << ',' << antenna_id(i) << ',' << state.f[i] << ',' << state.f_bar[i] << ','
           << state.d[i] << '\n';
}

}  // namespace breathe
