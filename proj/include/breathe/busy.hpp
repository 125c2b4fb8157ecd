#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "breathe/core.hpp"
#include "breathe/traffic.hpp"

namespace breathe {

struct BusyState {
    std::vector<double> f;
    std::vector<double> f_bar;
    std::vector<double> d;
    int period = 1;
};

/// Integer PRB demand served by each antenna.
std::vector<long long> served_demand(std::span<const AntennaIndex> assignment, std::span<const UserSample> users,
                                     std::size_t n);

/// f_i = served demand / r_i.
std::vector<double> busy_degrees(std::span<const AntennaIndex> assignment, std::span<const UserSample> users,
                                 const NetworkTopology& topo);

/// Global: capacity-weighted mean everywhere. Local: capacity-weighted mean
/// over the antenna and its neighbours. Throws when there is no traffic.
std::vector<double> targets(std::span<const double> f, const NetworkTopology& topo, TargetMode mode);

/// d_i = 1 - f_i / f_bar_i.
std::vector<double> disagreement(std::span<const double> f, std::span<const double> f_bar);

/// f_i / (z / sum r).
std::vector<double> relative_busy(std::span<const double> f, double z, const NetworkTopology& topo);

BusyState busy_state(std::span<const double> f, const NetworkTopology& topo, TargetMode mode, int period);

/// sqrt(mean((f_i - f_bar_i)^2)).
double busy_std_dev(std::span<const double> f, std::span<const double> f_bar);
double over_busy_fraction(std::span<const double> f, double threshold);
double max_abs(std::span<const double> v);

void write_busy_csv_header(std::ostream& os);
void write_busy_csv_rows(std::ostream& os, const BusyState& state);

}  // namespace breathe
