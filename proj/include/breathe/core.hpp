#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace breathe {

// Antennas are addressed by dense zero-based index internally. Files and
// reports use the one-based id (index + 1).
using AntennaIndex = std::size_t;

inline int antenna_id(AntennaIndex i) { return static_cast<int>(i) + 1; }

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double distance(Vec2 a, Vec2 b);

struct Watts {
    double value;
};

struct Dbm {
    double value;
};

/// 10*log10(p * 1000). Throws InvalidArgument for p <= 0.
Dbm watts_to_dbm(Watts p);
Watts dbm_to_watts(Dbm p);

struct Antenna {
    double power_dbm = 0.0;
    double max_power_dbm = 0.0;
    int prbs = 1;
    Vec2 position;
};

struct NetworkTopology {
    std::vector<Antenna> antennas;
    std::vector<std::vector<AntennaIndex>> neighbours;

    std::size_t size() const { return antennas.size(); }
    std::vector<double> powers() const;
    std::vector<double> max_powers() const;
    std::vector<int> prbs() const;
    /// Throws InvalidArgument on violated Antenna invariants or bad neighbour indices.
    void check() const;
};

struct ValidationReport {
    std::vector<std::pair<int, int>> symmetry_violations;  // (i, j) ids: j in N_i but i not in N_j
    std::vector<int> isolated;                              // ids with empty N_i (n > 1 only)
    bool connected = false;

    bool ok() const { return symmetry_violations.empty() && isolated.empty() && connected; }
};

ValidationReport validate_topology(const NetworkTopology& topo);

/// Adds the missing reverse edge for every asymmetric neighbour pair.
NetworkTopology symmetrized(NetworkTopology topo);

/// Strong connectivity of the neighbour relation treated as a directed graph.
bool strongly_connected(const std::vector<std::vector<AntennaIndex>>& adjacency);

/// Strongly connected components, each sorted ascending; components ordered by smallest member.
std::vector<std::vector<AntennaIndex>> strong_components(
    const std::vector<std::vector<AntennaIndex>>& adjacency);

struct SimulationClock {
    int period = 1;
    double period_seconds = 3600.0;
    double prb_timescale_seconds = 0.001;

    void check() const;
};

enum class TargetMode { global, local };

struct AlgorithmConfig {
    double epsilon = 0.1;
    double gamma = 1.0;
    double tau = 0.01;
    double delta_p = 1.0;
    std::size_t n_s = 5000;
    double f_con = 0.999;
    double r_c = -90.0;
    TargetMode target_mode = TargetMode::global;

    std::size_t top_m = 6;
    double over_busy_threshold = 0.7;
    // Hard floor for every antenna's power; keeps p > 0 dBm-domain.
    double power_floor_dbm = 10.0;
    bool coverage_enabled = true;
    bool use_surrogate = false;
    // Dense SVD up to this size, iterative least squares above.
    std::size_t dense_limit = 2000;
    unsigned long long seed = 1;

    void check() const;
};

std::string to_string(TargetMode mode);
TargetMode parse_target_mode(const std::string& s);

}  // namespace breathe
