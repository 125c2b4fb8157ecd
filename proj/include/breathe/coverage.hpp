#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "breathe/core.hpp"
#include "breathe/mr.hpp"

namespace breathe {

class InfeasibleCoverage : public Error {
  public:
    InfeasibleCoverage(const std::string& what, std::vector<int> antennas)
        : Error(what), antennas_(std::move(antennas)) {}
    const std::vector<int>& antennas() const { return antennas_; }

  private:
    std::vector<int> antennas_;
};

struct CoverageReport {
    double F = 1.0;
    std::vector<double> F_i;  // per antenna, over its relevant records
    std::size_t uncovered_count = 0;
    std::size_t k_prime = 0;
    std::vector<std::string> warnings;
};

/// Network coverage of a preprocessed (attenuation-domain, deduplicated,
/// tabled) dataset: a record is covered when some listed antenna i has
/// a(s, i) <= p_i - r_c. F = 1 - uncovered / K'.
CoverageReport exact_coverage(const MrDataset& ds, std::span<const double> powers, double r_c);

/// Coverage rate of antenna i's relevant records, counting only antennas in
/// `neighbourhood` (which should contain i) as coverers. Returns 1 when i has
/// no relevant records.
double neighbourhood_coverage(const MrDataset& ds, std::span<const double> powers, AntennaIndex i, double r_c,
                              std::span<const AntennaIndex> neighbourhood);

/// i followed by its co-occurrence neighbours.
std::vector<AntennaIndex> neighbourhood_of(const std::vector<std::vector<AntennaIndex>>& neighbours, AntennaIndex i);

/// Runs the full preprocessing chain on a signal-domain batch.
MrDataset preprocess_for_coverage(MrDataset signal_ds, std::span<const double> recorded_powers);

// Monotone surrogate.

struct MlpLayer {
    Eigen::MatrixXd omega;  // pre-square weights, out x in; effective weight omega^2
    Eigen::VectorXd bias;
};

/// Feed-forward net whose effective weights are squares of the stored
/// parameters, with logistic hidden units and a linear output: the output is
/// non-decreasing in every input.
class MonotoneMlp {
  public:
    MonotoneMlp() = default;
    MonotoneMlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    std::size_t input_size() const { return sizes_.empty() ? 0 : sizes_.front(); }
    std::vector<MlpLayer>& layers() { return layers_; }
    const std::vector<MlpLayer>& layers() const { return layers_; }

    std::vector<double> input_min;
    std::vector<double> input_max;

    /// Raw network output on normalized inputs.
    double forward(std::span<const double> normalized) const;
    std::vector<double> normalize(std::span<const double> powers) const;

    void save(const std::filesystem::path& path) const;
    static MonotoneMlp load(const std::filesystem::path& path);

  private:
    std::vector<std::size_t> sizes_;
    std::vector<MlpLayer> layers_;
};

struct SurrogateSamples {
    std::vector<std::vector<double>> inputs;  // normalized powers in [0, 1]
    std::vector<double> targets;              // coverage rates in [0, 1]
};

struct TrainOptions {
    std::vector<std::size_t> hidden;  // empty: (4m, 2m, m) for m inputs
    std::size_t epochs = 400;
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    double time_limit_seconds = 600.0;
};

struct TrainResult {
    MonotoneMlp mlp;
    double training_mse = 0.0;
    std::size_t epochs_run = 0;
};

class TrainingDiverged : public Error {
  public:
    using Error::Error;
};

/// MSE backpropagation with Adam; gradients pass through the squaring.
/// Deterministic given the seed. Throws TrainingDiverged when the epoch MSE
/// rises ten epochs in a row.
TrainResult train_surrogate(const SurrogateSamples& samples, const TrainOptions& options);

struct SurrogateOutput {
    double value = 0.0;
    bool extrapolated = false;
};

/// Forward pass on raw powers of the neighbourhood, normalized with the
/// training min/max; clipped to [0, 1].
SurrogateOutput surrogate_coverage(const MonotoneMlp& mlp, std::span<const double> neighbourhood_powers);

void write_surrogate_manifest(const std::filesystem::path& path, const TrainResult& result, std::uint64_t seed);

/// Per-antenna surrogates over each antenna's co-occurrence neighbourhood.
struct SurrogateBank {
    std::vector<std::vector<AntennaIndex>> neighbourhoods;  // i first, then its neighbours
    std::vector<std::optional<MonotoneMlp>> models;
    std::vector<double> training_mse;

    /// F_i^* under the full power vector; 1 for antennas without a model.
    double evaluate(AntennaIndex i, std::span<const double> powers) const;
    std::vector<std::vector<AntennaIndex>> neighbour_lists() const;
};

struct BankOptions {
    std::size_t samples_per_antenna = 400;
    TrainOptions train;
};

/// Trains one surrogate per antenna on random power vectors drawn uniformly
/// from [p_low, p_high] per neighbourhood member, labelled with the exact
/// neighbourhood coverage of a preprocessed batch.
/// Directory layout: surrogates.txt (one line per antenna: id, neighbourhood
/// ids, model file, training MSE) plus one surrogate_<id>.bin per model.
void save_surrogate_bank(const std::filesystem::path& dir, const SurrogateBank& bank, std::uint64_t seed);
SurrogateBank load_surrogate_bank(const std::filesystem::path& dir);

SurrogateBank train_surrogate_bank(const MrDataset& preprocessed, std::span<const double> p_low,
                                   std::span<const double> p_high, double r_c, const BankOptions& options);

// Minimum-power search.

struct FailGraph {
    std::vector<AntennaIndex> vertices;
    std::vector<std::pair<AntennaIndex, AntennaIndex>> edges;
    std::vector<std::vector<AntennaIndex>> components;
};

FailGraph fail_graph(std::span<const double> F, double f_con, const std::vector<std::vector<AntennaIndex>>& neighbours);

/// Coverage rate of antenna i's neighbourhood under the given full power vector.
using CoverageFn = std::function<double(AntennaIndex, std::span<const double>)>;

struct MinPowerResult {
    std::vector<double> p_min;
    std::vector<double> F;
    std::size_t rounds = 0;
    std::size_t round_bound = 0;
    std::vector<AntennaIndex> touched;
};

/// Each round raises, in every connected component of failing antennas, the
/// antenna with the lowest coverage (lowest id on ties) by delta_p, until all
/// F_i >= f_con. Throws InfeasibleCoverage when a failing component has every
/// member at p_max.
MinPowerResult min_power_search(std::span<const double> start, std::span<const double> p_max,
                                const std::vector<std::vector<AntennaIndex>>& neighbours, const CoverageFn& coverage,
                                double f_con, double delta_p);

}  // namespace breathe
