#include "breathe/coverage.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "breathe/rng.hpp"

namespace breathe {

namespace {

constexpr double kStalenessDb = 6.0;

void require_preprocessed(const MrDataset& ds) {
    if (ds.domain != MrDomain::attenuation) throw InvalidArgument("coverage: needs attenuation-domain MR data");
    if (!ds.has_tables() && !ds.records.empty())
        throw InvalidArgument("coverage: per-antenna tables have not been built");
}

}  // namespace

CoverageReport exact_coverage(const MrDataset& ds, std::span<const double> powers, double r_c) {
    CoverageReport rep;
    rep.k_prime = ds.k_prime();
    const std::size_t n = ds.antenna_count;
    rep.F_i.assign(n, 1.0);
    if (ds.records.empty()) {
        rep.warnings.push_back("empty MR dataset: coverage defined as 1");
        return rep;
    }
    require_preprocessed(ds);
    if (powers.size() != n) throw InvalidArgument("exact_coverage: power vector length mismatch");
    if (ds.recorded_powers.size() == n)
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(powers[i] - ds.recorded_powers[i]) > kStalenessDb) {
                rep.warnings.push_back("MR batch is stale: antenna " + std::to_string(antenna_id(i)) +
                                       " moved more than 6 dB from its recording power");
                break;
            }

    std::vector<char> covered(ds.records.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double threshold = powers[i] - r_c;
        for (auto r : ds.per_antenna[i]) {
            if (*ds.records[r].value_of(i) > threshold) break;
            covered[r] = 1;
        }
    }
    rep.uncovered_count = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), 0));
    rep.F = 1.0 - static_cast<double>(rep.uncovered_count) / static_cast<double>(rep.k_prime);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& table = ds.per_antenna[i];
        if (table.empty()) continue;
        std::size_t c = 0;
        for (auto r : table) c += covered[r];
        rep.F_i[i] = static_cast<double>(c) / static_cast<double>(table.size());
    }
    return rep;
}

double neighbourhood_coverage(const MrDataset& ds, std::span<const double> powers, AntennaIndex i, double r_c,
                              std::span<const AntennaIndex> neighbourhood) {
    if (ds.records.empty()) return 1.0;
    require_preprocessed(ds);
    if (i >= ds.antenna_count) throw InvalidArgument("neighbourhood_coverage: unknown antenna");
    const auto& table = ds.per_antenna[i];
    if (table.empty()) return 1.0;
    std::size_t covered = 0;
    for (auto r : table) {
        for (const auto& e : ds.records[r].entries) {
            if (std::find(neighbourhood.begin(), neighbourhood.end(), e.antenna) == neighbourhood.end()) continue;
            if (e.value <= powers[e.antenna] - r_c) {
                ++covered;
                break;
            }
        }
    }
    return static_cast<double>(covered) / static_cast<double>(table.size());
}

std::vector<AntennaIndex> neighbourhood_of(const std::vector<std::vector<AntennaIndex>>& neighbours, AntennaIndex i) {
    std::vector<AntennaIndex> out{i};
    out.insert(out.end(), neighbours.at(i).begin(), neighbours.at(i).end());
    return out;
}

MrDataset preprocess_for_coverage(MrDataset signal_ds, std::span<const double> recorded_powers) {
    return build_per_antenna_tables(remove_redundant(to_attenuation(std::move(signal_ds), recorded_powers)));
}

// ---------------------------------------------------------------------------
// Monotone MLP

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

constexpr char kMagic[8] = {'B', 'R', 'T', 'H', 'M', 'L', 'P', '1'};

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    auto bits = std::bit_cast<U>(value);
    unsigned char bytes[sizeof(T)];
    for (std::size_t b = 0; b < sizeof(T); ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error("surrogate file truncated");
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) bits |= static_cast<U>(bytes[b]) << (8 * b);
    return std::bit_cast<T>(bits);
}

}  // namespace

MonotoneMlp::MonotoneMlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2 || sizes_.back() != 1) throw InvalidArgument("mlp: need an input layer and one output");
    for (auto s : sizes_)
        if (s == 0) throw InvalidArgument("mlp: empty layer");
    StreamRng rng(seed, 0x3170ULL);
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(sizes_[l - 1]);
        const auto out = static_cast<Eigen::Index>(sizes_[l]);
        // omega^2 has mean scale^2/3, so a unit-mean input gives O(1) pre-activations.
        const double scale = std::sqrt(3.0 / static_cast<double>(in));
        MlpLayer layer;
        layer.omega.resize(out, in);
        for (Eigen::Index r = 0; r < out; ++r)
            for (Eigen::Index c = 0; c < in; ++c) layer.omega(r, c) = scale * (2.0 * rng.uniform() - 1.0);
        layer.bias = Eigen::VectorXd::Zero(out);
        for (Eigen::Index r = 0; r < out; ++r) layer.bias(r) = 0.1 * (2.0 * rng.uniform() - 1.0);
        layers_.push_back(std::move(layer));
    }
    input_min.assign(sizes_.front(), 0.0);
    input_max.assign(sizes_.front(), 1.0);
}

double MonotoneMlp::forward(std::span<const double> normalized) const {
    if (normalized.size() != input_size())
        throw InvalidArgument("mlp: expected " + std::to_string(input_size()) + " inputs, got " +
                              std::to_string(normalized.size()));
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(normalized.data(), static_cast<Eigen::Index>(normalized.size()));
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Eigen::VectorXd z = layers_[l].omega.array().square().matrix() * a + layers_[l].bias;
        a = l + 1 < layers_.size() ? z.unaryExpr(&logistic) : z;
    }
    return a(0);
}

std::vector<double> MonotoneMlp::normalize(std::span<const double> powers) const {
    if (powers.size() != input_size())
        throw InvalidArgument("mlp: expected " + std::to_string(input_size()) + " inputs, got " +
                              std::to_string(powers.size()));
    std::vector<double> out(powers.size());
    for (std::size_t k = 0; k < powers.size(); ++k) {
        const double span = input_max[k] - input_min[k];
        out[k] = span > 0.0 ? (powers[k] - input_min[k]) / span : 0.0;
    }
    return out;
}

void MonotoneMlp::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write surrogate file " + path.string());
    os.write(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(sizes_.size()));
    for (auto s : sizes_) put_le<std::uint32_t>(os, static_cast<std::uint32_t>(s));
    for (double v : input_min) put_le<double>(os, v);
    for (double v : input_max) put_le<double>(os, v);
    for (const auto& layer : layers_) {
        for (Eigen::Index r = 0; r < layer.omega.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.omega.cols(); ++c) put_le<double>(os, layer.omega(r, c));
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) put_le<double>(os, layer.bias(r));
    }
}

MonotoneMlp MonotoneMlp::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read surrogate file " + path.string());
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error("not a surrogate file: " + path.string());
    MonotoneMlp mlp;
    const auto count = get_le<std::uint32_t>(is);
    if (count < 2 || count > 64) throw Error("surrogate file has an implausible layer count");
    for (std::uint32_t k = 0; k < count; ++k) mlp.sizes_.push_back(get_le<std::uint32_t>(is));
    mlp.input_min.resize(mlp.sizes_.front());
    mlp.input_max.resize(mlp.sizes_.front());
    for (auto& v : mlp.input_min) v = get_le<double>(is);
    for (auto& v : mlp.input_max) v = get_le<double>(is);
    for (std::size_t l = 1; l < mlp.sizes_.size(); ++l) {
        MlpLayer layer;
        layer.omega.resize(static_cast<Eigen::Index>(mlp.sizes_[l]), static_cast<Eigen::Index>(mlp.sizes_[l - 1]));
        layer.bias.resize(static_cast<Eigen::Index>(mlp.sizes_[l]));
        for (Eigen::Index r = 0; r < layer.omega.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.omega.cols(); ++c) layer.omega(r, c) = get_le<double>(is);
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = get_le<double>(is);
        mlp.layers_.push_back(std::move(layer));
    }
    return mlp;
}

TrainResult train_surrogate(const SurrogateSamples& samples, const TrainOptions& options) {
    const std::size_t count = samples.inputs.size();
    if (count < 100) throw InvalidArgument("train_surrogate: need at least 100 samples");
    if (samples.targets.size() != count) throw InvalidArgument("train_surrogate: inputs/targets length mismatch");
    const std::size_t m = samples.inputs.front().size();
    for (const auto& x : samples.inputs)
        if (x.size() != m) throw InvalidArgument("train_surrogate: ragged inputs");
    for (double t : samples.targets)
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("train_surrogate: targets must lie in [0, 1]");

    std::vector<std::size_t> sizes{m};
    if (options.hidden.empty()) {
        sizes.insert(sizes.end(), {4 * m, 2 * m, m});
    } else {
        sizes.insert(sizes.end(), options.hidden.begin(), options.hidden.end());
    }
    sizes.push_back(1);

    TrainResult result;
    result.mlp = MonotoneMlp(sizes, options.seed);
    auto& layers = result.mlp.layers();
    const std::size_t L = layers.size();

    Eigen::MatrixXd X(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(count));
    Eigen::RowVectorXd Y(static_cast<Eigen::Index>(count));
    for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t k = 0; k < m; ++k) X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)) = samples.inputs[s][k];
        Y(static_cast<Eigen::Index>(s)) = samples.targets[s];
    }

    // Adam state.
    std::vector<Eigen::MatrixXd> mw(L), vw(L);
    std::vector<Eigen::VectorXd> mb(L), vb(L);
    for (std::size_t l = 0; l < L; ++l) {
        mw[l] = Eigen::MatrixXd::Zero(layers[l].omega.rows(), layers[l].omega.cols());
        vw[l] = mw[l];
        mb[l] = Eigen::VectorXd::Zero(layers[l].bias.size());
        vb[l] = mb[l];
    }
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::size_t t = 0;

    auto full_mse = [&]() {
        Eigen::MatrixXd a = X;
        for (std::size_t l = 0; l < L; ++l) {
            Eigen::MatrixXd z = (layers[l].omega.array().square().matrix() * a).colwise() + layers[l].bias;
            a = l + 1 < L ? Eigen::MatrixXd(z.unaryExpr(&logistic)) : z;
        }
        return (a.row(0) - Y).squaredNorm() / static_cast<double>(count);
    };

    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(options.seed);
    const auto started = std::chrono::steady_clock::now();
    double previous = full_mse();
    int rising = 0;
    std::vector<Eigen::MatrixXd> acts(L + 1);
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0; start < count; start += options.batch_size) {
            const std::size_t b = std::min(options.batch_size, count - start);
            Eigen::MatrixXd xb(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(b));
            Eigen::RowVectorXd yb(static_cast<Eigen::Index>(b));
            for (std::size_t k = 0; k < b; ++k) {
                xb.col(static_cast<Eigen::Index>(k)) = X.col(static_cast<Eigen::Index>(order[start + k]));
                yb(static_cast<Eigen::Index>(k)) = Y(static_cast<Eigen::Index>(order[start + k]));
            }
            acts[0] = xb;
            for (std::size_t l = 0; l < L; ++l) {
                Eigen::MatrixXd z = (layers[l].omega.array().square().matrix() * acts[l]).colwise() + layers[l].bias;
                acts[l + 1] = l + 1 < L ? Eigen::MatrixXd(z.unaryExpr(&logistic)) : z;
            }
            Eigen::MatrixXd delta = 2.0 * (acts[L].row(0) - yb) / static_cast<double>(b);
            ++t;
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
            for (std::size_t l = L; l-- > 0;) {
                Eigen::MatrixXd w_eff = layers[l].omega.array().square().matrix();
                Eigen::MatrixXd grad_eff = delta * acts[l].transpose();
                Eigen::MatrixXd grad_w = (grad_eff.array() * 2.0 * layers[l].omega.array()).matrix();
                Eigen::VectorXd grad_b = delta.rowwise().sum();
                if (l > 0) {
                    Eigen::MatrixXd back = w_eff.transpose() * delta;
                    delta = (back.array() * acts[l].array() * (1.0 - acts[l].array())).matrix();
                }
                mw[l] = beta1 * mw[l] + (1.0 - beta1) * grad_w;
                vw[l] = beta2 * vw[l] + (1.0 - beta2) * grad_w.cwiseAbs2();
                mb[l] = beta1 * mb[l] + (1.0 - beta1) * grad_b;
                vb[l] = beta2 * vb[l] + (1.0 - beta2) * grad_b.cwiseAbs2();
                layers[l].omega.array() -=
                    options.learning_rate * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + eps);
                layers[l].bias.array() -=
                    options.learning_rate * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + eps);
            }
        }
        const double mse = full_mse();
        result.epochs_run = epoch + 1;
        if (!std::isfinite(mse)) throw TrainingDiverged("train_surrogate: non-finite loss at epoch " + std::to_string(epoch + 1));
        rising = mse > previous ? rising + 1 : 0;
        if (rising >= 10)
            throw TrainingDiverged("train_surrogate: MSE rose for 10 consecutive epochs (last " + std::to_string(mse) +
                                   " at epoch " + std::to_string(epoch + 1) + ")");
        previous = mse;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        if (elapsed.count() > options.time_limit_seconds) break;
    }
    result.training_mse = previous;
    return result;
}

SurrogateOutput surrogate_coverage(const MonotoneMlp& mlp, std::span<const double> neighbourhood_powers) {
    auto x = mlp.normalize(neighbourhood_powers);
    SurrogateOutput out;
    for (double v : x)
        if (v < 0.0 || v > 1.0) out.extrapolated = true;
    out.value = std::clamp(mlp.forward(x), 0.0, 1.0);
    return out;
}

void write_surrogate_manifest(const std::filesystem::path& path, const TrainResult& result, std::uint64_t seed) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write manifest " + path.string());
    os << "training_mse=" << result.training_mse << '\n';
    os << "epochs=" << result.epochs_run << '\n';
    os << "seed=" << seed << '\n';
    os << "layers=";
    const auto& sizes = result.mlp.layer_sizes();
    for (std::size_t k = 0; k < sizes.size(); ++k) os << (k ? "," : "") << sizes[k];
    os << '\n';
}

double SurrogateBank::evaluate(AntennaIndex i, std::span<const double> powers) const {
    if (i >= models.size() || !models[i]) return 1.0;
    std::vector<double> local;
    local.reserve(neighbourhoods[i].size());
    for (auto j : neighbourhoods[i]) local.push_back(powers[j]);
    return surrogate_coverage(*models[i], local).value;
}

std::vector<std::vector<AntennaIndex>> SurrogateBank::neighbour_lists() const {
    std::vector<std::vector<AntennaIndex>> out(neighbourhoods.size());
    for (std::size_t i = 0; i < neighbourhoods.size(); ++i)
        if (!neighbourhoods[i].empty()) out[i].assign(neighbourhoods[i].begin() + 1, neighbourhoods[i].end());
    return out;
}

void save_surrogate_bank(const std::filesystem::path& dir, const SurrogateBank& bank, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / "surrogates.txt");
    if (!os) throw Error("cannot write " + (dir / "surrogates.txt").string());
    os << "# seed=" << seed << '\n';
    os << "# antenna_id neighbourhood_ids model_file training_mse\n";
    for (std::size_t i = 0; i < bank.neighbourhoods.size(); ++i) {
        os << antenna_id(i) << ' ';
        const auto& hood = bank.neighbourhoods[i];
        for (std::size_t k = 0; k < hood.size(); ++k) os << (k ? "," : "") << antenna_id(hood[k]);
        if (bank.models[i]) {
            const auto file = "surrogate_" + std::to_string(antenna_id(i)) + ".bin";
            bank.models[i]->save(dir / file);
            os << ' ' << file << ' ' << bank.training_mse[i] << '\n';
        } else {
            os << " - 0\n";
        }
    }
}

SurrogateBank load_surrogate_bank(const std::filesystem::path& dir) {
    std::ifstream is(dir / "surrogates.txt");
    if (!is) throw Error("cannot read " + (dir / "surrogates.txt").string());
    SurrogateBank bank;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        int id = 0;
        std::string hood, file;
        double mse = 0.0;
        if (!(ss >> id >> hood >> file >> mse) || id != static_cast<int>(bank.neighbourhoods.size()) + 1)
            throw Error("malformed surrogate manifest line: " + line);
        std::vector<AntennaIndex> members;
        std::istringstream hs(hood);
        for (std::string tok; std::getline(hs, tok, ',');) members.push_back(static_cast<AntennaIndex>(std::stoi(tok) - 1));
        bank.neighbourhoods.push_back(std::move(members));
        bank.training_mse.push_back(mse);
        if (file == "-")
            bank.models.emplace_back();
        else
            bank.models.emplace_back(MonotoneMlp::load(dir / file));
    }
    return bank;
}

SurrogateBank train_surrogate_bank(const MrDataset& preprocessed, std::span<const double> p_low,
                                   std::span<const double> p_high, double r_c, const BankOptions& options) {
    require_preprocessed(preprocessed);
    const std::size_t n = preprocessed.antenna_count;
    if (p_low.size() != n || p_high.size() != n) throw InvalidArgument("train_surrogate_bank: size mismatch");
    const auto neighbours = cooccurrence_neighbours(preprocessed);
    SurrogateBank bank;
    bank.models.resize(n);
    bank.training_mse.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        bank.neighbourhoods.push_back(neighbourhood_of(neighbours, i));
        if (preprocessed.per_antenna[i].empty()) continue;
        const auto& hood = bank.neighbourhoods[i];
        SurrogateSamples samples;
        StreamRng rng(options.train.seed, 0xba4bULL, i);
        std::vector<double> powers(p_high.begin(), p_high.end());
        for (std::size_t s = 0; s < options.samples_per_antenna; ++s) {
            std::vector<double> x(hood.size());
            for (std::size_t k = 0; k < hood.size(); ++k) {
                x[k] = rng.uniform();
                powers[hood[k]] = p_low[hood[k]] + x[k] * (p_high[hood[k]] - p_low[hood[k]]);
            }
            samples.targets.push_back(neighbourhood_coverage(preprocessed, powers, i, r_c, hood));
            samples.inputs.push_back(std::move(x));
        }
        auto trained = train_surrogate(samples, options.train);
        for (std::size_t k = 0; k < hood.size(); ++k) {
            trained.mlp.input_min[k] = p_low[hood[k]];
            trained.mlp.input_max[k] = p_high[hood[k]];
        }
        bank.training_mse[i] = trained.training_mse;
        bank.models[i] = std::move(trained.mlp);
    }
    return bank;
}

// ---------------------------------------------------------------------------
// Minimum-power search

FailGraph fail_graph(std::span<const double> F, double f_con, const std::vector<std::vector<AntennaIndex>>& neighbours) {
    FailGraph g;
    const std::size_t n = F.size();
    std::vector<char> failing(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (F[i] < f_con) {
            failing[i] = 1;
            g.vertices.push_back(i);
        }
    for (auto i : g.vertices)
        for (auto j : neighbours.at(i))
            if (j > i && failing[j]) g.edges.emplace_back(i, j);

    // Union-find over the induced subgraph.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [a, b] : g.edges) {
        auto ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::vector<long> slot(n, -1);
    for (auto v : g.vertices) {
        auto root = find(v);
        if (slot[root] < 0) {
            slot[root] = static_cast<long>(g.components.size());
            g.components.emplace_back();
        }
        g.components[static_cast<std::size_t>(slot[root])].push_back(v);
    }
    return g;
}

MinPowerResult min_power_search(std::span<const double> start, std::span<const double> p_max,
                                const std::vector<std::vector<AntennaIndex>>& neighbours, const CoverageFn& coverage,
                                double f_con, double delta_p) {
    const std::size_t n = start.size();
    if (!(delta_p > 0.0)) throw InvalidArgument("min_power_search: delta_p must be positive");
    if (p_max.size() != n || neighbours.size() != n) throw InvalidArgument("min_power_search: size mismatch");

    MinPowerResult res;
    res.p_min.assign(start.begin(), start.end());
    for (std::size_t i = 0; i < n; ++i)
        res.round_bound += static_cast<std::size_t>(std::ceil(std::max(0.0, p_max[i] - start[i]) / delta_p));
    res.F.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.F[i] = coverage(i, res.p_min);

    std::vector<char> touched(n, 0);
    for (;;) {
        auto g = fail_graph(res.F, f_con, neighbours);
        if (g.vertices.empty()) break;
        std::vector<AntennaIndex> raised;
        for (const auto& comp : g.components) {
            std::optional<AntennaIndex> pick;
            for (auto i : comp) {
                if (res.p_min[i] >= p_max[i]) continue;
                if (!pick || res.F[i] < res.F[*pick]) pick = i;
            }
            if (!pick) {
                std::vector<int> ids;
                for (auto i : comp) ids.push_back(antenna_id(i));
                throw InfeasibleCoverage("coverage requirement unattainable: failing component already at maximum power",
                                         ids);
            }
            raised.push_back(*pick);
        }
        for (auto i : raised) {
            res.p_min[i] = std::min(res.p_min[i] + delta_p, p_max[i]);
            touched[i] = 1;
        }
        ++res.rounds;
        if (res.rounds > res.round_bound) throw Error("min_power_search: exceeded its round bound");
        // Only neighbourhoods containing a raised antenna can change.
        std::vector<char> dirty(n, 0);
        for (auto i : raised) {
            dirty[i] = 1;
            for (auto j : neighbours[i]) dirty[j] = 1;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (dirty[i]) res.F[i] = coverage(i, res.p_min);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (touched[i]) res.touched.push_back(i);
    return res;
}

}  // namespace breathe
