#include "breathe/jacobian.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace breathe {

Eigen::VectorXd JacobianApprox::diagonal() const { return entries.diagonal(); }

Eigen::MatrixXd JacobianApprox::dense() const { return Eigen::MatrixXd(entries); }

Eigen::MatrixXd JacobianApprox::unnormalized() const {
    Eigen::MatrixXd m = dense();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double scale = static_cast<std::size_t>(i) < f_bar.size() ? f_bar[static_cast<std::size_t>(i)] : 1.0;
        m.row(i) *= scale;
    }
    return m;
}

JacobianApprox jacobian_from_dense(const Eigen::MatrixXd& normalized, std::vector<double> f_bar) {
    if (normalized.rows() != normalized.cols()) throw InvalidArgument("jacobian must be square");
    JacobianApprox j;
    j.entries = normalized.sparseView();
    j.entries.makeCompressed();
    const auto n = static_cast<std::size_t>(normalized.rows());
    j.f_bar = f_bar.empty() ? std::vector<double>(n, 1.0) : std::move(f_bar);
    if (j.f_bar.size() != n) throw InvalidArgument("jacobian: f_bar length mismatch");
    j.serving_count.assign(n, 0);
    j.sampled_count.assign(n, 0);
    return j;
}

namespace {

struct Counts {
    std::size_t lowered = 0;  // delta-_{i,j}
    std::size_t raised = 0;   // delta+_{i,j}
};

}  // namespace

JacobianApprox estimate_jacobian(const MrDataset& ds, std::span<const double> powers, std::span<const double> f,
                                 std::span<const double> f_bar, const NetworkTopology& topo,
                                 const JacobianOptions& options) {
    const std::size_t n = topo.size();
    if (ds.domain != MrDomain::signal) throw InvalidArgument("estimate_jacobian: needs signal-domain MR data");
    if (powers.size() != n || f.size() != n || f_bar.size() != n)
        throw InvalidArgument("estimate_jacobian: vector length mismatch");
    if (!(options.epsilon > 0.0)) throw InvalidArgument("estimate_jacobian: epsilon must be positive");
    for (double t : f_bar)
        if (!(t > 0.0)) throw InvalidArgument("estimate_jacobian: target busy-degrees must be positive");

    JacobianApprox out;
    out.epsilon = options.epsilon;
    out.f_bar.assign(f_bar.begin(), f_bar.end());
    out.serving_count.assign(n, 0);
    out.sampled_count.assign(n, 0);

    const auto serving = serving_records(ds);
    std::vector<std::map<AntennaIndex, Counts>> counts(n);
    std::vector<double> fraction_scale(n, 0.0);  // 1 / sampled |M_i|

    for (std::size_t i = 0; i < n; ++i) {
        out.serving_count[i] = serving[i].size();
        if (serving[i].empty()) {
            out.warnings.push_back("antenna " + std::to_string(antenna_id(i)) + " has no serving users");
            continue;
        }
        const auto sample = sample_for_jacobian(serving[i], options.n_s, options.seed, i);
        out.sampled_count[i] = sample.size();
        fraction_scale[i] = 1.0 / static_cast<double>(sample.size());
        const double drop_i = options.epsilon * powers[i];
        for (auto r : sample) {
            const auto& entries = ds.records[r].entries;
            const double s_i = entries.front().value;

            // Lower i: the strongest competitor takes over if strictly above.
            const MrEntry* best = nullptr;
            for (std::size_t k = 1; k < entries.size(); ++k)
                if (!best || entries[k].value > best->value ||
                    (entries[k].value == best->value && entries[k].antenna < best->antenna))
                    best = &entries[k];
            if (best && best->value > s_i - drop_i) ++counts[i][best->antenna].lowered;

            // Raise each competitor j on its own.
            for (std::size_t k = 1; k < entries.size(); ++k) {
                const auto j = entries[k].antenna;
                const double boosted = entries[k].value + options.epsilon * powers[j];
                bool strongest = true;
                for (std::size_t q = 0; q < entries.size() && strongest; ++q)
                    if (q != k && entries[q].value >= boosted) strongest = false;
                if (strongest) ++counts[i][j].raised;
            }
        }
    }

    // Per-record busy share of antenna j expressed in antenna i's units is
    // f_j r_j / (|M_j| r_i); the sampled fractions stand in for delta/|M|.
    auto cross = [&](std::size_t j, std::size_t i) {
        return f[j] * topo.antennas[j].prbs / static_cast<double>(topo.antennas[i].prbs);
    };
    std::map<std::pair<std::size_t, std::size_t>, double> numerators;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, c] : counts[i]) {
            const double lowered = static_cast<double>(c.lowered) * fraction_scale[i];
            const double raised = static_cast<double>(c.raised) * fraction_scale[i];
            // Lowering i hands its users to j.
            numerators[{i, i}] += f[i] * lowered;
            numerators[{j, i}] -= cross(i, j) * lowered;
            // Raising j pulls i's users to j.
            numerators[{i, j}] -= f[i] * raised;
            numerators[{j, j}] += cross(i, j) * raised;
        }
    }

    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& [ij, num] : numerators) {
        const auto [i, j] = ij;
        if (num == 0.0) continue;
        const double derivative = num / (2.0 * options.epsilon * powers[j]);
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), derivative / f_bar[i]);
    }
    out.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.entries.setFromTriplets(triplets.begin(), triplets.end());
    out.entries.makeCompressed();
    return out;
}

SupportGraph support_graph(const JacobianApprox& j) {
    SupportGraph g;
    const auto n = j.size();
    g.adjacency.assign(n, {});
    for (Eigen::Index r = 0; r < j.entries.outerSize(); ++r)
        for (SparseRowMatrix::InnerIterator it(j.entries, r); it; ++it)
            if (it.col() != it.row() && it.value() != 0.0)
                g.adjacency[static_cast<std::size_t>(r)].push_back(static_cast<AntennaIndex>(it.col()));
    g.strongly_connected = n > 0 && strongly_connected(g.adjacency);
    g.components = strong_components(g.adjacency);
    return g;
}

LaplacianReport laplacian_check(const JacobianApprox& j) {
    LaplacianReport rep;
    const Eigen::MatrixXd raw = j.unnormalized();
    const auto n = raw.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        double sum = raw.row(i).sum();
        double scale = raw.row(i).cwiseAbs().maxCoeff();
        rep.max_row_sum_residual = std::max(rep.max_row_sum_residual, std::abs(sum));
        if (scale > 0.0) rep.max_relative_row_residual = std::max(rep.max_relative_row_residual, std::abs(sum) / scale);
        for (Eigen::Index c = 0; c < n; ++c) {
            double v = raw(i, c);
            if ((c == i && v < 0.0) || (c != i && v > 0.0))
                rep.sign_violations.push_back({static_cast<int>(i) + 1, static_cast<int>(c) + 1, v});
        }
    }
    if (n >= 2) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(j.dense());
        const auto& sv = svd.singularValues();
        rep.second_smallest_singular_value = sv(n - 2);
        const double cutoff = 1e-10 * static_cast<double>(n) * sv(0);
        for (Eigen::Index k = 0; k < sv.size(); ++k)
            if (sv(k) > cutoff) ++rep.numerical_rank;
    } else if (n == 1) {
        rep.numerical_rank = raw(0, 0) != 0.0 ? 1 : 0;
    }
    return rep;
}

void write_jacobian_csv(std::ostream& os, const JacobianApprox& j) {
    os << "i,j,value\n";
    auto old = os.precision(17);
    for (Eigen::Index r = 0; r < j.entries.outerSize(); ++r)
        for (SparseRowMatrix::InnerIterator it(j.entries, r); it; ++it)
            os << it.row() + 1 << ',' << it.col() + 1 << ',' << it.value() << '\n';
    os.precision(old);
}

}  // namespace breathe
