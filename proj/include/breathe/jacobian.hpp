#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "breathe/core.hpp"
#include "breathe/mr.hpp"

namespace breathe {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Normalized busy-degree Jacobian estimate, per dB: entry (i, j) is
/// (df_i/dp_j) / f_bar_i.
struct JacobianApprox {
    SparseRowMatrix entries;
    std::vector<double> f_bar;
    double epsilon = 0.0;
    // Serving records behind each row, before and after sampling.
    std::vector<std::size_t> serving_count;
    std::vector<std::size_t> sampled_count;
    std::vector<std::string> warnings;

    std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
    double at(AntennaIndex i, AntennaIndex j) const { return entries.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }
    Eigen::VectorXd diagonal() const;
    Eigen::MatrixXd dense() const;
    /// f_bar_i * A_ij, i.e. the raw partial derivatives.
    Eigen::MatrixXd unnormalized() const;
};

/// Builds a JacobianApprox from a dense matrix (tests, synthetic inputs).
JacobianApprox jacobian_from_dense(const Eigen::MatrixXd& normalized, std::vector<double> f_bar = {});

struct JacobianOptions {
    double epsilon = 0.1;
    std::size_t n_s = 5000;
    std::uint64_t seed = 1;
};

/// Perturbation counting over signal-domain MR data recorded under `powers`.
/// For every sampled record served by i: lowering i's signal by eps*p_i and
/// seeing competitor j become strictly strongest counts toward delta-_{i,j};
/// raising j's signal by eps*p_j and seeing j become strictly strongest
/// counts toward delta+_{i,j}. Derivatives are central differences with
/// step 2*eps*p (dB).
JacobianApprox estimate_jacobian(const MrDataset& ds, std::span<const double> powers, std::span<const double> f,
                                 std::span<const double> f_bar, const NetworkTopology& topo,
                                 const JacobianOptions& options);

struct SupportGraph {
    std::vector<std::vector<AntennaIndex>> adjacency;  // i -> j when A_ij != 0, i != j
    bool strongly_connected = false;
    std::vector<std::vector<AntennaIndex>> components;
};

SupportGraph support_graph(const JacobianApprox& j);

struct SignViolation {
    int row = 0;
    int col = 0;
    double value = 0.0;
};

struct LaplacianReport {
    double max_row_sum_residual = 0.0;
    // max over rows of |row sum| / max |row entry| (0 for all-zero rows).
    double max_relative_row_residual = 0.0;
    std::vector<SignViolation> sign_violations;
    double second_smallest_singular_value = 0.0;
    std::size_t numerical_rank = 0;
};

/// Structure diagnostics on the unnormalized rows f_bar_i * A_ij.
LaplacianReport laplacian_check(const JacobianApprox& j);

void write_jacobian_csv(std::ostream& os, const JacobianApprox& j);

}  // namespace breathe
