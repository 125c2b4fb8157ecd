#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "breathe/core.hpp"
#include "breathe/coverage.hpp"
#include "breathe/jacobian.hpp"
#include "breathe/traffic.hpp"

namespace breathe {

enum class Algorithm { none, bdba, bfdba };
enum class ClampFlag { none, hit_max, hit_min };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);
std::string to_string(ClampFlag f);

class SingularJacobian : public Error {
  public:
    SingularJacobian(const std::string& what, std::vector<std::vector<int>> components)
        : Error(what), components_(std::move(components)) {}
    /// Strong components of the support graph, one-based ids.
    const std::vector<std::vector<int>>& components() const { return components_; }

  private:
    std::vector<std::vector<int>> components_;
};

class DegenerateDiagonal : public Error {
  public:
    DegenerateDiagonal(const std::string& what, std::vector<int> antennas)
        : Error(what), antennas_(std::move(antennas)) {}
    const std::vector<int>& antennas() const { return antennas_; }

  private:
    std::vector<int> antennas_;
};

struct SolveResult {
    std::vector<double> u;
    // Singular values (bdba, dense), diagonal entries (bfdba), or empty.
    std::vector<double> spectrum;
    double residual = 0.0;  // ||A u - d||_2
    std::string method;
    std::size_t iterations = 0;
};

struct BdbaOptions {
    double rtol_per_antenna = 1e-10;  // singular values below rtol * n * sigma_max are zero
    std::size_t dense_limit = 2000;
    std::size_t max_iterations = 0;  // 0: 20 n
    double tolerance = 1e-12;
};

/// Minimum-norm least-squares solution of A u = d over zero-sum u, i.e.
/// u = (A P)^+ d with P the centering projection. For an exact Laplacian this
/// is A^+ d. Dense SVD up to dense_limit antennas, CGLS on the sparse
/// system above. Throws SingularJacobian when the effective rank is below n-1.
SolveResult bdba_solve(const JacobianApprox& j, std::span<const double> d, const BdbaOptions& options = {});

/// u_i = (d_i - tau p_i) / A_ii. Throws DegenerateDiagonal on A_ii <= 0.
SolveResult bfdba_solve(const JacobianApprox& j, std::span<const double> d, std::span<const double> powers, double tau);

struct BalanceStep {
    int period = 0;
    Algorithm algorithm = Algorithm::none;
    bool fell_back = false;
    std::vector<double> f;
    std::vector<double> f_bar;
    std::vector<double> d_in;
    std::vector<double> u;
    std::vector<double> p;
    std::vector<double> p_star;
    std::vector<double> p_min;
    std::vector<double> p_next;
    std::vector<ClampFlag> clamp_flags;
    std::vector<double> spectrum;
    double residual = 0.0;
    std::size_t coverage_rounds = 0;
    double duration_seconds = 0.0;
    std::optional<JacobianApprox> jacobian;
    std::vector<std::string> warnings;
};

/// p_next = median(p_min, p + gamma u, p_max) with per-antenna flags.
/// Throws InfeasibleCoverage when some p_min_i > p_max_i.
BalanceStep apply_and_clamp(std::span<const double> p, std::span<const double> u, double gamma,
                            std::span<const double> p_min, std::span<const double> p_max);

struct SurrogateBank;

/// One control period: busy-degrees, targets, disagreement, Jacobian,
/// solve (BDBA falls back to BFDBA on a singular Jacobian), minimum-power
/// search against coverage, clamp. `topo` carries the powers in force.
BalanceStep step(const NetworkTopology& topo, std::span<const UserSample> users, int period,
                 const AlgorithmConfig& cfg, Algorithm algorithm, const SurrogateBank* surrogates = nullptr);

}  // namespace breathe
