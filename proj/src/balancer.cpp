#include "breathe/balancer.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>

#include "breathe/busy.hpp"
#include "breathe/mr.hpp"
#include "breathe/rng.hpp"

namespace breathe {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::none: return "none";
        case Algorithm::bdba: return "bdba";
        case Algorithm::bfdba: return "bfdba";
    }
    return "none";
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "none") return Algorithm::none;
    if (s == "bdba") return Algorithm::bdba;
    if (s == "bfdba") return Algorithm::bfdba;
    throw InvalidArgument("unknown algorithm: " + s);
}

std::string to_string(ClampFlag f) {
    switch (f) {
        case ClampFlag::none: return "none";
        case ClampFlag::hit_max: return "hit_max";
        case ClampFlag::hit_min: return "hit_min";
    }
    return "none";
}

namespace {

std::vector<std::vector<int>> component_ids(const JacobianApprox& j) {
    std::vector<std::vector<int>> out;
    for (const auto& comp : support_graph(j).components) {
        out.emplace_back();
        for (auto i : comp) out.back().push_back(antenna_id(i));
    }
    return out;
}

void remove_mean(Eigen::VectorXd& u) {
    if (u.size() > 0) u.array() -= u.mean();
}

SolveResult dense_solve(const JacobianApprox& j, const Eigen::VectorXd& d, const BdbaOptions& options) {
    const auto n = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXd a = j.dense();
    // A P, with P = I - 11^T/n: subtract each row's mean.
    Eigen::MatrixXd ap = a;
    ap.colwise() -= a.rowwise().mean();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(ap, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = options.rtol_per_antenna * static_cast<double>(n) * (sv.size() ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > cutoff) ++rank;
    if (rank < n - 1)
        throw SingularJacobian("bdba_solve: effective rank " + std::to_string(rank) + " below n-1 = " +
                                   std::to_string(n - 1),
                               component_ids(j));

    Eigen::VectorXd coeff = svd.matrixU().leftCols(rank).transpose() * d;
    coeff.array() /= sv.head(rank).array();
    Eigen::VectorXd u = svd.matrixV().leftCols(rank) * coeff;
    remove_mean(u);

    SolveResult res;
    res.u.assign(u.data(), u.data() + u.size());
    res.spectrum.assign(sv.data(), sv.data() + sv.size());
    res.residual = (a * u - d).norm();
    res.method = "svd";
    return res;
}

// CGLS on min ||A P x - d||, started at zero so it converges to the
// minimum-norm solution, which lies in the zero-sum subspace.
SolveResult iterative_solve(const JacobianApprox& j, const Eigen::VectorXd& d, const BdbaOptions& options) {
    auto graph = support_graph(j);
    if (!graph.strongly_connected)
        throw SingularJacobian("bdba_solve: support graph is not strongly connected", component_ids(j));
    const auto& a = j.entries;
    const auto n = a.rows();
    auto apply = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd c = x.array() - x.mean();
        return Eigen::VectorXd(a * c);
    };
    auto apply_t = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd v = a.transpose() * y;
        v.array() -= v.mean();
        return v;
    };
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = d;
    Eigen::VectorXd s = apply_t(r);
    Eigen::VectorXd p = s;
    double gamma = s.squaredNorm();
    const double stop = options.tolerance * std::max(1e-300, std::sqrt(gamma));
    const std::size_t max_iter = options.max_iterations ? options.max_iterations : static_cast<std::size_t>(20 * n);
    std::size_t it = 0;
    while (std::sqrt(gamma) > stop && it < max_iter) {
        Eigen::VectorXd q = apply(p);
        const double qq = q.squaredNorm();
        if (qq <= 0.0) break;
        const double alpha = gamma / qq;
        x += alpha * p;
        r -= alpha * q;
        s = apply_t(r);
        const double next = s.squaredNorm();
        p = s + (next / gamma) * p;
        gamma = next;
        ++it;
    }
    remove_mean(x);
    SolveResult res;
    res.u.assign(x.data(), x.data() + x.size());
    res.residual = (a * x - d).norm();
    res.method = "cgls";
    res.iterations = it;
    return res;
}

}  // namespace

SolveResult bdba_solve(const JacobianApprox& j, std::span<const double> d, const BdbaOptions& options) {
    const auto n = j.size();
    if (d.size() != n) throw InvalidArgument("bdba_solve: disagreement length mismatch");
    for (double v : d)
        if (!std::isfinite(v)) throw InvalidArgument("bdba_solve: disagreement must be finite");
    if (n == 0) return {};
    Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(n));
    return n <= options.dense_limit ? dense_solve(j, dv, options) : iterative_solve(j, dv, options);
}

SolveResult bfdba_solve(const JacobianApprox& j, std::span<const double> d, std::span<const double> powers, double tau) {
    const auto n = j.size();
    if (d.size() != n || powers.size() != n) throw InvalidArgument("bfdba_solve: length mismatch");
    const Eigen::VectorXd diag = j.diagonal();
    std::vector<int> bad;
    for (std::size_t i = 0; i < n; ++i)
        if (!(diag(static_cast<Eigen::Index>(i)) > 0.0)) bad.push_back(antenna_id(i));
    if (!bad.empty()) throw DegenerateDiagonal("bfdba_solve: non-positive diagonal entries", bad);

    SolveResult res;
    res.method = "diagonal";
    res.u.resize(n);
    Eigen::VectorXd u(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        res.u[i] = (d[i] - tau * powers[i]) / diag(static_cast<Eigen::Index>(i));
        u(static_cast<Eigen::Index>(i)) = res.u[i];
    }
    res.spectrum.assign(diag.data(), diag.data() + diag.size());
    Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(n));
    res.residual = (j.entries * u - dv).norm();
    return res;
}

BalanceStep apply_and_clamp(std::span<const double> p, std::span<const double> u, double gamma,
                            std::span<const double> p_min, std::span<const double> p_max) {
    const auto n = p.size();
    if (u.size() != n || p_min.size() != n || p_max.size() != n)
        throw InvalidArgument("apply_and_clamp: length mismatch");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("apply_and_clamp: gamma must lie in (0, 1]");
    std::vector<int> infeasible;
    for (std::size_t i = 0; i < n; ++i)
        if (p_min[i] > p_max[i]) infeasible.push_back(antenna_id(i));
    if (!infeasible.empty())
        throw InfeasibleCoverage("apply_and_clamp: minimum power exceeds maximum power", infeasible);

    BalanceStep s;
    s.p.assign(p.begin(), p.end());
    s.u.assign(u.begin(), u.end());
    s.p_min.assign(p_min.begin(), p_min.end());
    s.p_star.resize(n);
    s.p_next.resize(n);
    s.clamp_flags.assign(n, ClampFlag::none);
    for (std::size_t i = 0; i < n; ++i) {
        const double candidate = p[i] + gamma * u[i];
        s.p_star[i] = candidate;
        if (candidate > p_max[i]) {
            s.p_next[i] = p_max[i];
            s.clamp_flags[i] = ClampFlag::hit_max;
        } else if (candidate < p_min[i]) {
            s.p_next[i] = p_min[i];
            s.clamp_flags[i] = ClampFlag::hit_min;
        } else {
            s.p_next[i] = candidate;
        }
    }
    return s;
}

BalanceStep step(const NetworkTopology& topo, std::span<const UserSample> users, int period,
                 const AlgorithmConfig& cfg, Algorithm algorithm, const SurrogateBank* surrogates) {
    cfg.check();
    if (algorithm == Algorithm::none) throw InvalidArgument("step: algorithm none has no control step");
    const auto powers = topo.powers();
    const auto p_max = topo.max_powers();
    const std::size_t n = topo.size();
    auto context = [&](const std::string& what) { return "period " + std::to_string(period) + ": " + what; };

    try {
        const auto assignment = assign_users(users, powers);
        const auto f = busy_degrees(assignment, users, topo);
        const auto f_bar = targets(f, topo, cfg.target_mode);
        const auto d = disagreement(f, f_bar);

        const auto started = std::chrono::steady_clock::now();
        auto batch = generate_mr(users, powers, cfg.top_m);
        JacobianOptions jopt{cfg.epsilon, cfg.n_s, mix_key(cfg.seed, static_cast<std::uint64_t>(period))};
        auto jac = estimate_jacobian(batch, powers, f, f_bar, topo, jopt);

        SolveResult solved;
        bool fell_back = false;
        Algorithm used = algorithm;
        std::vector<std::string> warnings = jac.warnings;
        if (algorithm == Algorithm::bdba) {
            try {
                BdbaOptions bopt;
                bopt.dense_limit = cfg.dense_limit;
                solved = bdba_solve(jac, d, bopt);
            } catch (const SingularJacobian& e) {
                warnings.push_back(std::string("falling back to bfdba: ") + e.what());
                fell_back = true;
                used = Algorithm::bfdba;
                solved = bfdba_solve(jac, d, powers, cfg.tau);
            }
        } else {
            solved = bfdba_solve(jac, d, powers, cfg.tau);
        }

        std::vector<double> start(n);
        for (std::size_t i = 0; i < n; ++i)
            start[i] = std::clamp(powers[i] + cfg.gamma * solved.u[i], cfg.power_floor_dbm, p_max[i]);
        std::vector<double> p_min(n, cfg.power_floor_dbm);
        std::size_t rounds = 0;
        if (cfg.coverage_enabled) {
            if (surrogates) {
                auto fn = [&](AntennaIndex i, std::span<const double> p) { return surrogates->evaluate(i, p); };
                auto found = min_power_search(start, p_max, surrogates->neighbour_lists(), fn, cfg.f_con, cfg.delta_p);
                p_min = std::move(found.p_min);
                rounds = found.rounds;
            } else {
                const auto cov = preprocess_for_coverage(std::move(batch), powers);
                const auto neighbours = cooccurrence_neighbours(cov);
                std::vector<std::vector<AntennaIndex>> hoods(n);
                for (std::size_t i = 0; i < n; ++i) hoods[i] = neighbourhood_of(neighbours, i);
                auto fn = [&](AntennaIndex i, std::span<const double> p) {
                    return neighbourhood_coverage(cov, p, i, cfg.r_c, hoods[i]);
                };
                auto found = min_power_search(start, p_max, neighbours, fn, cfg.f_con, cfg.delta_p);
                for (std::size_t i = 0; i < n; ++i)
                    if (std::abs(found.p_min[i] - powers[i]) > 6.0) {
                        warnings.push_back("coverage evaluated more than 6 dB from the recording powers");
                        break;
                    }
                p_min = std::move(found.p_min);
                rounds = found.rounds;
            }
            // The search never lowers a power, so the floor still holds.
        }

        auto out = apply_and_clamp(powers, solved.u, cfg.gamma, p_min, p_max);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        out.period = period;
        out.algorithm = used;
        out.fell_back = fell_back;
        out.f = f;
        out.f_bar = f_bar;
        out.d_in = d;
        out.spectrum = std::move(solved.spectrum);
        out.residual = solved.residual;
        out.coverage_rounds = rounds;
        out.duration_seconds = elapsed.count();
        out.jacobian = std::move(jac);
        out.warnings = std::move(warnings);
        return out;
    } catch (const SingularJacobian& e) {
        throw SingularJacobian(context(e.what()), e.components());
    } catch (const DegenerateDiagonal& e) {
        throw DegenerateDiagonal(context(e.what()), e.antennas());
    } catch (const InfeasibleCoverage& e) {
        throw InfeasibleCoverage(context(e.what()), e.antennas());
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(context(e.what()));
    }
}

}  // namespace breathe
