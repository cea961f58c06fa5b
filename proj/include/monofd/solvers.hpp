#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "monofd/errors.hpp"
#include "monofd/ordering.hpp"

namespace monofd {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// A square nonlinear system F(u) = 0 with a (generalized) Jacobian.
class NonlinearSystem {
public:
    virtual ~NonlinearSystem() = default;
    virtual int size() const = 0;
    virtual void residual(std::span<const double> u, std::span<double> F) const = 0;
    /// Fills F and the Jacobian of the active branch at u.
    virtual void jacobian(std::span<const double> u, std::span<double> F, SparseMatrix& J) const = 0;
    /// Floating-point operations of one residual evaluation (estimate).
    virtual double residual_flops() const { return 10.0 * size(); }
};

struct SolverConfig {
    double tol = 1e-8;
    int max_iters = 5'000'000;         ///< Euler iterations
    int max_newton_iters = 200;
    double euler_dt = 0.9;             ///< multiplier on 1/K, K the max Jacobian row sum
    int lipschitz_refresh = 50;        ///< Euler iterations between K updates
    double sufficient_decrease = 0.999;
    bool deterministic = false;        ///< iteration budgets instead of wall-clock matching
    double max_seconds = std::numeric_limits<double>::infinity();
};

struct SolverReport {
    int iterations = 0;  ///< total steps (Euler + Newton)
    int newton_steps = 0;
    int rejected_newton_steps = 0;
    int euler_steps = 0;
    std::vector<double> residual_history;  ///< max-norm of F, one entry per step plus the start
    double newton_seconds = 0.0;
    double euler_seconds = 0.0;
    double total_seconds = 0.0;
    bool converged = false;
    double final_residual() const {
        return residual_history.empty() ? std::numeric_limits<double>::infinity() : residual_history.back();
    }
};

class NonConverged : public Error {
public:
    NonConverged(const std::string& what, std::vector<double> best, SolverReport report)
        : Error(what), best_(std::move(best)), report_(std::move(report)) {}
    const std::vector<double>& best_iterate() const noexcept { return best_; }
    const SolverReport& report() const noexcept { return report_; }

private:
    std::vector<double> best_;
    SolverReport report_;
};

struct SolveResult {
    std::vector<double> u;
    SolverReport report;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline double max_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double sum_squares(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double max_abs_row_sum(const SparseMatrix& J) {
    Eigen::VectorXd rows = Eigen::VectorXd::Zero(J.rows());
    for (int c = 0; c < J.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(J, c); it; ++it) rows[it.row()] += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

/// Euler iterations from u (in place) with F kept current. Stops at tol, at
/// `budget` steps, or once `seconds` have elapsed.
inline void euler_steps(const NonlinearSystem& sys, std::vector<double>& u, std::vector<double>& F, const SolverConfig& cfg,
                        SolverReport& rep, long long budget, double seconds, std::vector<double>* best, double* best_res) {
    const auto t0 = Clock::now();
    SparseMatrix J;
    std::vector<double> Ftmp(F.size());
    double dt = 0.0;
    for (long long k = 0; k < budget; ++k) {
        if (k % cfg.lipschitz_refresh == 0) {
            sys.jacobian(u, Ftmp, J);
            const double K = max_abs_row_sum(J);
            dt = cfg.euler_dt / std::max(K, 1e-300);
        }
        for (std::size_t i = 0; i < u.size(); ++i) u[i] -= dt * F[i];
        sys.residual(u, F);
        ++rep.euler_steps;
        ++rep.iterations;
        const double r = max_norm(F);
        rep.residual_history.push_back(r);
        if (best && r < *best_res) {
            *best_res = r;
            *best = u;
        }
        if (r <= cfg.tol) break;
        if (seconds_since(t0) >= seconds) break;
    }
    rep.euler_seconds += seconds_since(t0);
}

template <class LU>
bool factor_and_solve(LU& lu, const SparseMatrix& J, const Eigen::VectorXd& rhs, Eigen::VectorXd& du, double* lu_nnz) {
    lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success) return false;
    du = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !du.allFinite()) return false;
    if (lu_nnz) *lu_nnz = static_cast<double>(lu.nnzL() + lu.nnzU());
    return true;
}

/// One Newton direction: solves J du = -F. Returns the LU nonzero count in
/// `lu_nnz`. Monotone-scheme Jacobians are diagonally dominant, so diagonal
/// pivots under a nested-dissection ordering are tried first; partial
/// pivoting with COLAMD is the fallback.
inline std::vector<double> newton_direction(const SparseMatrix& J, std::span<const double> F, double* lu_nnz) {
    Eigen::VectorXd rhs(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) rhs[i] = -F[i];
    Eigen::VectorXd du;
    SparseMatrix A = J;
    A.makeCompressed();
    Eigen::SparseLU<SparseMatrix, NestedDissectionOrdering<int>> fast;
    fast.isSymmetric(true);
    fast.setPivotThreshold(0.0);
    if (!factor_and_solve(fast, A, rhs, du, lu_nnz)) {
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> safe;
        if (!factor_and_solve(safe, A, rhs, du, lu_nnz)) throw LinearSolveFailure("singular Jacobian: " + safe.lastErrorMessage());
    }
    return std::vector<double>(du.data(), du.data() + du.size());
}

}  // namespace detail

/// Explicit Euler iteration u <- u - dt F(u), dt = euler_dt / K.
inline SolveResult euler_solve(const NonlinearSystem& sys, std::vector<double> u0, const SolverConfig& cfg = {}) {
    const auto t0 = detail::Clock::now();
    SolveResult res{std::move(u0), {}};
    std::vector<double> F(res.u.size());
    sys.residual(res.u, F);
    double best_res = detail::max_norm(F);
    res.report.residual_history.push_back(best_res);
    std::vector<double> best = res.u;
    if (best_res > cfg.tol)
        detail::euler_steps(sys, res.u, F, cfg, res.report, cfg.max_iters, cfg.max_seconds, &best, &best_res);
    res.report.total_seconds = detail::seconds_since(t0);
    res.report.converged = res.report.final_residual() <= cfg.tol;
    if (!res.report.converged) throw NonConverged("Euler iteration did not converge", best, res.report);
    return res;
}

/// Semi-smooth Newton iteration on the active-branch Jacobian.
inline SolveResult newton_solve(const NonlinearSystem& sys, std::vector<double> u0, const SolverConfig& cfg = {}) {
    const auto t0 = detail::Clock::now();
    SolveResult res{std::move(u0), {}};
    const int n = sys.size();
    std::vector<double> F(n);
    SparseMatrix J;
    sys.jacobian(res.u, F, J);
    double r = detail::max_norm(F);
    res.report.residual_history.push_back(r);
    std::vector<double> best = res.u;
    double best_res = r;
    while (r > cfg.tol && res.report.newton_steps < cfg.max_newton_iters && detail::seconds_since(t0) < cfg.max_seconds) {
        const auto ts = detail::Clock::now();
        const auto du = detail::newton_direction(J, F, nullptr);
        for (int i = 0; i < n; ++i) res.u[i] += du[i];
        sys.jacobian(res.u, F, J);
        res.report.newton_seconds += detail::seconds_since(ts);
        ++res.report.newton_steps;
        ++res.report.iterations;
        r = detail::max_norm(F);
        res.report.residual_history.push_back(r);
        if (r < best_res) {
            best_res = r;
            best = res.u;
        }
    }
    res.report.total_seconds = detail::seconds_since(t0);
    res.report.converged = r <= cfg.tol;
    if (!res.report.converged) throw NonConverged("Newton iteration did not converge", best, res.report);
    return res;
}

/// Newton steps guarded by a sufficient-decrease test on |F|^2; a rejected
/// step is replaced by Euler steps for the time the Newton step took (or,
/// in deterministic mode, for the equivalent number of residual evaluations).
inline SolveResult combination_solve(const NonlinearSystem& sys, std::vector<double> u0, const SolverConfig& cfg = {}) {
    const auto t0 = detail::Clock::now();
    SolveResult res{std::move(u0), {}};
    const int n = sys.size();
    std::vector<double> F(n), Fnew(n), unew(n);
    SparseMatrix J, Jnew;
    sys.jacobian(res.u, F, J);
    double r = detail::max_norm(F);
    res.report.residual_history.push_back(r);
    std::vector<double> best = res.u;
    double best_res = r;
    int newton_attempts = 0;
    while (r > cfg.tol && newton_attempts < cfg.max_newton_iters && detail::seconds_since(t0) < cfg.max_seconds) {
        ++newton_attempts;
        const auto ts = detail::Clock::now();
        double lu_nnz = 0.0;
        bool accepted = false;
        try {
            const auto du = detail::newton_direction(J, F, &lu_nnz);
            for (int i = 0; i < n; ++i) unew[i] = res.u[i] + du[i];
            sys.jacobian(unew, Fnew, Jnew);
            accepted = detail::sum_squares(Fnew) <= cfg.sufficient_decrease * detail::sum_squares(F);
        } catch (const LinearSolveFailure&) {
            lu_nnz = static_cast<double>(J.nonZeros()) * 10.0;
        }
        const double step_seconds = detail::seconds_since(ts);
        res.report.newton_seconds += step_seconds;
        if (accepted) {
            res.u.swap(unew);
            F.swap(Fnew);
            std::swap(J, Jnew);
            ++res.report.newton_steps;
            ++res.report.iterations;
            r = detail::max_norm(F);
            res.report.residual_history.push_back(r);
        } else {
            ++res.report.rejected_newton_steps;
            long long budget = std::numeric_limits<long long>::max();
            double seconds = step_seconds;
            if (cfg.deterministic) {
                const double newton_flops = lu_nnz * lu_nnz / std::max(1, n) + 2.0 * lu_nnz + sys.residual_flops();
                budget = std::max<long long>(1, std::llround(newton_flops / sys.residual_flops()));
                seconds = std::numeric_limits<double>::infinity();
            }
            detail::euler_steps(sys, res.u, F, cfg, res.report, budget, seconds, nullptr, nullptr);
            sys.jacobian(res.u, F, J);
            r = detail::max_norm(F);
        }
        if (r < best_res) {
            best_res = r;
            best = res.u;
        }
    }
    res.report.total_seconds = detail::seconds_since(t0);
    res.report.converged = r <= cfg.tol;
    if (!res.report.converged) throw NonConverged("combination solver did not converge", best, res.report);
    return res;
}

}  // namespace monofd
