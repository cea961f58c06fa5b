#pragma once

#include <Eigen/Sparse>

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "monofd/fd.hpp"
#include "monofd/geometry.hpp"
#include "monofd/hessian.hpp"
#include "monofd/point_cloud.hpp"
#include "monofd/solvers.hpp"

namespace monofd {

enum class ProblemKind { convex_envelope, pucci };

/// Dirichlet problem on a cloud. `g` holds one value per point: the obstacle
/// (which is also the boundary data) for the convex envelope, the boundary
/// data for Pucci (interior entries unused).
struct EllipticProblem {
    ProblemKind kind = ProblemKind::convex_envelope;
    double alpha = 2.0;
    std::vector<double> g;
};

/// min(|x - p1|, |x - p2|)
template <int Dim>
double double_cone(const Vec<Dim>& x, const Vec<Dim>& p1, const Vec<Dim>& p2) {
    return std::min((x - p1).norm(), (x - p2).norm());
}

/// -rho^(1 - alpha), rho = |x + (2, ..., 2)|.
template <int Dim>
double pucci_exact(const Vec<Dim>& x, double alpha) {
    const double rho = (x + Vec<Dim>::Constant(2.0)).norm();
    return -std::pow(rho, 1.0 - alpha);
}

/// Residual F[u] of a problem discretized with a Hessian operator, in the
/// orientation where F is nonincreasing in neighbour values:
///   convex envelope: max(u - g, -Lambda_- u);  Pucci: -(alpha Lambda_+ u + Lambda_- u);
///   boundary rows: u - g.
template <int Dim>
class DiscreteProblem : public NonlinearSystem {
public:
    DiscreteProblem(const PointCloud<Dim>& cloud, const HessianOperator<Dim>& op, EllipticProblem problem)
        : cloud_(cloud), op_(op), problem_(std::move(problem)) {
        if (static_cast<int>(problem_.g.size()) != cloud.size()) throw std::invalid_argument("data size mismatch");
        if (problem_.kind == ProblemKind::pucci && !(problem_.alpha > 0.0))
            throw std::invalid_argument("Pucci alpha must be positive");
    }

    int size() const override { return cloud_.size(); }
    const EllipticProblem& problem() const { return problem_; }
    const PointCloud<Dim>& cloud() const { return cloud_; }

    double residual_at(std::span<const double> u, int i, SchemeWeights* wmax, SchemeWeights* wmin, bool* obstacle_active) const {
        if (cloud_.is_boundary(i)) return u[i] - problem_.g[i];
        if (problem_.kind == ProblemKind::convex_envelope) {
            const double lm = op_.extremal(u, i, Extremum::min, wmin);
            const double a = u[i] - problem_.g[i];
            const double b = -lm;
            if (obstacle_active) *obstacle_active = a >= b;
            return std::max(a, b);
        }
        const double lp = op_.extremal(u, i, Extremum::max, wmax);
        const double lm = op_.extremal(u, i, Extremum::min, wmin);
        return -(problem_.alpha * lp + lm);
    }

    void residual(std::span<const double> u, std::span<double> F) const override {
        for (int i = 0; i < size(); ++i) F[i] = residual_at(u, i, nullptr, nullptr, nullptr);
    }

    void jacobian(std::span<const double> u, std::span<double> F, SparseMatrix& J) const override {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(size()) * 12);
        SchemeWeights wmax, wmin;
        for (int i = 0; i < size(); ++i) {
            bool obstacle = false;
            F[i] = residual_at(u, i, &wmax, &wmin, &obstacle);
            if (cloud_.is_boundary(i) || (problem_.kind == ProblemKind::convex_envelope && obstacle)) {
                trip.emplace_back(i, i, 1.0);
                continue;
            }
            auto add = [&](const SchemeWeights& w, double scale) {
                for (const auto& [j, c] : w.neighbors) trip.emplace_back(i, j, -scale * c);
                trip.emplace_back(i, i, -scale * w.center_coeff);
            };
            if (problem_.kind == ProblemKind::convex_envelope) {
                add(wmin, 1.0);
            } else {
                add(wmax, problem_.alpha);
                add(wmin, 1.0);
            }
        }
        J.resize(size(), size());
        J.setFromTriplets(trip.begin(), trip.end());
    }

    double residual_flops() const override {
        const int passes = problem_.kind == ProblemKind::pucci ? 2 : 1;
        return static_cast<double>(size()) + passes * op_.evaluation_flops();
    }

    /// Initial iterate: the obstacle for the envelope; for Pucci the boundary
    /// data with interior values set to the boundary mean.
    std::vector<double> initial_guess() const {
        std::vector<double> u = problem_.g;
        if (problem_.kind == ProblemKind::pucci) {
            double mean = 0.0;
            int count = 0;
            for (int i = 0; i < size(); ++i) {
                if (cloud_.is_boundary(i)) {
                    mean += problem_.g[i];
                    ++count;
                }
            }
            mean = count ? mean / count : 0.0;
            for (int i = 0; i < size(); ++i)
                if (!cloud_.is_boundary(i)) u[i] = mean;
        }
        return u;
    }

private:
    const PointCloud<Dim>& cloud_;
    const HessianOperator<Dim>& op_;
    EllipticProblem problem_;
};

template <int Dim>
std::vector<double> convex_envelope_residual(std::span<const double> u, const PointCloud<Dim>& cloud,
                                             const HessianOperator<Dim>& op, std::vector<double> g) {
    DiscreteProblem<Dim> p(cloud, op, {ProblemKind::convex_envelope, 2.0, std::move(g)});
    std::vector<double> F(u.size());
    p.residual(u, F);
    return F;
}

template <int Dim>
std::vector<double> pucci_residual(std::span<const double> u, double alpha, const PointCloud<Dim>& cloud,
                                   const HessianOperator<Dim>& op, std::vector<double> g) {
    DiscreteProblem<Dim> p(cloud, op, {ProblemKind::pucci, alpha, std::move(g)});
    std::vector<double> F(u.size());
    p.residual(u, F);
    return F;
}

}  // namespace monofd
