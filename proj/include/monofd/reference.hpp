#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "monofd/hessian.hpp"
#include "monofd/meshio.hpp"
#include "monofd/pde.hpp"
#include "monofd/solvers.hpp"

namespace monofd {

/// Bilinear interpolation of nodal values on an axis-aligned 2-D lattice.
class GridInterpolant {
public:
    GridInterpolant(Lattice<2> lattice, std::vector<double> values) : lat_(std::move(lattice)), values_(std::move(values)) {}

    double operator()(const Vec<2>& x) const {
        double idx[2];
        int base[2];
        for (int d = 0; d < 2; ++d) {
            const double s = (x[d] - lat_.origin[d]) / lat_.spacing[d];
            base[d] = std::clamp(static_cast<int>(std::floor(s)), 0, lat_.counts[d] - 2);
            idx[d] = std::clamp(s - base[d], 0.0, 1.0);
        }
        auto at = [&](int a, int b) { return values_[lat_.flat({base[0] + a, base[1] + b})]; };
        return (1.0 - idx[0]) * (1.0 - idx[1]) * at(0, 0) + idx[0] * (1.0 - idx[1]) * at(1, 0) +
               (1.0 - idx[0]) * idx[1] * at(0, 1) + idx[0] * idx[1] * at(1, 1);
    }

    const std::vector<double>& values() const { return values_; }
    const Lattice<2>& lattice() const { return lat_; }

private:
    Lattice<2> lat_;
    std::vector<double> values_;
};

/// Discrete convex envelope of g on a fine regular grid of the box [lo, hi],
/// from the obstacle problem with the nearest-neighbour lattice operator of
/// radius rho, solved to cfg.tol.
inline GridInterpolant convex_envelope_oracle(const std::function<double(const Vec<2>&)>& g, const Vec<2>& lo, const Vec<2>& hi,
                                              int side, int rho = 3, const SolverConfig& cfg = {}) {
    const PointCloud<2> cloud = build_regular_grid<2>(side, lo, hi, rho);
    const RowOperator<2> op = make_lattice_operator(cloud, rho);
    EllipticProblem problem{ProblemKind::convex_envelope, 2.0, std::vector<double>(cloud.size())};
    for (int i = 0; i < cloud.size(); ++i) problem.g[i] = g(cloud.point(i));
    DiscreteProblem<2> sys(cloud, op, problem);
    auto res = combination_solve(sys, sys.initial_guess(), cfg);
    return GridInterpolant(*cloud.lattice(), std::move(res.u));
}

}  // namespace monofd
