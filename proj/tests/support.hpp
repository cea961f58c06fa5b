#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "monofd/fd.hpp"
#include "monofd/meshio.hpp"
#include "monofd/stencil.hpp"

namespace monofd::test_support {

/// Smooth quartic with a nonconstant, nonisotropic Hessian.
inline double quartic(const Vec<2>& x) {
    return x[0] * x[0] * x[0] * x[0] + 2.0 * x[0] * x[0] * x[0] * x[1] - x[1] * x[1] * x[1] * x[1] + x[0] * x[0] * x[1] * x[1] +
           0.5 * x[0] * x[0] - x[0] * x[1];
}

inline Mat<2> quartic_hessian(const Vec<2>& x) {
    const double a = x[0], b = x[1];
    Mat<2> H;
    H(0, 0) = 12.0 * a * a + 12.0 * a * b + 2.0 * b * b + 1.0;
    H(0, 1) = H(1, 0) = 6.0 * a * a + 4.0 * a * b - 1.0;
    H(1, 1) = -12.0 * b * b + 2.0 * a * a;
    return H;
}

/// Grid patch of spacing s around the origin, large enough to hold the search
/// annulus of the central points. With jitter > 0 every point is moved by a
/// uniform offset of up to jitter * s per coordinate.
inline PointCloud<2> patch(double s, double reach, double jitter, unsigned seed = 7) {
    const int half = static_cast<int>(std::ceil(reach / s)) + 2;
    const int side = 2 * half + 1;
    auto grid = build_regular_grid<2>(side, Vec<2>(-half * s, -half * s), Vec<2>(half * s, half * s), 1);
    if (jitter == 0.0) return grid;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> off(-jitter * s, jitter * s);
    std::vector<Vec<2>> pts = grid.points();
    for (auto& p : pts) p += Vec<2>(off(rng), off(rng));
    PointCloud<2> cloud(pts, grid.boundary_mask(), grid.cells());
    // Covering radius of a jittered lattice: half the largest cell diagonal.
    const double diag = s * std::sqrt(2.0) * (1.0 + 2.0 * jitter);
    CloudMetrics m;
    m.h = 0.5 * diag;
    m.h_boundary = 0.5 * s * (1.0 + 2.0 * jitter);
    m.delta = s * (1.0 - 2.0 * jitter);
    m.min_edge = s * (1.0 - 2.0 * jitter);
    cloud.set_metrics(m);
    return cloud;
}

/// Largest error of the second directional difference of the quartic against
/// w^T D^2u w, over `directions` directions at the points within 2s of the origin.
inline double consistency_error(double s, double jitter, double dtheta, int directions) {
    const double h_est = 0.5 * s * std::sqrt(2.0) * (1.0 + 2.0 * jitter);
    const SearchParams params = search_radii(h_est, dtheta, 2);
    const auto cloud = patch(s, params.R + 2.0 * s, jitter);
    std::vector<double> u(cloud.size());
    for (int i = 0; i < cloud.size(); ++i) u[i] = quartic(cloud.point(i));
    StencilSet<2> set;
    set.params = params;
    set.simplices.resize(cloud.size());
    double err = 0.0;
    for (int i = 0; i < cloud.size(); ++i) {
        if (cloud.point(i).lpNorm<Eigen::Infinity>() > 2.0 * s) continue;
        set.simplices[i] = point_simplices(cloud, i, params);
        const Mat<2> H = quartic_hessian(cloud.point(i));
        for (int k = 0; k < directions; ++k) {
            const auto w = Direction<2>::from_angle(std::numbers::pi * (k + 0.37) / directions);
            const double exact = w.vec().dot(H * w.vec());
            err = std::max(err, std::abs(second_derivative(set, u, i, w) - exact));
        }
    }
    return err;
}

}  // namespace monofd::test_support
