#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "monofd/point_cloud.hpp"

namespace monofd {

struct DiscMeshOptions {
    int target_points = 427;
    double radius = 1.0;
    int boundary_factor = 2;  ///< boundary ring carries this many times the points of a regular ring
    double jitter = 0.15;     ///< random perturbation of interior points, in units of the ring spacing
    unsigned seed = 1;
};

/// Unstructured triangulation of a disc: concentric rings with roughly
/// uniform spacing, jittered, stitched ring to ring by angle.
inline PointCloud<2> make_disc_mesh(const DiscMeshOptions& opt) {
    using std::numbers::pi;
    if (opt.target_points < 16) throw std::invalid_argument("disc mesh needs at least 16 points");
    // Ring count K gives about pi K^2 + 2 pi K (f - 1) points for spacing 1/K.
    auto estimate = [&](int K) {
        double n = 1.0;
        for (int k = 1; k < K; ++k) n += std::max(6.0, std::round(2.0 * pi * k));
        return n + opt.boundary_factor * std::round(2.0 * pi * K);
    };
    int K = 2;
    while (estimate(K + 1) <= opt.target_points) ++K;
    if (std::abs(estimate(K + 1) - opt.target_points) < std::abs(estimate(K) - opt.target_points)) ++K;

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    const double spacing = opt.radius / K;

    std::vector<Vec<2>> pts{Vec<2>::Zero()};
    std::vector<char> bdry{0};
    std::vector<std::vector<int>> rings{{0}};
    for (int k = 1; k <= K; ++k) {
        const bool outer = k == K;
        const int m = outer ? static_cast<int>(opt.boundary_factor * std::round(2.0 * pi * k))
                            : static_cast<int>(std::max(6.0, std::round(2.0 * pi * k)));
        const double phi0 = phase(rng);
        std::vector<int> ring;
        for (int j = 0; j < m; ++j) {
            double t = phi0 + 2.0 * pi * j / m;
            double rad = k * spacing;
            if (!outer) {
                t += opt.jitter * unit(rng) * (2.0 * pi / m);
                rad += opt.jitter * unit(rng) * spacing;
            }
            ring.push_back(static_cast<int>(pts.size()));
            pts.push_back(rad * Vec<2>(std::cos(t), std::sin(t)));
            bdry.push_back(outer ? 1 : 0);
        }
        auto angle = [&](int id) {
            const double a = std::atan2(pts[id][1], pts[id][0]);
            return a < 0.0 ? a + 2.0 * pi : a;
        };
        std::sort(ring.begin(), ring.end(), [&](int a, int b) { return angle(a) < angle(b); });
        rings.push_back(std::move(ring));
    }

    std::vector<Cell<2>> cells;
    const auto& first = rings[1];
    for (std::size_t j = 0; j < first.size(); ++j) cells.push_back({0, first[j], first[(j + 1) % first.size()]});
    auto angle_from = [&](int id, double base) {
        double a = std::atan2(pts[id][1], pts[id][0]) - base;
        while (a < 0.0) a += 2.0 * pi;
        while (a >= 2.0 * pi) a -= 2.0 * pi;
        return a;
    };
    for (int k = 2; k <= K; ++k) {
        const auto& in = rings[k - 1];
        const auto& out = rings[k];
        const int ni = static_cast<int>(in.size()), no = static_cast<int>(out.size());
        // Angles relative to in[0]; both rings are walked once around from
        // in[0] and from the first outer point past it.
        const double base = std::atan2(pts[in[0]][1], pts[in[0]][0]);
        int o0 = 0;
        for (int j = 1; j < no; ++j)
            if (angle_from(out[j], base) < angle_from(out[o0], base)) o0 = j;
        const double b0 = angle_from(out[o0], base);
        auto ang_in = [&](int a) { return a >= ni ? 2.0 * pi : angle_from(in[a], base); };
        auto ang_out = [&](int b) { return b >= no ? 2.0 * pi + b0 : angle_from(out[(o0 + b) % no], base); };
        int a = 0, b = 0;
        while (a < ni || b < no) {
            const bool step_in = b >= no || (a < ni && ang_in(a + 1) < ang_out(b + 1));
            if (step_in) {
                cells.push_back({in[a % ni], in[(a + 1) % ni], out[(o0 + b) % no]});
                ++a;
            } else {
                cells.push_back({in[a % ni], out[(o0 + b + 1) % no], out[(o0 + b) % no]});
                ++b;
            }
        }
    }
    // Orient counter-clockwise.
    for (auto& c : cells) {
        const Vec<2> e1 = pts[c[1]] - pts[c[0]], e2 = pts[c[2]] - pts[c[0]];
        if (e1[0] * e2[1] - e1[1] * e2[0] < 0.0) std::swap(c[1], c[2]);
    }
    PointCloud<2> cloud(std::move(pts), std::move(bdry), std::move(cells));
    cloud.compute_metrics();
    return cloud;
}

}  // namespace monofd
