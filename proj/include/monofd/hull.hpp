#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "monofd/geometry.hpp"

namespace monofd {

/// Facets of the convex hull of a set of unit vectors, as index tuples into
/// `dirs`. Returns an empty list when the hull is lower dimensional.
inline std::vector<std::array<int, 2>> direction_hull(const std::vector<Vec<2>>& dirs) {
    const int n = static_cast<int>(dirs.size());
    std::vector<std::array<int, 2>> facets;
    if (n < 2) return facets;
    auto cross = [](const Vec<2>& a, const Vec<2>& b) { return a[0] * b[1] - a[1] * b[0]; };
    bool flat = true;
    for (int k = 1; k < n && flat; ++k) flat = std::abs(cross(dirs[0], dirs[k])) <= 1e-12;
    if (flat) return facets;
    if (n == 2) {
        facets.push_back({0, 1});
        return facets;
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> angle(n);
    for (int k = 0; k < n; ++k) angle[k] = std::atan2(dirs[k][1], dirs[k][0]);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return angle[a] < angle[b] || (angle[a] == angle[b] && a < b); });
    // On the unit circle every point is a hull vertex, so the hull edges are
    // the consecutive pairs in angular order.
    for (int k = 0; k < n; ++k) facets.push_back({order[k], order[(k + 1) % n]});
    return facets;
}

/// Incremental hull for unit vectors in R^3. Points lying on an existing
/// face plane are skipped, so coplanar patches come out triangulated.
inline std::vector<std::array<int, 3>> direction_hull(const std::vector<Vec<3>>& dirs) {
    constexpr double eps = 1e-12;
    const int n = static_cast<int>(dirs.size());
    std::vector<std::array<int, 3>> faces;
    if (n < 4) return faces;

    // Seed tetrahedron.
    int a = 0, b = -1, c = -1, d = -1;
    for (int k = 1; k < n && b < 0; ++k)
        if ((dirs[k] - dirs[a]).norm() > 1e-9) b = k;
    if (b < 0) return faces;
    for (int k = 1; k < n && c < 0; ++k)
        if ((dirs[b] - dirs[a]).cross(dirs[k] - dirs[a]).norm() > 1e-9) c = k;
    if (c < 0) return faces;
    const Vec<3> nabc = (dirs[b] - dirs[a]).cross(dirs[c] - dirs[a]);
    for (int k = 1; k < n && d < 0; ++k)
        if (std::abs(nabc.dot(dirs[k] - dirs[a])) > 1e-9) d = k;
    if (d < 0) return faces;

    const Vec<3> inside = 0.25 * (dirs[a] + dirs[b] + dirs[c] + dirs[d]);
    auto oriented = [&](int i, int j, int k) -> std::array<int, 3> {
        const Vec<3> nrm = (dirs[j] - dirs[i]).cross(dirs[k] - dirs[i]);
        if (nrm.dot(inside - dirs[i]) > 0.0) return {i, k, j};
        return {i, j, k};
    };
    faces = {oriented(a, b, c), oriented(a, b, d), oriented(a, c, d), oriented(b, c, d)};

    auto visible = [&](const std::array<int, 3>& f, const Vec<3>& p) {
        const Vec<3> nrm = (dirs[f[1]] - dirs[f[0]]).cross(dirs[f[2]] - dirs[f[0]]);
        return nrm.dot(p - dirs[f[0]]) > eps;
    };

    for (int p = 0; p < n; ++p) {
        if (p == a || p == b || p == c || p == d) continue;
        std::vector<char> vis(faces.size(), 0);
        bool any = false;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            vis[f] = visible(faces[f], dirs[p]);
            any = any || vis[f];
        }
        if (!any) continue;
        std::set<std::pair<int, int>> edges;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (!vis[f]) continue;
            for (int e = 0; e < 3; ++e) edges.insert({faces[f][e], faces[f][(e + 1) % 3]});
        }
        std::vector<std::array<int, 3>> next;
        for (std::size_t f = 0; f < faces.size(); ++f)
            if (!vis[f]) next.push_back(faces[f]);
        for (const auto& [u, v] : edges)
            if (!edges.count({v, u})) next.push_back({u, v, p});
        faces = std::move(next);
    }
    return faces;
}

}  // namespace monofd
