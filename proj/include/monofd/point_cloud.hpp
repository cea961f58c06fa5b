#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "monofd/geometry.hpp"
#include "monofd/spatial_index.hpp"

namespace monofd {

/// Resolution metrics of a cloud.
struct CloudMetrics {
    double h = 0.0;           ///< covering radius of the domain (sampled, a lower bound)
    double h_boundary = 0.0;  ///< covering radius of the boundary by boundary points
    double delta = 0.0;       ///< min distance between an interior and a boundary point
    double min_edge = 0.0;    ///< shortest adjacency edge
};

/// Structured-grid metadata: point (i0, i1, ...) sits at origin + rotation * (spacing .* index),
/// flattened with the first index fastest.
template <int Dim>
struct Lattice {
    std::array<int, Dim> counts{};
    Vec<Dim> origin = Vec<Dim>::Zero();
    Vec<Dim> spacing = Vec<Dim>::Ones();
    Mat<Dim> rotation = Mat<Dim>::Identity();

    int size() const {
        int n = 1;
        for (int c : counts) n *= c;
        return n;
    }

    bool contains(const std::array<int, Dim>& idx) const {
        for (int d = 0; d < Dim; ++d)
            if (idx[d] < 0 || idx[d] >= counts[d]) return false;
        return true;
    }

    int flat(const std::array<int, Dim>& idx) const {
        int f = 0;
        for (int d = Dim - 1; d >= 0; --d) f = f * counts[d] + idx[d];
        return f;
    }

    std::array<int, Dim> unflat(int f) const {
        std::array<int, Dim> idx{};
        for (int d = 0; d < Dim; ++d) {
            idx[d] = f % counts[d];
            f /= counts[d];
        }
        return idx;
    }

    /// World-space vector of a lattice offset.
    Vec<Dim> offset(const std::array<int, Dim>& off) const {
        Vec<Dim> v;
        for (int d = 0; d < Dim; ++d) v[d] = spacing[d] * off[d];
        return rotation * v;
    }

    Vec<Dim> position(const std::array<int, Dim>& idx) const { return origin + offset(idx); }
};

template <int Dim>
using Cell = std::array<int, Dim + 1>;

/// A boundary facet of the triangulation, with the cell vertex opposite to it.
template <int Dim>
struct BoundaryFacet {
    std::array<int, Dim> vertices{};
    int opposite = -1;
};

/// Points of a discretized domain together with boundary markers, an optional
/// triangulation, the neighbour graph and resolution metrics.
template <int Dim>
class PointCloud {
public:
    PointCloud() = default;

    PointCloud(std::vector<Vec<Dim>> points, std::vector<char> boundary, std::vector<Cell<Dim>> cells = {})
        : points_(std::move(points)), boundary_(std::move(boundary)), cells_(std::move(cells)) {
        if (boundary_.size() != points_.size()) throw std::invalid_argument("boundary mask size mismatch");
        adjacency_from_cells();
    }

    int size() const { return static_cast<int>(points_.size()); }
    const std::vector<Vec<Dim>>& points() const { return points_; }
    const Vec<Dim>& point(int i) const { return points_[i]; }
    bool is_boundary(int i) const { return boundary_[i] != 0; }
    const std::vector<char>& boundary_mask() const { return boundary_; }
    const std::vector<Cell<Dim>>& cells() const { return cells_; }
    const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }
    const std::optional<Lattice<Dim>>& lattice() const { return lattice_; }
    const CloudMetrics& metrics() const { return metrics_; }

    std::vector<int> boundary_points() const { return select(true); }
    std::vector<int> interior_points() const { return select(false); }

    void set_lattice(Lattice<Dim> lattice) { lattice_ = std::move(lattice); }
    void set_metrics(const CloudMetrics& m) { metrics_ = m; }
    void set_adjacency(std::vector<std::vector<int>> adjacency) {
        for (auto& row : adjacency) {
            std::sort(row.begin(), row.end());
            row.erase(std::unique(row.begin(), row.end()), row.end());
        }
        adjacency_ = std::move(adjacency);
    }

    /// Rebuilds the neighbour graph from the edges of the cells.
    void adjacency_from_cells() {
        std::vector<std::vector<int>> adj(points_.size());
        for (const auto& c : cells_) {
            for (int a = 0; a <= Dim; ++a) {
                for (int b = a + 1; b <= Dim; ++b) {
                    adj[c[a]].push_back(c[b]);
                    adj[c[b]].push_back(c[a]);
                }
            }
        }
        set_adjacency(std::move(adj));
    }

    /// Facets that belong to exactly one cell.
    std::vector<BoundaryFacet<Dim>> boundary_facets() const {
        std::map<std::array<int, Dim>, std::pair<int, int>> count;  // facet -> (uses, opposite)
        for (const auto& c : cells_) {
            for (int skip = 0; skip <= Dim; ++skip) {
                std::array<int, Dim> f{};
                int k = 0;
                for (int a = 0; a <= Dim; ++a)
                    if (a != skip) f[k++] = c[a];
                std::sort(f.begin(), f.end());
                auto& e = count[f];
                e.first += 1;
                e.second = c[skip];
            }
        }
        std::vector<BoundaryFacet<Dim>> out;
        for (const auto& [f, e] : count)
            if (e.first == 1) out.push_back({f, e.second});
        return out;
    }

    /// Unit inward normal at each boundary point, averaged over its boundary facets.
    std::vector<Vec<Dim>> inward_normals() const {
        std::vector<Vec<Dim>> normals(points_.size(), Vec<Dim>::Zero());
        for (const auto& f : boundary_facets()) {
            Vec<Dim> n;
            if constexpr (Dim == 2) {
                const Vec<2> e = points_[f.vertices[1]] - points_[f.vertices[0]];
                n = Vec<2>(-e[1], e[0]);
            } else {
                const Vec<3> a = points_[f.vertices[1]] - points_[f.vertices[0]];
                const Vec<3> b = points_[f.vertices[2]] - points_[f.vertices[0]];
                n = a.cross(b);
            }
            if (n.dot(points_[f.opposite] - points_[f.vertices[0]]) < 0.0) n = -n;
            n.normalize();
            for (int v : f.vertices) normals[v] += n;
        }
        for (auto& n : normals) {
            const double len = n.norm();
            if (len > 0.0) n /= len;
        }
        return normals;
    }

    /// Recomputes h, h_B, delta and the shortest edge. `resolution` is the
    /// number of subdivisions per cell edge used to sample the domain.
    void compute_metrics(int resolution = 10) {
        CloudMetrics m;
        m.min_edge = std::numeric_limits<double>::infinity();
        for (int i = 0; i < size(); ++i)
            for (int j : adjacency_[i])
                if (j > i) m.min_edge = std::min(m.min_edge, (points_[i] - points_[j]).norm());
        if (!std::isfinite(m.min_edge)) m.min_edge = 0.0;

        const std::vector<int> bdry = boundary_points();
        const std::vector<int> inner = interior_points();
        const SpatialIndex<Dim> bindex(std::span<const Vec<Dim>>(points_), bdry);
        m.delta = std::numeric_limits<double>::infinity();
        for (int i : inner) m.delta = std::min(m.delta, bindex.nearest(points_[i]).second);
        if (!std::isfinite(m.delta)) m.delta = 0.0;

        const SpatialIndex<Dim> all{std::span<const Vec<Dim>>(points_)};
        m.h = 0.0;
        for (const auto& c : cells_) {
            std::array<Vec<Dim>, Dim + 1> corners;
            for (int a = 0; a <= Dim; ++a) corners[a] = points_[c[a]];
            for_each_sample<Dim + 1>(corners, resolution,
                                     [&](const Vec<Dim>& x) { m.h = std::max(m.h, all.nearest(x).second); });
        }
        m.h_boundary = 0.0;
        for (const auto& f : boundary_facets()) {
            std::array<Vec<Dim>, Dim> corners;
            for (int a = 0; a < Dim; ++a) corners[a] = points_[f.vertices[a]];
            for_each_sample<Dim>(corners, resolution,
                                 [&](const Vec<Dim>& x) { m.h_boundary = std::max(m.h_boundary, bindex.nearest(x).second); });
        }
        metrics_ = m;
    }

private:
    std::vector<int> select(bool on_boundary) const {
        std::vector<int> ids;
        for (int i = 0; i < size(); ++i)
            if (is_boundary(i) == on_boundary) ids.push_back(i);
        return ids;
    }

    /// Calls f on the barycentric sample lattice of a simplex with K corners.
    template <int K, class F>
    static void for_each_sample(const std::array<Vec<Dim>, K>& corners, int m, F&& f) {
        if constexpr (K == 2) {
            for (int i = 0; i <= m; ++i) f(((m - i) * corners[0] + i * corners[1]) / m);
        } else if constexpr (K == 3) {
            for (int i = 0; i <= m; ++i)
                for (int j = 0; i + j <= m; ++j)
                    f(((m - i - j) * corners[0] + i * corners[1] + j * corners[2]) / m);
        } else {
            for (int i = 0; i <= m; ++i)
                for (int j = 0; i + j <= m; ++j)
                    for (int k = 0; i + j + k <= m; ++k)
                        f(((m - i - j - k) * corners[0] + i * corners[1] + j * corners[2] + k * corners[3]) / m);
        }
    }

    std::vector<Vec<Dim>> points_;
    std::vector<char> boundary_;
    std::vector<Cell<Dim>> cells_;
    std::vector<std::vector<int>> adjacency_;
    std::optional<Lattice<Dim>> lattice_;
    CloudMetrics metrics_;
};

}  // namespace monofd
