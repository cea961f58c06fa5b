#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "monofd/geometry.hpp"

namespace monofd {

/// Uniform bucket grid over a point set, for nearest-point and radius queries.
template <int Dim>
class SpatialIndex {
public:
    SpatialIndex() = default;

    /// Indexes `points[ids[k]]`; when `ids` is empty every point is indexed.
    SpatialIndex(std::span<const Vec<Dim>> points, std::vector<int> ids = {}) : points_(points) {
        if (ids.empty()) {
            ids.resize(points.size());
            for (std::size_t k = 0; k < points.size(); ++k) ids[k] = static_cast<int>(k);
        }
        ids_ = std::move(ids);
        if (ids_.empty()) return;
        lo_ = points[ids_[0]];
        Vec<Dim> hi = lo_;
        for (int id : ids_) {
            lo_ = lo_.cwiseMin(points[id]);
            hi = hi.cwiseMax(points[id]);
        }
        const Vec<Dim> extent = (hi - lo_).cwiseMax(1e-12);
        // About two points per bucket, measured over the axes the set spans.
        double volume = 1.0;
        int spanned = 0;
        for (int d = 0; d < Dim; ++d) {
            if (extent[d] > 1e-6 * extent.maxCoeff()) {
                volume *= extent[d];
                ++spanned;
            }
        }
        cell_ = std::pow(2.0 * volume / static_cast<double>(ids_.size()), 1.0 / std::max(spanned, 1));
        cell_ = std::max(cell_, extent.maxCoeff() * 1e-6);
        for (int d = 0; d < Dim; ++d) dims_[d] = std::max(1, static_cast<int>(std::ceil(extent[d] / cell_)) + 1);
        for (int id : ids_) buckets_[key(bucket_of(points[id]))].push_back(id);
    }

    bool empty() const { return ids_.empty(); }

    /// Index of the nearest indexed point and its distance.
    std::pair<int, double> nearest(const Vec<Dim>& x) const {
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        if (ids_.empty()) return {best, best_d2};
        const auto c = bucket_of(x);
        int max_ring = 1;
        for (int d = 0; d < Dim; ++d) max_ring = std::max({max_ring, std::abs(c[d]) + 1, std::abs(dims_[d] - c[d]) + 1});
        for (int ring = 0; ring <= max_ring; ++ring) {
            visit_shell(c, ring, [&](int id) {
                const double d2 = (points_[id] - x).squaredNorm();
                if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
                    best_d2 = d2;
                    best = id;
                }
            });
            // Every unvisited point is at least `ring * cell_` away from x.
            if (best >= 0 && static_cast<double>(ring) * cell_ >= std::sqrt(best_d2)) break;
        }
        return {best, std::sqrt(best_d2)};
    }

    /// Indexed points within distance `radius` of x (inclusive), sorted by id.
    std::vector<int> within(const Vec<Dim>& x, double radius) const {
        std::vector<int> out;
        if (ids_.empty()) return out;
        const auto c = bucket_of(x);
        const int reach = static_cast<int>(std::ceil(radius / cell_)) + 1;
        const double r2 = radius * radius;
        for (int ring = 0; ring <= reach; ++ring) {
            visit_shell(c, ring, [&](int id) {
                if ((points_[id] - x).squaredNorm() <= r2) out.push_back(id);
            });
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    using Bucket = std::array<int, Dim>;

    Bucket bucket_of(const Vec<Dim>& x) const {
        Bucket b;
        for (int d = 0; d < Dim; ++d) b[d] = static_cast<int>(std::floor((x[d] - lo_[d]) / cell_));
        return b;
    }

    static long long key(const Bucket& b) {
        long long k = 0;
        for (int d = 0; d < Dim; ++d) k = k * 2000003LL + (b[d] + 1000000);
        return k;
    }

    template <class F>
    void visit_bucket(const Bucket& b, F&& f) const {
        const auto it = buckets_.find(key(b));
        if (it == buckets_.end()) return;
        for (int id : it->second) f(id);
    }

    /// Buckets at Chebyshev distance exactly `ring` from `c`.
    template <class F>
    void visit_shell(const Bucket& c, int ring, F&& f) const {
        if (ring == 0) {
            visit_bucket(c, f);
            return;
        }
        Bucket b;
        if constexpr (Dim == 2) {
            for (int i = -ring; i <= ring; ++i) {
                for (int j = -ring; j <= ring; ++j) {
                    if (std::max(std::abs(i), std::abs(j)) != ring) continue;
                    b = {c[0] + i, c[1] + j};
                    visit_bucket(b, f);
                }
            }
        } else {
            for (int i = -ring; i <= ring; ++i) {
                for (int j = -ring; j <= ring; ++j) {
                    for (int k = -ring; k <= ring; ++k) {
                        if (std::max({std::abs(i), std::abs(j), std::abs(k)}) != ring) continue;
                        b = {c[0] + i, c[1] + j, c[2] + k};
                        visit_bucket(b, f);
                    }
                }
            }
        }
    }

    std::span<const Vec<Dim>> points_;
    std::vector<int> ids_;
    Vec<Dim> lo_ = Vec<Dim>::Zero();
    double cell_ = 1.0;
    std::array<int, Dim> dims_{};
    std::unordered_map<long long, std::vector<int>> buckets_;
};

}  // namespace monofd
