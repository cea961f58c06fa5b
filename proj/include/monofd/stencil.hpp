#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>
#include <vector>

#include "monofd/geometry.hpp"
#include "monofd/hull.hpp"
#include "monofd/point_cloud.hpp"
#include "monofd/spatial_index.hpp"

namespace monofd {

/// Candidate simplices of every cloud point.
template <int Dim>
struct StencilSet {
    SearchParams params;
    int stencil_radius = 0;  ///< lattice ring radius for grid stencils, 0 for clouds
    std::vector<std::vector<SimplexFrame<Dim>>> simplices;

    int size() const { return static_cast<int>(simplices.size()); }
    const std::vector<SimplexFrame<Dim>>& at(int i) const { return simplices[i]; }
};

namespace detail {

/// Turns a candidate neighbour list of point i into hull simplices.
template <int Dim>
std::vector<SimplexFrame<Dim>> simplices_from_candidates(const PointCloud<Dim>& cloud, int i, std::vector<int> candidates) {
    if (candidates.empty()) throw EmptyNeighborhood(i);
    const Vec<Dim>& x0 = cloud.point(i);
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
        const double da = (cloud.point(a) - x0).squaredNorm();
        const double db = (cloud.point(b) - x0).squaredNorm();
        return da < db || (da == db && a < b);
    });
    // Collinear duplicates: keep the nearest.
    std::vector<int> kept;
    std::vector<Vec<Dim>> dirs;
    for (int j : candidates) {
        const Vec<Dim> v = (cloud.point(j) - x0).normalized();
        bool dup = false;
        for (const auto& d : dirs) {
            if (v.dot(d) > 1.0 - 1e-12) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        kept.push_back(j);
        dirs.push_back(v);
    }
    const auto facets = direction_hull(dirs);
    if (facets.empty()) throw HullDegenerate(i);

    std::vector<SimplexFrame<Dim>> out;
    for (const auto& f : facets) {
        std::array<int, Dim> ids;
        for (int k = 0; k < Dim; ++k) ids[k] = kept[f[k]];
        std::sort(ids.begin(), ids.end());
        Mat<Dim> V;
        for (int k = 0; k < Dim; ++k) V.col(k) = cloud.point(ids[k]) - x0;
        try {
            out.push_back(SimplexFrame<Dim>::make(i, ids, V));
        } catch (const SingularSimplex&) {
            // facet through x0 (antipodal vertices); carries no interpolation
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.vertices < b.vertices; });
    out.erase(std::unique(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.vertices == b.vertices; }),
              out.end());
    if (out.empty()) throw HullDegenerate(i);
    return out;
}

}  // namespace detail

/// Points reachable from i within `hops` graph steps whose distance lies in
/// [r, R]. Boundary points within R are admitted even when closer than r.
template <int Dim>
std::vector<int> annulus_neighbors(const PointCloud<Dim>& cloud, int i, double r, double R, int hops) {
    const auto& adj = cloud.adjacency();
    const Vec<Dim>& x0 = cloud.point(i);
    std::unordered_set<int> visited{i};
    std::vector<int> frontier{i};
    std::vector<int> out;
    for (int depth = 0; depth < hops && !frontier.empty(); ++depth) {
        std::vector<int> next;
        for (int a : frontier) {
            for (int j : adj[a]) {
                if (!visited.insert(j).second) continue;
                next.push_back(j);
                const double d = (cloud.point(j) - x0).norm();
                if (d <= R && (d >= r || cloud.is_boundary(j))) out.push_back(j);
            }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Candidate simplices of a single point of an unstructured cloud.
template <int Dim>
std::vector<SimplexFrame<Dim>> point_simplices(const PointCloud<Dim>& cloud, int i, const SearchParams& params) {
    const double ell = cloud.metrics().min_edge;
    const int hops = ell > 0.0 ? static_cast<int>(std::ceil(params.R / ell)) : 1;
    return detail::simplices_from_candidates(cloud, i, annulus_neighbors(cloud, i, params.r, params.R, hops));
}

/// Builds the stencil list of every point from the search annulus of
/// resolution dtheta. Interior failures throw; boundary points that cannot
/// be resolved are left with an empty list.
template <int Dim>
StencilSet<Dim> preprocess_cloud(const PointCloud<Dim>& cloud, const SearchParams& params) {
    StencilSet<Dim> set;
    set.params = params;
    set.simplices.resize(cloud.size());
    for (int i = 0; i < cloud.size(); ++i) {
        if (cloud.is_boundary(i)) {
            try {
                set.simplices[i] = point_simplices(cloud, i, params);
            } catch (const PointError&) {
            }
        } else {
            set.simplices[i] = point_simplices(cloud, i, params);
        }
    }
    return set;
}

template <int Dim>
StencilSet<Dim> preprocess_cloud(const PointCloud<Dim>& cloud, double dtheta,
                                 RadiusConvention convention = RadiusConvention::narrow) {
    return preprocess_cloud(cloud, search_radii(cloud.metrics().h, dtheta, Dim, convention));
}

/// Lattice offsets at Chebyshev distance exactly rho.
template <int Dim>
std::vector<std::array<int, Dim>> lattice_ring(int rho) {
    std::vector<std::array<int, Dim>> ring;
    std::array<int, Dim> o{};
    auto rec = [&](auto&& self, int d) -> void {
        if (d == Dim) {
            int m = 0;
            for (int v : o) m = std::max(m, std::abs(v));
            if (m == rho) ring.push_back(o);
            return;
        }
        for (int v = -rho; v <= rho; ++v) {
            o[d] = v;
            self(self, d + 1);
        }
    };
    rec(rec, 0);
    return ring;
}

/// Grid stencils: the lattice ring of Chebyshev radius rho, plus any boundary
/// nodes inside the ring. Requires lattice metadata on the cloud.
template <int Dim>
StencilSet<Dim> preprocess_grid(const PointCloud<Dim>& cloud, int rho) {
    if (!cloud.lattice()) throw std::invalid_argument("preprocess_grid needs a lattice cloud");
    if (rho < 1) throw std::invalid_argument("stencil radius must be positive");
    const Lattice<Dim>& lat = *cloud.lattice();
    const double s = lat.spacing.minCoeff();
    StencilSet<Dim> set;
    set.stencil_radius = rho;
    set.params.n = Dim;
    set.params.Cn = dimension_constant(Dim);
    set.params.h = cloud.metrics().h;
    set.params.r = rho * s;
    set.params.R = rho * s * std::sqrt(static_cast<double>(Dim));
    set.params.dtheta = std::atan(1.0 / rho);
    set.simplices.resize(cloud.size());

    const auto ring = lattice_ring<Dim>(rho);
    std::vector<std::array<int, Dim>> box;
    for (int q = 1; q <= rho; ++q)
        for (const auto& o : lattice_ring<Dim>(q)) box.push_back(o);

    for (int i = 0; i < cloud.size(); ++i) {
        const auto idx = lat.unflat(i);
        std::vector<int> cand;
        auto shifted = [&](const std::array<int, Dim>& o) {
            std::array<int, Dim> j;
            for (int d = 0; d < Dim; ++d) j[d] = idx[d] + o[d];
            return j;
        };
        for (const auto& o : ring) {
            const auto j = shifted(o);
            if (lat.contains(j)) cand.push_back(lat.flat(j));
        }
        for (const auto& o : box) {
            const auto j = shifted(o);
            if (lat.contains(j) && cloud.is_boundary(lat.flat(j))) cand.push_back(lat.flat(j));
        }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        if (cloud.is_boundary(i)) {
            try {
                set.simplices[i] = detail::simplices_from_candidates(cloud, i, cand);
            } catch (const PointError&) {
            }
        } else {
            set.simplices[i] = detail::simplices_from_candidates(cloud, i, cand);
        }
    }
    return set;
}

/// Index into `frames` of a simplex whose cone contains w (forward) or -w
/// (backward); ties go to the smallest facet, then to the lowest index.
/// Returns -1 when none qualifies.
template <int Dim>
int select_simplex(const std::vector<SimplexFrame<Dim>>& frames, const Vec<Dim>& w, Orientation orientation) {
    const double sign = orientation == Orientation::forward ? 1.0 : -1.0;
    int best = -1;
    double best_measure = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(frames.size()); ++k) {
        const Vec<Dim> mu = sign * (frames[k].Vinv * w);
        if (mu.minCoeff() < -kBarycentricTolerance || !(mu.sum() > 0.0)) continue;
        const double m = frames[k].facet_measure();
        if (m < best_measure) {
            best_measure = m;
            best = k;
        }
    }
    return best;
}

struct SimplexPair {
    int forward = -1;
    int backward = -1;
};

/// Forward and backward simplices of point i for direction w, as indices into stencils.at(i).
template <int Dim>
SimplexPair select_simplex_pair(const StencilSet<Dim>& stencils, int i, const Direction<Dim>& w) {
    const auto& frames = stencils.at(i);
    SimplexPair pair;
    pair.forward = select_simplex(frames, w.vec(), Orientation::forward);
    if (pair.forward < 0) throw NoForwardSimplex(i);
    pair.backward = select_simplex(frames, w.vec(), Orientation::backward);
    if (pair.backward < 0) throw NoBackwardSimplex(i);
    return pair;
}

/// Forward simplex for the inward normal at boundary point i.
template <int Dim>
int boundary_normal_stencil(const StencilSet<Dim>& stencils, int i, const Vec<Dim>& normal) {
    const int k = select_simplex(stencils.at(i), normal, Orientation::forward);
    if (k < 0) throw NoForwardSimplex(i);
    return k;
}

template <int Dim>
int boundary_normal_stencil(const PointCloud<Dim>& cloud, int i, const StencilSet<Dim>& stencils) {
    if (!cloud.is_boundary(i)) throw std::invalid_argument("boundary_normal_stencil: not a boundary point");
    const Vec<Dim> n = cloud.inward_normals()[i];
    if (n.norm() == 0.0) throw NoForwardSimplex(i);
    return boundary_normal_stencil(stencils, i, n);
}

/// Sample directions used for covering checks: equally spaced in 2-D,
/// a Fibonacci sphere in 3-D.
template <int Dim>
std::vector<Vec<Dim>> sphere_samples(int count) {
    std::vector<Vec<Dim>> out;
    out.reserve(count);
    if constexpr (Dim == 2) {
        for (int k = 0; k < count; ++k) {
            const double t = 2.0 * std::numbers::pi * (k + 0.5) / count;
            out.push_back(Vec<2>(std::cos(t), std::sin(t)));
        }
    } else {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
            out.push_back(Vec<3>(rad * std::cos(golden * k), rad * std::sin(golden * k), z));
        }
    }
    return out;
}

struct ResolutionReport {
    double lhs_boundary = 0.0;  ///< C_n h_B
    double rhs_boundary = 0.0;  ///< delta tan(dtheta / 2)
    bool boundary_ok = false;
    bool delta_le_r = false;  ///< normal-derivative reading
    bool delta_ge_r = false;  ///< interior-scheme reading
    int checked_points = 0;
    int sampled_directions = 0;
    std::vector<int> failing_points;  ///< points whose stencil is missing or fails to cover
    bool covering_ok() const { return failing_points.empty(); }
    bool passed() const { return boundary_ok && covering_ok(); }
};

/// Checks the boundary resolution inequality and samples the covering
/// property at interior points at least R away from the boundary.
template <int Dim>
ResolutionReport validate_resolution(const PointCloud<Dim>& cloud, const SearchParams& params, int directions = 360) {
    ResolutionReport rep;
    const CloudMetrics& m = cloud.metrics();
    rep.lhs_boundary = params.Cn * m.h_boundary;
    rep.rhs_boundary = m.delta * std::tan(0.5 * params.dtheta);
    rep.boundary_ok = rep.lhs_boundary <= rep.rhs_boundary;
    rep.delta_le_r = m.delta <= params.r;
    rep.delta_ge_r = m.delta >= params.r;
    rep.sampled_directions = directions;

    const std::vector<int> bdry = cloud.boundary_points();
    const SpatialIndex<Dim> bindex(std::span<const Vec<Dim>>(cloud.points()), bdry);
    const auto dirs = sphere_samples<Dim>(directions);
    const double ell = m.min_edge;
    const int hops = ell > 0.0 ? static_cast<int>(std::ceil(params.R / ell)) : 1;
    for (int i : cloud.interior_points()) {
        if (!bindex.empty() && bindex.nearest(cloud.point(i)).second < params.R) continue;
        ++rep.checked_points;
        std::vector<SimplexFrame<Dim>> frames;
        try {
            frames = detail::simplices_from_candidates(cloud, i, annulus_neighbors(cloud, i, params.r, params.R, hops));
        } catch (const PointError&) {
            rep.failing_points.push_back(i);
            continue;
        }
        for (const auto& w : dirs) {
            if (select_simplex(frames, w, Orientation::forward) < 0 ||
                select_simplex(frames, w, Orientation::backward) < 0) {
                rep.failing_points.push_back(i);
                break;
            }
        }
    }
    return rep;
}

}  // namespace monofd
