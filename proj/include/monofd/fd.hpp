#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "monofd/geometry.hpp"
#include "monofd/point_cloud.hpp"
#include "monofd/stencil.hpp"

namespace monofd {

enum class SchemeKind { first_forward, first_backward, second };

/// Linear interpolation point x0 + t w (or x0 - t w) on one simplex.
template <int Dim>
struct Interpolant {
    std::array<int, Dim> vertices{};
    Vec<Dim> lambda = Vec<Dim>::Zero();
    double t = 0.0;
};

/// Interpolant where the ray along +w (forward) or -w (backward) crosses the
/// simplex. Roundoff negatives are clamped and interpolation points that sit
/// on a vertex are snapped onto it exactly.
template <int Dim>
Interpolant<Dim> make_interpolant(const SimplexFrame<Dim>& frame, const Vec<Dim>& w, Orientation orientation) {
    const double sign = orientation == Orientation::forward ? 1.0 : -1.0;
    const Vec<Dim> mu = sign * (frame.Vinv * w);
    const double s = mu.sum();
    if (!(s > 0.0) || mu.minCoeff() < -kBarycentricTolerance) throw RayMiss("ray misses the simplex");
    Interpolant<Dim> ip;
    ip.vertices = frame.vertices;
    ip.t = 1.0 / s;
    ip.lambda = (mu / s).cwiseMax(0.0);
    ip.lambda /= ip.lambda.sum();
    int k;
    if (ip.lambda.maxCoeff(&k) >= 1.0 - 1e-10) {
        ip.lambda.setZero();
        ip.lambda[k] = 1.0;
        ip.t = frame.V.col(k).norm();
    }
    return ip;
}

/// A realized directional difference at one point.
template <int Dim>
struct DirectionalScheme {
    int center = -1;
    Direction<Dim> direction;
    SchemeKind kind = SchemeKind::second;
    Interpolant<Dim> forward;
    Interpolant<Dim> backward;
};

/// Scheme from an explicit simplex pair. For first-derivative kinds only the
/// relevant frame is used and the other may be null.
template <int Dim>
DirectionalScheme<Dim> make_scheme(int center, const Direction<Dim>& w, SchemeKind kind, const SimplexFrame<Dim>* forward,
                                   const SimplexFrame<Dim>* backward) {
    DirectionalScheme<Dim> s;
    s.center = center;
    s.direction = w;
    s.kind = kind;
    if (kind != SchemeKind::first_backward) s.forward = make_interpolant(*forward, w.vec(), Orientation::forward);
    if (kind != SchemeKind::first_forward) s.backward = make_interpolant(*backward, w.vec(), Orientation::backward);
    return s;
}

/// Scheme at point i for direction w, selecting simplices from the stencil list.
template <int Dim>
DirectionalScheme<Dim> make_scheme(const StencilSet<Dim>& stencils, int i, const Direction<Dim>& w, SchemeKind kind) {
    const auto& frames = stencils.at(i);
    const SimplexFrame<Dim>* fp = nullptr;
    const SimplexFrame<Dim>* fm = nullptr;
    if (kind != SchemeKind::first_backward) {
        const int k = select_simplex(frames, w.vec(), Orientation::forward);
        if (k < 0) throw NoForwardSimplex(i);
        fp = &frames[k];
    }
    if (kind != SchemeKind::first_forward) {
        const int k = select_simplex(frames, w.vec(), Orientation::backward);
        if (k < 0) throw NoBackwardSimplex(i);
        fm = &frames[k];
    }
    return make_scheme(i, w, kind, fp, fm);
}

/// Linear functional sum_j c_j (u_j - u_center); the center coefficient is
/// minus the sum of the neighbour coefficients.
struct SchemeWeights {
    int center = -1;
    double center_coeff = 0.0;
    std::vector<std::pair<int, double>> neighbors;

    double neighbor_sum() const {
        double s = 0.0;
        for (const auto& [j, c] : neighbors) s += c;
        return s;
    }

    /// Merges repeated ids, drops zeros and sorts by id.
    void normalize() {
        std::sort(neighbors.begin(), neighbors.end());
        std::vector<std::pair<int, double>> merged;
        for (const auto& [j, c] : neighbors) {
            if (!merged.empty() && merged.back().first == j)
                merged.back().second += c;
            else
                merged.push_back({j, c});
        }
        std::erase_if(merged, [](const auto& e) { return e.second == 0.0; });
        neighbors = std::move(merged);
        center_coeff = -neighbor_sum();
    }

    template <class U>
    double apply(const U& u) const {
        const double u0 = u[center];
        double acc = 0.0;
        for (const auto& [j, c] : neighbors) acc += c * (u[j] - u0);
        return acc;
    }
};

template <int Dim>
SchemeWeights scheme_weights(const DirectionalScheme<Dim>& s) {
    SchemeWeights w;
    w.center = s.center;
    auto add = [&](const Interpolant<Dim>& ip, double scale) {
        for (int k = 0; k < Dim; ++k)
            if (ip.lambda[k] != 0.0) w.neighbors.push_back({ip.vertices[k], scale * ip.lambda[k]});
    };
    switch (s.kind) {
        case SchemeKind::first_forward:
            add(s.forward, 1.0 / s.forward.t);
            break;
        case SchemeKind::first_backward:
            add(s.backward, 1.0 / s.backward.t);
            break;
        case SchemeKind::second: {
            const double tp = s.forward.t;
            const double tm = s.backward.t;
            add(s.forward, 2.0 / (tp * (tp + tm)));
            add(s.backward, 2.0 / (tm * (tp + tm)));
            break;
        }
    }
    w.normalize();
    return w;
}

template <int Dim>
SchemeWeights scheme_weights(const StencilSet<Dim>& stencils, int i, const Direction<Dim>& w, SchemeKind kind) {
    return scheme_weights(make_scheme(stencils, i, w, kind));
}

/// Upwind (forward) or downwind (backward) first difference at point i: the
/// backward value approximates the derivative along -w.
template <int Dim>
double first_derivative(const StencilSet<Dim>& stencils, std::span<const double> u, int i, const Direction<Dim>& w,
                        Orientation orientation) {
    const SchemeKind kind = orientation == Orientation::forward ? SchemeKind::first_forward : SchemeKind::first_backward;
    return scheme_weights(stencils, i, w, kind).apply(u);
}

template <int Dim>
double second_derivative(const StencilSet<Dim>& stencils, std::span<const double> u, int i, const Direction<Dim>& w) {
    return scheme_weights(stencils, i, w, SchemeKind::second).apply(u);
}

/// Primitive lattice offsets with Chebyshev norm <= rho, one per line
/// (the first nonzero coordinate positive).
template <int Dim>
std::vector<std::array<int, Dim>> lattice_directions(int rho) {
    std::vector<std::array<int, Dim>> out;
    for (int q = 1; q <= rho; ++q) {
        for (const auto& o : lattice_ring<Dim>(q)) {
            int g = 0;
            for (int v : o) g = std::gcd(g, std::abs(v));
            if (g != 1) continue;
            int lead = 0;
            for (int v : o) {
                if (v != 0) {
                    lead = v;
                    break;
                }
            }
            if (lead > 0) out.push_back(o);
        }
    }
    return out;
}

/// Lattice direction (up to sign) closest in angle to w.
template <int Dim>
std::array<int, Dim> nearest_lattice_direction(const Lattice<Dim>& lattice, const Direction<Dim>& w, int rho) {
    std::array<int, Dim> best{};
    double best_cos = -1.0;
    for (const auto& o : lattice_directions<Dim>(rho)) {
        const double c = std::abs(lattice.offset(o).normalized().dot(w.vec()));
        if (c > best_cos + 1e-14) {
            best_cos = c;
            best = o;
        }
    }
    return best;
}

/// Centered second difference along the lattice offset o at point i.
template <int Dim>
SchemeWeights lattice_second_difference(const Lattice<Dim>& lattice, int i, const std::array<int, Dim>& o) {
    const auto idx = lattice.unflat(i);
    std::array<int, Dim> plus, minus;
    for (int d = 0; d < Dim; ++d) {
        plus[d] = idx[d] + o[d];
        minus[d] = idx[d] - o[d];
    }
    if (!lattice.contains(plus) || !lattice.contains(minus)) throw OutOfDomain(i);
    const double c = 1.0 / lattice.offset(o).squaredNorm();
    SchemeWeights w;
    w.center = i;
    w.neighbors = {{lattice.flat(plus), c}, {lattice.flat(minus), c}};
    w.normalize();
    return w;
}

/// Second difference along the nearest lattice direction to w.
template <int Dim>
double grid_direction_second_derivative(const PointCloud<Dim>& cloud, std::span<const double> u, int i,
                                        const Direction<Dim>& w, int rho) {
    if (!cloud.lattice()) throw std::invalid_argument("grid_direction_second_derivative needs a lattice cloud");
    const Lattice<Dim>& lat = *cloud.lattice();
    return lattice_second_difference<Dim>(lat, i, nearest_lattice_direction(lat, w, rho)).apply(u);
}

}  // namespace monofd
