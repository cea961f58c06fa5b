#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "monofd/errors.hpp"

namespace monofd {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

template <int Dim>
using Mat = Eigen::Matrix<double, Dim, Dim>;

/// Absolute slack on barycentric / Farkas sign tests.
inline constexpr double kBarycentricTolerance = 1e-9;

/// Simplices whose offset matrix is worse conditioned than this are rejected.
inline constexpr double kConditionCap = 1e12;

/// Unit vector in R^Dim.
template <int Dim>
class Direction {
public:
    Direction() { w_.setZero(); w_[0] = 1.0; }

    /// Normalizes `v`; throws std::invalid_argument on the zero vector.
    explicit Direction(const Vec<Dim>& v) {
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("direction must be nonzero");
        w_ = v / n;
    }

    static Direction from_angle(double theta) requires(Dim == 2) {
        return Direction(Vec<2>(std::cos(theta), std::sin(theta)));
    }

    const Vec<Dim>& vec() const noexcept { return w_; }
    double operator[](int k) const { return w_[k]; }
    Direction operator-() const {
        Direction d;
        d.w_ = -w_;
        return d;
    }

private:
    Vec<Dim> w_;
};

/// Spectral condition number of a small dense matrix.
template <int Dim>
double condition_number(const Mat<Dim>& m) {
    Eigen::JacobiSVD<Mat<Dim>> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s[Dim - 1];
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s[0] / smin;
}

/// An (n-1)-simplex seen from a cloud point x0: the columns of V are the
/// vertex offsets x_k - x0.
template <int Dim>
struct SimplexFrame {
    int origin = -1;
    std::array<int, Dim> vertices{};
    Mat<Dim> V = Mat<Dim>::Identity();
    Mat<Dim> Vinv = Mat<Dim>::Identity();

    /// Throws SingularSimplex when cond(V) exceeds `cap`.
    static SimplexFrame make(int origin, const std::array<int, Dim>& vertices, const Mat<Dim>& offsets,
                             double cap = kConditionCap) {
        const double cond = condition_number<Dim>(offsets);
        if (!(cond <= cap)) throw SingularSimplex(cond);
        SimplexFrame f;
        f.origin = origin;
        f.vertices = vertices;
        f.V = offsets;
        f.Vinv = offsets.inverse();
        return f;
    }

    /// Row vector 1^T V^{-1}; its inner product with w is 1/t along the ray.
    Vec<Dim> inverse_row_sum() const { return Vinv.transpose() * Vec<Dim>::Ones(); }

    /// (n-1)-volume of the vertex simplex: segment length in 2-D, triangle area in 3-D.
    double facet_measure() const {
        if constexpr (Dim == 2) {
            return (V.col(1) - V.col(0)).norm();
        } else {
            const Vec<3> a = V.col(1) - V.col(0);
            const Vec<3> b = V.col(2) - V.col(0);
            return 0.5 * a.cross(b).norm();
        }
    }

    double min_vertex_norm() const { return V.colwise().norm().minCoeff(); }
    double max_vertex_norm() const { return V.colwise().norm().maxCoeff(); }
};

/// Barycentric coordinates of the offset `x` (relative to the frame origin): V lambda = x.
template <int Dim>
Vec<Dim> barycentric_coordinates(const SimplexFrame<Dim>& frame, const Vec<Dim>& x) {
    return frame.V.partialPivLu().solve(x);
}

enum class Orientation { forward, backward };

/// Distance t along +w (forward) or -w (backward) at which the ray from the
/// frame origin meets the hyperplane through the simplex vertices. Throws
/// RayMiss if the ray points away from the simplex or pierces the hyperplane
/// outside the simplex.
template <int Dim>
double ray_parameter(const SimplexFrame<Dim>& frame, const Direction<Dim>& w, Orientation orientation) {
    const Vec<Dim> mu = frame.Vinv * w.vec();
    const double s = mu.sum();
    const double sign = orientation == Orientation::forward ? 1.0 : -1.0;
    if (!(sign * s > 0.0)) throw RayMiss("ray does not point towards the simplex");
    const double t = sign / s;
    const Vec<Dim> lambda = sign * t * mu;
    if (lambda.minCoeff() < -kBarycentricTolerance) throw RayMiss("ray misses the simplex");
    return t;
}

/// Membership in the closed cone {x : <x - x0, w> / |x - x0| >= 1 - cos(dtheta/2)}.
template <int Dim>
bool in_cone(const Vec<Dim>& x0, const Direction<Dim>& w, double dtheta, const Vec<Dim>& x) {
    const Vec<Dim> v = x - x0;
    const double n = v.norm();
    if (n == 0.0) throw std::invalid_argument("in_cone: x coincides with x0");
    return v.dot(w.vec()) / n >= 1.0 - std::cos(0.5 * dtheta);
}

/// C_n: radius (in units of h) of a ball holding n kissing h-balls.
inline double dimension_constant(int n) {
    switch (n) {
        case 2: return 2.0;
        case 3: return 1.0 + 2.0 / std::sqrt(3.0);
        default: throw std::invalid_argument("dimension constant only known for n = 2, 3");
    }
}

enum class RadiusConvention {
    proof,   ///< C_n h (+-1 + cosec(dtheta/2))
    narrow,  ///< h (+-1 + C_n cosec(dtheta/2))
};

struct SearchParams {
    double dtheta = 0.0;
    double h = 0.0;
    int n = 2;
    double Cn = 2.0;
    double r = 0.0;
    double R = 0.0;
};

/// Minimal and maximal search radii for angular resolution `dtheta`.
inline SearchParams search_radii(double h, double dtheta, int n,
                                 RadiusConvention convention = RadiusConvention::narrow) {
    if (!(dtheta > 0.0 && dtheta < std::numbers::pi)) throw std::invalid_argument("dtheta must lie in (0, pi)");
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    SearchParams p;
    p.dtheta = dtheta;
    p.h = h;
    p.n = n;
    p.Cn = dimension_constant(n);
    const double cosec = 1.0 / std::sin(0.5 * dtheta);
    if (convention == RadiusConvention::proof) {
        p.r = p.Cn * h * (-1.0 + cosec);
        p.R = p.Cn * h * (1.0 + cosec);
    } else {
        p.r = h * (-1.0 + p.Cn * cosec);
        p.R = h * (1.0 + p.Cn * cosec);
    }
    return p;
}

}  // namespace monofd
