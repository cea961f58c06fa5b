#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "monofd/geometry.hpp"

namespace monofd {

/// Convex polygon, counter-clockwise.
struct ConvexPolygon {
    std::vector<Vec<2>> vertices;

    static ConvexPolygon box(const Vec<2>& lo, const Vec<2>& hi) {
        return {{lo, Vec<2>(hi[0], lo[1]), hi, Vec<2>(lo[0], hi[1])}};
    }

    /// Regular polygon circumscribing the disc of radius `radius` about `center`.
    static ConvexPolygon circumscribed_disc(const Vec<2>& center, double radius, int sides) {
        ConvexPolygon p;
        const double R = radius / std::cos(std::numbers::pi / sides);
        for (int k = 0; k < sides; ++k) {
            const double t = 2.0 * std::numbers::pi * k / sides;
            p.vertices.push_back(center + R * Vec<2>(std::cos(t), std::sin(t)));
        }
        return p;
    }

    /// Convex hull (monotone chain), counter-clockwise, collinear points dropped.
    static ConvexPolygon hull(std::vector<Vec<2>> pts) {
        std::sort(pts.begin(), pts.end(), [](const Vec<2>& a, const Vec<2>& b) {
            return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
        });
        auto turn = [](const Vec<2>& o, const Vec<2>& a, const Vec<2>& b) {
            return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        };
        const int n = static_cast<int>(pts.size());
        if (n < 3) return {pts};
        std::vector<Vec<2>> h(2 * n);
        int k = 0;
        for (int i = 0; i < n; ++i) {
            while (k >= 2 && turn(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
            h[k++] = pts[i];
        }
        for (int i = n - 2, t = k + 1; i >= 0; --i) {
            while (k >= t && turn(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
            h[k++] = pts[i];
        }
        h.resize(k - 1);
        return {h};
    }

    ConvexPolygon rotated(double angle) const {
        const Eigen::Rotation2Dd rot(angle);
        ConvexPolygon p;
        for (const auto& v : vertices) p.vertices.push_back(rot * v);
        return p;
    }

    ConvexPolygon affine(double scale, const Vec<2>& shift) const {
        ConvexPolygon p;
        for (const auto& v : vertices) p.vertices.push_back(scale * v + shift);
        return p;
    }
};

namespace detail {

inline constexpr double kInvPhiEnvelope = 0.6180339887498949;

inline double cross2(const Vec<2>& a, const Vec<2>& b) { return a[0] * b[1] - a[1] * b[0]; }

/// Sutherland-Hodgman clip of a convex polygon by another.
inline std::vector<Vec<2>> clip(std::vector<Vec<2>> subject, const std::vector<Vec<2>>& clipper) {
    const int m = static_cast<int>(clipper.size());
    for (int e = 0; e < m && !subject.empty(); ++e) {
        const Vec<2> a = clipper[e], b = clipper[(e + 1) % m];
        const Vec<2> ab = b - a;
        auto inside = [&](const Vec<2>& p) { return cross2(ab, p - a) >= 0.0; };
        std::vector<Vec<2>> out;
        const int n = static_cast<int>(subject.size());
        for (int k = 0; k < n; ++k) {
            const Vec<2>& P = subject[k];
            const Vec<2>& Q = subject[(k + 1) % n];
            const bool pin = inside(P), qin = inside(Q);
            if (pin) out.push_back(P);
            if (pin != qin) {
                const double sp = cross2(ab, P - a), sq = cross2(ab, Q - a);
                out.push_back(P + (sp / (sp - sq)) * (Q - P));
            }
        }
        subject = std::move(out);
    }
    return subject;
}

/// Does the segment [c1, c2] meet the intersection of two convex polygons?
inline bool segment_hits(const Vec<2>& c1, const Vec<2>& c2, const std::vector<Vec<2>>& P,
                         const std::vector<Vec<2>>& Q) {
    double lo = 0.0, hi = 1.0;
    const Vec<2> d = c2 - c1;
    for (const auto* poly : {&P, &Q}) {
        const int m = static_cast<int>(poly->size());
        for (int e = 0; e < m; ++e) {
            const Vec<2> a = (*poly)[e], ab = (*poly)[(e + 1) % m] - a;
            const double s0 = cross2(ab, c1 - a);  // >= 0 inside
            const double ds = cross2(ab, d);
            if (ds == 0.0) {
                if (s0 < 0.0) return false;
                continue;
            }
            const double t = -s0 / ds;
            if (ds > 0.0) lo = std::max(lo, t);
            else hi = std::min(hi, t);
            if (lo > hi) return false;
        }
    }
    return true;
}

/// min over A in polygon of |A - c1| + |A - c2|.
inline double two_point_distance(const Vec<2>& c1, const Vec<2>& c2, const std::vector<Vec<2>>& poly) {
    if (poly.empty()) return std::numeric_limits<double>::infinity();
    // Segment crosses the polygon: handled by the caller. Otherwise the
    // minimum lies on the boundary.
    double best = std::numeric_limits<double>::infinity();
    const int m = static_cast<int>(poly.size());
    for (int e = 0; e < m; ++e) {
        const Vec<2> a = poly[e], b = poly[(e + 1) % m];
        const Vec<2> ab = b - a;
        const double len2 = ab.squaredNorm();
        double s = 0.0;
        if (len2 > 0.0) {
            // Reflect c2 across the edge line when both lie on the same side.
            const Vec<2> n = Vec<2>(-ab[1], ab[0]) / std::sqrt(len2);
            const double h1 = n.dot(c1 - a), h2 = n.dot(c2 - a);
            const Vec<2> c2r = (h1 * h2 > 0.0) ? Vec<2>(c2 - 2.0 * h2 * n) : c2;
            const double h2r = n.dot(c2r - a);
            const Vec<2> x = (h1 == h2r) ? c1 : Vec<2>(c1 + (h1 / (h1 - h2r)) * (c2r - c1));
            s = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
        }
        const Vec<2> A = a + s * ab;
        best = std::min(best, (A - c1).norm() + (A - c2).norm());
    }
    return best;
}

}  // namespace detail

/// Convex envelope, over the convex polygon `domain`, of the double cone
/// min(|x - p1|, |x - p2|), evaluated at x in the domain. Solves
///   min over mu in [0,1], A in mu*Omega, x - A in (1-mu)*Omega of
///   |A - mu p1| + |x - A - (1-mu) p2|,
/// which is jointly convex; golden section on mu, exact inner minimum.
inline double two_cone_envelope(const Vec<2>& x, const Vec<2>& p1, const Vec<2>& p2, const ConvexPolygon& domain) {
    auto inner = [&](double mu) {
        if (mu <= 0.0) return (x - p2).norm();
        if (mu >= 1.0) return (x - p1).norm();
        const Vec<2> c1 = mu * p1;
        const Vec<2> c2 = x - (1.0 - mu) * p2;
        const ConvexPolygon P = domain.affine(mu, Vec<2>::Zero());
        const ConvexPolygon Q = domain.affine(-(1.0 - mu), x);
        // Q is a point reflection of a ccw polygon, which keeps it ccw.
        if (detail::segment_hits(c1, c2, P.vertices, Q.vertices)) return (c1 - c2).norm();
        return detail::two_point_distance(c1, c2, detail::clip(P.vertices, Q.vertices));
    };
    double a = 0.0, b = 1.0;
    double x1 = b - detail::kInvPhiEnvelope * (b - a), x2 = a + detail::kInvPhiEnvelope * (b - a);
    double f1 = inner(x1), f2 = inner(x2);
    while (b - a > 1e-11) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - detail::kInvPhiEnvelope * (b - a);
            f1 = inner(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + detail::kInvPhiEnvelope * (b - a);
            f2 = inner(x2);
        }
    }
    return std::min({f1, f2, inner(0.0), inner(1.0)});
}

}  // namespace monofd
