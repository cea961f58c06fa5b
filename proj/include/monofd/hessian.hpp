#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "monofd/fd.hpp"
#include "monofd/geometry.hpp"
#include "monofd/point_cloud.hpp"
#include "monofd/stencil.hpp"

namespace monofd {

enum class Extremum { max, min };

namespace detail {

inline constexpr double kInvPhi = 0.6180339887498949;

/// Golden-section maximum of f on [lo, hi]; returns (argmax, value).
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

/// Second directional difference of an antipodal simplex pair as a function
/// of the (not necessarily unit) direction q: with g = V^{-T} (u_v - u_0) and
/// e = V^{-T} 1 for each side,
///   D(q) = 2 (g_p - g_m).q * a b / ((a + b) |q|^2),  a = e_p.q,  b = -e_m.q.
template <int Dim>
struct PairKernel {
    std::array<int, Dim> vp{}, vm{};
    Mat<Dim> VpinvT, VminvT;
    Vec<Dim> ep, em;
    bool symmetric = false;

    PairKernel() = default;
    PairKernel(const SimplexFrame<Dim>& fp, const SimplexFrame<Dim>& fm)
        : vp(fp.vertices), vm(fm.vertices), VpinvT(fp.Vinv.transpose()), VminvT(fm.Vinv.transpose()),
          ep(fp.inverse_row_sum()), em(fm.inverse_row_sum()) {
        symmetric = (ep + em).norm() <= 1e-12 * ep.norm();
    }

    /// (g_p - g_m), scaled by `sign`.
    Vec<Dim> gradient_gap(std::span<const double> u, int center, double sign) const {
        Vec<Dim> dp, dm;
        const double u0 = u[center];
        for (int k = 0; k < Dim; ++k) {
            dp[k] = u[vp[k]] - u0;
            dm[k] = u[vm[k]] - u0;
        }
        return sign * (VpinvT * dp - VminvT * dm);
    }

    double value(const Vec<Dim>& d, const Vec<Dim>& q) const {
        const double a = ep.dot(q);
        const double b = -em.dot(q);
        return 2.0 * d.dot(q) * (a * b) / ((a + b) * q.squaredNorm());
    }
};

/// Maximum of the pair's D over directions between unit vectors A and B
/// (2-D, angle between them below pi/2). Returns (value, maximizing direction).
inline std::pair<double, Vec<2>> arc_max(const PairKernel<2>& k, const Vec<2>& d, const Vec<2>& A, const Vec<2>& B) {
    if (k.symmetric) {
        // D(theta) = c0 + c1 cos 2theta + c2 sin 2theta.
        const Vec<2>& e = k.ep;
        const double c0 = 0.5 * (d[0] * e[0] + d[1] * e[1]);
        const Vec<2> c(0.5 * (d[0] * e[0] - d[1] * e[1]), 0.5 * (d[0] * e[1] + d[1] * e[0]));
        const Vec<2> a2(A[0] * A[0] - A[1] * A[1], 2.0 * A[0] * A[1]);
        const Vec<2> b2(B[0] * B[0] - B[1] * B[1], 2.0 * B[0] * B[1]);
        const double va = c0 + c.dot(a2);
        const double vb = c0 + c.dot(b2);
        const double amp = c.norm();
        if (amp > 0.0 && a2[0] * c[1] - a2[1] * c[0] >= 0.0 && c[0] * b2[1] - c[1] * b2[0] >= 0.0) {
            const double vc = c0 + amp;
            if (vc >= va && vc >= vb) {
                const double phi = 0.5 * std::atan2(c[1], c[0]);
                Vec<2> w(std::cos(phi), std::sin(phi));
                if (w.dot(A + B) < 0.0) w = -w;
                return {vc, w};
            }
        }
        return va >= vb ? std::pair{va, A} : std::pair{vb, B};
    }
    auto f = [&](double s) { return k.value(d, (1.0 - s) * A + s * B); };
    // Coarse scan, then golden refinement around the best sample.
    constexpr int kSamples = 8;
    int best = 0;
    double fbest = f(0.0);
    for (int m = 1; m <= kSamples; ++m) {
        const double fm = f(static_cast<double>(m) / kSamples);
        if (fm > fbest) {
            fbest = fm;
            best = m;
        }
    }
    const double lo = std::max(0.0, (best - 1.0) / kSamples);
    const double hi = std::min(1.0, (best + 1.0) / kSamples);
    auto [s, fs] = golden_max(f, lo, hi, 1e-9);
    double sbest = static_cast<double>(best) / kSamples;
    if (fs > fbest) {
        fbest = fs;
        sbest = s;
    }
    return {fbest, ((1.0 - sbest) * A + sbest * B).normalized()};
}

}  // namespace detail

/// Two simplices of the same point whose cones overlap after negating the
/// second one: some unit w has V_p^{-1} w >= 0 and V_m^{-1} w <= 0.
template <int Dim>
class AntipodalPair {
public:
    static AntipodalPair make(const SimplexFrame<Dim>& fp, const SimplexFrame<Dim>& fm) {
        AntipodalPair p;
        p.fp_ = fp;
        p.fm_ = fm;
        p.region_ = overlap(fp, fm);
        if (p.region_.empty()) throw NotAntipodal();
        return p;
    }

    const SimplexFrame<Dim>& forward() const { return fp_; }
    const SimplexFrame<Dim>& backward() const { return fm_; }

    /// Corner directions of the overlap region (2-D: the two ends of the arc,
    /// 3-D: polygon corners on the plane e_p.w = 1, not normalized).
    const std::vector<Vec<Dim>>& region() const { return region_; }

private:
    static std::vector<Vec<Dim>> overlap(const SimplexFrame<Dim>& fp, const SimplexFrame<Dim>& fm) {
        // Polygon: the forward facet, clipped by the half-spaces row_k(V_m^{-1}) w <= 0.
        std::vector<Vec<Dim>> poly;
        for (int k = 0; k < Dim; ++k) poly.push_back(fp.V.col(k));
        for (int r = 0; r < Dim && !poly.empty(); ++r) {
            const Vec<Dim> nrm = fm.Vinv.row(r).transpose();
            const double tol = kBarycentricTolerance;
            auto side = [&](const Vec<Dim>& q) { return nrm.dot(q); };
            std::vector<Vec<Dim>> out;
            const int n = static_cast<int>(poly.size());
            if (n == 1) {
                if (side(poly[0]) <= tol) out.push_back(poly[0]);
                poly = std::move(out);
                continue;
            }
            const int edges = (Dim == 2 && n == 2) ? 1 : n;
            for (int a = 0; a < edges; ++a) {
                const Vec<Dim>& P = poly[a];
                const Vec<Dim>& Q = poly[(a + 1) % n];
                const double sp = side(P), sq = side(Q);
                if (sp <= tol) out.push_back(P);
                if ((sp < -tol && sq > tol) || (sp > tol && sq < -tol)) out.push_back(P + (sp / (sp - sq)) * (Q - P));
                if (Dim == 2 && n == 2 && sq <= tol) out.push_back(Q);
            }
            poly = std::move(out);
        }
        return poly;
    }

    SimplexFrame<Dim> fp_, fm_;
    std::vector<Vec<Dim>> region_;
};

namespace detail {

/// Maximum of sign * D over the overlap region of a pair.
template <int Dim>
std::pair<double, Vec<Dim>> pair_extremum(std::span<const double> u, int i, const AntipodalPair<Dim>& pair, double sign) {
    const PairKernel<Dim> k(pair.forward(), pair.backward());
    const Vec<Dim> d = k.gradient_gap(u, i, sign);
    const auto& region = pair.region();
    if constexpr (Dim == 2) {
        const Vec<2> A = region.front().normalized();
        const Vec<2> B = region.back().normalized();
        if (region.size() == 1 || (A - B).norm() < 1e-15) return {k.value(d, A), A};
        // Split so every piece spans less than pi/2.
        const double span = std::acos(std::clamp(A.dot(B), -1.0, 1.0));
        const int pieces = std::max(1, static_cast<int>(std::ceil(span / (0.25 * std::numbers::pi))));
        const double a0 = std::atan2(A[1], A[0]);
        const double dir = (A[0] * B[1] - A[1] * B[0]) >= 0.0 ? 1.0 : -1.0;
        std::pair<double, Vec<2>> best{-std::numeric_limits<double>::infinity(), A};
        Vec<2> prev = A;
        for (int m = 1; m <= pieces; ++m) {
            const double th = a0 + dir * span * m / pieces;
            const Vec<2> next = m == pieces ? B : Vec<2>(std::cos(th), std::sin(th));
            auto cand = dir > 0 ? arc_max(k, d, prev, next) : arc_max(k, d, next, prev);
            if (cand.first > best.first) best = cand;
            prev = next;
        }
        return best;
    } else {
        // Coordinate ascent on the overlap polygon, in plane coordinates.
        Vec<3> c = Vec<3>::Zero();
        for (const auto& q : region) c += q;
        c /= static_cast<double>(region.size());
        const Vec<3> nrm = k.ep.normalized();
        Vec<3> e1 = (std::abs(nrm[0]) < 0.9 ? Vec<3>::UnitX() : Vec<3>::UnitY());
        e1 = (e1 - e1.dot(nrm) * nrm).normalized();
        const Vec<3> e2 = nrm.cross(e1);
        std::vector<Vec<2>> poly;
        for (const auto& q : region) poly.push_back(Vec<2>((q - c).dot(e1), (q - c).dot(e2)));
        auto lift = [&](const Vec<2>& p) { return Vec<3>(c + p[0] * e1 + p[1] * e2); };
        auto f = [&](const Vec<2>& p) { return k.value(d, lift(p)); };

        std::pair<double, Vec<3>> best{k.value(d, c), c};
        if (poly.size() < 3) {
            for (const auto& q : region) {
                const double v = k.value(d, q);
                if (v > best.first) best = {v, q};
            }
            return {best.first, best.second.normalized()};
        }
        // Chord of the polygon through p along axis.
        auto chord = [&](const Vec<2>& p, const Vec<2>& axis) {
            double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
            const int n = static_cast<int>(poly.size());
            double orient = 0.0;
            for (int a = 0; a < n; ++a) {
                const Vec<2> e = poly[(a + 1) % n] - poly[a];
                const Vec<2> r = poly[(a + 2) % n] - poly[a];
                orient += e[0] * r[1] - e[1] * r[0];
            }
            for (int a = 0; a < n; ++a) {
                const Vec<2> e = poly[(a + 1) % n] - poly[a];
                Vec<2> in(-e[1], e[0]);
                if (orient < 0) in = -in;
                const double num = in.dot(p - poly[a]);  // >= 0 inside
                const double den = in.dot(axis);
                if (std::abs(den) < 1e-300) continue;
                const double s = -num / den;
                if (den > 0) lo = std::max(lo, s);
                else hi = std::min(hi, s);
            }
            return std::pair{std::min(lo, 0.0), std::max(hi, 0.0)};
        };
        std::vector<Vec<2>> starts{Vec<2>::Zero()};
        for (std::size_t a = 0; a < poly.size() && starts.size() < 8; ++a) starts.push_back(0.999 * poly[a]);
        for (const Vec<2>& start : starts) {
            Vec<2> p = start;
            double fp = f(p);
            for (int it = 0; it < 200; ++it) {
                Vec<2> before = p;
                for (int ax = 0; ax < 2; ++ax) {
                    const Vec<2> axis = ax == 0 ? Vec<2>(1.0, 0.0) : Vec<2>(0.0, 1.0);
                    const auto [lo, hi] = chord(p, axis);
                    if (!(hi > lo)) continue;
                    auto g = [&](double s) { return f(p + s * axis); };
                    auto [s, fs] = golden_max(g, lo, hi, 1e-12 * (1.0 + hi - lo));
                    if (fs > fp) {
                        p += s * axis;
                        fp = fs;
                    }
                }
                if ((p - before).norm() <= 1e-10) break;
            }
            if (fp > best.first) best = {fp, lift(p)};
        }
        return {best.first, best.second.normalized()};
    }
}

}  // namespace detail

/// Maximal second difference of the pair over its common directions.
template <int Dim>
double pair_maximize(std::span<const double> u, int i, const AntipodalPair<Dim>& pair) {
    return detail::pair_extremum(u, i, pair, 1.0).first;
}

template <int Dim>
double pair_minimize(std::span<const double> u, int i, const AntipodalPair<Dim>& pair) {
    return -detail::pair_extremum(u, i, pair, -1.0).first;
}

/// Common interface of the discrete Lambda_+ / Lambda_- operators.
template <int Dim>
class HessianOperator {
public:
    virtual ~HessianOperator() = default;

    /// Lambda_+ (max) or Lambda_- (min) at point i. When `active` is given it
    /// receives the weights of the extremal direction.
    virtual double extremal(std::span<const double> u, int i, Extremum which, SchemeWeights* active = nullptr) const = 0;

    /// Floating-point operations of one sweep over all points (estimate).
    virtual double evaluation_flops() const = 0;
};

/// 2-D operator that optimizes over all directions: the half circle is cut at
/// every stencil vertex direction into sectors with a fixed simplex pair, and
/// each sector is maximized in closed form (symmetric pairs) or by a
/// golden-section search.
class SectorOperator : public HessianOperator<2> {
public:
    SectorOperator(const PointCloud<2>& cloud, const StencilSet<2>& stencils) : sectors_(cloud.size()) {
        for (int i = 0; i < cloud.size(); ++i) {
            if (cloud.is_boundary(i)) continue;
            sectors_[i] = build(stencils.at(i), i);
        }
    }

    /// Sectors of a single point; throws if some direction has no simplex pair.
    struct Sector {
        Vec<2> A, B;  ///< unit directions bounding the sector, counter-clockwise
        detail::PairKernel<2> kernel;
        const SimplexFrame<2>* fp = nullptr;
        const SimplexFrame<2>* fm = nullptr;
    };

    static std::vector<Sector> build(const std::vector<SimplexFrame<2>>& frames, int i) {
        std::vector<double> angles;
        for (const auto& f : frames) {
            for (int k = 0; k < 2; ++k) {
                double a = std::atan2(f.V(1, k), f.V(0, k));
                if (a < 0) a += std::numbers::pi;
                if (a >= std::numbers::pi) a -= std::numbers::pi;
                angles.push_back(a);
            }
        }
        if (angles.empty()) throw NoForwardSimplex(i);
        std::sort(angles.begin(), angles.end());
        std::vector<double> cuts;
        for (double a : angles)
            if (cuts.empty() || a - cuts.back() > 1e-13) cuts.push_back(a);
        if (cuts.size() > 1 && cuts.front() + std::numbers::pi - cuts.back() <= 1e-13) cuts.pop_back();
        // Keep every sector below pi/4.
        std::vector<double> fine;
        const int n = static_cast<int>(cuts.size());
        for (int k = 0; k < n; ++k) {
            const double lo = cuts[k];
            const double hi = k + 1 < n ? cuts[k + 1] : cuts[0] + std::numbers::pi;
            const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / (0.25 * std::numbers::pi) - 1e-12)));
            for (int m = 0; m < pieces; ++m) fine.push_back(lo + (hi - lo) * m / pieces);
        }
        std::vector<Sector> out;
        const int m = static_cast<int>(fine.size());
        for (int k = 0; k < m; ++k) {
            const double lo = fine[k];
            const double hi = k + 1 < m ? fine[k + 1] : fine[0] + std::numbers::pi;
            Sector s;
            s.A = Vec<2>(std::cos(lo), std::sin(lo));
            s.B = Vec<2>(std::cos(hi), std::sin(hi));
            const Vec<2> mid(std::cos(0.5 * (lo + hi)), std::sin(0.5 * (lo + hi)));
            const int kp = select_simplex(frames, mid, Orientation::forward);
            if (kp < 0) throw NoForwardSimplex(i);
            const int km = select_simplex(frames, mid, Orientation::backward);
            if (km < 0) throw NoBackwardSimplex(i);
            s.fp = &frames[kp];
            s.fm = &frames[km];
            s.kernel = detail::PairKernel<2>(frames[kp], frames[km]);
            out.push_back(s);
        }
        return out;
    }

    static std::pair<double, const Sector*> sweep(const std::vector<Sector>& sectors, std::span<const double> u, int i,
                                                 double sign, Vec<2>* argmax) {
        double best = -std::numeric_limits<double>::infinity();
        const Sector* where = nullptr;
        for (const auto& s : sectors) {
            const Vec<2> d = s.kernel.gradient_gap(u, i, sign);
            const auto [v, w] = detail::arc_max(s.kernel, d, s.A, s.B);
            if (v > best) {
                best = v;
                where = &s;
                if (argmax) *argmax = w;
            }
        }
        return {best, where};
    }

    double extremal(std::span<const double> u, int i, Extremum which, SchemeWeights* active = nullptr) const override {
        const double sign = which == Extremum::max ? 1.0 : -1.0;
        Vec<2> w;
        const auto [v, where] = sweep(sectors_[i], u, i, sign, active ? &w : nullptr);
        if (!where) throw NoForwardSimplex(i);
        if (active)
            *active = scheme_weights(make_scheme(i, Direction<2>(w), SchemeKind::second, where->fp, where->fm));
        return sign * v;
    }

    const std::vector<Sector>& sectors(int i) const { return sectors_[i]; }

    double evaluation_flops() const override {
        double f = 0.0;
        for (const auto& list : sectors_)
            for (const auto& s : list) f += s.kernel.symmetric ? 40.0 : 40.0 + 45.0 * 20.0;
        return f;
    }

private:
    std::vector<std::vector<Sector>> sectors_;
};

/// Operator that takes the extremum over a fixed list of precomputed
/// second-difference rows per point (direction fans, lattice directions).
template <int Dim>
class RowOperator : public HessianOperator<Dim> {
public:
    explicit RowOperator(int points) : first_row_(points + 1, 0) {}

    /// Rows must be added with nondecreasing point ids; call finish() afterwards.
    void add_row(int i, const SchemeWeights& w) {
        if (!row_center_.empty() && i < row_center_.back()) throw std::logic_error("RowOperator rows out of order");
        row_start_.push_back(static_cast<int>(ids_.size()));
        for (const auto& [j, c] : w.neighbors) {
            ids_.push_back(j);
            coeffs_.push_back(c);
        }
        row_center_.push_back(i);
    }

    void finish() {
        row_start_.push_back(static_cast<int>(ids_.size()));
        std::fill(first_row_.begin(), first_row_.end(), 0);
        for (int c : row_center_) ++first_row_[c + 1];
        for (std::size_t k = 1; k < first_row_.size(); ++k) first_row_[k] += first_row_[k - 1];
    }

    int rows(int i) const { return first_row_[i + 1] - first_row_[i]; }

    double evaluation_flops() const override { return 3.0 * static_cast<double>(ids_.size()) + row_center_.size(); }

    double row_value(std::span<const double> u, int row) const {
        const double u0 = u[row_center_[row]];
        double acc = 0.0;
        for (int e = row_start_[row]; e < row_start_[row + 1]; ++e) acc += coeffs_[e] * (u[ids_[e]] - u0);
        return acc;
    }

    SchemeWeights row_weights(int row) const {
        SchemeWeights w;
        w.center = row_center_[row];
        for (int e = row_start_[row]; e < row_start_[row + 1]; ++e) w.neighbors.push_back({ids_[e], coeffs_[e]});
        w.center_coeff = -w.neighbor_sum();
        return w;
    }

    double extremal(std::span<const double> u, int i, Extremum which, SchemeWeights* active = nullptr) const override {
        const int r0 = first_row_[i], r1 = first_row_[i + 1];
        if (r0 == r1) throw NoForwardSimplex(i);
        int best = r0;
        double v = row_value(u, r0);
        for (int r = r0 + 1; r < r1; ++r) {
            const double x = row_value(u, r);
            if (which == Extremum::max ? x > v : x < v) {
                v = x;
                best = r;
            }
        }
        if (active) *active = row_weights(best);
        return v;
    }

private:
    std::vector<int> first_row_;
    std::vector<int> row_start_;
    std::vector<int> row_center_;
    std::vector<int> ids_;
    std::vector<double> coeffs_;
};

/// Directions w_1..w_k used by the sampled eigenvalue operator.
template <int Dim>
struct DirectionFan {
    std::vector<Direction<Dim>> directions;
    double dtheta_e = 0.0;
};

/// Largest angle between a fan line and its nearest other line.
template <int Dim>
double effective_resolution(const std::vector<Direction<Dim>>& dirs) {
    if (dirs.size() < 2) return 0.5 * std::numbers::pi;
    double worst = 0.0;
    for (std::size_t a = 0; a < dirs.size(); ++a) {
        double nearest = 0.5 * std::numbers::pi;
        for (std::size_t b = 0; b < dirs.size(); ++b) {
            if (a == b) continue;
            const double c = std::min(1.0, std::abs(dirs[a].vec().dot(dirs[b].vec())));
            nearest = std::min(nearest, std::acos(c));
        }
        worst = std::max(worst, nearest);
    }
    return worst;
}

/// k lines: equally spaced angles on [0, pi) in 2-D, a Fibonacci hemisphere in 3-D.
template <int Dim>
DirectionFan<Dim> uniform_fan(int k) {
    if (k < 1) throw std::invalid_argument("fan needs at least one direction");
    DirectionFan<Dim> fan;
    if constexpr (Dim == 2) {
        for (int m = 0; m < k; ++m) fan.directions.push_back(Direction<2>::from_angle(std::numbers::pi * m / k));
    } else {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int m = 0; m < k; ++m) {
            const double z = (m + 0.5) / k;
            const double rad = std::sqrt(1.0 - z * z);
            fan.directions.push_back(Direction<3>(Vec<3>(rad * std::cos(golden * m), rad * std::sin(golden * m), z)));
        }
    }
    fan.dtheta_e = effective_resolution(fan.directions);
    return fan;
}

/// Smallest uniform fan with effective resolution at most `target`.
template <int Dim>
DirectionFan<Dim> fan_for_resolution(double target) {
    if (!(target > 0.0)) throw std::invalid_argument("fan resolution must be positive");
    int k = 1;
    if constexpr (Dim == 2) {
        k = std::max(1, static_cast<int>(std::ceil(std::numbers::pi / target - 1e-9)));
        auto fan = uniform_fan<2>(k);
        while (fan.dtheta_e > target) fan = uniform_fan<2>(++k);
        return fan;
    } else {
        k = std::max(4, static_cast<int>(std::ceil(1.5 / (target * target))));
        auto fan = uniform_fan<3>(k);
        while (fan.dtheta_e > target) {
            k = k + k / 8 + 1;
            fan = uniform_fan<3>(k);
        }
        return fan;
    }
}

/// Extremal second difference over the fan directions.
template <int Dim>
double sampled_eigenvalue(const StencilSet<Dim>& stencils, std::span<const double> u, int i, const DirectionFan<Dim>& fan,
                          Extremum which) {
    if (fan.directions.empty()) throw std::invalid_argument("empty direction fan");
    double v = which == Extremum::max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (const auto& w : fan.directions) {
        const double x = second_derivative(stencils, u, i, w);
        v = which == Extremum::max ? std::max(v, x) : std::min(v, x);
    }
    return v;
}

/// Sampled operator over a fan, with the weight rows precomputed at interior points.
template <int Dim>
RowOperator<Dim> make_fan_operator(const PointCloud<Dim>& cloud, const StencilSet<Dim>& stencils, const DirectionFan<Dim>& fan) {
    RowOperator<Dim> op(cloud.size());
    for (int i = 0; i < cloud.size(); ++i) {
        if (cloud.is_boundary(i)) continue;
        for (const auto& w : fan.directions) op.add_row(i, scheme_weights(stencils, i, w, SchemeKind::second));
    }
    op.finish();
    return op;
}

/// Nearest-neighbour operator: centered differences along every primitive
/// lattice direction of Chebyshev norm <= rho that stays inside the grid.
template <int Dim>
RowOperator<Dim> make_lattice_operator(const PointCloud<Dim>& cloud, int rho) {
    if (!cloud.lattice()) throw std::invalid_argument("lattice operator needs a lattice cloud");
    const Lattice<Dim>& lat = *cloud.lattice();
    const auto dirs = lattice_directions<Dim>(rho);
    RowOperator<Dim> op(cloud.size());
    for (int i = 0; i < cloud.size(); ++i) {
        if (cloud.is_boundary(i)) continue;
        for (const auto& o : dirs) {
            try {
                op.add_row(i, lattice_second_difference<Dim>(lat, i, o));
            } catch (const OutOfDomain&) {
            }
        }
    }
    op.finish();
    return op;
}

/// Lambda_+ at point i: maximum over all overlapping antipodal pairs of the stencil.
template <int Dim>
double max_eigenvalue(const StencilSet<Dim>& stencils, std::span<const double> u, int i) {
    if constexpr (Dim == 2) {
        const auto sectors = SectorOperator::build(stencils.at(i), i);
        return SectorOperator::sweep(sectors, u, i, 1.0, nullptr).first;
    } else {
        const auto& frames = stencils.at(i);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& fp : frames) {
            for (const auto& fm : frames) {
                try {
                    best = std::max(best, pair_maximize(u, i, AntipodalPair<Dim>::make(fp, fm)));
                } catch (const NotAntipodal&) {
                }
            }
        }
        if (!std::isfinite(best)) throw NoForwardSimplex(i);
        return best;
    }
}

/// Lambda_- at point i, computed as -Lambda_+(-u) so the two are exact negatives.
template <int Dim>
double min_eigenvalue(const StencilSet<Dim>& stencils, std::span<const double> u, int i) {
    if constexpr (Dim == 2) {
        const auto sectors = SectorOperator::build(stencils.at(i), i);
        return -SectorOperator::sweep(sectors, u, i, -1.0, nullptr).first;
    } else {
        const auto& frames = stencils.at(i);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& fp : frames) {
            for (const auto& fm : frames) {
                try {
                    best = std::max(best, detail::pair_extremum(u, i, AntipodalPair<Dim>::make(fp, fm), -1.0).first);
                } catch (const NotAntipodal&) {
                }
            }
        }
        if (!std::isfinite(best)) throw NoForwardSimplex(i);
        return -best;
    }
}

}  // namespace monofd
