#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "monofd/geometry.hpp"
#include "monofd/hull.hpp"
#include "monofd/spatial_index.hpp"

using namespace monofd;

namespace {

template <int Dim>
SimplexFrame<Dim> frame_of(const Mat<Dim>& V) {
    std::array<int, Dim> ids{};
    for (int k = 0; k < Dim; ++k) ids[k] = k + 1;
    return SimplexFrame<Dim>::make(0, ids, V);
}

Mat<2> cols(Vec<2> a, Vec<2> b) {
    Mat<2> V;
    V << a, b;
    return V;
}

}  // namespace

TEST(Barycentric, UnitSimplexMidpoint) {
    const auto f = frame_of<2>(Mat<2>::Identity());
    const Vec<2> l = barycentric_coordinates(f, Vec<2>(0.5, 0.5));
    EXPECT_NEAR(l[0], 0.5, 1e-15);
    EXPECT_NEAR(l[1], 0.5, 1e-15);
}

TEST(Barycentric, Vertex) {
    const auto f = frame_of<2>(Mat<2>::Identity());
    const Vec<2> l = barycentric_coordinates(f, Vec<2>(1.0, 0.0));
    EXPECT_NEAR(l[0], 1.0, 1e-15);
    EXPECT_NEAR(l[1], 0.0, 1e-15);
}

TEST(Barycentric, RandomAgainstDenseSolve) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 200; ++trial) {
        Mat<3> V;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) V(a, b) = n01(rng);
        if (condition_number<3>(V) > 1e6) continue;
        const Vec<3> x(n01(rng), n01(rng), n01(rng));
        const Vec<3> l = barycentric_coordinates(frame_of<3>(V), x);
        const Vec<3> oracle = V.colPivHouseholderQr().solve(x);
        EXPECT_LE((V * l - x).norm(), 1e-10);
        EXPECT_LE((l - oracle).norm(), 1e-10 * (1.0 + oracle.norm()));
    }
}

TEST(Barycentric, SingularSimplexRejected) {
    EXPECT_THROW(frame_of<2>(cols(Vec<2>(1.0, 0.0), Vec<2>(2.0, 0.0))), SingularSimplex);
}

TEST(Barycentric, InteriorPointsHavePositiveWeights) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const Mat<3> V = (Mat<3>() << 1.0, 0.2, -0.1, 0.1, 1.3, 0.2, -0.2, 0.1, 0.9).finished();
    const auto f = frame_of<3>(V);
    for (int k = 0; k < 100; ++k) {
        Vec<3> l(u01(rng), u01(rng), u01(rng));
        l /= l.sum() * (1.0 + u01(rng));
        const Vec<3> got = barycentric_coordinates<3>(f, V * l);
        EXPECT_GT(got.minCoeff(), 0.0);
        EXPECT_LT(got.maxCoeff(), 1.0);
    }
}

TEST(RayParameter, SymmetricPair) {
    const auto f = frame_of<2>(cols(Vec<2>(1.0, 1.0), Vec<2>(1.0, -1.0)));
    EXPECT_NEAR(ray_parameter(f, Direction<2>(Vec<2>(1.0, 0.0)), Orientation::forward), 1.0, 1e-15);
    const Vec<2> l = barycentric_coordinates(f, Vec<2>(1.0, 0.0));
    EXPECT_NEAR(l[0], 0.5, 1e-15);
    EXPECT_NEAR(l[1], 0.5, 1e-15);
}

TEST(RayParameter, GridAligned) {
    const double h = 0.1;
    const auto f = frame_of<2>(cols(Vec<2>(2.0 * h, 0.0), Vec<2>(2.0 * h, 2.0 * h)));
    EXPECT_NEAR(ray_parameter(f, Direction<2>(Vec<2>(1.0, 0.0)), Orientation::forward), 2.0 * h, 1e-15);
}

TEST(RayParameter, BackwardAndMiss) {
    const auto f = frame_of<2>(cols(Vec<2>(-1.0, 1.0), Vec<2>(-1.0, -1.0)));
    const Direction<2> w(Vec<2>(1.0, 0.0));
    EXPECT_NEAR(ray_parameter(f, w, Orientation::backward), 1.0, 1e-15);
    EXPECT_THROW(ray_parameter(f, w, Orientation::forward), RayMiss);
    const auto g = frame_of<2>(cols(Vec<2>(1.0, 0.2), Vec<2>(1.0, 1.0)));
    EXPECT_THROW(ray_parameter(g, w, Orientation::forward), RayMiss);
}

TEST(RayParameter, SlenderSimplexAgainstHyperplaneOracle) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    int checked = 0;
    while (checked < 500) {
        Mat<3> V;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) V(a, b) = n01(rng);
        V.col(2) = V.col(0) + 1e-3 * V.col(2);  // slender
        if (condition_number<3>(V) > 1e10) continue;
        // Direction through a random interior point of the facet.
        Vec<3> l(std::abs(n01(rng)), std::abs(n01(rng)), std::abs(n01(rng)));
        l /= l.sum();
        const Vec<3> p = V * l;
        if (p.norm() < 1e-6) continue;
        const Direction<3> w(p);
        const auto f = frame_of<3>(V);
        const double t = ray_parameter(f, w, Orientation::forward);
        // Plane through the three vertices: n . x = n . v0.
        const Vec<3> nrm = (V.col(1) - V.col(0)).cross(V.col(2) - V.col(0));
        const double oracle = nrm.dot(V.col(0)) / nrm.dot(w.vec());
        EXPECT_NEAR(t, oracle, 1e-10 * std::max(1.0, std::abs(oracle)));
        const Vec<3> lam = barycentric_coordinates<3>(f, t * w.vec());
        EXPECT_NEAR(lam.sum(), 1.0, 1e-10);
        ++checked;
    }
}

TEST(InCone, Cases) {
    const Vec<2> x0(0.3, -0.2);
    const Direction<2> w(Vec<2>(1.0, 2.0));
    EXPECT_TRUE(in_cone(x0, w, 0.1, Vec<2>(x0 + 3.0 * w.vec())));
    EXPECT_FALSE(in_cone(x0, w, 1.0, Vec<2>(x0 - w.vec())));
    // Closed boundary: cos of the angle equals 1 - cos(dtheta/2) exactly.
    const double dtheta = std::numbers::pi / 2.0;
    const double c = 1.0 - std::cos(0.5 * dtheta);
    const Direction<2> e(Vec<2>(1.0, 0.0));
    const Vec<2> x(c, std::sqrt(1.0 - c * c));
    EXPECT_TRUE(in_cone(Vec<2>::Zero().eval(), e, dtheta, x));
}

TEST(SearchRadii, TwoDimensionalQuarterTurn) {
    const auto p = search_radii(1.0, std::numbers::pi / 2.0, 2, RadiusConvention::proof);
    EXPECT_NEAR(p.R, 2.0 * (1.0 + std::sqrt(2.0)), 1e-12);
    EXPECT_NEAR(p.r, 2.0 * (std::sqrt(2.0) - 1.0), 1e-12);
    EXPECT_NEAR(p.R, 4.8284, 1e-4);
    EXPECT_NEAR(p.r, 0.8284, 1e-4);
}

TEST(SearchRadii, ThreeDimensionalConstant) {
    const auto p = search_radii(1.0, std::numbers::pi / 2.0, 3, RadiusConvention::proof);
    const double c3 = 1.0 + 2.0 / std::sqrt(3.0);
    EXPECT_NEAR(p.Cn, c3, 1e-15);
    EXPECT_NEAR(p.R, c3 * (1.0 + std::sqrt(2.0)), 1e-12);
}

TEST(SearchRadii, LimitAtPi) {
    const double dtheta = std::numbers::pi - 1e-9;
    const auto p = search_radii(0.5, dtheta, 2, RadiusConvention::proof);
    EXPECT_NEAR(p.r, 0.0, 1e-12);
    EXPECT_NEAR(p.R, 2.0 * 2.0 * 0.5, 1e-12);
    EXPECT_THROW(search_radii(1.0, std::numbers::pi, 2), std::invalid_argument);
    EXPECT_THROW(search_radii(1.0, 0.0, 2), std::invalid_argument);
}

TEST(SearchRadii, NarrowConvention) {
    const double h = 0.3, dt = 0.7;
    const auto p = search_radii(h, dt, 2);
    EXPECT_NEAR(p.r, h * (-1.0 + 2.0 / std::sin(0.5 * dt)), 1e-14);
    EXPECT_NEAR(p.R, h * (1.0 + 2.0 / std::sin(0.5 * dt)), 1e-14);
}

TEST(SearchRadii, MonotoneAndOrdered) {
    for (auto conv : {RadiusConvention::proof, RadiusConvention::narrow}) {
        for (int n : {2, 3}) {
            double prev = std::numeric_limits<double>::infinity();
            for (double dt = 0.01; dt < std::numbers::pi; dt += 0.01) {
                const auto p = search_radii(1.0, dt, n, conv);
                EXPECT_LT(p.r, p.R);
                EXPECT_LT(p.R, prev);
                prev = p.R;
            }
        }
    }
}

TEST(Geometry, ScaleEquivariance) {
    const Mat<2> V = cols(Vec<2>(1.0, 0.3), Vec<2>(0.8, -0.9));
    const Direction<2> w(Vec<2>(1.0, -0.1));
    const Vec<2> x(0.4, 0.1);
    const double s = 3.7;
    const auto f = frame_of<2>(V);
    const auto fs = frame_of<2>(Mat<2>(s * V));
    EXPECT_NEAR(ray_parameter(fs, w, Orientation::forward), s * ray_parameter(f, w, Orientation::forward), 1e-12);
    EXPECT_LE((barycentric_coordinates(fs, Vec<2>(s * x)) - barycentric_coordinates(f, x)).norm(), 1e-12);
    const auto p = search_radii(1.0, 0.5, 2), ps = search_radii(s, 0.5, 2);
    EXPECT_NEAR(ps.r, s * p.r, 1e-12);
    EXPECT_NEAR(ps.R, s * p.R, 1e-12);
}

TEST(Direction, UnitNorm) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    for (int k = 0; k < 100; ++k) {
        const Direction<3> w(Vec<3>(n01(rng), n01(rng), n01(rng)));
        EXPECT_NEAR(w.vec().norm(), 1.0, 1e-12);
    }
    EXPECT_THROW(Direction<2>(Vec<2>::Zero()), std::invalid_argument);
}

TEST(DirectionHull, Octagon) {
    std::vector<Vec<2>> dirs;
    for (int k = 0; k < 8; ++k) dirs.push_back(Direction<2>::from_angle(k * std::numbers::pi / 4.0).vec());
    EXPECT_EQ(direction_hull(dirs).size(), 8u);
}

TEST(DirectionHull, Collinear) {
    std::vector<Vec<2>> dirs{Vec<2>(1.0, 0.0), Vec<2>(-1.0, 0.0)};
    EXPECT_TRUE(direction_hull(dirs).empty());
}

TEST(DirectionHull, CubeCorners) {
    std::vector<Vec<3>> dirs;
    for (int a : {-1, 1})
        for (int b : {-1, 1})
            for (int c : {-1, 1}) dirs.push_back(Vec<3>(a, b, c).normalized());
    // 6 square faces, each split into two triangles.
    EXPECT_EQ(direction_hull(dirs).size(), 12u);
}

TEST(SpatialIndex, MatchesBruteForce) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec<2>> pts(500);
    for (auto& p : pts) p = Vec<2>(u(rng), u(rng));
    const SpatialIndex<2> idx{std::span<const Vec<2>>(pts)};
    for (int q = 0; q < 100; ++q) {
        const Vec<2> x(u(rng), u(rng));
        double best = 1e300;
        std::vector<int> inside;
        for (int i = 0; i < 500; ++i) {
            best = std::min(best, (pts[i] - x).norm());
            if ((pts[i] - x).norm() <= 0.3) inside.push_back(i);
        }
        EXPECT_DOUBLE_EQ(idx.nearest(x).second, best);
        EXPECT_EQ(idx.within(x, 0.3), inside);
    }
}
