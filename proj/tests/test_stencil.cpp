#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "monofd/disc_mesh.hpp"
#include "monofd/fd.hpp"
#include "monofd/harness.hpp"
#include "monofd/meshio.hpp"
#include "monofd/stencil.hpp"

using namespace monofd;

namespace {

SearchParams octagon_params() {
    SearchParams p;
    p.dtheta = std::numbers::pi / 4.0;
    p.h = std::sqrt(0.5);
    p.r = 1.2;
    p.R = 2.1;
    return p;
}

PointCloud<2> unit_grid(int side) {
    return build_regular_grid<2>(side, Vec<2>(0.0, 0.0), Vec<2>(side - 1.0, side - 1.0), 1);
}

int center_of(int side) { return (side / 2) * side + side / 2; }

// Brute force: every facet index that satisfies the Farkas condition for w.
std::vector<int> farkas_candidates(const std::vector<SimplexFrame<2>>& frames, const Vec<2>& w) {
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(frames.size()); ++k) {
        const Vec<2> mu = frames[k].Vinv * w;
        if (mu.minCoeff() >= -1e-9 && mu.sum() > 0.0) out.push_back(k);
    }
    return out;
}

}  // namespace

TEST(Preprocess, OctagonOnUnitGrid) {
    const auto cloud = unit_grid(9);
    const auto set = preprocess_cloud(cloud, octagon_params());
    const int c = center_of(9);
    ASSERT_EQ(set.at(c).size(), 8u);
    // Brute-force hull of the 8 normalized directions: consecutive pairs by angle.
    for (const auto& f : set.at(c)) {
        const Vec<2> a = f.V.col(0), b = f.V.col(1);
        const double ang = std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
        EXPECT_NEAR(ang, std::numbers::pi / 4.0, 1e-12);
    }
}

TEST(Preprocess, ThreePointCloud) {
    std::vector<Vec<2>> pts{Vec<2>(0.0, 0.0), Vec<2>(1.0, 0.0), Vec<2>(0.2, 0.9)};
    PointCloud<2> cloud(pts, std::vector<char>(3, 0), {Cell<2>{0, 1, 2}});
    cloud.compute_metrics();
    SearchParams p;
    p.r = 0.1;
    p.R = 2.0;
    for (int i = 0; i < 3; ++i) {
        const auto frames = point_simplices(cloud, i, p);
        ASSERT_EQ(frames.size(), 1u);
        std::array<int, 2> expect{};
        int k = 0;
        for (int j = 0; j < 3; ++j)
            if (j != i) expect[k++] = j;
        auto got = frames[0].vertices;
        std::sort(got.begin(), got.end());
        EXPECT_EQ(got, expect);
    }
    p.r = 1.5;
    p.R = 2.0;
    EXPECT_THROW(point_simplices(cloud, 0, p), EmptyNeighborhood);
}

TEST(Preprocess, CollinearCloudIsDegenerate) {
    std::vector<Vec<2>> pts{Vec<2>(0.0, 0.0), Vec<2>(1.0, 0.0), Vec<2>(2.0, 0.0), Vec<2>(-1.0, 0.0)};
    PointCloud<2> cloud(pts, std::vector<char>(4, 0));
    cloud.set_adjacency({{1, 3}, {0, 2}, {1}, {0}});
    cloud.compute_metrics();
    SearchParams p;
    p.r = 0.5;
    p.R = 3.0;
    EXPECT_THROW(point_simplices(cloud, 0, p), HullDegenerate);
}

TEST(Preprocess, AnnulusProperty) {
    DiscMeshOptions opt;
    opt.target_points = 427;
    const auto cloud = make_disc_mesh(opt);
    const double dtheta = default_dtheta(cloud.metrics().h);
    const auto set = preprocess_cloud(cloud, dtheta);
    const double r = set.params.r, R = set.params.R;
    for (int i = 0; i < cloud.size(); ++i) {
        for (const auto& f : set.at(i)) {
            for (int k = 0; k < 2; ++k) {
                const double d = f.V.col(k).norm();
                EXPECT_LE(d, R * (1.0 + 1e-12));
                // Boundary vertices inside r are admitted; all others respect r.
                if (!cloud.is_boundary(f.vertices[k])) EXPECT_GE(d, r * (1.0 - 1e-12));
            }
        }
    }
}

TEST(Preprocess, Deterministic) {
    DiscMeshOptions opt;
    opt.target_points = 300;
    const auto cloud = make_disc_mesh(opt);
    const auto a = preprocess_cloud(cloud, 0.8);
    const auto b = preprocess_cloud(cloud, 0.8);
    ASSERT_EQ(a.size(), b.size());
    for (int i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a.at(i).size(), b.at(i).size());
        for (std::size_t k = 0; k < a.at(i).size(); ++k) {
            EXPECT_EQ(a.at(i)[k].vertices, b.at(i)[k].vertices);
            EXPECT_TRUE(std::is_sorted(a.at(i)[k].vertices.begin(), a.at(i)[k].vertices.end()));
        }
    }
}

TEST(Covering, DiscMeshSampledDirections) {
    DiscMeshOptions opt;
    opt.target_points = 427;
    const auto cloud = make_disc_mesh(opt);
    const double dtheta = std::cbrt(cloud.metrics().h);
    const auto set = preprocess_cloud(cloud, dtheta);
    const SpatialIndex<2> bindex(std::span<const Vec<2>>(cloud.points()), cloud.boundary_points());
    int checked = 0;
    for (int i : cloud.interior_points()) {
        if (bindex.nearest(cloud.point(i)).second < set.params.R) continue;
        ++checked;
        for (const auto& w : sphere_samples<2>(360)) EXPECT_NO_THROW(select_simplex_pair(set, i, Direction<2>(w)));
    }
    EXPECT_GT(checked, 0);
    const auto rep = validate_resolution(cloud, set.params);
    EXPECT_TRUE(rep.covering_ok());
    EXPECT_EQ(rep.checked_points, checked);
}

TEST(Covering, ThousandDirectionsOnGrid) {
    const auto cloud = unit_grid(11);
    const auto set = preprocess_cloud(cloud, octagon_params());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    const int c = center_of(11);
    for (int k = 0; k < 1000; ++k) {
        const auto w = Direction<2>::from_angle(ang(rng));
        const auto pair = select_simplex_pair(set, c, w);
        EXPECT_GE((set.at(c)[pair.forward].Vinv * w.vec()).minCoeff(), -1e-9);
        EXPECT_LE((set.at(c)[pair.backward].Vinv * w.vec()).maxCoeff(), 1e-9);
    }
}

TEST(Selection, AlignedDirectionHitsVertex) {
    const auto cloud = unit_grid(9);
    const auto set = preprocess_cloud(cloud, octagon_params());
    const int c = center_of(9);
    const Direction<2> w(Vec<2>(1.0, 1.0));
    const auto pair = select_simplex_pair(set, c, w);
    const auto ip = make_interpolant(set.at(c)[pair.forward], w.vec(), Orientation::forward);
    int hits = 0;
    for (std::size_t k = 0; k < ip.vertices.size(); ++k) {
        if (ip.lambda[k] == 1.0) {
            ++hits;
            EXPECT_EQ(cloud.point(ip.vertices[k]) - cloud.point(c), Vec<2>(1.0, 1.0));
        }
    }
    EXPECT_EQ(hits, 1);
}

TEST(Selection, AntipodalSwap) {
    const auto cloud = unit_grid(9);
    const auto set = preprocess_cloud(cloud, octagon_params());
    const int c = center_of(9);
    for (double a = 0.05; a < 6.2; a += 0.3) {
        const auto w = Direction<2>::from_angle(a);
        const auto p = select_simplex_pair(set, c, w);
        const auto q = select_simplex_pair(set, c, -w);
        EXPECT_EQ(p.forward, q.backward);
        EXPECT_EQ(p.backward, q.forward);
    }
}

TEST(Selection, TwentyTwoAndAHalfDegrees) {
    const auto cloud = unit_grid(9);
    const auto set = preprocess_cloud(cloud, octagon_params());
    const int c = center_of(9);
    const auto w = Direction<2>::from_angle(std::numbers::pi / 8.0);
    const auto cands = farkas_candidates(set.at(c), w.vec());
    ASSERT_EQ(cands.size(), 1u);
    const auto pair = select_simplex_pair(set, c, w);
    EXPECT_EQ(pair.forward, cands[0]);
    std::vector<Vec<2>> offs{set.at(c)[pair.forward].V.col(0), set.at(c)[pair.forward].V.col(1)};
    std::sort(offs.begin(), offs.end(), [](const Vec<2>& a, const Vec<2>& b) { return a[1] < b[1]; });
    EXPECT_EQ(offs[0], Vec<2>(2.0, 0.0));
    EXPECT_EQ(offs[1], Vec<2>(1.0, 1.0));
}

TEST(Selection, TieBreakPrefersSmallestFacet) {
    // Two facets both containing w = e_x: pick the one with the shorter edge.
    std::vector<SimplexFrame<2>> frames;
    Mat<2> big, small;
    big << 2.0, 2.0, 2.0, -2.0;
    small << 1.0, 1.0, 0.5, -0.5;
    frames.push_back(SimplexFrame<2>::make(0, {1, 2}, big));
    frames.push_back(SimplexFrame<2>::make(0, {3, 4}, small));
    EXPECT_EQ(select_simplex(frames, Vec<2>(1.0, 0.0), Orientation::forward), 1);
    EXPECT_EQ(select_simplex(frames, Vec<2>(1.0, 0.0), Orientation::backward), -1);
}

TEST(BoundaryNormal, FlatBoundary) {
    // Half-plane patch: the bottom row is boundary.
    const int side = 9;
    std::vector<Vec<2>> pts;
    std::vector<char> bdry;
    for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i) {
            pts.push_back(Vec<2>(i, j));
            bdry.push_back(j == 0 ? 1 : 0);
        }
    std::vector<Cell<2>> cells;
    for (int j = 0; j + 1 < side; ++j)
        for (int i = 0; i + 1 < side; ++i) {
            const int a = j * side + i;
            cells.push_back({a, a + 1, a + side + 1});
            cells.push_back({a, a + side + 1, a + side});
        }
    PointCloud<2> cloud(pts, bdry, cells);
    cloud.compute_metrics();
    const auto set = preprocess_cloud(cloud, octagon_params());
    const int b = side / 2;
    const Vec<2> n = cloud.inward_normals()[b];
    EXPECT_NEAR(n[0], 0.0, 1e-12);
    EXPECT_NEAR(n[1], 1.0, 1e-12);
    const int k = boundary_normal_stencil(cloud, b, set);
    EXPECT_GE((set.at(b)[k].Vinv * n).minCoeff(), -1e-9);
}

TEST(BoundaryNormal, DiscBoundaryRadial) {
    DiscMeshOptions opt;
    opt.target_points = 427;
    const auto cloud = make_disc_mesh(opt);
    const auto set = preprocess_cloud(cloud, std::cbrt(cloud.metrics().h));
    const auto normals = cloud.inward_normals();
    int ok = 0;
    for (int i : cloud.boundary_points()) {
        EXPECT_GT(normals[i].dot(-cloud.point(i).normalized()), 0.99);
        if (set.at(i).empty()) continue;
        EXPECT_NO_THROW(boundary_normal_stencil(cloud, i, set));
        ++ok;
    }
    EXPECT_GT(ok, 0);
}

TEST(BoundaryNormal, CornerFailsWithEmptyAnnulus) {
    std::vector<Vec<2>> pts{Vec<2>(0.0, 0.0), Vec<2>(1.0, 0.0), Vec<2>(1.0, 1.0), Vec<2>(0.0, 1.0)};
    PointCloud<2> cloud(pts, std::vector<char>(4, 1), {Cell<2>{0, 1, 2}, Cell<2>{0, 2, 3}});
    cloud.compute_metrics();
    SearchParams p;
    p.r = 0.1;
    p.R = 0.5;
    const auto set = preprocess_cloud(cloud, p);
    EXPECT_TRUE(set.at(0).empty());
    EXPECT_THROW(boundary_normal_stencil(cloud, 0, set), NoForwardSimplex);
}

TEST(Validate, GridWithModerateResolutionPasses) {
    const auto cloud = build_regular_grid<2>(41, Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0), 1);
    // delta = s and h_B = s/2, so C_n h_B <= delta tan(dtheta/2) needs tan(dtheta/2) >= 1.
    const double dtheta = 1.6;
    const auto params = search_radii(cloud.metrics().h, dtheta, 2);
    const auto rep = validate_resolution(cloud, params);
    EXPECT_NEAR(rep.lhs_boundary, 2.0 * cloud.metrics().h_boundary, 1e-15);
    EXPECT_NEAR(rep.rhs_boundary, cloud.metrics().delta * std::tan(0.8), 1e-15);
    EXPECT_TRUE(rep.boundary_ok);
    EXPECT_TRUE(rep.covering_ok());
    EXPECT_TRUE(rep.passed());
}

TEST(Validate, TinyAngleFails) {
    const auto cloud = build_regular_grid<2>(21, Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0), 1);
    const auto params = search_radii(cloud.metrics().h, 1e-3, 2);
    const auto rep = validate_resolution(cloud, params);
    EXPECT_FALSE(rep.passed());
    EXPECT_FALSE(rep.boundary_ok);
}

TEST(Validate, DiscReportMatchesSampling) {
    DiscMeshOptions opt;
    opt.target_points = 427;
    const auto cloud = make_disc_mesh(opt);
    const auto params = search_radii(cloud.metrics().h, std::cbrt(cloud.metrics().h), 2);
    const auto rep = validate_resolution(cloud, params, 360);
    const auto set = preprocess_cloud(cloud, params);
    const SpatialIndex<2> bindex(std::span<const Vec<2>>(cloud.points()), cloud.boundary_points());
    std::vector<int> failing;
    for (int i : cloud.interior_points()) {
        if (bindex.nearest(cloud.point(i)).second < params.R) continue;
        for (const auto& w : sphere_samples<2>(360)) {
            try {
                select_simplex_pair(set, i, Direction<2>(w));
            } catch (const PointError&) {
                failing.push_back(i);
                break;
            }
        }
    }
    EXPECT_EQ(rep.failing_points, failing);
}

TEST(GridStencil, RingSizes) {
    EXPECT_EQ(lattice_ring<2>(1).size(), 8u);
    EXPECT_EQ(lattice_ring<2>(2).size(), 16u);
    EXPECT_EQ(lattice_ring<2>(3).size(), 24u);
    EXPECT_EQ(lattice_ring<3>(1).size(), 26u);
}

TEST(GridStencil, InteriorCoversAllDirections) {
    for (int rho : {2, 3}) {
        const auto cloud = build_regular_grid<2>(15, Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0), rho);
        const auto set = preprocess_grid(cloud, rho);
        for (int i : cloud.interior_points())
            for (const auto& w : sphere_samples<2>(97)) EXPECT_NO_THROW(select_simplex_pair(set, i, Direction<2>(w)));
    }
}
