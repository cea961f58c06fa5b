#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "monofd/disc_mesh.hpp"
#include "monofd/meshio.hpp"

using namespace monofd;

namespace {

// Regular polygon of n boundary points around a centre point, fan-triangulated.
PointCloud<2> polygon_fan(int n) {
    std::vector<Vec<2>> pts{Vec<2>::Zero()};
    std::vector<char> bdry{0};
    std::vector<Cell<2>> cells;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n;
        pts.emplace_back(std::cos(t), std::sin(t));
        bdry.push_back(1);
        cells.push_back({0, 1 + k, 1 + (k + 1) % n});
    }
    PointCloud<2> c(pts, bdry, cells);
    c.compute_metrics();
    return c;
}

template <class Ex>
std::size_t parse_failure_line(const std::string& text) {
    std::istringstream is(text);
    try {
        read_mesh<2>(is);
    } catch (const Ex& e) {
        if constexpr (std::is_same_v<Ex, ParseError>) return e.line();
        return 1;
    }
    return 0;
}

}  // namespace

TEST(RegularGrid, CentreOfThreeByThreeHasEightNeighbours) {
    const auto g = build_regular_grid<2>(3, Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0), 1);
    EXPECT_EQ(g.adjacency()[4].size(), 8u);
    EXPECT_EQ(g.interior_points(), std::vector<int>{4});
    EXPECT_EQ(g.cells().size(), 8u);
}

TEST(RegularGrid, Metrics) {
    const auto g = build_regular_grid<2>(11, Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0), 2);
    EXPECT_NEAR(g.metrics().h, 0.5 * 0.2 * std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(g.metrics().h_boundary, 0.1, 1e-15);
    EXPECT_NEAR(g.metrics().delta, 0.2, 1e-15);
    EXPECT_EQ(g.adjacency()[g.lattice()->flat({5, 5})].size(), 24u);
}

TEST(RegularGrid, TooFewPointsForRadiusThrows) {
    EXPECT_THROW(build_regular_grid<2>(4, Vec<2>(0.0, 0.0), Vec<2>(1.0, 1.0), 2), std::invalid_argument);
    EXPECT_NO_THROW(build_regular_grid<2>(5, Vec<2>(0.0, 0.0), Vec<2>(1.0, 1.0), 2));
}

TEST(RegularGrid, ThreeDimensionalKuhnSplit) {
    const auto g = build_regular_grid<3>(3, Vec<3>::Constant(-1.0), Vec<3>::Constant(1.0), 1);
    EXPECT_EQ(g.cells().size(), 6u * 8u);
    EXPECT_EQ(g.adjacency()[13].size(), 26u);
    double vol = 0.0;
    for (const auto& c : g.cells()) {
        Mat<3> M;
        for (int a = 0; a < 3; ++a) M.col(a) = g.point(c[a + 1]) - g.point(c[0]);
        vol += std::abs(M.determinant()) / 6.0;
    }
    EXPECT_NEAR(vol, 8.0, 1e-12);
}

TEST(MeshText, UnitSquareHasFiveEdges) {
    std::istringstream is(
        "# unit square\n"
        "DIM 2\n"
        "POINTS 4\n0 0\n1 0\n1 1\n0 1\n"
        "BOUNDARY 4\n0 1 2 3\n"
        "CELLS 2\n0 1 2\n0 2 3\n");
    const auto c = read_mesh<2>(is);
    std::size_t edges = 0;
    for (const auto& row : c.adjacency()) edges += row.size();
    EXPECT_EQ(edges / 2, 5u);
    EXPECT_EQ(c.boundary_points().size(), 4u);
}

TEST(MeshText, RoundTripIsExact) {
    DiscMeshOptions opt;
    opt.target_points = 200;
    const auto a = make_disc_mesh(opt);
    std::stringstream ss;
    write_mesh(a, ss);
    const auto b = read_mesh<2>(ss);
    EXPECT_EQ(a.points(), b.points());
    EXPECT_EQ(a.boundary_mask(), b.boundary_mask());
    EXPECT_EQ(a.cells(), b.cells());
    EXPECT_EQ(a.adjacency(), b.adjacency());
}

TEST(MeshText, ParseErrorsReportTheLine) {
    EXPECT_EQ(parse_failure_line<ParseError>("DIM 2\nPOINTS 2\n0 0\n1 x\nBOUNDARY 0\nCELLS 0\n"), 4u);
    EXPECT_EQ(parse_failure_line<ParseError>("DIM 2\nPOINTS 1\n0 0 0\nBOUNDARY 0\nCELLS 0\n"), 3u);
    EXPECT_EQ(parse_failure_line<ParseError>("DIM 3\nPOINTS 0\nBOUNDARY 0\nCELLS 0\n"), 1u);
    EXPECT_EQ(parse_failure_line<ParseError>("DIM 2\n\n# gap\nPOINT 1\n"), 4u);
    EXPECT_EQ(parse_failure_line<ParseError>("DIM 2\nPOINTS 0\nBOUNDARY 0\nCELLS 0\nextra\n"), 5u);
}

TEST(MeshText, DanglingIndicesAreTopologyErrors) {
    EXPECT_EQ(parse_failure_line<TopologyError>("DIM 2\nPOINTS 3\n0 0\n1 0\n0 1\nBOUNDARY 0\nCELLS 1\n0 1 3\n"), 1u);
    EXPECT_EQ(parse_failure_line<TopologyError>("DIM 2\nPOINTS 1\n0 0\nBOUNDARY 1\n5\nCELLS 0\n"), 1u);
}

TEST(AugmentBoundary, OctagonRefinesUntilTarget) {
    const auto c = polygon_fan(8);
    const double hb = c.metrics().h_boundary;
    const auto a = augment_boundary(c, 0.25 * hb * (1.0 + 1e-9));
    EXPECT_GE(a.boundary_points().size(), 32u);
    EXPECT_LE(a.metrics().h_boundary, 0.25 * hb * (1.0 + 1e-9));
    EXPECT_EQ(a.interior_points(), std::vector<int>{0});
    // Original points keep their ids.
    for (int i = 0; i < c.size(); ++i) EXPECT_EQ(a.point(i), c.point(i));
    // Each pass halves the boundary resolution.
    const auto once = augment_boundary(c, 0.5 * hb * (1.0 + 1e-9));
    EXPECT_EQ(once.boundary_points().size(), 16u);
    EXPECT_NEAR(once.metrics().h_boundary, 0.5 * hb, 1e-12);
}

TEST(AugmentBoundary, AlreadyFineIsUnchanged) {
    const auto c = polygon_fan(12);
    const auto a = augment_boundary(c, 2.0 * c.metrics().h_boundary);
    EXPECT_EQ(a.points(), c.points());
    EXPECT_EQ(a.cells(), c.cells());
    EXPECT_THROW(augment_boundary(c, 0.0), std::invalid_argument);
}

TEST(Rotate, ZeroAngleIsIdentity) {
    const auto g = build_regular_grid<2>(7, Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0), 1);
    const auto r = rotate_cloud(g, 0.0);
    EXPECT_EQ(r.points(), g.points());
}

TEST(Rotate, QuarterTurnMapsGridOntoItself) {
    const auto g = build_regular_grid<2>(7, Vec<2>(-1.0, -1.0), Vec<2>(1.0, 1.0), 1);
    const auto r = rotate_cloud(g, 0.5 * std::numbers::pi);
    for (const auto& p : r.points()) {
        double best = 1e300;
        for (const auto& q : g.points()) best = std::min(best, (p - q).norm());
        EXPECT_LT(best, 1e-12);
    }
}

TEST(Rotate, IsometryKeepsMetricsAndStructure) {
    DiscMeshOptions opt;
    opt.target_points = 150;
    const auto c = make_disc_mesh(opt);
    const auto r = rotate_cloud(c, 0.3);
    for (int i = 0; i < c.size(); ++i)
        for (int j : c.adjacency()[i]) EXPECT_NEAR((r.point(i) - r.point(j)).norm(), (c.point(i) - c.point(j)).norm(), 1e-12);
    EXPECT_EQ(r.metrics().h, c.metrics().h);
    EXPECT_EQ(r.metrics().h_boundary, c.metrics().h_boundary);
    EXPECT_EQ(r.boundary_mask(), c.boundary_mask());
    EXPECT_EQ(r.cells(), c.cells());
}
