#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "shadowfield/voxel_traversal.hpp"

namespace {

using namespace shadowfield;

oracle::CellSet traversed(const GridGeometry& g, const Vec3& a, const Vec3& b) {
  oracle::CellSet cells;
  traverse_segment(g, a, b, [&](Index3 c) {
    cells.insert(c);
    return true;
  });
  return cells;
}

GridGeometry unit_grid() {
  GridGeometry g;
  g.dims = {20, 20, 20};
  return g;
}

TEST(Traversal, DegenerateSegmentVisitsOneCell) {
  const GridGeometry g = unit_grid();
  const std::size_t n = traverse_segment(g, Vec3(3.2, 4.1, 5.0), Vec3(3.2, 4.1, 5.0), [](Index3) { return true; });
  EXPECT_EQ(n, 1u);
}

TEST(Traversal, AxisAlignedRun) {
  const GridGeometry g = unit_grid();
  std::vector<Index3> cells;
  traverse_segment(g, Vec3(0, 2, 2), Vec3(5, 2, 2), [&](Index3 c) {
    cells.push_back(c);
    return true;
  });
  ASSERT_EQ(cells.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(cells[i], (Index3{i, 2, 2}));
}

TEST(Traversal, ExactDiagonalStepsTiedAxesTogether) {
  const GridGeometry g = unit_grid();
  const auto cells = traversed(g, Vec3(0, 0, 0), Vec3(4, 4, 0));
  EXPECT_EQ(cells.size(), 5u);
  for (int i = 0; i <= 4; ++i) EXPECT_TRUE(cells.count({i, i, 0}));
}

TEST(Traversal, VisitsCellsOutsideTheGrid) {
  const GridGeometry g = unit_grid();
  const auto cells = traversed(g, Vec3(-3, 1, 1), Vec3(2, 1, 1));
  EXPECT_TRUE(cells.count({-3, 1, 1}));
  EXPECT_EQ(cells.size(), 6u);
}

TEST(Traversal, StopsWhenVisitorDeclines) {
  const GridGeometry g = unit_grid();
  int seen = 0;
  const std::size_t n = traverse_segment(g, Vec3(0, 0, 0), Vec3(10, 0, 0), [&](Index3) { return ++seen < 3; });
  EXPECT_EQ(n, 3u);
}

TEST(TraversalProperty, MatchesMarchingOracleAndIsSymmetric) {
  GridGeometry g;
  g.dims = {32, 32, 8};
  g.resolution = 10.0;
  g.origin = Vec3(-1.0, 0.5, 0.0);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> ux(-1.5, 2.5), uy(0.0, 4.0), uz(-0.2, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a(ux(rng), uy(rng), uz(rng));
    const Vec3 b(ux(rng), uy(rng), uz(rng));
    const auto fwd = traversed(g, a, b);
    ASSERT_EQ(fwd, oracle::marched_cells(g, a, b)) << "segment " << i;
    ASSERT_EQ(fwd, traversed(g, b, a)) << "segment " << i;
  }
}

TEST(TraversalProperty, ConsecutiveCellsShareAFaceOffGridLines) {
  const GridGeometry g = unit_grid();
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 19.0);
  for (int i = 0; i < 200; ++i) {
    Index3 prev{};
    bool first = true;
    traverse_segment(g, Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)), [&](Index3 c) {
      if (!first) {
        const Index3 d = c - prev;
        EXPECT_EQ(std::abs(d.x) + std::abs(d.y) + std::abs(d.z), 1);
      }
      first = false;
      prev = c;
      return true;
    });
  }
}

}  // namespace
