#pragma once

#include <array>
#include <cstddef>

#include "shadowfield/geometry.hpp"

namespace shadowfield {

/// Incremental voxel traversal (Amanatides & Woo) of the segment a -> b.
///
/// Works in the unbounded index space of `geometry`, so cells outside the
/// grid are visited too. Cells are half-open; a point lying within 1e-9 cells
/// of a boundary is nudged toward the ray direction for the first cell and
/// against it for the last one, which makes a -> b and b -> a visit the same
/// set of cells. When the segment crosses an edge or corner exactly, all tied
/// axes are stepped together and the cells touched only at that point are
/// skipped.
///
///     for (SegmentTraversal t(geometry, a, b);; t.advance()) {
///       visit(t.cell());
///       if (t.at_end()) break;
///     }
class SegmentTraversal {
 public:
  SegmentTraversal(const GridGeometry& geometry, const Vec3& a, const Vec3& b);

  Index3 cell() const { return cell_; }
  Index3 first_cell() const { return first_; }
  Index3 last_cell() const { return last_; }
  bool at_end() const { return cell_ == last_; }
  void advance();

 private:
  Index3 cell_;
  Index3 first_;
  Index3 last_;
  std::array<int, 3> step_{};
  std::array<double, 3> t_max_{};
  std::array<double, 3> t_delta_{};
  double tie_tolerance_ = 0.0;
};

/// Calls `visit(Index3)` for every traversed cell in order; stops early when
/// the visitor returns false. Returns the number of cells visited.
template <class Visitor>
std::size_t traverse_segment(const GridGeometry& geometry, const Vec3& a, const Vec3& b, Visitor&& visit) {
  std::size_t visited = 0;
  for (SegmentTraversal t(geometry, a, b);; t.advance()) {
    ++visited;
    if (!visit(t.cell())) break;
    if (t.at_end()) break;
  }
  return visited;
}

}  // namespace shadowfield
