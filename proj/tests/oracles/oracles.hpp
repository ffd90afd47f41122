#pragma once

// Independent reference implementations used only by the tests. Nothing here
// shares code with the library kernels beyond the basic geometry types.

#include <cstdint>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include "shadowfield/geometry.hpp"
#include "shadowfield/occupancy.hpp"
#include "shadowfield/shadow_field.hpp"

namespace oracle {

using shadowfield::GridGeometry;
using shadowfield::Index3;
using shadowfield::Vec3;

/// Fractions of rays from the light cell center to uniform points inside the
/// cell at `offset` (all components > 0) that enter it through its x-, y- and
/// z-predecessor face.
struct FaceFractions {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};
FaceFractions entry_face_fractions(Index3 offset, int samples, std::uint64_t seed);

/// 2D version on the z = 0 plane.
FaceFractions entry_face_fractions_2d(int a, int b, int samples, std::uint64_t seed);

struct CellLess {
  bool operator()(Index3 a, Index3 b) const { return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z); }
};
using CellSet = std::set<Index3, CellLess>;

/// Cells hit by point-marching a -> b at 1/20 cell, refined by bisection
/// wherever two consecutive samples differ along more than one axis.
CellSet marched_cells(const GridGeometry& g, const Vec3& a, const Vec3& b);

/// Visibility by marching: blocked iff a marched cell other than the ones
/// holding a and b is above the threshold.
bool marched_visible(const shadowfield::OccupancyGrid& occ, const Vec3& a, const Vec3& b, double threshold);

/// Central difference of a scalar function along each axis.
Vec3 central_gradient(const std::function<double(const Vec3&)>& f, const Vec3& p, double h);

/// Smallest distance from segment [a, b] to the axis-aligned box [lo, hi].
double segment_box_distance(const Vec3& a, const Vec3& b, const Vec3& lo, const Vec3& hi);

/// 100 x 100 single-layer scene at 1 cell/m: light at (20, 50), one opaque
/// box spanning cells x 40..45, y 40..59.
struct SingleOccluderScene {
  shadowfield::OccupancyGrid occ;
  Vec3 light;
};
SingleOccluderScene single_occluder_scene();

/// Classification of cells of an opaque single-layer scene (1 cell/m, origin
/// at 0, field covering the grid) against its hard field:
/// "deep umbra" cells are hard-shadowed with every cell within Chebyshev
/// distance 2 also hard-shadowed or occupied; "clear lit" cells see the light
/// along a ray staying >= 2 cells from every occupied cell.
struct Classified {
  std::vector<Index3> deep_umbra;
  std::vector<Index3> clear_lit;
};
Classified classify_opaque_2d(const shadowfield::OccupancyGrid& occ, const shadowfield::ShadowField& hard);

}  // namespace oracle
