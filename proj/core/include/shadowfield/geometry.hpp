#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace shadowfield {

using Vec3 = Eigen::Vector3d;

enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// Parses "x", "y" or "z" (case-insensitive). Throws std::invalid_argument otherwise.
Axis parse_axis(std::string_view name);
char axis_name(Axis axis);

/// Integer cell coordinate (or cell offset) on a 3D lattice.
struct Index3 {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr int operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr int& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend constexpr Index3 operator+(Index3 a, Index3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Index3 operator-(Index3 a, Index3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr bool operator==(Index3, Index3) = default;
};

/// Axis-aligned, uniformly spaced grid registered in the world frame.
///
/// Cells are cell-centered: `origin` is the world position of the center of
/// cell (0,0,0) and cell i spans [origin + (i - 0.5)/res, origin + (i + 0.5)/res).
/// Storage order everywhere in the library is row-major with x fastest.
struct GridGeometry {
  Index3 dims{1, 1, 1};
  double resolution = 1.0;  // cells per meter
  Vec3 origin = Vec3::Zero();

  /// Throws std::invalid_argument on zero/negative dims or non-positive resolution.
  void validate() const;

  std::size_t cell_count() const;
  bool is_2d() const { return dims.z == 1; }
  double cell_size() const { return 1.0 / resolution; }

  bool contains(Index3 index) const {
    return index.x >= 0 && index.y >= 0 && index.z >= 0 && index.x < dims.x && index.y < dims.y &&
           index.z < dims.z;
  }

  std::size_t linear_index(Index3 index) const {
    return static_cast<std::size_t>(index.x) +
           static_cast<std::size_t>(dims.x) *
               (static_cast<std::size_t>(index.y) + static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(index.z));
  }

  /// floor((p - origin) * resolution + 0.5) per axis; may be out of bounds.
  Index3 world_to_index(const Vec3& p) const;
  Vec3 index_to_world(Index3 index) const;

  /// (p - origin) * resolution: continuous coordinates in which cell centers are integers.
  Vec3 continuous_index(const Vec3& p) const { return (p - origin) * resolution; }

  friend bool operator==(const GridGeometry& a, const GridGeometry& b) {
    return a.dims == b.dims && a.resolution == b.resolution && a.origin == b.origin;
  }
};

}  // namespace shadowfield
