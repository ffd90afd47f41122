#include "shadowfield/geometry.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shadowfield {

Axis parse_axis(std::string_view name) {
  if (name.size() == 1) {
    switch (std::tolower(static_cast<unsigned char>(name[0]))) {
      case 'x':
        return Axis::X;
      case 'y':
        return Axis::Y;
      case 'z':
        return Axis::Z;
      default:
        break;
    }
  }
  throw std::invalid_argument("unknown axis '" + std::string(name) + "' (expected x, y or z)");
}

char axis_name(Axis axis) { return "xyz"[static_cast<int>(axis)]; }

void GridGeometry::validate() const {
  if (dims.x < 1 || dims.y < 1 || dims.z < 1) {
    throw std::invalid_argument("grid dimensions must all be >= 1, got (" + std::to_string(dims.x) + ", " +
                                std::to_string(dims.y) + ", " + std::to_string(dims.z) + ")");
  }
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("grid resolution must be positive and finite");
  }
  if (!origin.allFinite()) {
    throw std::invalid_argument("grid origin must be finite");
  }
}

std::size_t GridGeometry::cell_count() const {
  return static_cast<std::size_t>(dims.x) * static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(dims.z);
}

Index3 GridGeometry::world_to_index(const Vec3& p) const {
  const Vec3 c = continuous_index(p);
  return {static_cast<int>(std::floor(c.x() + 0.5)), static_cast<int>(std::floor(c.y() + 0.5)),
          static_cast<int>(std::floor(c.z() + 0.5))};
}

Vec3 GridGeometry::index_to_world(Index3 index) const {
  return origin + Vec3(index.x, index.y, index.z) / resolution;
}

}  // namespace shadowfield
