#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "shadowfield/geometry.hpp"
#include "shadowfield/occupancy.hpp"
#include "shadowfield/shadow_field.hpp"

namespace shadowfield {

struct VisibilityVerdict {
  bool visible = true;
  std::optional<Index3> first_blocker;  // set iff !visible, first in a -> b order
  std::size_t cells_traversed = 0;
};

/// Ray-cast visibility between two world points. The cells containing the
/// endpoints never block, so a target mapped as occupied does not hide itself.
VisibilityVerdict line_of_sight(const OccupancyGrid& occ, const Vec3& a, const Vec3& b,
                                double threshold = kDefaultOccupancyThreshold);

/// Binary counterpart of update_shadow_field over the same local grid: 1 where
/// the light cell center sees the cell center, 0 otherwise and on occupied cells.
ShadowField hard_field(const OccupancyGrid& occ, const Vec3& light_world, const FieldExtents& extents,
                       double threshold = kDefaultOccupancyThreshold);

/// Axis-parallel line through the cell containing `through`.
struct ProfileLine {
  Axis along = Axis::Y;
  Vec3 through = Vec3::Zero();
};

struct ProfileRow {
  double coord = 0.0;  // world coordinate along the line
  float soft = 1.0f;
  float hard = 1.0f;
};

/// Cell-center samples of both fields along `line`, in increasing coordinate.
/// Throws std::invalid_argument on a geometry mismatch and std::out_of_range
/// when the line misses the fields.
std::vector<ProfileRow> compare_profile(const ShadowField& soft, const ShadowField& hard, const ProfileLine& line);

/// CSV with header "coord,soft,hard"; soft in shortest round-trip form, hard as 0/1.
void write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows);
void write_profile_csv(const std::filesystem::path& path, const std::vector<ProfileRow>& rows);

}  // namespace shadowfield
