#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "shadowfield/geometry.hpp"
#include "shadowfield/io_error.hpp"
#include "shadowfield/occupancy.hpp"
#include "shadowfield/shadow_weights.hpp"

namespace shadowfield {

inline constexpr double kDefaultOccupancyThreshold = 0.5;

/// Cells between the light cell and the upper / lower boundary of the local field.
struct FieldExtents {
  Index3 positive;
  Index3 negative;

  static FieldExtents symmetric(Index3 e) { return {e, e}; }
  /// Extents reaching exactly the borders of `grid` from the light cell.
  static FieldExtents covering(const GridGeometry& grid, Index3 light_index);
  /// Componentwise max(positive, negative).
  Index3 max_reach() const;
  Index3 dims() const;

  friend bool operator==(const FieldExtents&, const FieldExtents&) = default;
};

/// Value and spatial gradient (1/m) of the interpolated field.
struct FieldSample {
  double value = 1.0;
  Vec3 gradient = Vec3::Zero();
};

/// One plane of field cells, u fastest. (u, v) are the two remaining axes in
/// xyz order: z-slice -> (x, y), y-slice -> (x, z), x-slice -> (y, z).
struct FieldSlice {
  int width = 0;
  int height = 0;
  Axis u_axis = Axis::X;
  Axis v_axis = Axis::Y;
  double resolution = 1.0;
  double origin_u = 0.0;  // world coordinate of column 0's center
  double origin_v = 0.0;  // world coordinate of row 0's center
  std::vector<float> values;

  float at(int u, int v) const { return values[static_cast<std::size_t>(v) * width + u]; }
  friend bool operator==(const FieldSlice&, const FieldSlice&) = default;
};

/// Per-cell visibility probability of a point light, on a local grid centered
/// on the light cell and aligned with the global occupancy grid.
///
/// Sampling is cell-centered multilinear interpolation; points outside the
/// field clamp to the nearest boundary cell.
class ShadowField {
 public:
  ShadowField(const GridGeometry& geometry, Index3 light_local, Index3 light_global, double threshold,
              std::vector<float> values);

  const GridGeometry& geometry() const { return geometry_; }
  Index3 light_local() const { return light_local_; }
  Index3 light_global() const { return light_global_; }
  /// Center of the light cell.
  Vec3 light_world() const { return geometry_.index_to_world(light_local_); }
  FieldExtents extents() const;
  double threshold() const { return threshold_; }
  std::span<const float> values() const { return values_; }

  float at(Index3 local) const { return values_[geometry_.linear_index(local)]; }

  double sample(const Vec3& p) const;
  Vec3 gradient(const Vec3& p) const;
  FieldSample sample_with_gradient(const Vec3& p) const;

  /// Plane of cells nearest `world_level` along `axis`. Throws std::out_of_range
  /// when the level falls outside the field.
  FieldSlice slice(Axis axis, double world_level) const;

  friend bool operator==(const ShadowField&, const ShadowField&) = default;

 private:
  GridGeometry geometry_;
  Index3 light_local_;
  Index3 light_global_;
  double threshold_;
  std::vector<float> values_;
};

struct UpdateOptions {
  double threshold = kDefaultOccupancyThreshold;
  /// 0 selects default_thread_count().
  unsigned threads = 0;
};

/// SHADOWFIELD_THREADS if set to a positive integer, else hardware concurrency.
unsigned default_thread_count();

/// Propagates visibility outward from the light cell over all eight octants.
///
/// Cells with occupancy above the threshold take 1 - P; every other cell is
/// the weighted sum of its predecessors one step toward the light. Cells on
/// the coordinate planes through the light are written once, by the region
/// with nonnegative signs on those axes. Occupancy outside the global grid
/// reads as free.
///
/// Throws std::out_of_range if the light is outside the grid or the extents
/// exceed the cache.
ShadowField update_shadow_field(const OccupancyGrid& occ, const Vec3& light_world, const FieldExtents& extents,
                                const WeightCache3D& cache, const UpdateOptions& options = {});

/// Four-quadrant version for grids with a single z layer.
ShadowField update_shadow_field_2d(const OccupancyGrid& occ, const Vec3& light_world, const FieldExtents& extents,
                                   const WeightCache2D& cache, const UpdateOptions& options = {});

/// Resident scalar counts of a field and the weight maps backing it.
struct StorageReport {
  std::size_t field_values = 0;
  /// One (r, b, g) triple per field cell, as if the maps were stored unfolded.
  std::size_t weight_values_expanded = 0;
  /// What the first-octant cache actually keeps in memory.
  std::size_t weight_values_resident = 0;

  std::size_t expanded_total() const { return field_values + weight_values_expanded; }
};

StorageReport storage_report(const ShadowField& field, const WeightCache3D& cache);

/// Snapshot holder between a mapping thread and readers: publish() swaps in
/// a complete field, snapshot() hands out an immutable shared copy.
class FieldPublisher {
 public:
  void publish(ShadowField field);
  std::shared_ptr<const ShadowField> snapshot() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const ShadowField> current_;
};

/// "SFF1" file: grid header, six u32 light indices (local then global), f64
/// threshold, then the values as f32.
void save_field(const ShadowField& field, const std::filesystem::path& path);
ShadowField load_field(const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255), pixel = round(255 * value). Row 0 is v index 0
/// and rows advance along +v. Each entry of `comments` becomes a "# ..." header line.
void write_pgm(const FieldSlice& slice, const std::filesystem::path& path,
               std::span<const std::string> comments = {});

}  // namespace shadowfield
