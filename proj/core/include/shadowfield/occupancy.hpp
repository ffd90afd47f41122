#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "shadowfield/geometry.hpp"
#include "shadowfield/io_error.hpp"

namespace shadowfield {

/// Log-odds are clamped to [-kLogOddsLimit, +kLogOddsLimit].
inline constexpr double kLogOddsLimit = 10.0;

struct IngestParams {
  double hit_logodds = 0.85;
  double miss_logodds = -0.4;
  double max_range = 30.0;  // meters
  Vec3 sensor_origin = Vec3::Zero();

  void validate() const;
};

/// Dense probabilistic occupancy grid. Every stored probability is in [0,1].
///
/// Queries outside the grid read as free (0). A parallel log-odds array is
/// created on the first ingestion and kept in sync afterwards.
class OccupancyGrid {
 public:
  /// All cells set to `fill`. Throws std::invalid_argument on invalid geometry or fill.
  OccupancyGrid(const GridGeometry& geometry, float fill = 0.0f);

  const GridGeometry& geometry() const { return geometry_; }
  std::span<const float> values() const { return values_; }
  const std::optional<std::vector<double>>& log_odds() const { return log_odds_; }

  float at(Index3 index) const {
    return geometry_.contains(index) ? values_[geometry_.linear_index(index)] : 0.0f;
  }
  float at_world(const Vec3& p) const { return at(geometry_.world_to_index(p)); }
  void set(Index3 index, float p);

  /// Raises every cell whose center lies in [min_corner, max_corner] to at least p.
  void add_box(const Vec3& min_corner, const Vec3& max_corner, float p);

  /// Batch log-odds update: each point's endpoint cell receives hit_logodds and
  /// every cell crossed on the way from the sensor receives miss_logodds.
  /// Points beyond max_range only carve free space up to max_range. Evidence is
  /// counted per cell and applied once, so the result does not depend on the
  /// order of `points`.
  void ingest_points(std::span<const Vec3> points, const IngestParams& params);

  /// Number of cells with probability strictly above `threshold`.
  std::size_t count_above(double threshold) const;

  /// Whole-array equality of geometry and probabilities (log-odds not compared).
  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.geometry_ == b.geometry_ && a.values_ == b.values_;
  }

 private:
  friend OccupancyGrid load_grid(const std::filesystem::path& path);
  OccupancyGrid(const GridGeometry& geometry, std::vector<float> values);

  void ensure_log_odds();

  GridGeometry geometry_;
  std::vector<float> values_;
  std::optional<std::vector<double>> log_odds_;
};

inline OccupancyGrid new_grid(const GridGeometry& geometry, float fill) { return OccupancyGrid(geometry, fill); }

/// "SFG1" binary grid file (little-endian).
void save_grid(const OccupancyGrid& grid, const std::filesystem::path& path);
OccupancyGrid load_grid(const std::filesystem::path& path);

/// ASCII point cloud: one "x y z" per line, '#' comments and blank lines skipped.
/// Throws FormatError naming the offending line number.
std::vector<Vec3> read_point_cloud(std::istream& in, const std::string& source = "<stream>");
std::vector<Vec3> read_point_cloud(const std::filesystem::path& path);

double logistic(double log_odds);

}  // namespace shadowfield
