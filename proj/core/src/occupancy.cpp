#include "shadowfield/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "binary_io.hpp"
#include "shadowfield/voxel_traversal.hpp"

namespace shadowfield {
namespace {

constexpr char kGridMagic[] = "SFG1";

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must be a probability in [0,1]");
  }
}

double clamped_logit(double p) {
  if (p <= 0.0) return -kLogOddsLimit;
  if (p >= 1.0) return kLogOddsLimit;
  return std::clamp(std::log(p / (1.0 - p)), -kLogOddsLimit, kLogOddsLimit);
}

}  // namespace

double logistic(double log_odds) { return 1.0 / (1.0 + std::exp(-log_odds)); }

void IngestParams::validate() const {
  if (!(hit_logodds > 0.0) || !(miss_logodds < 0.0)) {
    throw std::invalid_argument("ingestion requires hit_logodds > 0 > miss_logodds");
  }
  if (!(max_range > 0.0)) throw std::invalid_argument("max_range must be positive");
  if (!sensor_origin.allFinite()) throw std::invalid_argument("sensor origin must be finite");
}

OccupancyGrid::OccupancyGrid(const GridGeometry& geometry, float fill) : geometry_(geometry) {
  geometry_.validate();
  check_probability(fill, "fill");
  values_.assign(geometry_.cell_count(), fill);
}

OccupancyGrid::OccupancyGrid(const GridGeometry& geometry, std::vector<float> values)
    : geometry_(geometry), values_(std::move(values)) {}

void OccupancyGrid::set(Index3 index, float p) {
  check_probability(p, "occupancy");
  if (!geometry_.contains(index)) throw std::out_of_range("cell index outside grid");
  const std::size_t i = geometry_.linear_index(index);
  values_[i] = p;
  if (log_odds_) (*log_odds_)[i] = clamped_logit(p);
}

void OccupancyGrid::add_box(const Vec3& min_corner, const Vec3& max_corner, float p) {
  check_probability(p, "box occupancy");
  if (!(min_corner.array() <= max_corner.array()).all()) {
    throw std::invalid_argument("box min corner must be <= max corner componentwise");
  }
  constexpr double kEdgeTolerance = 1e-9;
  const Vec3 lo_c = geometry_.continuous_index(min_corner);
  const Vec3 hi_c = geometry_.continuous_index(max_corner);
  Index3 lo;
  Index3 hi;
  for (int a = 0; a < 3; ++a) {
    const double l = std::ceil(lo_c[a] - kEdgeTolerance);
    const double h = std::floor(hi_c[a] + kEdgeTolerance);
    lo[a] = static_cast<int>(std::clamp(l, 0.0, static_cast<double>(geometry_.dims[a])));
    hi[a] = static_cast<int>(std::clamp(h, -1.0, static_cast<double>(geometry_.dims[a] - 1)));
  }
  for (int z = lo.z; z <= hi.z; ++z) {
    for (int y = lo.y; y <= hi.y; ++y) {
      for (int x = lo.x; x <= hi.x; ++x) {
        const std::size_t i = geometry_.linear_index({x, y, z});
        if (values_[i] < p) {
          values_[i] = p;
          if (log_odds_) (*log_odds_)[i] = clamped_logit(p);
        }
      }
    }
  }
}

void OccupancyGrid::ensure_log_odds() {
  if (log_odds_) return;
  std::vector<double> lo(values_.size());
  std::transform(values_.begin(), values_.end(), lo.begin(), [](float p) { return clamped_logit(p); });
  log_odds_ = std::move(lo);
}

void OccupancyGrid::ingest_points(std::span<const Vec3> points, const IngestParams& params) {
  params.validate();
  if (points.empty()) return;
  ensure_log_odds();

  std::vector<std::int32_t> hits(values_.size(), 0);
  std::vector<std::int32_t> misses(values_.size(), 0);

  for (const Vec3& point : points) {
    if (!point.allFinite()) throw std::invalid_argument("point cloud contains non-finite coordinates");
    const Vec3 ray = point - params.sensor_origin;
    const double range = ray.norm();
    const bool in_range = range <= params.max_range;
    const Vec3 end = in_range ? point : Vec3(params.sensor_origin + ray * (params.max_range / range));

    SegmentTraversal t(geometry_, params.sensor_origin, end);
    const Index3 end_cell = t.last_cell();
    for (;; t.advance()) {
      const Index3 c = t.cell();
      if (c != end_cell && geometry_.contains(c)) ++misses[geometry_.linear_index(c)];
      if (t.at_end()) break;
    }
    if (geometry_.contains(end_cell)) {
      const std::size_t i = geometry_.linear_index(end_cell);
      if (in_range) {
        ++hits[i];
      } else {
        ++misses[i];
      }
    }
  }

  auto& lo = *log_odds_;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (hits[i] == 0 && misses[i] == 0) continue;
    lo[i] = std::clamp(lo[i] + hits[i] * params.hit_logodds + misses[i] * params.miss_logodds, -kLogOddsLimit,
                       kLogOddsLimit);
    values_[i] = static_cast<float>(logistic(lo[i]));
  }
}

std::size_t OccupancyGrid::count_above(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [threshold](float p) { return p > threshold; }));
}

void save_grid(const OccupancyGrid& grid, const std::filesystem::path& path) {
  const GridGeometry& g = grid.geometry();
  detail::ByteWriter w;
  w.magic({kGridMagic, 4});
  detail::write_geometry_header(w, g);
  w.f32_array(grid.values());
  w.write_to(path);
}

namespace detail {

void write_geometry_header(ByteWriter& w, const GridGeometry& g) {
  w.u32(static_cast<std::uint32_t>(g.dims.x));
  w.u32(static_cast<std::uint32_t>(g.dims.y));
  w.u32(static_cast<std::uint32_t>(g.dims.z));
  w.f64(g.resolution);
  w.f64(g.origin.x());
  w.f64(g.origin.y());
  w.f64(g.origin.z());
}

GridGeometry read_geometry_header(ByteReader& r) {
  std::uint64_t dims[3];
  for (auto& d : dims) d = r.u32();
  GridGeometry g;
  constexpr std::uint64_t kMaxAxis = static_cast<std::uint64_t>(std::numeric_limits<int>::max());
  for (int a = 0; a < 3; ++a) {
    if (dims[a] == 0) throw FormatError(r.source() + ": zero grid dimension");
    if (dims[a] > kMaxAxis) throw FormatError(r.source() + ": grid dimension overflow");
    g.dims[a] = static_cast<int>(dims[a]);
  }
  const std::uint64_t cells_xy = dims[0] * dims[1];
  if (cells_xy / dims[0] != dims[1] || (cells_xy * dims[2]) / dims[2] != cells_xy ||
      cells_xy * dims[2] > std::numeric_limits<std::size_t>::max() / sizeof(float)) {
    throw FormatError(r.source() + ": grid dimension overflow");
  }
  g.resolution = r.f64();
  g.origin.x() = r.f64();
  g.origin.y() = r.f64();
  g.origin.z() = r.f64();
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(r.source() + ": " + e.what());
  }
  return g;
}

}  // namespace detail

OccupancyGrid load_grid(const std::filesystem::path& path) {
  auto r = detail::ByteReader::from_file(path);
  r.expect_magic({kGridMagic, 4});
  const GridGeometry g = detail::read_geometry_header(r);
  if (r.remaining() / 4 < g.cell_count()) {
    throw FormatError(r.source() + ": payload holds " + std::to_string(r.remaining() / 4) + " values, expected " +
                      std::to_string(g.cell_count()));
  }
  std::vector<float> values(g.cell_count());
  r.f32_array(values);
  for (float v : values) {
    if (!(v >= 0.0f && v <= 1.0f)) throw FormatError(r.source() + ": occupancy value outside [0,1]");
  }
  return OccupancyGrid(g, std::move(values));
}

std::vector<Vec3> read_point_cloud(std::istream& in, const std::string& source) {
  std::vector<Vec3> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::string trailing;
    if (!(ls >> x >> y >> z) || (ls >> trailing) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw FormatError(source + ":" + std::to_string(line_no) + ": expected \"x y z\", got \"" + line + "\"");
    }
    points.emplace_back(x, y, z);
  }
  return points;
}

std::vector<Vec3> read_point_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  return read_point_cloud(in, path.string());
}

}  // namespace shadowfield
