#include "shadowfield/throughput.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "shadowfield/occupancy.hpp"
#include "shadowfield/shadow_field.hpp"
#include "shadowfield/shadow_weights.hpp"

namespace shadowfield {

ThroughputSample measure_field_update(Index3 dims, int repetitions, unsigned threads) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  GridGeometry g;
  g.dims = dims;
  g.resolution = 10.0;
  g.validate();
  OccupancyGrid occ(g, 0.0f);

  std::mt19937 rng(7);
  const Vec3 extent(dims.x / g.resolution, dims.y / g.resolution, dims.z / g.resolution);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    const Vec3 lo = g.origin + Vec3(unit(rng), unit(rng), unit(rng)).cwiseProduct(extent);
    const Vec3 size = Vec3(unit(rng), unit(rng), unit(rng)).cwiseProduct(extent) * 0.1;
    occ.add_box(lo, lo + size, 0.9f);
  }

  const Index3 light{dims.x / 2, dims.y / 2, dims.z / 2};
  const FieldExtents extents = FieldExtents::covering(g, light);
  const Index3 reach = extents.max_reach();
  const WeightCache3D cache({std::max(1, reach.x), std::max(1, reach.y), std::max(1, reach.z)});
  UpdateOptions options;
  options.threads = threads;
  const Vec3 light_world = g.index_to_world(light);

  (void)update_shadow_field(occ, light_world, extents, cache, options);
  double total = 0.0;
  for (int r = 0; r < repetitions; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const ShadowField field = update_shadow_field(occ, light_world, extents, cache, options);
    const auto t1 = std::chrono::steady_clock::now();
    total += std::chrono::duration<double>(t1 - t0).count();
    if (field.values().empty()) throw std::logic_error("empty field");
  }
  ThroughputSample s;
  s.cells = g.cell_count();
  s.mean_seconds = total / repetitions;
  s.cells_per_second = static_cast<double>(s.cells) / s.mean_seconds;
  return s;
}

double loglog_slope(std::span<const ThroughputSample> samples) {
  if (samples.size() < 2) throw std::invalid_argument("slope needs at least two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(samples.size());
  for (const ThroughputSample& s : samples) {
    const double x = std::log(static_cast<double>(s.cells));
    const double y = std::log(s.mean_seconds);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace shadowfield
