#pragma once

#include <span>
#include <vector>

#include "shadowfield/geometry.hpp"

namespace shadowfield {

struct ThroughputSample {
  std::size_t cells = 0;
  double mean_seconds = 0.0;
  double cells_per_second = 0.0;
};

/// Times the full field update (all octants, including dispatch) on a
/// `dims` grid at 10 cells/m with a handful of random boxes and the light in
/// the middle. One untimed warm-up run precedes `repetitions` timed ones.
/// Throws std::invalid_argument when repetitions < 1.
ThroughputSample measure_field_update(Index3 dims, int repetitions, unsigned threads = 0);

/// Least-squares slope of log(seconds) against log(cells).
double loglog_slope(std::span<const ThroughputSample> samples);

}  // namespace shadowfield
