#include "shadowfield/voxel_traversal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace shadowfield {
namespace {

constexpr double kBoundaryNudge = 1e-9;

}  // namespace

SegmentTraversal::SegmentTraversal(const GridGeometry& geometry, const Vec3& a, const Vec3& b) {
  // Shift by half a cell so that cell k spans [k, k+1).
  const Vec3 start = geometry.continuous_index(a).array() + 0.5;
  const Vec3 end = geometry.continuous_index(b).array() + 0.5;
  const Vec3 d = end - start;
  const double longest = d.cwiseAbs().maxCoeff();
  tie_tolerance_ = longest > 0.0 ? kBoundaryNudge / longest : 0.0;

  for (int i = 0; i < 3; ++i) {
    step_[i] = d[i] > 0.0 ? 1 : (d[i] < 0.0 ? -1 : 0);
    first_[i] = static_cast<int>(std::floor(start[i] + kBoundaryNudge * step_[i]));
    last_[i] = static_cast<int>(std::floor(end[i] - kBoundaryNudge * step_[i]));
    if (step_[i] == 0) {
      last_[i] = first_[i];
      t_max_[i] = std::numeric_limits<double>::infinity();
      t_delta_[i] = std::numeric_limits<double>::infinity();
    } else {
      const double boundary = step_[i] > 0 ? first_[i] + 1.0 : static_cast<double>(first_[i]);
      t_max_[i] = (boundary - start[i]) / d[i];
      t_delta_[i] = 1.0 / std::abs(d[i]);
    }
    // A nudged end can land one cell behind the start on a degenerate, sub-nudge segment.
    if (step_[i] != 0 && (last_[i] - first_[i]) * step_[i] < 0) last_[i] = first_[i];
  }
  cell_ = first_;
}

void SegmentTraversal::advance() {
  if (at_end()) return;
  double t_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (cell_[i] != last_[i]) t_min = std::min(t_min, t_max_[i]);
  }
  for (int i = 0; i < 3; ++i) {
    if (cell_[i] != last_[i] && t_max_[i] <= t_min + tie_tolerance_) {
      cell_[i] += step_[i];
      t_max_[i] += t_delta_[i];
    }
  }
}

}  // namespace shadowfield
