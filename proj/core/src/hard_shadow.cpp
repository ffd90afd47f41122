#include "shadowfield/hard_shadow.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "number_format.hpp"
#include "shadowfield/voxel_traversal.hpp"

namespace shadowfield {

using detail::shortest;


VisibilityVerdict line_of_sight(const OccupancyGrid& occ, const Vec3& a, const Vec3& b, double threshold) {
  VisibilityVerdict verdict;
  SegmentTraversal t(occ.geometry(), a, b);
  const Index3 first = t.first_cell();
  const Index3 last = t.last_cell();
  for (;; t.advance()) {
    ++verdict.cells_traversed;
    const Index3 c = t.cell();
    if (c != first && c != last && occ.at(c) > threshold) {
      verdict.visible = false;
      verdict.first_blocker = c;
      break;
    }
    if (t.at_end()) break;
  }
  return verdict;
}

ShadowField hard_field(const OccupancyGrid& occ, const Vec3& light_world, const FieldExtents& extents,
                       double threshold) {
  const GridGeometry& global = occ.geometry();
  const Index3 light_global = global.world_to_index(light_world);
  if (!light_world.allFinite() || !global.contains(light_global)) {
    throw std::out_of_range("light position lies outside the occupancy grid");
  }
  GridGeometry geometry;
  geometry.dims = extents.dims();
  geometry.resolution = global.resolution;
  geometry.origin = global.index_to_world(light_global - extents.negative);
  const Vec3 light_center = global.index_to_world(light_global);

  std::vector<float> values(geometry.cell_count(), 1.0f);
  for (int z = 0; z < geometry.dims.z; ++z) {
    for (int y = 0; y < geometry.dims.y; ++y) {
      for (int x = 0; x < geometry.dims.x; ++x) {
        const Index3 local{x, y, z};
        const Index3 g = local - extents.negative + light_global;
        float& v = values[geometry.linear_index(local)];
        if (occ.at(g) > threshold) {
          v = 0.0f;
        } else if (g != light_global) {
          v = line_of_sight(occ, light_center, global.index_to_world(g), threshold).visible ? 1.0f : 0.0f;
        }
      }
    }
  }
  return ShadowField(geometry, extents.negative, light_global, threshold, std::move(values));
}

std::vector<ProfileRow> compare_profile(const ShadowField& soft, const ShadowField& hard, const ProfileLine& line) {
  if (!(soft.geometry() == hard.geometry())) throw std::invalid_argument("profile fields have different geometry");
  const GridGeometry& g = soft.geometry();
  const int a = static_cast<int>(line.along);
  Index3 cell = g.world_to_index(line.through);
  for (int i = 0; i < 3; ++i) {
    if (i != a && (cell[i] < 0 || cell[i] >= g.dims[i])) {
      throw std::out_of_range(std::string("profile line misses the field along ") + axis_name(static_cast<Axis>(i)));
    }
  }
  std::vector<ProfileRow> rows;
  rows.reserve(static_cast<std::size_t>(g.dims[a]));
  for (int k = 0; k < g.dims[a]; ++k) {
    cell[a] = k;
    rows.push_back({g.index_to_world(cell)[a], soft.at(cell), hard.at(cell)});
  }
  return rows;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfileRow>& rows) {
  out << "coord,soft,hard\n";
  for (const ProfileRow& r : rows) {
    out << shortest(r.coord) << ',' << shortest(r.soft) << ',' << (r.hard > 0.5f ? 1 : 0) << '\n';
  }
}

void write_profile_csv(const std::filesystem::path& path, const std::vector<ProfileRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  write_profile_csv(out, rows);
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

}  // namespace shadowfield
