#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shadowfield/hard_shadow.hpp"
#include "shadowfield/occupancy.hpp"
#include "shadowfield/planner.hpp"
#include "shadowfield/scenario.hpp"
#include "shadowfield/shadow_field.hpp"
#include "shadowfield/shadow_weights.hpp"
#include "shadowfield/throughput.hpp"

namespace shadowfield::cli {
namespace {

Vec3 to_vec3(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

/// Local extents in cells from a half-size in meters; empty means "cover the grid".
FieldExtents extents_for(const GridGeometry& g, Index3 light, const std::vector<double>& half_size_m) {
  if (half_size_m.empty()) return FieldExtents::covering(g, light);
  Index3 e;
  for (int a = 0; a < 3; ++a) {
    if (!(half_size_m[a] >= 0.0)) throw std::invalid_argument("--extent must be nonnegative");
    e[a] = static_cast<int>(std::ceil(half_size_m[a] * g.resolution - 1e-9));
  }
  if (g.is_2d()) e.z = 0;
  return FieldExtents::symmetric(e);
}

ShadowField build_field(const OccupancyGrid& occ, const Vec3& light, const FieldExtents& extents,
                        const UpdateOptions& options) {
  const Index3 r = extents.max_reach();
  if (extents.positive.z == 0 && extents.negative.z == 0) {
    return update_shadow_field_2d(occ, light, extents, init_weights_2d(std::max(1, r.x), std::max(1, r.y)), options);
  }
  return update_shadow_field(occ, light, extents, init_weights_3d({std::max(1, r.x), std::max(1, r.y), r.z}),
                             options);
}

Index3 light_index_or_throw(const GridGeometry& g, const Vec3& light) {
  const Index3 i = g.world_to_index(light);
  if (!g.contains(i)) throw std::out_of_range("light position lies outside the occupancy grid");
  return i;
}

struct IngestArgs {
  std::string points;
  std::string out;
  std::vector<double> origin{0.0, 0.0, 0.0};
  std::vector<double> size;
  double resolution = 10.0;
  std::vector<double> sensor{0.0, 0.0, 0.0};
  double max_range = 30.0;
  double hit = 0.85;
  double miss = -0.4;
  double prior = 0.5;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  GridGeometry g;
  g.resolution = a.resolution;
  for (int i = 0; i < 3; ++i) {
    g.dims[i] = std::max(1, static_cast<int>(std::lround(a.size[i] * a.resolution)));
  }
  g.origin = to_vec3(a.origin).array() + 0.5 / a.resolution;
  g.validate();

  const std::vector<Vec3> points = read_point_cloud(std::filesystem::path(a.points));
  OccupancyGrid grid(g, static_cast<float>(a.prior));
  IngestParams params;
  params.hit_logodds = a.hit;
  params.miss_logodds = a.miss;
  params.max_range = a.max_range;
  params.sensor_origin = to_vec3(a.sensor);
  grid.ingest_points(points, params);
  save_grid(grid, a.out);
  out << "points " << points.size() << "\ncells " << g.cell_count() << "\noccupied "
      << grid.count_above(kDefaultOccupancyThreshold) << '\n';
  return 0;
}

struct FieldArgs {
  std::string grid;
  std::vector<double> light;
  std::vector<double> extent;
  double threshold = kDefaultOccupancyThreshold;
  unsigned threads = 0;
  std::string out;
};

int cmd_field(const FieldArgs& a, std::ostream& out) {
  const OccupancyGrid occ = load_grid(a.grid);
  const Vec3 light = to_vec3(a.light);
  const FieldExtents extents = extents_for(occ.geometry(), light_index_or_throw(occ.geometry(), light), a.extent);
  UpdateOptions options;
  options.threshold = a.threshold;
  options.threads = a.threads;

  const auto t0 = std::chrono::steady_clock::now();
  const ShadowField field = build_field(occ, light, extents, options);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_field(field, a.out);

  const auto [lo, hi] = std::minmax_element(field.values().begin(), field.values().end());
  out << "cells " << field.values().size() << "\nupdate_seconds " << seconds << "\ncells_per_second "
      << static_cast<double>(field.values().size()) / seconds << "\nmin_value " << *lo << "\nmax_value " << *hi
      << '\n';
  return 0;
}

struct SliceArgs {
  std::string field;
  std::string axis = "z";
  double level = 0.0;
  std::string out;
};

int cmd_slice(const SliceArgs& a, std::ostream& out) {
  const ShadowField field = load_field(a.field);
  const FieldSlice s = field.slice(parse_axis(a.axis), a.level);
  write_pgm(s, a.out);
  out << "width " << s.width << "\nheight " << s.height << '\n';
  return 0;
}

struct CompareArgs {
  std::string grid;
  std::vector<double> light;
  std::string along = "y";
  std::vector<double> through;
  std::vector<double> extent;
  double threshold = kDefaultOccupancyThreshold;
  std::string out;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const OccupancyGrid occ = load_grid(a.grid);
  const Vec3 light = to_vec3(a.light);
  const FieldExtents extents = extents_for(occ.geometry(), light_index_or_throw(occ.geometry(), light), a.extent);
  UpdateOptions options;
  options.threshold = a.threshold;
  const ShadowField soft = build_field(occ, light, extents, options);
  const ShadowField hard = hard_field(occ, light, extents, a.threshold);
  const std::vector<ProfileRow> rows = compare_profile(soft, hard, {parse_axis(a.along), to_vec3(a.through)});
  write_profile_csv(std::filesystem::path(a.out), rows);
  out << "rows " << rows.size() << '\n';
  return 0;
}

/// "64" -> 64^3, "160x160x20" -> that box.
Index3 parse_size(const std::string& token) {
  std::vector<int> parts;
  std::stringstream ss(token);
  std::string piece;
  while (std::getline(ss, piece, 'x')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != piece.size() || piece.empty() || v < 1) throw std::invalid_argument("bad size '" + token + "'");
    parts.push_back(v);
  }
  if (parts.size() == 1) return {parts[0], parts[0], parts[0]};
  if (parts.size() == 3) return {parts[0], parts[1], parts[2]};
  throw std::invalid_argument("bad size '" + token + "', expected N or NxMxK");
}

struct BenchArgs {
  std::vector<std::string> sizes;
  int repetitions = 3;
  unsigned threads = 0;
  std::string out;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.repetitions < 1) throw std::invalid_argument("--repetitions must be >= 1");
  std::ostringstream csv;
  csv << "cells,mean_seconds,cells_per_sec\n";
  for (const std::string& token : a.sizes) {
    const ThroughputSample s = measure_field_update(parse_size(token), a.repetitions, a.threads);
    csv << s.cells << ',' << s.mean_seconds << ',' << s.cells_per_second << '\n';
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(a.out, std::ios::trunc);
    f << csv.str();
    if (!f) throw FormatError("failed writing '" + a.out + "'");
  }
  return 0;
}

struct PlanArgs {
  std::string scenario;
  std::string prefix;
};

int cmd_plan(const PlanArgs& a, std::ostream& out) {
  const Scenario scenario = load_scenario(a.scenario);
  const OccupancyGrid occ = build_scene(scenario);
  const Index3 light_index = light_index_or_throw(occ.geometry(), scenario.light);
  UpdateOptions options;
  options.threshold = scenario.threshold;
  auto field = std::make_shared<const ShadowField>(
      build_field(occ, scenario.light, FieldExtents::covering(occ.geometry(), light_index), options));

  const RecedingResult result = receding_horizon(scenario, [&](int) { return field; });
  write_trajectory_csv(a.prefix + "_trajectory.csv", result.executed, scenario.dt);
  write_log_csv(a.prefix + "_log.csv", result.log);

  const GridGeometry& fg = field->geometry();
  const double top = fg.origin.z() + (fg.dims.z - 1) / fg.resolution;
  const FieldSlice slice = field->slice(Axis::Z, std::clamp(result.executed.states.back()[2], fg.origin.z(), top));
  std::vector<std::string> comments;
  comments.push_back("slice z, u=x v=y, origin " + std::to_string(slice.origin_u) + " " +
                     std::to_string(slice.origin_v) + ", resolution " + std::to_string(slice.resolution));
  for (const State& x : result.executed.states) {
    comments.push_back("path " + std::to_string(x[0]) + " " + std::to_string(x[1]) + " " + std::to_string(x[2]));
  }
  write_pgm(slice, a.prefix + "_slice.pgm", comments);

  const LogRow& last = result.log.back();
  out << "steps " << result.executed.controls.size() << "\nfinal_F " << last.field_value << "\nfinal_ec "
      << last.error_complement << "\ntotal_cost " << result.executed.cost.total << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Soft shadow fields over occupancy grids and visibility-aware planning"};
  app.name("shadowfield");
  app.require_subcommand(1, 1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Build an occupancy grid from an ASCII point cloud");
  c_ingest->add_option("--points", ingest.points, "Point file, one \"x y z\" per line")->required();
  c_ingest->add_option("--out", ingest.out, "Output grid file")->required();
  c_ingest->add_option("--origin", ingest.origin, "Low corner of the grid (m)")->expected(3);
  c_ingest->add_option("--size", ingest.size, "Grid size (m)")->expected(3)->required();
  c_ingest->add_option("--resolution", ingest.resolution, "Cells per meter")->check(CLI::PositiveNumber);
  c_ingest->add_option("--sensor", ingest.sensor, "Sensor origin (m)")->expected(3);
  c_ingest->add_option("--max-range", ingest.max_range, "Sensor range (m)")->check(CLI::PositiveNumber);
  c_ingest->add_option("--hit", ingest.hit, "Log-odds added on a hit");
  c_ingest->add_option("--miss", ingest.miss, "Log-odds added on a pass-through");
  c_ingest->add_option("--prior", ingest.prior, "Initial occupancy probability")->check(CLI::Range(0.0, 1.0));

  FieldArgs field;
  auto* c_field = app.add_subcommand("field", "Compute the shadow field of a point light");
  c_field->add_option("--grid", field.grid, "Occupancy grid file")->required();
  c_field->add_option("--light", field.light, "Light position (m)")->expected(3)->required();
  c_field->add_option("--extent", field.extent, "Half-size of the local field (m); default covers the grid")
      ->expected(3);
  c_field->add_option("--threshold", field.threshold, "Occupancy threshold");
  c_field->add_option("--threads", field.threads, "Worker threads (0 = default)");
  c_field->add_option("--out", field.out, "Output field file")->required();

  SliceArgs slice;
  auto* c_slice = app.add_subcommand("slice", "Export an axis-aligned slice of a field as PGM");
  c_slice->add_option("--field", slice.field, "Field file")->required();
  c_slice->add_option("--axis", slice.axis, "Slice normal: x, y or z");
  c_slice->add_option("--level", slice.level, "World coordinate along the axis (m)")->required();
  c_slice->add_option("--out", slice.out, "Output PGM")->required();

  CompareArgs compare;
  auto* c_compare = app.add_subcommand("compare", "Soft vs ray-cast visibility along a line");
  c_compare->add_option("--grid", compare.grid, "Occupancy grid file")->required();
  c_compare->add_option("--light", compare.light, "Light position (m)")->expected(3)->required();
  c_compare->add_option("--along", compare.along, "Line direction: x, y or z");
  c_compare->add_option("--through", compare.through, "A point on the line (m)")->expected(3)->required();
  c_compare->add_option("--extent", compare.extent, "Half-size of the local field (m)")->expected(3);
  c_compare->add_option("--threshold", compare.threshold, "Occupancy threshold");
  c_compare->add_option("--out", compare.out, "Output CSV")->required();

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time full field updates over grid sizes");
  c_bench->add_option("--sizes", bench.sizes, "Grid sizes, N (cube) or NxMxK")->delimiter(',')->required();
  c_bench->add_option("--repetitions", bench.repetitions, "Timed runs per size");
  c_bench->add_option("--threads", bench.threads, "Worker threads (0 = default)");
  c_bench->add_option("--out", bench.out, "Output CSV (default stdout)");

  PlanArgs plan;
  auto* c_plan = app.add_subcommand("plan", "Run the receding-horizon planner on a scenario");
  c_plan->add_option("--scenario", plan.scenario, "Scenario JSON")->required();
  c_plan->add_option("--out-prefix", plan.prefix, "Prefix for the CSV and PGM outputs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (c_ingest->parsed()) return cmd_ingest(ingest, out);
    if (c_field->parsed()) return cmd_field(field, out);
    if (c_slice->parsed()) return cmd_slice(slice, out);
    if (c_compare->parsed()) return cmd_compare(compare, out);
    if (c_bench->parsed()) return cmd_bench(bench, out);
    if (c_plan->parsed()) return cmd_plan(plan, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace shadowfield::cli
