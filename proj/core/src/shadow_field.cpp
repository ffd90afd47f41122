#include "shadowfield/shadow_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "binary_io.hpp"

namespace shadowfield {
namespace {

constexpr char kFieldMagic[] = "SFF1";

/// Box of offsets |d| in [lo, hi] per axis with one sign per axis. Axes with
/// lo == hi == 0 lie on the plane through the light.
struct Region {
  Index3 sign{1, 1, 1};
  Index3 lo;
  Index3 hi;
};

inline double blend(const WeightTriple& w, double fx, double fy, double fz) { return w.r * fx + w.b * fy + w.g * fz; }
inline double blend(const WeightPair& w, double fx, double fy, double /*fz*/) { return w.x * fx + w.y * fy; }

struct PropagationContext {
  const OccupancyGrid* occ = nullptr;
  GridGeometry field_geometry;
  Index3 light_local;
  Index3 light_global;
  float threshold = 0.5f;
  float* field = nullptr;
};

template <class Cache>
void propagate_region(const PropagationContext& ctx, const Region& region, const Cache& cache) {
  const Index3 fd = ctx.field_geometry.dims;
  const Index3 od = ctx.occ->geometry().dims;
  const std::span<const float> occ = ctx.occ->values();
  const std::ptrdiff_t stride_y = fd.x;
  const std::ptrdiff_t stride_z = static_cast<std::ptrdiff_t>(fd.x) * fd.y;
  const Index3 s = region.sign;

  // Predecessor = one step toward the light. On the plane through the light
  // the axis has zero weight and the offset 0 keeps the read in bounds.
  const std::ptrdiff_t pred_x = region.lo.x > 0 ? -s.x : 0;
  const std::ptrdiff_t pred_y = region.lo.y > 0 ? -s.y * stride_y : 0;
  const std::ptrdiff_t pred_z = region.lo.z > 0 ? -s.z * stride_z : 0;
  const float threshold = ctx.threshold;

  for (int dz = region.lo.z; dz <= region.hi.z; ++dz) {
    const int lz = ctx.light_local.z + s.z * dz;
    const int gz = ctx.light_global.z + s.z * dz;
    for (int dy = region.lo.y; dy <= region.hi.y; ++dy) {
      const int ly = ctx.light_local.y + s.y * dy;
      const int gy = ctx.light_global.y + s.y * dy;
      const auto* weights = cache.row(dy, dz);
      float* row = ctx.field + stride_z * lz + stride_y * ly + ctx.light_local.x;

      const float* occ_row = nullptr;
      if (gy >= 0 && gy < od.y && gz >= 0 && gz < od.z) {
        occ_row = occ.data() + static_cast<std::ptrdiff_t>(od.x) * (gy + static_cast<std::ptrdiff_t>(od.y) * gz);
      }
      for (int dx = region.lo.x; dx <= region.hi.x; ++dx) {
        const int gx = ctx.light_global.x + s.x * dx;
        const float p = (occ_row != nullptr && gx >= 0 && gx < od.x) ? occ_row[gx] : 0.0f;
        float* cell = row + s.x * dx;
        if (p > threshold) {
          *cell = 1.0f - p;
        } else {
          *cell = static_cast<float>(blend(weights[dx], cell[pred_x], cell[pred_y], cell[pred_z]));
        }
      }
    }
  }
}

/// Regions grouped by how many axes they leave the light plane on. Regions
/// within a group are independent; group k reads only groups < k.
std::array<std::vector<Region>, 3> build_regions(const FieldExtents& e) {
  std::array<std::vector<Region>, 3> groups;
  for (int mask = 1; mask < 8; ++mask) {
    const int axes = ((mask >> 0) & 1) + ((mask >> 1) & 1) + ((mask >> 2) & 1);
    for (int signs = 0; signs < 8; ++signs) {
      Region r;
      bool valid = true;
      for (int a = 0; a < 3; ++a) {
        const bool moves = (mask >> a) & 1;
        const bool negative = (signs >> a) & 1;
        if (!moves) {
          if (negative) valid = false;  // sign is irrelevant on the plane; keep one copy
          r.sign[a] = 1;
          r.lo[a] = r.hi[a] = 0;
          continue;
        }
        r.sign[a] = negative ? -1 : 1;
        r.lo[a] = 1;
        r.hi[a] = negative ? e.negative[a] : e.positive[a];
        if (r.hi[a] < 1) valid = false;
      }
      if (valid) groups[axes - 1].push_back(r);
    }
  }
  return groups;
}

template <class Cache>
ShadowField propagate(const OccupancyGrid& occ, const Vec3& light_world, const FieldExtents& extents,
                      const Cache& cache, const UpdateOptions& options) {
  const GridGeometry& global = occ.geometry();
  const Index3 light_global = global.world_to_index(light_world);
  if (!light_world.allFinite() || !global.contains(light_global)) {
    throw std::out_of_range("light position lies outside the occupancy grid");
  }
  for (int a = 0; a < 3; ++a) {
    if (extents.positive[a] < 0 || extents.negative[a] < 0) {
      throw std::invalid_argument("field extents must be nonnegative");
    }
  }
  const Index3 reach = extents.max_reach();
  const Index3 cache_extents = cache.extents();
  if (reach.x > cache_extents.x || reach.y > cache_extents.y || reach.z > cache_extents.z) {
    throw std::out_of_range("field extents exceed the weight cache extents");
  }

  GridGeometry geometry;
  geometry.dims = extents.dims();
  geometry.resolution = global.resolution;
  geometry.origin = global.index_to_world(light_global - extents.negative);

  PropagationContext ctx;
  ctx.occ = &occ;
  ctx.field_geometry = geometry;
  ctx.light_local = extents.negative;
  ctx.light_global = light_global;
  ctx.threshold = static_cast<float>(options.threshold);

  std::vector<float> values(geometry.cell_count(), 1.0f);
  ctx.field = values.data();

  const float light_p = occ.at(light_global);
  if (light_p > ctx.threshold) values[geometry.linear_index(ctx.light_local)] = 1.0f - light_p;

  const unsigned threads = options.threads == 0 ? default_thread_count() : options.threads;
  for (const auto& group : build_regions(extents)) {
    const std::size_t workers = std::min<std::size_t>(threads, group.size());
    if (workers <= 1) {
      for (const Region& r : group) propagate_region(ctx, r, cache);
      continue;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < group.size(); i += workers) propagate_region(ctx, group[i], cache);
      });
    }
  }

  return ShadowField(geometry, ctx.light_local, light_global, options.threshold, std::move(values));
}

}  // namespace

FieldExtents FieldExtents::covering(const GridGeometry& grid, Index3 light_index) {
  FieldExtents e;
  for (int a = 0; a < 3; ++a) {
    e.negative[a] = std::max(0, light_index[a]);
    e.positive[a] = std::max(0, grid.dims[a] - 1 - light_index[a]);
  }
  return e;
}

Index3 FieldExtents::max_reach() const {
  return {std::max(positive.x, negative.x), std::max(positive.y, negative.y), std::max(positive.z, negative.z)};
}

Index3 FieldExtents::dims() const {
  return {positive.x + negative.x + 1, positive.y + negative.y + 1, positive.z + negative.z + 1};
}

unsigned default_thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SHADOWFIELD_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

ShadowField::ShadowField(const GridGeometry& geometry, Index3 light_local, Index3 light_global, double threshold,
                         std::vector<float> values)
    : geometry_(geometry),
      light_local_(light_local),
      light_global_(light_global),
      threshold_(threshold),
      values_(std::move(values)) {
  geometry_.validate();
  if (values_.size() != geometry_.cell_count()) throw std::invalid_argument("field value count mismatch");
  if (!geometry_.contains(light_local_)) throw std::invalid_argument("light index outside field");
}

FieldExtents ShadowField::extents() const {
  FieldExtents e;
  e.negative = light_local_;
  e.positive = geometry_.dims - light_local_ - Index3{1, 1, 1};
  return e;
}

FieldSample ShadowField::sample_with_gradient(const Vec3& p) const {
  const Vec3 c = geometry_.continuous_index(p);
  std::array<int, 3> base{};
  std::array<double, 3> t{};
  std::array<bool, 3> varies{};  // axis contributes to the gradient
  std::array<int, 3> span{};     // 1 on single-cell axes, else 2
  for (int a = 0; a < 3; ++a) {
    const int n = geometry_.dims[a];
    if (n == 1) {
      base[a] = 0;
      t[a] = 0.0;
      varies[a] = false;
      span[a] = 1;
      continue;
    }
    span[a] = 2;
    double u = c[a];
    // Absorb round-off from world <-> index conversion so cell centers are exact.
    if (const double r = std::round(u); std::abs(u - r) < 1e-9) u = r;
    varies[a] = true;
    if (!(u >= 0.0)) {
      u = 0.0;
      varies[a] = false;
    } else if (u > n - 1) {
      u = n - 1;
      varies[a] = false;
    }
    base[a] = std::min(static_cast<int>(std::floor(u)), n - 2);
    t[a] = u - base[a];
  }

  FieldSample out;
  out.value = 0.0;
  for (int bz = 0; bz < span[2]; ++bz) {
    for (int by = 0; by < span[1]; ++by) {
      for (int bx = 0; bx < span[0]; ++bx) {
        const std::array<int, 3> bit{bx, by, bz};
        const double v = at({base[0] + bx, base[1] + by, base[2] + bz});
        std::array<double, 3> f{};
        std::array<double, 3> df{};
        for (int a = 0; a < 3; ++a) {
          if (span[a] == 1) {
            f[a] = 1.0;
            df[a] = 0.0;
          } else {
            f[a] = bit[a] ? t[a] : 1.0 - t[a];
            df[a] = bit[a] ? 1.0 : -1.0;
          }
        }
        out.value += f[0] * f[1] * f[2] * v;
        out.gradient.x() += df[0] * f[1] * f[2] * v;
        out.gradient.y() += f[0] * df[1] * f[2] * v;
        out.gradient.z() += f[0] * f[1] * df[2] * v;
      }
    }
  }
  for (int a = 0; a < 3; ++a) {
    out.gradient[a] = varies[a] ? out.gradient[a] * geometry_.resolution : 0.0;
  }
  return out;
}

double ShadowField::sample(const Vec3& p) const { return sample_with_gradient(p).value; }

Vec3 ShadowField::gradient(const Vec3& p) const { return sample_with_gradient(p).gradient; }

FieldSlice ShadowField::slice(Axis axis, double world_level) const {
  const int a = static_cast<int>(axis);
  const double c = (world_level - geometry_.origin[a]) * geometry_.resolution;
  const double k = std::floor(c + 0.5);
  if (!std::isfinite(c) || k < 0 || k > geometry_.dims[a] - 1) {
    throw std::out_of_range(std::string("slice level outside the field along ") + axis_name(axis));
  }
  const int u = a == 0 ? 1 : 0;
  const int v = a == 2 ? 1 : 2;

  FieldSlice s;
  s.u_axis = static_cast<Axis>(u);
  s.v_axis = static_cast<Axis>(v);
  s.width = geometry_.dims[u];
  s.height = geometry_.dims[v];
  s.resolution = geometry_.resolution;
  s.origin_u = geometry_.origin[u];
  s.origin_v = geometry_.origin[v];
  s.values.resize(static_cast<std::size_t>(s.width) * s.height);
  Index3 idx;
  idx[a] = static_cast<int>(k);
  for (int j = 0; j < s.height; ++j) {
    for (int i = 0; i < s.width; ++i) {
      idx[u] = i;
      idx[v] = j;
      s.values[static_cast<std::size_t>(j) * s.width + i] = at(idx);
    }
  }
  return s;
}

ShadowField update_shadow_field(const OccupancyGrid& occ, const Vec3& light_world, const FieldExtents& extents,
                                const WeightCache3D& cache, const UpdateOptions& options) {
  return propagate(occ, light_world, extents, cache, options);
}

ShadowField update_shadow_field_2d(const OccupancyGrid& occ, const Vec3& light_world, const FieldExtents& extents,
                                   const WeightCache2D& cache, const UpdateOptions& options) {
  if (extents.positive.z != 0 || extents.negative.z != 0) {
    throw std::invalid_argument("2D field update requires zero z extents");
  }
  return propagate(occ, light_world, extents, cache, options);
}

StorageReport storage_report(const ShadowField& field, const WeightCache3D& cache) {
  StorageReport r;
  r.field_values = field.values().size();
  r.weight_values_resident = cache.stored_values();
  const GridGeometry& g = field.geometry();
  const Index3 light = field.light_local();
  for (int z = 0; z < g.dims.z; ++z) {
    for (int y = 0; y < g.dims.y; ++y) {
      for (int x = 0; x < g.dims.x; ++x) {
        if (cache.covers(Index3{x, y, z} - light)) r.weight_values_expanded += 3;
      }
    }
  }
  return r;
}

void FieldPublisher::publish(ShadowField field) {
  auto next = std::make_shared<const ShadowField>(std::move(field));
  std::lock_guard lock(mutex_);
  current_ = std::move(next);
}

std::shared_ptr<const ShadowField> FieldPublisher::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

void save_field(const ShadowField& field, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.magic({kFieldMagic, 4});
  detail::write_geometry_header(w, field.geometry());
  for (int a = 0; a < 3; ++a) w.u32(static_cast<std::uint32_t>(field.light_local()[a]));
  for (int a = 0; a < 3; ++a) w.u32(static_cast<std::uint32_t>(field.light_global()[a]));
  w.f64(field.threshold());
  w.f32_array(field.values());
  w.write_to(path);
}

ShadowField load_field(const std::filesystem::path& path) {
  auto r = detail::ByteReader::from_file(path);
  r.expect_magic({kFieldMagic, 4});
  const GridGeometry g = detail::read_geometry_header(r);
  Index3 local;
  Index3 global;
  for (int a = 0; a < 3; ++a) local[a] = static_cast<int>(r.u32());
  for (int a = 0; a < 3; ++a) global[a] = static_cast<int>(r.u32());
  if (!g.contains(local)) throw FormatError(r.source() + ": light index outside field");
  const double threshold = r.f64();
  if (r.remaining() / 4 < g.cell_count()) {
    throw FormatError(r.source() + ": payload holds " + std::to_string(r.remaining() / 4) + " values, expected " +
                      std::to_string(g.cell_count()));
  }
  std::vector<float> values(g.cell_count());
  r.f32_array(values);
  for (float v : values) {
    if (!(v >= 0.0f && v <= 1.0f)) throw FormatError(r.source() + ": field value outside [0,1]");
  }
  return ShadowField(g, local, global, threshold, std::move(values));
}

void write_pgm(const FieldSlice& slice, const std::filesystem::path& path, std::span<const std::string> comments) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << "P5\n";
  for (const std::string& c : comments) out << "# " << c << '\n';
  out << slice.width << ' ' << slice.height << "\n255\n";
  std::vector<unsigned char> pixels(slice.values.size());
  std::transform(slice.values.begin(), slice.values.end(), pixels.begin(), [](float v) {
    return static_cast<unsigned char>(std::lround(255.0 * std::clamp(static_cast<double>(v), 0.0, 1.0)));
  });
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

}  // namespace shadowfield
