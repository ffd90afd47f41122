#include "shadowfield/shadow_weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

#include "binary_io.hpp"

namespace shadowfield {
namespace {

constexpr char kWeightMagic[] = "SFW1";

// Weights are snapped to multiples of 2^-40 so that r + b + g == 1 holds
// exactly in double arithmetic; the free-space identity F == 1 depends on it.
constexpr double kQuantum = 0x1p-40;

double quantize(double w) { return std::round(w / kQuantum) * kQuantum; }

WeightTriple normalized_triple(double r, double b, double g) {
  const double s = r + b + g;
  WeightTriple w;
  w.r = quantize(r / s);
  w.b = quantize(b / s);
  w.g = 1.0 - w.r - w.b;
  if (w.g < 0.0) {
    w.b = 1.0 - w.r;
    w.g = 0.0;
  }
  return w;
}

WeightPair normalized_pair(double x, double y) {
  WeightPair w;
  w.x = quantize(x / (x + y));
  w.y = 1.0 - w.x;
  return w;
}

void require_extent(int e, const char* axis) {
  if (e < 1) throw std::invalid_argument(std::string("weight cache extent along ") + axis + " must be >= 1");
}

WeightTriple entry_3d(int x, int y, int z) {
  const int nonzero = (x != 0) + (y != 0) + (z != 0);
  switch (nonzero) {
    case 0:
      return {};
    case 1:
      return {x != 0 ? 1.0 : 0.0, y != 0 ? 1.0 : 0.0, z != 0 ? 1.0 : 0.0};
    case 2: {
      if (z == 0) {
        const WeightPair p = complementary_ratio_weights(x, y);
        return {p.x, p.y, 0.0};
      }
      if (y == 0) {
        const WeightPair p = complementary_ratio_weights(x, z);
        return {p.x, 0.0, p.y};
      }
      const WeightPair p = complementary_ratio_weights(y, z);
      return {0.0, p.x, p.y};
    }
    default:
      return angular_weights(x, y, z);
  }
}

WeightPair entry_2d(int x, int y) {
  if (x == 0 && y == 0) return {};
  if (y == 0) return {1.0, 0.0};
  if (x == 0) return {0.0, 1.0};
  return complementary_ratio_weights(x, y);
}

}  // namespace

WeightPair complementary_ratio_weights(int a, int b) {
  if (a < 1 || b < 1) throw std::invalid_argument("complementary ratio weights need a strictly positive offset");
  const double da = a;
  const double db = b;
  // Angle between the diagonal through the queried corner (a, b) and the rays
  // through (a+1, b) and (a, b+1) respectively.
  const double to_shifted_a = std::atan2(db, da * (da + 1.0) + db * db);
  const double to_shifted_b = std::atan2(da, da * da + db * (db + 1.0));
  // The a-predecessor's share grows with the angle on the far (b) side.
  return normalized_pair(to_shifted_b, to_shifted_a);
}

WeightTriple angular_weights(int x, int y, int z) {
  if (x < 1 || y < 1 || z < 1) throw std::invalid_argument("angular weights need a strictly positive offset");
  const Vec3 vm(x, y, z);
  const Vec3 vx = vm + Vec3::UnitX();
  const Vec3 vy = vm + Vec3::UnitY();
  const Vec3 vz = vm + Vec3::UnitZ();

  const Vec3 n_xy = vy.cross(vx);
  const Vec3 n_xz = vx.cross(vz);
  const Vec3 n_yz = vz.cross(vy);

  const auto plane_angle = [&vm](const Vec3& n) {
    const double s = vm.dot(n) / (vm.norm() * n.norm());
    return std::abs(std::asin(std::clamp(s, -1.0, 1.0)));
  };
  const double a_xy = plane_angle(n_xy);
  const double a_xz = plane_angle(n_xz);
  const double a_yz = plane_angle(n_yz);
  return normalized_triple(a_yz, a_xz, a_xy);
}

WeightCache3D::WeightCache3D(Index3 extents) : extents_(extents) {
  require_extent(extents.x, "x");
  require_extent(extents.y, "y");
  require_extent(extents.z, "z");
  entries_.resize(static_cast<std::size_t>(extents.x + 1) * static_cast<std::size_t>(extents.y + 1) *
                  static_cast<std::size_t>(extents.z + 1));
  std::size_t i = 0;
  for (int z = 0; z <= extents.z; ++z) {
    for (int y = 0; y <= extents.y; ++y) {
      for (int x = 0; x <= extents.x; ++x) entries_[i++] = entry_3d(x, y, z);
    }
  }
}

WeightCache3D::WeightCache3D(Index3 extents, std::vector<WeightTriple> entries)
    : extents_(extents), entries_(std::move(entries)) {}

bool WeightCache3D::covers(Index3 offset) const {
  return std::abs(offset.x) <= extents_.x && std::abs(offset.y) <= extents_.y && std::abs(offset.z) <= extents_.z;
}

const WeightTriple& WeightCache3D::at(Index3 offset) const {
  if (!covers(offset)) throw std::out_of_range("offset outside weight cache extents");
  return row(std::abs(offset.y), std::abs(offset.z))[std::abs(offset.x)];
}

WeightCache2D::WeightCache2D(Index3 extents) : extents_{extents.x, extents.y, 0} {
  require_extent(extents.x, "x");
  require_extent(extents.y, "y");
  entries_.resize(static_cast<std::size_t>(extents.x + 1) * static_cast<std::size_t>(extents.y + 1));
  std::size_t i = 0;
  for (int y = 0; y <= extents.y; ++y) {
    for (int x = 0; x <= extents.x; ++x) entries_[i++] = entry_2d(x, y);
  }
}

bool WeightCache2D::covers(Index3 offset) const {
  return std::abs(offset.x) <= extents_.x && std::abs(offset.y) <= extents_.y && offset.z == 0;
}

const WeightPair& WeightCache2D::at(Index3 offset) const {
  if (!covers(offset)) throw std::out_of_range("offset outside weight cache extents");
  return row(std::abs(offset.y), 0)[std::abs(offset.x)];
}

void save_weights(const WeightCache3D& cache, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.magic({kWeightMagic, 4});
  const Index3 e = cache.extents();
  w.u32(static_cast<std::uint32_t>(e.x));
  w.u32(static_cast<std::uint32_t>(e.y));
  w.u32(static_cast<std::uint32_t>(e.z));
  for (const WeightTriple& t : cache.entries()) {
    w.f32(static_cast<float>(t.r));
    w.f32(static_cast<float>(t.b));
    w.f32(static_cast<float>(t.g));
  }
  w.write_to(path);
}

WeightCache3D load_weights(const std::filesystem::path& path) {
  auto r = detail::ByteReader::from_file(path);
  r.expect_magic({kWeightMagic, 4});
  Index3 e;
  for (int a = 0; a < 3; ++a) {
    const std::uint32_t v = r.u32();
    if (v < 1 || v > (1u << 20)) throw FormatError(r.source() + ": invalid weight cache extent");
    e[a] = static_cast<int>(v);
  }
  const std::size_t n = static_cast<std::size_t>(e.x + 1) * (e.y + 1) * (e.z + 1);
  if (r.remaining() / 12 < n) throw FormatError(r.source() + ": truncated weight payload");
  std::vector<WeightTriple> entries(n);
  for (WeightTriple& t : entries) {
    const double wr = r.f32();
    const double wb = r.f32();
    const double wg = r.f32();
    if (!(wr >= 0 && wb >= 0 && wg >= 0)) throw FormatError(r.source() + ": negative or NaN weight");
    t = (wr + wb + wg) == 0.0 ? WeightTriple{} : normalized_triple(wr, wb, wg);
  }
  return WeightCache3D(e, std::move(entries));
}

}  // namespace shadowfield
