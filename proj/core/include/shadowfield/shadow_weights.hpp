#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "shadowfield/geometry.hpp"
#include "shadowfield/io_error.hpp"

namespace shadowfield {

/// Share of a cell's visibility inherited from its predecessors one step
/// toward the light along x (r), y (b) and z (g).
struct WeightTriple {
  double r = 0.0;
  double b = 0.0;
  double g = 0.0;

  /// The light cell has no predecessors; it is marked by an all-zero triple.
  bool is_light_cell() const { return r == 0.0 && b == 0.0 && g == 0.0; }
  double sum() const { return r + b + g; }
  friend bool operator==(const WeightTriple&, const WeightTriple&) = default;
};

/// 2D counterpart: shares inherited from the x- and y-predecessor.
struct WeightPair {
  double x = 0.0;
  double y = 0.0;

  bool is_light_cell() const { return x == 0.0 && y == 0.0; }
  double sum() const { return x + y; }
  friend bool operator==(const WeightPair&, const WeightPair&) = default;
};

/// Complementary angle ratios for the 2D offset (a, b), both > 0, with the
/// light at the lattice origin. Returns the shares of the a-predecessor and
/// the b-predecessor, summing to one.
WeightPair complementary_ratio_weights(int a, int b);

/// Angular weights of a strictly positive 3D offset from the three
/// plane-to-diagonal angles (vectors anchored at the light corner, angles
/// taken unsigned).
WeightTriple angular_weights(int x, int y, int z);

/// Environment-independent weight table for one octant, reused for the
/// other seven through componentwise |offset|.
///
/// Offsets on a coordinate plane fall back to the 2D rule on the two
/// nonzero axes and offsets on an axis put the full weight on that axis.
class WeightCache3D {
 public:
  /// Throws std::invalid_argument when an extent is < 1.
  explicit WeightCache3D(Index3 extents);

  Index3 extents() const { return extents_; }

  /// Weights at a signed offset. Throws std::out_of_range beyond the extents.
  const WeightTriple& at(Index3 offset) const;

  /// First-octant entries for fixed (|y|, |z|), indexed by |x| in [0, extents.x].
  const WeightTriple* row(int y, int z) const {
    return entries_.data() + static_cast<std::size_t>(extents_.x + 1) *
                                 (static_cast<std::size_t>(y) + static_cast<std::size_t>(extents_.y + 1) * z);
  }

  std::span<const WeightTriple> entries() const { return entries_; }

  /// Scalars resident in memory (three per stored entry).
  std::size_t stored_values() const { return 3 * entries_.size(); }

  bool covers(Index3 offset) const;

  friend bool operator==(const WeightCache3D&, const WeightCache3D&) = default;

 private:
  friend WeightCache3D load_weights(const std::filesystem::path& path);
  WeightCache3D(Index3 extents, std::vector<WeightTriple> entries);

  Index3 extents_;
  std::vector<WeightTriple> entries_;
};

class WeightCache2D {
 public:
  /// Extents use x and y only. Throws std::invalid_argument when either is < 1.
  explicit WeightCache2D(Index3 extents);

  Index3 extents() const { return extents_; }

  const WeightPair& at(Index3 offset) const;

  const WeightPair* row(int y, int /*z*/) const {
    return entries_.data() + static_cast<std::size_t>(extents_.x + 1) * static_cast<std::size_t>(y);
  }

  std::span<const WeightPair> entries() const { return entries_; }
  std::size_t stored_values() const { return 2 * entries_.size(); }
  bool covers(Index3 offset) const;

 private:
  Index3 extents_;
  std::vector<WeightPair> entries_;
};

inline WeightCache3D init_weights_3d(Index3 extents) { return WeightCache3D(extents); }
inline WeightCache2D init_weights_2d(int extent_x, int extent_y) { return WeightCache2D({extent_x, extent_y, 0}); }

inline const WeightTriple& weights_at(const WeightCache3D& cache, Index3 offset) { return cache.at(offset); }
inline const WeightPair& weights_at(const WeightCache2D& cache, Index3 offset) { return cache.at(offset); }

/// "SFW1" cache file: extents as three u32, then first-octant triples as f32.
/// Loading re-normalizes each triple so that it sums to exactly one.
void save_weights(const WeightCache3D& cache, const std::filesystem::path& path);
WeightCache3D load_weights(const std::filesystem::path& path);

}  // namespace shadowfield
