#pragma once

// Little-endian encode/decode helpers shared by the grid, field and weight
// cache file formats.

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shadowfield/geometry.hpp"
#include "shadowfield/io_error.hpp"

namespace shadowfield::detail {

class ByteWriter {
 public:
  void magic(std::string_view tag);
  void u32(std::uint32_t v);
  void f32(float v);
  void f64(double v);
  void f32_array(std::span<const float> values);

  const std::vector<unsigned char>& bytes() const { return bytes_; }
  void write_to(const std::filesystem::path& path) const;

 private:
  std::vector<unsigned char> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::vector<unsigned char> bytes, std::string source);
  static ByteReader from_file(const std::filesystem::path& path);

  void expect_magic(std::string_view tag);
  std::uint32_t u32();
  float f32();
  double f64();
  void f32_array(std::span<float> out);
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::string& source() const { return source_; }

 private:
  void need(std::size_t n, const char* what) const;

  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
  std::string source_;
};

// Geometry block common to the grid and field formats:
// u32 n_x, n_y, n_z, f64 resolution, f64 origin x/y/z.
void write_geometry_header(ByteWriter& w, const GridGeometry& g);
GridGeometry read_geometry_header(ByteReader& r);

}  // namespace shadowfield::detail
