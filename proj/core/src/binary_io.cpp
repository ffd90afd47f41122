#include "binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace shadowfield::detail {
namespace {

template <class UInt>
void put_le(std::vector<unsigned char>& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
  }
}

template <class UInt>
UInt get_le(const unsigned char* p) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    v |= static_cast<UInt>(p[i]) << (8 * i);
  }
  return v;
}

}  // namespace

void ByteWriter::magic(std::string_view tag) { bytes_.insert(bytes_.end(), tag.begin(), tag.end()); }

void ByteWriter::u32(std::uint32_t v) { put_le(bytes_, v); }

void ByteWriter::f32(float v) { put_le(bytes_, std::bit_cast<std::uint32_t>(v)); }

void ByteWriter::f64(double v) { put_le(bytes_, std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::f32_array(std::span<const float> values) {
  bytes_.reserve(bytes_.size() + 4 * values.size());
  for (float v : values) f32(v);
}

void ByteWriter::write_to(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

ByteReader::ByteReader(std::vector<unsigned char> bytes, std::string source)
    : bytes_(std::move(bytes)), source_(std::move(source)) {}

ByteReader ByteReader::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ByteReader(std::move(bytes), path.string());
}

void ByteReader::need(std::size_t n, const char* what) const {
  if (remaining() < n) {
    throw FormatError(source_ + ": truncated while reading " + what);
  }
}

void ByteReader::expect_magic(std::string_view tag) {
  need(tag.size(), "magic");
  if (std::memcmp(bytes_.data() + pos_, tag.data(), tag.size()) != 0) {
    throw FormatError(source_ + ": bad magic (expected \"" + std::string(tag) + "\")");
  }
  pos_ += tag.size();
}

std::uint32_t ByteReader::u32() {
  need(4, "u32");
  const auto v = get_le<std::uint32_t>(bytes_.data() + pos_);
  pos_ += 4;
  return v;
}

float ByteReader::f32() {
  need(4, "f32");
  const auto v = std::bit_cast<float>(get_le<std::uint32_t>(bytes_.data() + pos_));
  pos_ += 4;
  return v;
}

double ByteReader::f64() {
  need(8, "f64");
  const auto v = std::bit_cast<double>(get_le<std::uint64_t>(bytes_.data() + pos_));
  pos_ += 8;
  return v;
}

void ByteReader::f32_array(std::span<float> out) {
  if (remaining() / 4 < out.size()) {
    throw FormatError(source_ + ": payload holds " + std::to_string(remaining() / 4) + " values, expected " +
                      std::to_string(out.size()));
  }
  for (float& v : out) v = f32();
}

}  // namespace shadowfield::detail
