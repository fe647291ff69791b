#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "hughes/grid.hpp"

namespace hughes::io {

/// Binary field dump: "GHFD", u32 n, u32 reserved, then n*n little-endian
/// float64 samples in row-major order (y slow, x fast).
namespace detail {

template <class T>
void put_le(std::string& buf, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  buf.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(const char* p) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace detail

inline std::string encode_field(const RealField& field) {
  std::string buf("GHFD");
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(field.grid().n()));
  detail::put_le<std::uint32_t>(buf, 0u);
  buf.reserve(buf.size() + 8 * field.values().size());
  for (double v : field.values()) detail::put_le<double>(buf, v);
  return buf;
}

/// Decodes a dump onto a grid of the given length; the size must match when
/// `expected_n` is positive.
inline RealField decode_field(const std::string& buf, double length, int expected_n = 0) {
  if (buf.size() < 12 || buf.compare(0, 4, "GHFD") != 0) throw DataError("not a GHFD field dump");
  const auto n = detail::get_le<std::uint32_t>(buf.data() + 4);
  if (expected_n > 0 && static_cast<int>(n) != expected_n) {
    throw DataError("field dump has n = " + std::to_string(n) + ", grid expects " + std::to_string(expected_n));
  }
  const std::size_t count = static_cast<std::size_t>(n) * n;
  if (buf.size() != 12 + 8 * count) throw DataError("field dump is truncated or oversized");
  GridSpec grid(static_cast<int>(n), length);
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = detail::get_le<double>(buf.data() + 12 + 8 * i);
  return RealField(grid, std::move(values));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());
  return buf;
}

/// Writes through a temporary sibling and renames over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline void write_field(const std::filesystem::path& path, const RealField& field) {
  write_atomic(path, encode_field(field));
}

inline RealField read_field(const std::filesystem::path& path, double length, int expected_n = 0) {
  return decode_field(read_file(path), length, expected_n);
}

}  // namespace hughes::io
