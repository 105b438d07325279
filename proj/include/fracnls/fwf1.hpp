#pragma once

// FWF1 binary field files.
//
// Layout (little-endian): "FWF1", u32 n, u32 N, f64 L, f64 s, then N^n
// interleaved (re, im) f64 pairs in row-major order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracnls/grid.hpp"

namespace fracnls {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StoredField {
  Field field;
  double order;  // fractional order s recorded with the field
};

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void put_f64(std::vector<unsigned char>& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

inline std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline std::vector<unsigned char> encode_fwf1(const Field& f, double order) {
  const auto& spec = f.spec();
  std::vector<unsigned char> out;
  out.reserve(28 + 16 * f.size());
  for (char c : {'F', 'W', 'F', '1'}) out.push_back(static_cast<unsigned char>(c));
  detail::put_u32(out, std::uint32_t(spec.dimension()));
  detail::put_u32(out, std::uint32_t(spec.points()));
  detail::put_f64(out, spec.half_width());
  detail::put_f64(out, order);
  for (auto z : f.values()) {
    detail::put_f64(out, z.real());
    detail::put_f64(out, z.imag());
  }
  return out;
}

inline StoredField decode_fwf1(const std::vector<unsigned char>& bytes) {
  constexpr std::size_t header = 4 + 4 + 4 + 8 + 8;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "FWF1", 4) != 0)
    throw FormatError("FWF1: bad magic");
  if (bytes.size() < header) throw FormatError("FWF1: truncated header");
  const unsigned char* p = bytes.data() + 4;
  auto n = std::uint32_t(detail::get_le(p, 4));
  auto N = std::uint32_t(detail::get_le(p + 4, 4));
  double L = std::bit_cast<double>(detail::get_le(p + 8, 8));
  double s = std::bit_cast<double>(detail::get_le(p + 16, 8));
  if (n < 1 || n > 2 || N > (1u << 16)) throw FormatError("FWF1: unsupported grid header");
  GridSpec spec = [&] {
    try {
      return GridSpec(int(n), int(N), L);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("FWF1: invalid grid: ") + e.what());
    }
  }();
  const std::size_t expected = header + 16 * spec.size();
  if (bytes.size() < expected) throw FormatError("FWF1: truncated payload");
  if (bytes.size() > expected) throw FormatError("FWF1: trailing bytes after payload");
  std::vector<cplx> values(spec.size());
  const unsigned char* q = bytes.data() + header;
  for (std::size_t i = 0; i < values.size(); ++i, q += 16) {
    values[i] = {std::bit_cast<double>(detail::get_le(q, 8)), std::bit_cast<double>(detail::get_le(q + 8, 8))};
  }
  try {
    return {Field(spec, std::move(values)), s};
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("FWF1: ") + e.what());
  }
}

inline void write_fwf1(const std::string& path, const Field& f, double order) {
  auto bytes = encode_fwf1(f, order);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!os) throw std::ios_base::failure("write failed: " + path);
}

inline StoredField read_fwf1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::ios_base::failure("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_fwf1(bytes);
}

}  // namespace fracnls
