#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace ecc {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid dimensions. 2D images are carried as 3D with w2 == 1; axis 0 is the
// most significant axis of the row-major layout.
struct Dims {
  std::uint64_t w0 = 1;
  std::uint64_t w1 = 1;
  std::uint64_t w2 = 1;

  std::uint64_t voxel_count() const { return w0 * w1 * w2; }
  bool is_2d() const { return w2 == 1; }
  bool operator==(const Dims&) const = default;

  std::string to_string() const {
    return std::to_string(w0) + "x" + std::to_string(w1) + "x" +
           std::to_string(w2);
  }
};

using Coord = std::array<std::uint64_t, 3>;

inline std::uint64_t linear_index(const Coord& c, const Dims& d) {
  if (c[0] >= d.w0 || c[1] >= d.w1 || c[2] >= d.w2)
    throw error("coordinate (" + std::to_string(c[0]) + "," +
                std::to_string(c[1]) + "," + std::to_string(c[2]) +
                ") out of range for dims " + d.to_string());
  return (c[0] * d.w1 + c[1]) * d.w2 + c[2];
}

enum class ValueKind { u8, f32 };

inline const char* to_string(ValueKind k) {
  return k == ValueKind::u8 ? "u8" : "f32";
}

// Per-value-type configuration. The extended domain must be able to hold the
// collar sentinel, which compares strictly greater than every finite value.
template <class T>
struct value_traits;

template <>
struct value_traits<std::uint8_t> {
  using extended = std::int16_t;
  static constexpr extended sentinel = 256;
  static constexpr ValueKind kind = ValueKind::u8;
};

template <>
struct value_traits<float> {
  using extended = float;
  static constexpr float sentinel = std::numeric_limits<float>::infinity();
  static constexpr ValueKind kind = ValueKind::f32;
};

}  // namespace ecc
