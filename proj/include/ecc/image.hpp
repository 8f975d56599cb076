#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "ecc/common.hpp"

namespace ecc {

// Dense row-major voxel grid. Immutable after load by convention; safe to
// share across workers by reference.
template <class T>
struct Image {
  Dims dims;
  std::vector<T> values;

  T at(const Coord& c) const { return values[linear_index(c, dims)]; }
};

struct RawOptions {
  bool big_endian = false;  // F32 files are little-endian unless flagged
};

namespace detail {

inline float byteswap_f32(float v) {
  auto u = std::bit_cast<std::uint32_t>(v);
  u = __builtin_bswap32(u);
  return std::bit_cast<float>(u);
}

template <class T>
inline void fixup_loaded(T* data, std::uint64_t count, std::uint64_t base_index,
                         const RawOptions& opt) {
  if constexpr (std::is_same_v<T, float>) {
    if (opt.big_endian)
      for (std::uint64_t i = 0; i < count; ++i) data[i] = byteswap_f32(data[i]);
    for (std::uint64_t i = 0; i < count; ++i)
      if (std::isnan(data[i]))
        throw error("NaN value at linear index " +
                    std::to_string(base_index + i));
  } else {
    (void)data, (void)count, (void)base_index, (void)opt;
  }
}

}  // namespace detail

template <class T>
Image<T> load_raw(const std::string& path, const Dims& dims,
                  const RawOptions& opt = {}) {
  const std::uint64_t expected = dims.voxel_count() * sizeof(T);
  std::error_code ec;
  const auto actual = std::filesystem::file_size(path, ec);
  if (ec) throw error("cannot stat '" + path + "': " + ec.message());
  if (actual != expected)
    throw error("size mismatch for '" + path + "': expected " +
                std::to_string(expected) + " bytes for dims " +
                dims.to_string() + ", found " + std::to_string(actual));

  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open '" + path + "'");
  Image<T> img{dims, std::vector<T>(dims.voxel_count())};
  in.read(reinterpret_cast<char*>(img.values.data()),
          static_cast<std::streamsize>(expected));
  if (!in) throw error("short read from '" + path + "'");
  detail::fixup_loaded(img.values.data(), img.values.size(), 0, opt);
  return img;
}

template <class T>
void write_raw(const Image<T>& img, const std::string& path,
               const RawOptions& opt = {}) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot open '" + path + "' for writing");
  if constexpr (std::is_same_v<T, float>) {
    if (opt.big_endian) {
      for (float v : img.values) {
        const float s = detail::byteswap_f32(v);
        out.write(reinterpret_cast<const char*>(&s), sizeof(s));
      }
      if (!out) throw error("write failure on '" + path + "'");
      return;
    }
  }
  out.write(reinterpret_cast<const char*>(img.values.data()),
            static_cast<std::streamsize>(img.values.size() * sizeof(T)));
  if (!out) throw error("write failure on '" + path + "'");
}

// Sidecar metadata: a "<volume>.meta" file with one line "w0 w1 w2 dtype".
struct SidecarMeta {
  Dims dims;
  ValueKind kind = ValueKind::f32;
};

inline std::string sidecar_path(const std::string& volume_path) {
  return volume_path + ".meta";
}

inline std::optional<SidecarMeta> read_sidecar(const std::string& volume_path) {
  std::ifstream in(sidecar_path(volume_path));
  if (!in) return std::nullopt;
  SidecarMeta meta;
  std::string dtype;
  if (!(in >> meta.dims.w0 >> meta.dims.w1 >> meta.dims.w2 >> dtype))
    throw error("malformed sidecar '" + sidecar_path(volume_path) +
                "', expected 'w0 w1 w2 dtype'");
  if (dtype == "u8")
    meta.kind = ValueKind::u8;
  else if (dtype == "f32")
    meta.kind = ValueKind::f32;
  else
    throw error("unknown dtype '" + dtype + "' in sidecar");
  if (meta.dims.w0 < 1 || meta.dims.w1 < 1 || meta.dims.w2 < 1)
    throw error("sidecar dims must be >= 1");
  return meta;
}

inline void write_sidecar(const std::string& volume_path,
                          const SidecarMeta& meta) {
  std::ofstream out(sidecar_path(volume_path), std::ios::trunc);
  if (!out) throw error("cannot write sidecar for '" + volume_path + "'");
  out << meta.dims.w0 << ' ' << meta.dims.w1 << ' ' << meta.dims.w2 << ' '
      << to_string(meta.kind) << '\n';
}

}  // namespace ecc
