#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ecc/chunk.hpp"
#include "ecc/common.hpp"

namespace ecc {

// Maps grayscale values to dense histogram bins. For floats this is a binary
// search over the sorted unique values of a chunk; for 8-bit data the bin is
// the value itself (256 implicit bins), with occupancy tracked on the side so
// the merge step only touches values that actually occur.
template <class T>
class ValueIndex;

template <>
class ValueIndex<float> {
 public:
  static ValueIndex build(std::span<const float> values) {
    if (values.empty()) throw error("cannot build a value index: empty input");
    std::vector<float> v(values.begin(), values.end());
    for (float x : v)
      if (std::isnan(x)) throw error("cannot build a value index: NaN input");
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return from_sorted_unique(std::move(v));
  }

  static ValueIndex from_sorted_unique(std::vector<float> sorted) {
    ValueIndex idx;
    idx.values_ = std::move(sorted);
    return idx;
  }

  std::size_t bin_count() const { return values_.size(); }

  std::size_t bin_of(float v) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), v);
    if (it == values_.end() || *it != v)
      throw error("value not present in index (internal consistency bug)");
    return static_cast<std::size_t>(it - values_.begin());
  }

  // Distinct values, ascending; entry b is the value of bin b.
  std::span<const float> distinct_values() const { return values_; }

  float value_of_bin(std::size_t b) const { return values_[b]; }

 private:
  std::vector<float> values_;
};

template <>
class ValueIndex<std::uint8_t> {
 public:
  static ValueIndex build(std::span<const std::uint8_t> values) {
    if (values.empty()) throw error("cannot build a value index: empty input");
    ValueIndex idx;
    std::array<bool, 256> seen{};
    for (std::uint8_t v : values) seen[v] = true;
    for (int v = 0; v < 256; ++v)
      if (seen[v]) idx.occurring_.push_back(static_cast<std::uint8_t>(v));
    return idx;
  }

  std::size_t bin_count() const { return 256; }
  std::size_t bin_of(std::uint8_t v) const { return v; }

  // Distinct occurring values, ascending. Bin of value v is v itself.
  std::span<const std::uint8_t> distinct_values() const { return occurring_; }

  std::uint8_t value_of_bin(std::size_t b) const {
    return static_cast<std::uint8_t>(b);
  }

 private:
  std::vector<std::uint8_t> occurring_;
};

template <class T>
ValueIndex<T> build_index(std::span<const T> values) {
  return ValueIndex<T>::build(values);
}

namespace detail {

// Order-preserving map from finite floats to uint32 (no NaN by invariant).
inline std::uint32_t float_order_key(float f) {
  auto u = std::bit_cast<std::uint32_t>(f);
  if (u == 0x80000000u) u = 0;  // -0.0 and +0.0 compare equal, share a bin
  return (u & 0x80000000u) ? ~u : (u | 0x80000000u);
}

// Inverse of float_order_key (with -0.0 canonicalized to +0.0).
inline float float_from_order_key(std::uint32_t k) {
  const std::uint32_t u = (k & 0x80000000u) ? (k & 0x7FFFFFFFu) : ~k;
  return std::bit_cast<float>(u);
}

// LSD radix sort of packed (key << 32 | position) records by key.
inline void radix_sort_keyed(std::vector<std::uint64_t>& a) {
  const std::size_t n = a.size();
  if (n < 2) return;
  std::array<std::array<std::uint32_t, 256>, 4> hist{};
  for (std::uint64_t rec : a) {
    const std::uint32_t key = static_cast<std::uint32_t>(rec >> 32);
    ++hist[0][key & 0xff];
    ++hist[1][(key >> 8) & 0xff];
    ++hist[2][(key >> 16) & 0xff];
    ++hist[3][key >> 24];
  }
  std::vector<std::uint64_t> tmp(n);
  std::uint64_t* src = a.data();
  std::uint64_t* dst = tmp.data();
  for (int pass = 0; pass < 4; ++pass) {
    auto& h = hist[pass];
    // skip passes where all keys share the byte
    bool trivial = false;
    for (int b = 0; b < 256; ++b)
      if (h[b] == n) {
        trivial = true;
        break;
      }
    if (trivial) continue;
    std::array<std::uint64_t, 256> offset{};
    std::uint64_t sum = 0;
    for (int b = 0; b < 256; ++b) {
      offset[b] = sum;
      sum += h[b];
    }
    const int shift = 32 + 8 * pass;
    for (std::size_t i = 0; i < n; ++i)
      dst[offset[(src[i] >> shift) & 0xff]++] = src[i];
    std::swap(src, dst);
  }
  if (src != a.data()) std::copy(src, src + n, a.data());
}

}  // namespace detail

// Per-chunk index plus the chunk-local VCEC counts, one per bin. Aggregating
// while the radix argsort output is walked in value order replaces a random
// scatter into a bin_count-sized histogram with sequential writes; bin_of
// remains the reference mapping.
struct IndexedCounts {
  ValueIndex<float> index;
  std::vector<std::int64_t> counts;
};

// `changes` holds the per-voxel Euler characteristic change in owned
// row-major order (one entry per owned voxel of the chunk).
inline IndexedCounts build_index_counts(const PaddedChunk<float>& chunk,
                                        std::span<const std::int8_t> changes) {
  const Dims& d = chunk.image_dims();
  const std::uint64_t n = chunk.owned_voxels();
  if (changes.size() != n)
    throw error("change buffer does not match the chunk's owned voxel count");
  if (n > 0xFFFFFFFFull)
    throw error("chunk exceeds 2^32 voxels; use a finer chunk plan");
  std::vector<std::uint64_t> recs(n);
  {
    std::uint64_t idx = 0;
    for (std::uint64_t i = 0; i < chunk.owned_len(); ++i)
      for (std::uint64_t j = 0; j < d.w1; ++j) {
        const float* p = chunk.owned_ptr(i, j, 0);
        for (std::uint64_t k = 0; k < d.w2; ++k, ++idx)
          recs[idx] =
              (static_cast<std::uint64_t>(detail::float_order_key(p[k]))
               << 32) |
              idx;
      }
  }
  detail::radix_sort_keyed(recs);

  IndexedCounts out;
  std::vector<float> unique;
  std::uint32_t prev_key = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t key = static_cast<std::uint32_t>(recs[i] >> 32);
    const std::uint32_t pos = static_cast<std::uint32_t>(recs[i]);
    if (i == 0 || key != prev_key) {
      unique.push_back(detail::float_from_order_key(key));
      out.counts.push_back(0);
      prev_key = key;
    }
    out.counts.back() += changes[pos];
  }
  out.index = ValueIndex<float>::from_sorted_unique(std::move(unique));
  return out;
}

}  // namespace ecc
