#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ecc/chunk.hpp"
#include "ecc/common.hpp"
#include "ecc/value_index.hpp"

namespace ecc {

// Offset from a voxel to one of its faces: each component in {-1, 0, +1}.
// The face dimension is d minus the number of nonzero components.
using FaceOffset = std::array<int, 3>;

// True iff the voxel at v + s has a lower row-major index than the voxel at
// v, for every interior voxel v: the first nonzero component (axis 0 first)
// is negative. Ties between equal-valued voxels go to the earlier one.
inline bool earlier(const FaceOffset& s) {
  for (int i = 0; i < 3; ++i) {
    if (s[i] < 0) return true;
    if (s[i] > 0) return false;
  }
  throw error("earlier() requires a nonzero offset");
}

// True iff voxel v introduces the face identified by offset o: v has the
// minimum value over all voxels containing that face, ties broken toward the
// lower row-major index. Collar sentinels never defeat v.
template <class T>
bool introduced(const PaddedChunk<T>& chunk, const Coord& v,
                const FaceOffset& o) {
  const auto c = chunk.value_at(v);
  int nz[3];
  int nnz = 0;
  for (int i = 0; i < 3; ++i)
    if (o[i] != 0) nz[nnz++] = i;
  if (nnz == 0) throw error("introduced() requires a nonzero offset");
  // every nonzero s with s_i in {0, o_i}
  for (int mask = 1; mask < (1 << nnz); ++mask) {
    FaceOffset s{0, 0, 0};
    for (int b = 0; b < nnz; ++b)
      if (mask & (1 << b)) s[nz[b]] = o[nz[b]];
    Coord w = v;
    for (int i = 0; i < 3; ++i) w[i] += static_cast<std::uint64_t>(s[i]);
    const auto nb =
        chunk.at_padded(w[0] - chunk.begin() + 1, w[1] + 1, w[2] + 1);
    if (earlier(s) ? !(c < nb) : !(c <= nb)) return false;
  }
  return true;
}

// Signed change in the Euler characteristic contributed by one owned voxel:
// (-1)^d for the voxel itself plus (-1)^{dim(face)} for each introduced face.
template <class T>
int voxel_contribution(const PaddedChunk<T>& chunk, const Coord& v) {
  const int d = chunk.image_dims().is_2d() ? 2 : 3;
  int contribution = (d == 2) ? 1 : -1;
  const int a2lo = (d == 2) ? 0 : -1;
  const int a2hi = (d == 2) ? 0 : 1;
  for (int a0 = -1; a0 <= 1; ++a0)
    for (int a1 = -1; a1 <= 1; ++a1)
      for (int a2 = a2lo; a2 <= a2hi; ++a2) {
        if (a0 == 0 && a1 == 0 && a2 == 0) continue;
        const FaceOffset o{a0, a1, a2};
        const int nnz = (a0 != 0) + (a1 != 0) + (a2 != 0);
        const int face_dim = d - nnz;
        if (introduced(chunk, v, o))
          contribution += (face_dim % 2 == 0) ? 1 : -1;
      }
  return contribution;
}

namespace detail {

// Unrolled per-voxel change, 2D. p points at the center voxel in padded
// storage; s0/s1 are the padded strides. Minus offsets are earlier in
// row-major order and use strict comparisons, plus offsets non-strict.
template <class E>
inline int change_2d(const E* p, std::ptrdiff_t s0, std::ptrdiff_t s1) {
  const E c = p[0];
  const unsigned am = c < p[-s0];
  const unsigned ap = c <= p[s0];
  const unsigned bm = c < p[-s1];
  const unsigned bp = c <= p[s1];
  unsigned verts = 0;
  verts += am & bm & unsigned(c < p[-s0 - s1]);
  verts += am & bp & unsigned(c < p[-s0 + s1]);
  verts += ap & bm & unsigned(c <= p[s0 - s1]);
  verts += ap & bp & unsigned(c <= p[s0 + s1]);
  return 1 + static_cast<int>(verts) - static_cast<int>(am + ap + bm + bp);
}

// Unrolled per-voxel change, 3D; stride along axis 2 is 1. Edges reuse the
// square comparisons and vertices reuse the edges, so each of the 26
// neighbors is compared against the center exactly once.
template <class E>
inline int change_3d(const E* p, std::ptrdiff_t s0, std::ptrdiff_t s1) {
  const E c = p[0];
  const unsigned xm = c < p[-s0];
  const unsigned xp = c <= p[s0];
  const unsigned ym = c < p[-s1];
  const unsigned yp = c <= p[s1];
  const unsigned zm = c < p[-1];
  const unsigned zp = c <= p[1];

  const unsigned exy_mm = xm & ym & unsigned(c < p[-s0 - s1]);
  const unsigned exy_mp = xm & yp & unsigned(c < p[-s0 + s1]);
  const unsigned exy_pm = xp & ym & unsigned(c <= p[s0 - s1]);
  const unsigned exy_pp = xp & yp & unsigned(c <= p[s0 + s1]);
  const unsigned exz_mm = xm & zm & unsigned(c < p[-s0 - 1]);
  const unsigned exz_mp = xm & zp & unsigned(c < p[-s0 + 1]);
  const unsigned exz_pm = xp & zm & unsigned(c <= p[s0 - 1]);
  const unsigned exz_pp = xp & zp & unsigned(c <= p[s0 + 1]);
  const unsigned eyz_mm = ym & zm & unsigned(c < p[-s1 - 1]);
  const unsigned eyz_mp = ym & zp & unsigned(c < p[-s1 + 1]);
  const unsigned eyz_pm = yp & zm & unsigned(c <= p[s1 - 1]);
  const unsigned eyz_pp = yp & zp & unsigned(c <= p[s1 + 1]);

  unsigned verts = 0;
  verts += exy_mm & exz_mm & eyz_mm & unsigned(c < p[-s0 - s1 - 1]);
  verts += exy_mm & exz_mp & eyz_mp & unsigned(c < p[-s0 - s1 + 1]);
  verts += exy_mp & exz_mm & eyz_pm & unsigned(c < p[-s0 + s1 - 1]);
  verts += exy_mp & exz_mp & eyz_pp & unsigned(c < p[-s0 + s1 + 1]);
  verts += exy_pm & exz_pm & eyz_mm & unsigned(c <= p[s0 - s1 - 1]);
  verts += exy_pm & exz_pp & eyz_mp & unsigned(c <= p[s0 - s1 + 1]);
  verts += exy_pp & exz_pm & eyz_pm & unsigned(c <= p[s0 + s1 - 1]);
  verts += exy_pp & exz_pp & eyz_pp & unsigned(c <= p[s0 + s1 + 1]);

  const unsigned squares = xm + xp + ym + yp + zm + zp;
  const unsigned edges = exy_mm + exy_mp + exy_pm + exy_pp + exz_mm + exz_mp +
                         exz_pm + exz_pp + eyz_mm + eyz_mp + eyz_pm + eyz_pp;
  return -1 + static_cast<int>(squares) - static_cast<int>(edges) +
         static_cast<int>(verts);
}

// Row-oriented form of change_3d: one axis-2 row of `len` voxels starting at
// p, changes written to out. All neighbor accesses are contiguous shifted
// loads, so the loop auto-vectorizes; int32 masks keep the arithmetic in one
// vector width.
template <class E>
void change_row_3d(const E* p, std::ptrdiff_t s0, std::ptrdiff_t s1,
                   std::size_t len, std::int8_t* out) {
  for (std::size_t k = 0; k < len; ++k) {
    const E c = p[k];
    const std::int32_t xm = c < p[k - s0];
    const std::int32_t xp = c <= p[k + s0];
    const std::int32_t ym = c < p[k - s1];
    const std::int32_t yp = c <= p[k + s1];
    const std::int32_t zm = c < p[k - 1];
    const std::int32_t zp = c <= p[k + 1];

    const std::int32_t exy_mm = xm & ym & (std::int32_t)(c < p[k - s0 - s1]);
    const std::int32_t exy_mp = xm & yp & (std::int32_t)(c < p[k - s0 + s1]);
    const std::int32_t exy_pm = xp & ym & (std::int32_t)(c <= p[k + s0 - s1]);
    const std::int32_t exy_pp = xp & yp & (std::int32_t)(c <= p[k + s0 + s1]);
    const std::int32_t exz_mm = xm & zm & (std::int32_t)(c < p[k - s0 - 1]);
    const std::int32_t exz_mp = xm & zp & (std::int32_t)(c < p[k - s0 + 1]);
    const std::int32_t exz_pm = xp & zm & (std::int32_t)(c <= p[k + s0 - 1]);
    const std::int32_t exz_pp = xp & zp & (std::int32_t)(c <= p[k + s0 + 1]);
    const std::int32_t eyz_mm = ym & zm & (std::int32_t)(c < p[k - s1 - 1]);
    const std::int32_t eyz_mp = ym & zp & (std::int32_t)(c < p[k - s1 + 1]);
    const std::int32_t eyz_pm = yp & zm & (std::int32_t)(c <= p[k + s1 - 1]);
    const std::int32_t eyz_pp = yp & zp & (std::int32_t)(c <= p[k + s1 + 1]);

    std::int32_t verts = 0;
    verts += exy_mm & exz_mm & eyz_mm & (std::int32_t)(c < p[k - s0 - s1 - 1]);
    verts += exy_mm & exz_mp & eyz_mp & (std::int32_t)(c < p[k - s0 - s1 + 1]);
    verts += exy_mp & exz_mm & eyz_pm & (std::int32_t)(c < p[k - s0 + s1 - 1]);
    verts += exy_mp & exz_mp & eyz_pp & (std::int32_t)(c < p[k - s0 + s1 + 1]);
    verts +=
        exy_pm & exz_pm & eyz_mm & (std::int32_t)(c <= p[k + s0 - s1 - 1]);
    verts +=
        exy_pm & exz_pp & eyz_mp & (std::int32_t)(c <= p[k + s0 - s1 + 1]);
    verts +=
        exy_pp & exz_pm & eyz_pm & (std::int32_t)(c <= p[k + s0 + s1 - 1]);
    verts +=
        exy_pp & exz_pp & eyz_pp & (std::int32_t)(c <= p[k + s0 + s1 + 1]);

    const std::int32_t squares = xm + xp + ym + yp + zm + zp;
    const std::int32_t edges = exy_mm + exy_mp + exy_pm + exy_pp + exz_mm +
                               exz_mp + exz_pm + exz_pp + eyz_mm + eyz_mp +
                               eyz_pm + eyz_pp;
    out[k] = static_cast<std::int8_t>(-1 + squares - edges + verts);
  }
}

// Invokes f(owned_linear_index, change, center_extended_value) for every
// owned voxel with row index in [row_begin, row_end), relative to the chunk.
// Traversal is axis-2 contiguous so neighbor reads stay in cache lines.
template <class T, class F>
void for_each_change(const PaddedChunk<T>& chunk, std::uint64_t row_begin,
                     std::uint64_t row_end, F&& f) {
  using E = typename value_traits<T>::extended;
  const Dims& d = chunk.image_dims();
  const std::ptrdiff_t s0 = chunk.stride0();
  const std::ptrdiff_t s1 = chunk.stride1();
  const E* base = chunk.data();
  std::uint64_t idx = row_begin * d.w1 * d.w2;
  if (d.is_2d()) {
    for (std::uint64_t i = row_begin; i < row_end; ++i) {
      const E* p = base + (i + 1) * s0 + s1 + 1;
      for (std::uint64_t j = 0; j < d.w1; ++j, p += s1)
        f(idx++, change_2d(p, s0, s1), p[0]);
    }
  } else {
    for (std::uint64_t i = row_begin; i < row_end; ++i)
      for (std::uint64_t j = 0; j < d.w1; ++j) {
        const E* p = base + (i + 1) * s0 + (j + 1) * s1 + 1;
        for (std::uint64_t k = 0; k < d.w2; ++k, ++p)
          f(idx++, change_3d(p, s0, s1), p[0]);
      }
  }
}

template <class T>
T narrow_extended(typename value_traits<T>::extended e) {
  return static_cast<T>(e);
}

}  // namespace detail

using LocalVcec = std::vector<std::int64_t>;

// Chunk-local histogram of Euler characteristic changes, one counter per bin
// of the index. Deterministic: integer addition over a fixed bin layout.
template <class T>
LocalVcec accumulate_chunk(const PaddedChunk<T>& chunk,
                           const ValueIndex<T>& index) {
  LocalVcec counts(index.bin_count(), 0);
  detail::for_each_change(
      chunk, 0, chunk.owned_len(),
      [&](std::uint64_t, int change, typename value_traits<T>::extended c) {
        counts[index.bin_of(detail::narrow_extended<T>(c))] += change;
      });
  return counts;
}

// Fast path: per-voxel changes written sequentially in owned row-major order
// (each fits in int8: [-3, 5] in 2D, [-11, 13] in 3D). Aggregation by value
// happens later, while the index build walks voxels in value order.
template <class T>
void compute_changes(const PaddedChunk<T>& chunk, std::uint64_t row_begin,
                     std::uint64_t row_end, std::span<std::int8_t> changes) {
  std::int8_t* out = changes.data();
  const Dims& d = chunk.image_dims();
  if (!d.is_2d()) {
    using E = typename value_traits<T>::extended;
    const std::ptrdiff_t s0 = chunk.stride0();
    const std::ptrdiff_t s1 = chunk.stride1();
    const E* base = chunk.data();
    std::uint64_t idx = row_begin * d.w1 * d.w2;
    for (std::uint64_t i = row_begin; i < row_end; ++i)
      for (std::uint64_t j = 0; j < d.w1; ++j, idx += d.w2)
        detail::change_row_3d(base + (i + 1) * s0 + (j + 1) * s1 + 1, s0, s1,
                              d.w2, out + idx);
    return;
  }
  detail::for_each_change(chunk, row_begin, row_end,
                          [&](std::uint64_t idx, int change, auto) {
                            out[idx] = static_cast<std::int8_t>(change);
                          });
}

// Fast path for 8-bit data: the center value is the bin.
template <class C>
void accumulate_dense_u8(const PaddedChunk<std::uint8_t>& chunk,
                         std::uint64_t row_begin, std::uint64_t row_end,
                         std::span<C> counts) {
  C* out = counts.data();
  detail::for_each_change(chunk, row_begin, row_end,
                          [&](std::uint64_t, int change, std::int16_t c) {
                            out[c] += static_cast<C>(change);
                          });
}

}  // namespace ecc
