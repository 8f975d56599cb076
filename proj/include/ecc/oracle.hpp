#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ecc/common.hpp"
#include "ecc/curve.hpp"
#include "ecc/image.hpp"
#include "ecc/vcec.hpp"

namespace ecc {

// Brute-force ground truth. Every cell of the cubical complex is addressed on
// the doubled grid (2w+1 per active axis); odd coordinates mark non-degenerate
// intervals, so the cell dimension is the number of odd coordinates. A cell's
// filtration value is the minimum over the voxels containing it. Test-only
// scale: O(m n) overall.
template <class T>
struct CellGrid {
  Dims image_dims;
  int complex_dim = 3;             // 2 when w2 == 1
  std::array<std::uint64_t, 3> doubled{1, 1, 1};
  std::vector<T> values;           // row-major over the doubled grid
  std::vector<std::uint8_t> cell_dim;

  std::uint64_t cell_count() const { return values.size(); }
  std::uint64_t index(std::uint64_t p0, std::uint64_t p1,
                      std::uint64_t p2) const {
    return (p0 * doubled[1] + p1) * doubled[2] + p2;
  }
};

template <class T>
CellGrid<T> build_cell_grid(const Image<T>& image) {
  const Dims& d = image.dims;
  if (d.voxel_count() == 0) throw error("empty image");
  CellGrid<T> grid;
  grid.image_dims = d;
  grid.complex_dim = d.is_2d() ? 2 : 3;
  grid.doubled = {2 * d.w0 + 1, 2 * d.w1 + 1, d.is_2d() ? 1 : 2 * d.w2 + 1};
  const std::uint64_t total =
      grid.doubled[0] * grid.doubled[1] * grid.doubled[2];
  grid.values.resize(total);
  grid.cell_dim.resize(total);

  // voxel range along one axis covered by doubled coordinate p
  const auto range = [](std::uint64_t p, std::uint64_t w, std::uint64_t& lo,
                        std::uint64_t& hi) {
    if (p % 2 == 1) {  // non-degenerate interval [k, k+1] -> voxel k
      lo = hi = p / 2;
    } else {  // vertex plane between voxels p/2 - 1 and p/2
      lo = (p == 0) ? 0 : p / 2 - 1;
      hi = (p == 2 * w) ? w - 1 : p / 2;
    }
  };

  for (std::uint64_t p0 = 0; p0 < grid.doubled[0]; ++p0)
    for (std::uint64_t p1 = 0; p1 < grid.doubled[1]; ++p1)
      for (std::uint64_t p2 = 0; p2 < grid.doubled[2]; ++p2) {
        std::uint64_t lo0, hi0, lo1, hi1, lo2 = 0, hi2 = 0;
        range(p0, d.w0, lo0, hi0);
        range(p1, d.w1, lo1, hi1);
        if (!d.is_2d()) range(p2, d.w2, lo2, hi2);
        T best = image.at({lo0, lo1, lo2});
        for (std::uint64_t x0 = lo0; x0 <= hi0; ++x0)
          for (std::uint64_t x1 = lo1; x1 <= hi1; ++x1)
            for (std::uint64_t x2 = lo2; x2 <= hi2; ++x2)
              best = std::min(best, image.at({x0, x1, x2}));
        const int dim = static_cast<int>(p0 % 2) + static_cast<int>(p1 % 2) +
                        static_cast<int>(p2 % 2);
        const auto idx = grid.index(p0, p1, p2);
        grid.values[idx] = best;
        grid.cell_dim[idx] = static_cast<std::uint8_t>(dim);
      }
  return grid;
}

// chi(K_<=t) at every distinct image value t, by explicit cell counting.
template <class T>
EccCurve<T> naive_ecc(const Image<T>& image) {
  const CellGrid<T> grid = build_cell_grid(image);

  std::vector<T> thresholds(image.values.begin(), image.values.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  // sweep cells in value order, accumulating (-1)^dim
  std::vector<std::pair<T, int>> cells;
  cells.reserve(grid.cell_count());
  for (std::uint64_t i = 0; i < grid.cell_count(); ++i)
    cells.emplace_back(grid.values[i], grid.cell_dim[i] % 2 == 0 ? 1 : -1);
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  EccCurve<T> curve;
  curve.thresholds = thresholds;
  curve.chi.reserve(thresholds.size());
  std::int64_t chi = 0;
  std::size_t ci = 0;
  for (T t : thresholds) {
    while (ci < cells.size() && !(t < cells[ci].first)) chi += cells[ci++].second;
    curve.chi.push_back(chi);
  }
  return curve;
}

}  // namespace ecc
