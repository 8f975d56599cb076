#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ecc/common.hpp"
#include "ecc/value_index.hpp"

namespace ecc {

// Map from grayscale value to the signed change in the Euler characteristic,
// kept as two parallel sorted arrays. Sums to 1 over any complete image.
template <class T>
struct GlobalVcec {
  std::vector<T> values;                 // ascending, no duplicates
  std::vector<std::int64_t> changes;     // aligned with values

  std::size_t size() const { return values.size(); }

  std::int64_t total() const {
    return std::accumulate(changes.begin(), changes.end(), std::int64_t{0});
  }

  std::int64_t change_for(T v) const {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it == values.end() || *it != v) return 0;
    return changes[static_cast<std::size_t>(it - values.begin())];
  }
};

// Folds a chunk-local histogram into the global VCEC: for every value present
// in the chunk, global[value] += local[bin_of(value)], inserting new keys.
template <class T, class C>
void merge_local(GlobalVcec<T>& global, std::span<const C> local,
                 const ValueIndex<T>& index) {
  if (local.size() != index.bin_count())
    throw error("local VCEC length does not match the index bin count");
  const auto incoming = index.distinct_values();
  std::vector<T> values;
  std::vector<std::int64_t> changes;
  values.reserve(global.size() + incoming.size());
  changes.reserve(global.size() + incoming.size());
  std::size_t gi = 0, li = 0;
  while (gi < global.size() || li < incoming.size()) {
    if (li == incoming.size() ||
        (gi < global.size() && global.values[gi] < incoming[li])) {
      values.push_back(global.values[gi]);
      changes.push_back(global.changes[gi]);
      ++gi;
    } else {
      const T v = incoming[li];
      std::int64_t c = static_cast<std::int64_t>(local[index.bin_of(v)]);
      if (gi < global.size() && global.values[gi] == v) {
        c += global.changes[gi];
        ++gi;
      }
      values.push_back(v);
      changes.push_back(c);
      ++li;
    }
  }
  global.values = std::move(values);
  global.changes = std::move(changes);
}

}  // namespace ecc
