#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>

#include "ecc/chunk.hpp"
#include "ecc/kernel.hpp"
#include "ecc/value_index.hpp"
#include "test_util.hpp"

using namespace ecc;
using namespace ecc::test;

TEST_CASE("earlier follows row-major significance order") {
  CHECK(earlier({0, -1, 0}));
  CHECK_FALSE(earlier({0, +1, -1}));
  CHECK(earlier({-1, +1, +1}));
  CHECK_FALSE(earlier({+1, -1, -1}));
  CHECK(earlier({0, 0, -1}));
  CHECK_THROWS_AS(earlier({0, 0, 0}), error);
}

TEST_CASE("single-voxel 2D image introduces all 8 faces") {
  const Image<float> img{{1, 1, 1}, {3.0f}};
  const auto chunk = extract_padded_chunk(img, 0, 1);
  int count = 0;
  for (int a0 = -1; a0 <= 1; ++a0)
    for (int a1 = -1; a1 <= 1; ++a1) {
      if (a0 == 0 && a1 == 0) continue;
      CHECK(introduced(chunk, {0, 0, 0}, {a0, a1, 0}));
      ++count;
    }
  CHECK(count == 8);
}

TEST_CASE("edge introduction is strict toward earlier, non-strict later") {
  // center of a 3x3 image whose neighbors all hold `n`, center holds `c`
  const auto probe = [](float c, float n) {
    const auto img = image_2d<float>({{n, n, n}, {n, c, n}, {n, n, n}});
    const auto chunk = extract_padded_chunk(img, 0, 3);
    const Coord v{1, 1, 0};
    return std::array<bool, 4>{
        introduced(chunk, v, {-1, 0, 0}),  // earlier edge (strict)
        introduced(chunk, v, {0, -1, 0}),  // earlier edge (strict)
        introduced(chunk, v, {+1, 0, 0}),  // later edge (non-strict)
        introduced(chunk, v, {0, +1, 0}),  // later edge (non-strict)
    };
  };
  const auto below = probe(1.0f, 2.0f);  // c < neighbors: introduces all 4
  CHECK(below == std::array<bool, 4>{true, true, true, true});
  const auto tied = probe(2.0f, 2.0f);  // ties go to the earlier voxel
  CHECK(tied == std::array<bool, 4>{false, false, true, true});
  const auto above = probe(3.0f, 2.0f);  // c > neighbors: introduces none
  CHECK(above == std::array<bool, 4>{false, false, false, false});
}

TEST_CASE("vertex introduction combines all containing voxels") {
  // top-left vertex requires strictly beating left, top, and top-left;
  // bottom-right vertex ties are all non-strict
  const auto img =
      image_2d<float>({{2, 2, 2}, {2, 2, 2}, {2, 2, 2}});
  const auto chunk = extract_padded_chunk(img, 0, 3);
  const Coord v{1, 1, 0};
  CHECK_FALSE(introduced(chunk, v, {-1, -1, 0}));
  CHECK(introduced(chunk, v, {+1, +1, 0}));
  CHECK_FALSE(introduced(chunk, v, {-1, +1, 0}));
  CHECK_FALSE(introduced(chunk, v, {+1, -1, 0}));
}

TEST_CASE("voxel contribution of isolated voxels is 1") {
  {
    const Image<float> img{{1, 1, 1}, {4.0f}};
    const auto chunk = extract_padded_chunk(img, 0, 1);
    CHECK(voxel_contribution(chunk, {0, 0, 0}) == 1);  // 1 + 4 - 4
  }
  {
    const Image<float> img{Dims{1, 1, 2}, {4.0f, 9.0f}};
    const auto chunk = extract_padded_chunk(img, 0, 1);
    // first voxel of a 1x1x2 bar: introduces everything it touches
    CHECK(voxel_contribution(chunk, {0, 0, 0}) == 1);
  }
}

TEST_CASE("staircase contributions are (1, 0, 0, 0)") {
  const auto img = image_2d<float>({{1, 2}, {3, 4}});
  const auto chunk = extract_padded_chunk(img, 0, 2);
  CHECK(voxel_contribution(chunk, {0, 0, 0}) == 1);
  CHECK(voxel_contribution(chunk, {0, 1, 0}) == 0);
  CHECK(voxel_contribution(chunk, {1, 0, 0}) == 0);
  CHECK(voxel_contribution(chunk, {1, 1, 0}) == 0);
}

TEST_CASE("checkerboard VCEC is {0:1, 1:0}") {
  const auto img = image_2d<float>({{0, 1}, {1, 0}});
  const auto chunk = extract_padded_chunk(img, 0, 2);
  const auto index = build_index<float>(img.values);
  const auto counts = accumulate_chunk(chunk, index);
  CHECK(counts == LocalVcec{1, 0});
}

TEST_CASE("accumulate_chunk on a 1x1 image gives [1]") {
  const Image<float> img{{1, 1, 1}, {7.0f}};
  const auto chunk = extract_padded_chunk(img, 0, 1);
  const auto counts =
      accumulate_chunk(chunk, ValueIndex<float>::from_sorted_unique({7.0f}));
  CHECK(counts == LocalVcec{1});
}

TEST_CASE("3x3 ring accumulates to [0, 1]") {
  const auto img = image_2d<float>({{0, 0, 0}, {0, 9, 0}, {0, 0, 0}});
  const auto chunk = extract_padded_chunk(img, 0, 3);
  const auto counts =
      accumulate_chunk(chunk, ValueIndex<float>::from_sorted_unique({0, 9}));
  CHECK(counts == LocalVcec{0, 1});
}

TEST_CASE("whole-image counts always sum to 1") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const bool flat = rep % 2 == 0;
    const Dims dims = flat ? Dims{1 + rng() % 6, 1 + rng() % 6, 1}
                           : Dims{1 + rng() % 5, 1 + rng() % 5,
                                  2 + rng() % 4};
    const auto img = random_f32(dims, rng, 4);
    const auto chunk = extract_padded_chunk(img, 0, dims.w0);
    const auto counts =
        accumulate_chunk(chunk, build_index<float>(img.values));
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    CHECK(total == 1);
  }
}

TEST_CASE("contributions stay within the loose bounds") {
  std::mt19937 rng(19);
  for (int rep = 0; rep < 20; ++rep) {
    const bool flat = rep % 2 == 0;
    const Dims dims = flat ? Dims{1 + rng() % 5, 1 + rng() % 5, 1}
                           : Dims{1 + rng() % 4, 1 + rng() % 4,
                                  2 + rng() % 3};
    const auto img = random_u8(dims, rng, 3);
    const auto chunk = extract_padded_chunk(img, 0, dims.w0);
    const int lo = dims.is_2d() ? -3 : -11;
    const int hi = dims.is_2d() ? 5 : 13;
    for (std::uint64_t a = 0; a < dims.w0; ++a)
      for (std::uint64_t b = 0; b < dims.w1; ++b)
        for (std::uint64_t c = 0; c < dims.w2; ++c) {
          const int contribution = voxel_contribution(chunk, {a, b, c});
          CHECK(contribution >= lo);
          CHECK(contribution <= hi);
        }
  }
}

TEST_CASE("unrolled kernels match the face-enumeration reference") {
  std::mt19937 rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    const bool flat = rep % 2 == 0;
    const Dims dims = flat ? Dims{1 + rng() % 6, 1 + rng() % 6, 1}
                           : Dims{1 + rng() % 5, 1 + rng() % 5,
                                  2 + rng() % 4};
    const auto img = random_f32(dims, rng, 5);
    const auto chunk = extract_padded_chunk(img, 0, dims.w0);
    std::vector<std::int8_t> changes(chunk.owned_voxels());
    compute_changes(chunk, 0, chunk.owned_len(), changes);
    for (std::uint64_t a = 0; a < dims.w0; ++a)
      for (std::uint64_t b = 0; b < dims.w1; ++b)
        for (std::uint64_t c = 0; c < dims.w2; ++c)
          CHECK(changes[linear_index({a, b, c}, dims)] ==
                voxel_contribution(chunk, {a, b, c}));
  }
}

TEST_CASE("VCEC depends only on the value order, not magnitudes") {
  std::mt19937 rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    const Dims dims{1 + rng() % 5, 1 + rng() % 5, 1 + rng() % 4};
    const auto img = random_f32(dims, rng, 4);

    // dense-rank relabeling: value -> its rank among distinct values
    auto distinct = img.values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    Image<float> ranked = img;
    for (auto& v : ranked.values)
      v = static_cast<float>(
          std::lower_bound(distinct.begin(), distinct.end(), v) -
          distinct.begin());

    const auto chunk_a = extract_padded_chunk(img, 0, dims.w0);
    const auto chunk_b = extract_padded_chunk(ranked, 0, dims.w0);
    const auto counts_a =
        accumulate_chunk(chunk_a, build_index<float>(img.values));
    const auto counts_b =
        accumulate_chunk(chunk_b, build_index<float>(ranked.values));
    CHECK(counts_a == counts_b);
  }
}

TEST_CASE("contributions are invariant under embedding at an offset") {
  std::mt19937 rng(31);
  const Dims small{2, 3, 2};
  const auto img = random_f32(small, rng, 4);
  const auto base = extract_padded_chunk(img, 0, small.w0);

  const Dims big{6, 7, 6};
  for (const Coord off : {Coord{0, 0, 0}, Coord{2, 1, 3}, Coord{4, 4, 4}}) {
    PaddedChunk<float> host(big, 0, big.w0);  // all sentinel
    for (std::uint64_t a = 0; a < small.w0; ++a)
      for (std::uint64_t b = 0; b < small.w1; ++b)
        for (std::uint64_t c = 0; c < small.w2; ++c)
          host.set_padded(off[0] + a + 1, off[1] + b + 1, off[2] + c + 1,
                          img.at({a, b, c}));
    for (std::uint64_t a = 0; a < small.w0; ++a)
      for (std::uint64_t b = 0; b < small.w1; ++b)
        for (std::uint64_t c = 0; c < small.w2; ++c)
          CHECK(voxel_contribution(host,
                                   {off[0] + a, off[1] + b, off[2] + c}) ==
                voxel_contribution(base, {a, b, c}));
  }
}

TEST_CASE("accumulation order does not matter") {
  std::mt19937 rng(37);
  const Dims dims{6, 5, 4};
  const auto img = random_u8(dims, rng, 5);
  const auto chunk = extract_padded_chunk(img, 0, dims.w0);
  const auto index = build_index<std::uint8_t>(img.values);
  const auto whole = accumulate_chunk(chunk, index);

  // row-range pieces summed in reverse order give the same histogram
  std::vector<std::int64_t> pieced(index.bin_count(), 0);
  for (std::uint64_t r = dims.w0; r > 0; --r) {
    std::vector<std::int64_t> part(256, 0);
    accumulate_dense_u8<std::int64_t>(chunk, r - 1, r, part);
    for (std::size_t b = 0; b < part.size(); ++b) pieced[b] += part[b];
  }
  CHECK(pieced == whole);
}
