#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "ecc/chunk.hpp"
#include "ecc/common.hpp"
#include "ecc/kernel.hpp"
#include "ecc/value_index.hpp"
#include "ecc/vcec.hpp"

namespace ecc {

struct ChunkRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::uint64_t len() const { return end - begin; }
  bool operator==(const ChunkRange&) const = default;
};

// Disjoint contiguous cover of [0, w0) along axis 0; every range has length
// at most ceil(w0 / chunk_count).
struct ChunkPlan {
  std::vector<ChunkRange> ranges;
  std::size_t chunk_count() const { return ranges.size(); }
};

struct ChunkTarget {
  static ChunkTarget count(std::uint64_t c) {
    ChunkTarget t;
    t.chunks = c;
    return t;
  }
  static ChunkTarget memory_budget(std::uint64_t bytes) {
    ChunkTarget t;
    t.budget_bytes = bytes;
    return t;
  }
  std::optional<std::uint64_t> chunks;
  std::optional<std::uint64_t> budget_bytes;
};

namespace detail {

inline ChunkPlan even_plan(std::uint64_t w0, std::uint64_t c) {
  if (c < 1) c = 1;
  if (c > w0) c = w0;
  const std::uint64_t len = (w0 + c - 1) / c;  // ceiling; last chunk absorbs
  ChunkPlan plan;
  for (std::uint64_t a = 0; a < w0; a += len)
    plan.ranges.push_back({a, std::min(a + len, w0)});
  return plan;
}

}  // namespace detail

// Plans the axis-0 decomposition. A memory budget covers resident chunk
// storage, which is two padded chunks while the pipeline double-buffers, so
// each padded chunk is sized to half the budget.
template <class T>
ChunkPlan plan_chunks(const Dims& dims, const ChunkTarget& target) {
  if (dims.w0 < 1) throw error("w0 must be >= 1");
  if (target.chunks) return detail::even_plan(dims.w0, *target.chunks);
  if (!target.budget_bytes)
    throw error("chunk target needs a count or a memory budget");
  const std::uint64_t slab = padded_chunk_bytes<T>(dims, 1) / 3;
  const std::uint64_t minimum = 2 * padded_chunk_bytes<T>(dims, 1);
  if (*target.budget_bytes < minimum)
    throw error("memory budget " + std::to_string(*target.budget_bytes) +
                " bytes is below the minimum feasible " +
                std::to_string(minimum) +
                " bytes (two single-row padded chunks)");
  const std::uint64_t len = *target.budget_bytes / (2 * slab) - 2;
  const std::uint64_t c = (dims.w0 + len - 1) / len;
  return detail::even_plan(dims.w0, c);
}

struct ChunkTiming {
  ChunkRange range;
  double ingest_begin = 0, ingest_end = 0;  // seconds since engine start
  double index_begin = 0, index_end = 0;
  double kernel_begin = 0, kernel_end = 0;
  double merge_begin = 0, merge_end = 0;
};

struct EngineReport {
  std::vector<ChunkTiming> chunks;
  double read_s = 0, index_s = 0, kernel_s = 0, merge_s = 0;
  std::uint64_t peak_chunk_bytes = 0;
};

struct EngineOptions {
  unsigned workers = 1;
  // Test hook: artificial delay added to each chunk ingestion.
  std::chrono::milliseconds ingest_delay{0};
};

namespace detail {

// Single-slot handoff between the ingestion thread and the compute loop.
// Capacity one: at most one filled chunk waits while the next is ingested,
// so at most two padded chunks are resident.
template <class T>
struct ChunkSlot {
  std::mutex m;
  std::condition_variable cv;
  std::optional<PaddedChunk<T>> chunk;
  double ingest_begin = 0, ingest_end = 0;
  std::exception_ptr err;
  bool finished = false;
  bool abort = false;
};

// Splits the chunk's owned rows across workers. Each worker writes the
// per-voxel changes of its disjoint row range, so no atomics are needed.
template <class T>
std::vector<std::int8_t> run_chunk_changes(const PaddedChunk<T>& chunk,
                                           unsigned workers) {
  const std::uint64_t rows = chunk.owned_len();
  const unsigned n = std::max(
      1u, std::min<unsigned>(
              workers,
              static_cast<unsigned>(std::min<std::uint64_t>(rows, 1u << 16))));
  std::vector<std::int8_t> changes(chunk.owned_voxels());
  if (n == 1) {
    compute_changes(chunk, 0, rows, changes);
    return changes;
  }
  std::vector<std::thread> threads;
  const std::uint64_t step = (rows + n - 1) / n;
  for (unsigned w = 0; w < n; ++w)
    threads.emplace_back([&, w] {
      const std::uint64_t r0 = w * step;
      const std::uint64_t r1 = std::min<std::uint64_t>(r0 + step, rows);
      if (r0 < r1) compute_changes(chunk, r0, r1, changes);
    });
  for (auto& t : threads) t.join();
  return changes;
}

template <class C>
std::vector<C> run_chunk_kernel_u8(const PaddedChunk<std::uint8_t>& chunk,
                                   unsigned workers) {
  const std::uint64_t rows = chunk.owned_len();
  const unsigned n =
      std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(
                                                   std::min<std::uint64_t>(
                                                       rows, 1u << 16))));
  if (n == 1) {
    std::vector<C> counts(256, 0);
    accumulate_dense_u8<C>(chunk, 0, rows, counts);
    return counts;
  }
  std::vector<std::vector<C>> parts(n);
  std::vector<std::thread> threads;
  const std::uint64_t step = (rows + n - 1) / n;
  for (unsigned w = 0; w < n; ++w)
    threads.emplace_back([&, w] {
      const std::uint64_t r0 = w * step;
      const std::uint64_t r1 = std::min<std::uint64_t>(r0 + step, rows);
      parts[w].assign(256, 0);
      if (r0 < r1) accumulate_dense_u8<C>(chunk, r0, r1, parts[w]);
    });
  for (auto& t : threads) t.join();
  std::vector<C> counts = std::move(parts[0]);
  for (unsigned w = 1; w < n; ++w)
    for (std::size_t b = 0; b < 256; ++b) counts[b] += parts[w][b];
  return counts;
}

}  // namespace detail

// Streams chunks from the source, overlapping ingestion of chunk k+1 with
// kernel execution of chunk k, and merges chunk-local histograms into the
// global VCEC. The result is independent of the plan and the worker count.
template <class T>
GlobalVcec<T> process_image(ChunkSource<T>& source, const ChunkPlan& plan,
                            const EngineOptions& opt = {},
                            EngineReport* report = nullptr) {
  const Dims dims = source.dims();
  if (plan.ranges.empty()) throw error("empty chunk plan");
  std::uint64_t expected = 0;
  for (const auto& r : plan.ranges) {
    if (r.begin != expected || r.end <= r.begin)
      throw error("chunk plan does not cover the image contiguously");
    expected = r.end;
  }
  if (expected != dims.w0)
    throw error("chunk plan covers [0, " + std::to_string(expected) +
                ") but the source has w0 = " + std::to_string(dims.w0));

  const auto t0 = std::chrono::steady_clock::now();
  const auto since_start = [t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  chunk_memory().reset_peak();

  detail::ChunkSlot<T> slot;
  std::thread ingest([&] {
    try {
      for (const auto& r : plan.ranges) {
        {
          // Wait for a free slot before allocating, so at most two padded
          // chunks are ever resident: the one being computed and this one.
          std::unique_lock lock(slot.m);
          slot.cv.wait(lock,
                       [&] { return !slot.chunk.has_value() || slot.abort; });
          if (slot.abort) return;
        }
        const double begin = since_start();
        if (opt.ingest_delay.count() > 0)
          std::this_thread::sleep_for(opt.ingest_delay);
        PaddedChunk<T> chunk = fill_padded_chunk(source, r.begin, r.end);
        const double end = since_start();
        std::unique_lock lock(slot.m);
        if (slot.abort) return;
        slot.chunk.emplace(std::move(chunk));
        slot.ingest_begin = begin;
        slot.ingest_end = end;
        slot.cv.notify_all();
      }
      std::lock_guard lock(slot.m);
      slot.finished = true;
      slot.cv.notify_all();
    } catch (...) {
      std::lock_guard lock(slot.m);
      slot.err = std::current_exception();
      slot.finished = true;
      slot.cv.notify_all();
    }
  });

  GlobalVcec<T> global;
  EngineReport local_report;
  try {
    for (std::size_t k = 0; k < plan.ranges.size(); ++k) {
      std::optional<PaddedChunk<T>> chunk;
      ChunkTiming timing;
      timing.range = plan.ranges[k];
      {
        std::unique_lock lock(slot.m);
        slot.cv.wait(lock, [&] { return slot.chunk || slot.finished; });
        if (!slot.chunk && slot.err) {
          std::string what;
          try {
            std::rethrow_exception(slot.err);
          } catch (const std::exception& e) {
            what = e.what();
          }
          throw error("ingestion of chunk " + std::to_string(k) +
                      " failed: " + what);
        }
        chunk.emplace(std::move(*slot.chunk));
        slot.chunk.reset();
        timing.ingest_begin = slot.ingest_begin;
        timing.ingest_end = slot.ingest_end;
        slot.cv.notify_all();
      }

      if constexpr (std::is_same_v<T, float>) {
        timing.kernel_begin = since_start();
        std::vector<std::int8_t> changes =
            detail::run_chunk_changes(*chunk, opt.workers);
        timing.kernel_end = since_start();

        timing.index_begin = since_start();
        IndexedCounts indexed = build_index_counts(*chunk, changes);
        changes.clear();
        changes.shrink_to_fit();
        timing.index_end = since_start();

        timing.merge_begin = since_start();
        merge_local<float, std::int64_t>(global, indexed.counts,
                                         indexed.index);
        timing.merge_end = since_start();
      } else {
        timing.index_begin = since_start();
        std::vector<T> owned;  // occupancy scan input
        owned.reserve(chunk->owned_voxels());
        const Dims& d = chunk->image_dims();
        for (std::uint64_t i = 0; i < chunk->owned_len(); ++i)
          for (std::uint64_t j = 0; j < d.w1; ++j) {
            const auto* p = chunk->owned_ptr(i, j, 0);
            for (std::uint64_t k2 = 0; k2 < d.w2; ++k2)
              owned.push_back(static_cast<T>(p[k2]));
          }
        auto index = ValueIndex<T>::build(owned);
        owned.clear();
        owned.shrink_to_fit();
        timing.index_end = since_start();

        timing.kernel_begin = since_start();
        auto counts =
            detail::run_chunk_kernel_u8<std::int64_t>(*chunk, opt.workers);
        timing.kernel_end = since_start();
        timing.merge_begin = since_start();
        merge_local<T, std::int64_t>(global, counts, index);
        timing.merge_end = since_start();
      }

      chunk.reset();
      local_report.read_s += timing.ingest_end - timing.ingest_begin;
      local_report.index_s += timing.index_end - timing.index_begin;
      local_report.kernel_s += timing.kernel_end - timing.kernel_begin;
      local_report.merge_s += timing.merge_end - timing.merge_begin;
      local_report.chunks.push_back(timing);
    }
  } catch (...) {
    {
      std::lock_guard lock(slot.m);
      slot.abort = true;
      slot.cv.notify_all();
    }
    ingest.join();
    throw;
  }
  ingest.join();

  local_report.peak_chunk_bytes = chunk_memory().peak();
  if (report) *report = std::move(local_report);
  return global;
}

// Convenience wrapper for whole in-memory images.
template <class T>
GlobalVcec<T> process_image(const Image<T>& image, const ChunkPlan& plan,
                            const EngineOptions& opt = {},
                            EngineReport* report = nullptr) {
  MemorySource<T> source(image);
  return process_image(source, plan, opt, report);
}

}  // namespace ecc
