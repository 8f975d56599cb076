#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ecc/common.hpp"
#include "ecc/curve.hpp"
#include "ecc/datagen.hpp"
#include "ecc/image.hpp"
#include "ecc/streaming.hpp"

namespace ecc {

// Per-phase wall times for one compute run. Phases overlap by design (chunk
// ingestion runs concurrently with the kernel), so total is measured
// separately rather than summed.
struct RunReport {
  std::uint64_t voxels = 0;
  std::size_t chunk_count = 0;
  std::size_t curve_points = 0;
  std::int64_t final_chi = 0;
  double read_s = 0, index_s = 0, kernel_s = 0, merge_s = 0, total_s = 0;

  double gvox_per_s() const {
    return kernel_s > 0 ? static_cast<double>(voxels) / kernel_s / 1e9 : 0.0;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "voxels:        " << voxels << "\n"
       << "chunks:        " << chunk_count << "\n"
       << "curve points:  " << curve_points << "\n"
       << "final chi:     " << final_chi << "\n"
       << "disk read:     " << read_s << " s\n"
       << "index build:   " << index_s << " s\n"
       << "kernel:        " << kernel_s << " s\n"
       << "merge:         " << merge_s << " s\n"
       << "total:         " << total_s << " s\n"
       << "kernel GVox/s: " << gvox_per_s() << "\n";
    return os.str();
  }
};

struct ComputeConfig {
  std::optional<Dims> dims;            // falls back to the sidecar
  std::optional<ValueKind> kind;       // falls back to the sidecar
  bool big_endian = false;
  std::optional<std::uint64_t> chunks;
  std::optional<std::uint64_t> memory_budget;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  CurveFormat format = CurveFormat::csv;
  std::optional<std::string> curve_out;
  std::optional<std::string> vcec_out;
  std::chrono::milliseconds ingest_delay{0};
};

namespace detail {

template <class T>
RunReport compute_file_typed(const std::string& input, const Dims& dims,
                             const ComputeConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RawOptions raw{cfg.big_endian};
  FileSource<T> source(input, dims, raw);

  ChunkTarget target =
      cfg.memory_budget ? ChunkTarget::memory_budget(*cfg.memory_budget)
                        : ChunkTarget::count(
                              cfg.chunks ? *cfg.chunks
                                         : std::max<std::uint64_t>(
                                               2, cfg.workers));
  const ChunkPlan plan = plan_chunks<T>(dims, target);

  EngineOptions opt;
  opt.workers = cfg.workers;
  opt.ingest_delay = cfg.ingest_delay;
  EngineReport engine_report;
  GlobalVcec<T> vcec = process_image<T>(source, plan, opt, &engine_report);

  RunReport report;
  report.voxels = dims.voxel_count();
  report.chunk_count = plan.chunk_count();
  report.read_s = engine_report.read_s;
  report.index_s = engine_report.index_s;
  report.kernel_s = engine_report.kernel_s;
  report.merge_s = engine_report.merge_s;

  if (cfg.vcec_out) {
    std::ofstream out(*cfg.vcec_out, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot open '" + *cfg.vcec_out + "' for writing");
    write_vcec(vcec, out);
  }

  EccCurve<T> curve = vcec_to_ecc(std::move(vcec));
  report.curve_points = curve.size();
  report.final_chi = curve.chi.empty() ? 0 : curve.chi.back();
  if (cfg.curve_out) write_curve(curve, cfg.format, *cfg.curve_out);

  report.total_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

}  // namespace detail

// One end-to-end compute run over a raw volume file: stream, accumulate,
// merge, prefix-sum, serialize.
inline RunReport compute_file(const std::string& input,
                              const ComputeConfig& cfg) {
  Dims dims;
  ValueKind kind;
  if (cfg.dims && cfg.kind) {
    dims = *cfg.dims;
    kind = *cfg.kind;
  } else {
    const auto meta = read_sidecar(input);
    if (!meta)
      throw error("no dims/dtype given and no sidecar found for '" + input +
                  "'");
    dims = cfg.dims.value_or(meta->dims);
    kind = cfg.kind.value_or(meta->kind);
  }
  if (kind == ValueKind::u8)
    return detail::compute_file_typed<std::uint8_t>(input, dims, cfg);
  return detail::compute_file_typed<float>(input, dims, cfg);
}

struct BatchItem {
  std::string file;
  bool ok = false;
  std::string message;
  RunReport report;
};

struct BatchReport {
  std::vector<BatchItem> items;
  std::size_t failures = 0;
  double total_s = 0;
  double avg_file_s() const {
    return items.empty() ? 0 : total_s / static_cast<double>(items.size());
  }
};

namespace detail {

// Shell-style match supporting '*' and '?'.
inline bool glob_match(std::string_view pattern, std::string_view name) {
  std::size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p, ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace detail

// Processes every file in `directory` whose name matches `glob`. Failures are
// recorded and the batch continues. Output curves land next to the inputs
// (or in out_dir) as <stem>.ecc.<csv|json>.
inline BatchReport batch_run(const std::string& directory,
                             const std::string& glob, ComputeConfig cfg,
                             const std::optional<std::string>& out_dir = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory))
    throw error("'" + directory + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(directory))
    if (entry.is_regular_file() &&
        detail::glob_match(glob, entry.path().filename().string()))
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());

  BatchReport report;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& file : files) {
    BatchItem item;
    item.file = file;
    const fs::path in(file);
    fs::path out =
        out_dir ? fs::path(*out_dir) / in.filename() : in;
    out.replace_extension(cfg.format == CurveFormat::csv ? ".ecc.csv"
                                                         : ".ecc.json");
    ComputeConfig file_cfg = cfg;
    file_cfg.curve_out = out.string();
    try {
      item.report = compute_file(file, file_cfg);
      item.ok = true;
    } catch (const std::exception& e) {
      item.message = e.what();
      ++report.failures;
    }
    report.items.push_back(std::move(item));
  }
  report.total_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

struct BenchReport {
  std::uint64_t iterations = 0;
  std::uint64_t voxels = 0;
  double generate_s = 0;
  double total_s = 0;          // smoothing + ECC loop, including one-time costs
  double per_iteration_s = 0;  // total_s / iterations
  double ecc_avg_s = 0;
  double smooth_avg_s = 0;
  double ecc_gvox_per_s = 0;

  std::string to_string() const {
    std::ostringstream os;
    os << "iterations:       " << iterations << "\n"
       << "voxels:           " << voxels << "\n"
       << "generate:         " << generate_s << " s\n"
       << "loop total:       " << total_s << " s\n"
       << "per iteration:    " << per_iteration_s << " s\n"
       << "ECC avg:          " << ecc_avg_s << " s\n"
       << "smoothing avg:    " << smooth_avg_s << " s\n"
       << "ECC GVox/s:       " << ecc_gvox_per_s << "\n";
    return os.str();
  }
};

// In-memory pipeline benchmark: generate uniform noise once, then repeat
// {gaussian_smooth; ECC} and report per-iteration averages.
inline BenchReport bench_run(const Dims& dims, std::uint64_t iterations,
                             std::uint64_t seed = 1, double sigma = 2.0,
                             int width = 13) {
  if (iterations < 1) throw error("bench needs at least one iteration");
  using clock = std::chrono::steady_clock;
  const auto secs = [](auto a, auto b) {
    return std::chrono::duration<double>(b - a).count();
  };

  BenchReport report;
  report.iterations = iterations;
  report.voxels = dims.voxel_count();

  auto tg0 = clock::now();
  GenSpec spec;
  spec.dims = dims;
  spec.seed = seed;
  Image<float> image = uniform_noise(spec);
  report.generate_s = secs(tg0, clock::now());

  const ChunkPlan plan = plan_chunks<float>(dims, ChunkTarget::count(1));
  double ecc_s = 0, smooth_s = 0, kernel_s = 0;
  const auto t0 = clock::now();
  for (std::uint64_t it = 0; it < iterations; ++it) {
    auto ts = clock::now();
    image = gaussian_smooth(image, sigma, width);
    smooth_s += secs(ts, clock::now());

    auto te = clock::now();
    EngineReport engine_report;
    GlobalVcec<float> vcec = process_image(image, plan, {}, &engine_report);
    EccCurve<float> curve = vcec_to_ecc(std::move(vcec));
    (void)curve;
    kernel_s += engine_report.kernel_s;
    ecc_s += secs(te, clock::now());
  }
  report.total_s = secs(t0, clock::now());
  // one-time generation cost amortizes across iterations
  report.per_iteration_s =
      (report.generate_s + report.total_s) / static_cast<double>(iterations);
  report.ecc_avg_s = ecc_s / static_cast<double>(iterations);
  report.smooth_avg_s = smooth_s / static_cast<double>(iterations);
  report.ecc_gvox_per_s =
      kernel_s > 0 ? static_cast<double>(report.voxels) * iterations /
                         kernel_s / 1e9
                   : 0;
  return report;
}

}  // namespace ecc
