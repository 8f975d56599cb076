#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "ecc/common.hpp"
#include "ecc/image.hpp"

namespace ecc {

namespace rng {

// SplitMix64 finalizer. Generation is counter-based and keyed by voxel index,
// so images are reproducible per seed regardless of platform or parallelism.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(seed + counter * 0x9E3779B97F4A7C15ull);
}

// Uniform in [0, 1), 24 mantissa bits.
inline float counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<float>(counter_hash(seed, counter) >> 40) * 0x1p-24f;
}

// Standard normal via Box-Muller on counters 2i and 2i+1.
inline float counter_gaussian(std::uint64_t seed, std::uint64_t i) {
  const double u1 =
      (static_cast<double>(counter_hash(seed, 2 * i) >> 11) + 1.0) * 0x1p-53;
  const double u2 =
      static_cast<double>(counter_hash(seed, 2 * i + 1) >> 11) * 0x1p-53;
  return static_cast<float>(std::sqrt(-2.0 * std::log(u1)) *
                            std::cos(2.0 * std::numbers::pi * u2));
}

}  // namespace rng

enum class GenKind { uniform, grf };

struct GenSpec {
  Dims dims;
  std::uint64_t seed = 0;
  GenKind kind = GenKind::uniform;
  double sigma = 4.0;  // GRF smoothness, in voxels
  int levels = 1024;   // GRF quantization level count
  int width = 0;       // Gaussian kernel width; 0 = derived from sigma
};

inline Image<float> uniform_noise(const GenSpec& spec) {
  Image<float> img{spec.dims, std::vector<float>(spec.dims.voxel_count())};
  for (std::uint64_t i = 0; i < img.values.size(); ++i)
    img.values[i] = rng::counter_uniform(spec.seed, i);
  return img;
}

namespace detail {

inline std::vector<double> gaussian_kernel(double sigma, int width) {
  if (width < 1 || width % 2 == 0)
    throw error("Gaussian kernel width must be odd and >= 1");
  std::vector<double> w(width);
  const int half = width / 2;
  double sum = 0;
  for (int i = -half; i <= half; ++i) {
    const double v =
        width == 1 ? 1.0 : std::exp(-(double(i) * i) / (2.0 * sigma * sigma));
    w[i + half] = v;
    sum += v;
  }
  for (double& v : w) v /= sum;
  return w;
}

// 1D convolution along one axis with edge clamping.
inline void convolve_axis(const Dims& d, int axis,
                          const std::vector<double>& kernel,
                          std::vector<float>& values) {
  const int half = static_cast<int>(kernel.size()) / 2;
  const std::uint64_t w[3] = {d.w0, d.w1, d.w2};
  const std::uint64_t stride[3] = {d.w1 * d.w2, d.w2, 1};
  const std::uint64_t n = d.voxel_count();
  std::vector<float> out(n);
  const std::uint64_t axis_w = w[axis];
  const std::uint64_t axis_s = stride[axis];
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t pos = (i / axis_s) % axis_w;
    double acc = 0;
    for (int k = -half; k <= half; ++k) {
      std::int64_t q = static_cast<std::int64_t>(pos) + k;
      q = std::clamp<std::int64_t>(q, 0, static_cast<std::int64_t>(axis_w) - 1);
      acc += kernel[k + half] *
             values[i + (static_cast<std::uint64_t>(q) - pos) * axis_s];
    }
    out[i] = static_cast<float>(acc);
  }
  values.swap(out);
}

}  // namespace detail

// Separable Gaussian smoothing: sequential 1D convolutions along each axis
// with a normalized sampled kernel and edge-clamped boundaries.
inline Image<float> gaussian_smooth(const Image<float>& image, double sigma,
                                    int width) {
  const auto kernel = detail::gaussian_kernel(sigma, width);
  Image<float> out = image;
  for (int axis = 0; axis < 3; ++axis) {
    const std::uint64_t w =
        axis == 0 ? image.dims.w0 : (axis == 1 ? image.dims.w1 : image.dims.w2);
    if (w > 1 && width > 1)
      detail::convolve_axis(out.dims, axis, kernel, out.values);
  }
  return out;
}

// Gaussian random field: counter-seeded white noise, smoothed with the
// spec's sigma, then quantized to `levels` equal-width bins over the realized
// range (bin centers).
inline Image<float> generate_grf(const GenSpec& spec) {
  if (spec.levels < 2) throw error("GRF level count must be >= 2");
  Image<float> img{spec.dims, std::vector<float>(spec.dims.voxel_count())};
  for (std::uint64_t i = 0; i < img.values.size(); ++i)
    img.values[i] = rng::counter_gaussian(spec.seed, i);
  if (spec.sigma > 0) {
    const int width =
        spec.width > 0
            ? spec.width
            : 2 * static_cast<int>(std::ceil(3.0 * spec.sigma)) + 1;
    img = gaussian_smooth(img, spec.sigma, width);
  }
  const auto [lo_it, hi_it] =
      std::minmax_element(img.values.begin(), img.values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi > lo) {
    const double bin_width = (hi - lo) / spec.levels;
    for (float& v : img.values) {
      int b = static_cast<int>((v - lo) / bin_width);
      b = std::clamp(b, 0, spec.levels - 1);
      v = static_cast<float>(lo + (b + 0.5) * bin_width);
    }
  }
  return img;
}

inline Image<float> generate(const GenSpec& spec) {
  return spec.kind == GenKind::uniform ? uniform_noise(spec)
                                       : generate_grf(spec);
}

}  // namespace ecc
