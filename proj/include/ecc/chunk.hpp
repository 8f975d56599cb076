#pragma once

#include <atomic>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "ecc/common.hpp"
#include "ecc/image.hpp"

namespace ecc {

// Tracks bytes held by live PaddedChunk storage. Lets tests assert the
// out-of-core memory ceiling.
class ChunkMemoryTracker {
 public:
  void add(std::uint64_t bytes) {
    const auto now = current_.fetch_add(bytes) + bytes;
    std::uint64_t peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
  }
  void sub(std::uint64_t bytes) { current_.fetch_sub(bytes); }
  std::uint64_t current() const { return current_.load(); }
  std::uint64_t peak() const { return peak_.load(); }
  void reset_peak() { peak_.store(current_.load()); }

 private:
  std::atomic<std::uint64_t> current_{0};
  std::atomic<std::uint64_t> peak_{0};
};

inline ChunkMemoryTracker& chunk_memory() {
  static ChunkMemoryTracker tracker;
  return tracker;
}

// Number of bytes of extended storage for a padded chunk of `len` owned rows.
template <class T>
std::uint64_t padded_chunk_bytes(const Dims& dims, std::uint64_t len) {
  using E = typename value_traits<T>::extended;
  return (len + 2) * (dims.w1 + 2) * (dims.w2 + 2) * sizeof(E);
}

// A slab of rows [begin, end) along axis 0 plus a one-voxel collar. Collar
// positions outside the image hold the sentinel; positions inside hold the
// image value (including the read-only padding rows begin-1 and end when
// those rows exist).
template <class T>
class PaddedChunk {
 public:
  using extended = typename value_traits<T>::extended;

  PaddedChunk(const Dims& image_dims, std::uint64_t begin, std::uint64_t end)
      : image_dims_(image_dims), begin_(begin), end_(end) {
    if (!(begin < end) || end > image_dims.w0)
      throw error("invalid chunk range [" + std::to_string(begin) + ", " +
                  std::to_string(end) + ") for dims " + image_dims.to_string());
    bytes_ = padded_chunk_bytes<T>(image_dims, owned_len());
    chunk_memory().add(bytes_);
    storage_.assign(bytes_ / sizeof(extended), value_traits<T>::sentinel);
  }

  PaddedChunk(PaddedChunk&& other) noexcept
      : image_dims_(other.image_dims_),
        begin_(other.begin_),
        end_(other.end_),
        bytes_(other.bytes_),
        storage_(std::move(other.storage_)) {
    other.bytes_ = 0;
  }
  PaddedChunk& operator=(PaddedChunk&&) = delete;
  PaddedChunk(const PaddedChunk&) = delete;

  ~PaddedChunk() {
    if (bytes_) chunk_memory().sub(bytes_);
  }

  const Dims& image_dims() const { return image_dims_; }
  std::uint64_t begin() const { return begin_; }
  std::uint64_t end() const { return end_; }
  std::uint64_t owned_len() const { return end_ - begin_; }
  std::uint64_t owned_voxels() const {
    return owned_len() * image_dims_.w1 * image_dims_.w2;
  }

  std::ptrdiff_t stride0() const {
    return static_cast<std::ptrdiff_t>((image_dims_.w1 + 2) *
                                       (image_dims_.w2 + 2));
  }
  std::ptrdiff_t stride1() const {
    return static_cast<std::ptrdiff_t>(image_dims_.w2 + 2);
  }

  extended* data() { return storage_.data(); }
  const extended* data() const { return storage_.data(); }

  // Padded coordinates: (0,0,0) is the collar corner; owned voxel (i,j,k)
  // with i relative to begin() sits at (i+1, j+1, k+1).
  extended at_padded(std::uint64_t i, std::uint64_t j, std::uint64_t k) const {
    return storage_[i * stride0() + j * stride1() + k];
  }

  // Extended value of an owned (or padding-row) voxel by image coordinate.
  extended value_at(const Coord& c) const {
    return at_padded(c[0] - begin_ + 1, c[1] + 1, c[2] + 1);
  }

  // Pointer to the center of owned voxel (i,j,k), i relative to begin().
  const extended* owned_ptr(std::uint64_t i, std::uint64_t j,
                            std::uint64_t k) const {
    return storage_.data() + (i + 1) * stride0() + (j + 1) * stride1() +
           (k + 1);
  }

  void set_padded(std::uint64_t i, std::uint64_t j, std::uint64_t k,
                  extended v) {
    storage_[i * stride0() + j * stride1() + k] = v;
  }

 private:
  Dims image_dims_;
  std::uint64_t begin_, end_;
  std::uint64_t bytes_ = 0;
  std::vector<extended> storage_;
};

// Source of image rows for chunk ingestion. read_rows fills `dst` with rows
// [r0, r1) along axis 0, each row being w1*w2 contiguous values.
template <class T>
class ChunkSource {
 public:
  virtual ~ChunkSource() = default;
  virtual Dims dims() const = 0;
  virtual void read_rows(std::uint64_t r0, std::uint64_t r1, T* dst) = 0;
};

template <class T>
class MemorySource final : public ChunkSource<T> {
 public:
  explicit MemorySource(const Image<T>& image) : image_(&image) {}
  Dims dims() const override { return image_->dims; }
  void read_rows(std::uint64_t r0, std::uint64_t r1, T* dst) override {
    const std::uint64_t row = image_->dims.w1 * image_->dims.w2;
    std::memcpy(dst, image_->values.data() + r0 * row,
                (r1 - r0) * row * sizeof(T));
  }

 private:
  const Image<T>* image_;
};

template <class T>
class FileSource final : public ChunkSource<T> {
 public:
  FileSource(const std::string& path, const Dims& dims,
             const RawOptions& opt = {})
      : path_(path), dims_(dims), opt_(opt), in_(path, std::ios::binary) {
    if (!in_) throw error("cannot open '" + path + "'");
    const std::uint64_t expected = dims.voxel_count() * sizeof(T);
    std::error_code ec;
    const auto actual = std::filesystem::file_size(path, ec);
    if (ec) throw error("cannot stat '" + path + "': " + ec.message());
    if (actual != expected)
      throw error("size mismatch for '" + path + "': expected " +
                  std::to_string(expected) + " bytes for dims " +
                  dims.to_string() + ", found " + std::to_string(actual));
  }

  Dims dims() const override { return dims_; }

  void read_rows(std::uint64_t r0, std::uint64_t r1, T* dst) override {
    const std::uint64_t row = dims_.w1 * dims_.w2;
    in_.seekg(static_cast<std::streamoff>(r0 * row * sizeof(T)));
    in_.read(reinterpret_cast<char*>(dst),
             static_cast<std::streamsize>((r1 - r0) * row * sizeof(T)));
    if (!in_)
      throw error("read failure on '" + path_ + "' at row " +
                  std::to_string(r0));
    detail::fixup_loaded(dst, (r1 - r0) * row, r0 * row, opt_);
  }

 private:
  std::string path_;
  Dims dims_;
  RawOptions opt_;
  std::ifstream in_;
};

// Builds the padded chunk for [begin, end): collar stays at the sentinel,
// rows [begin-1, end+1) clipped to the image are read from the source.
template <class T>
PaddedChunk<T> fill_padded_chunk(ChunkSource<T>& source, std::uint64_t begin,
                                 std::uint64_t end) {
  const Dims dims = source.dims();
  PaddedChunk<T> chunk(dims, begin, end);
  const std::uint64_t r0 = begin == 0 ? 0 : begin - 1;
  const std::uint64_t r1 = end == dims.w0 ? dims.w0 : end + 1;
  const std::uint64_t row = dims.w1 * dims.w2;
  std::vector<T> buf((r1 - r0) * row);
  source.read_rows(r0, r1, buf.data());
  using E = typename value_traits<T>::extended;
  for (std::uint64_t r = r0; r < r1; ++r) {
    const std::uint64_t pi = r - begin + 1;
    const T* src = buf.data() + (r - r0) * row;
    E* dst = chunk.data() + static_cast<std::uint64_t>(chunk.stride0()) * pi;
    for (std::uint64_t j = 0; j < dims.w1; ++j) {
      E* out = dst + (j + 1) * chunk.stride1() + 1;
      const T* in = src + j * dims.w2;
      if constexpr (std::is_same_v<T, E>) {
        std::memcpy(out, in, dims.w2 * sizeof(T));
      } else {
        for (std::uint64_t k = 0; k < dims.w2; ++k)
          out[k] = static_cast<E>(in[k]);
      }
    }
  }
  return chunk;
}

template <class T>
PaddedChunk<T> extract_padded_chunk(const Image<T>& image, std::uint64_t begin,
                                    std::uint64_t end) {
  MemorySource<T> source(image);
  return fill_padded_chunk(source, begin, end);
}

}  // namespace ecc
