#ifndef FUZZYLOSS_DATASET_HPP
#define FUZZYLOSS_DATASET_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fuzzyloss/network.hpp"
#include "fuzzyloss/rng.hpp"

namespace fuzzyloss {

class IdxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
inline constexpr std::size_t kImageSide = 28;
inline constexpr std::size_t kImagePixels = kImageSide * kImageSide;
inline constexpr std::size_t kClasses = 10;

/// Images as rows of [0,1] pixels plus their class labels.
struct Dataset {
  Tensor images;  // [N x 784]
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

struct MnistData {
  Dataset train;
  Dataset test;
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                               const std::filesystem::path& path) {
  if (bytes.size() < offset + 4) {
    throw IdxError("truncated header in '" + path.string() + "'");
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

inline std::string hex32(std::uint32_t v) {
  char buf[11];
  std::snprintf(buf, sizeof buf, "0x%08X", v);
  return buf;
}

}  // namespace detail

/// Parses an IDX3 image file (magic 0x00000803, 28x28), scaling bytes by 1/255.
inline Tensor parse_idx_images(const std::vector<std::uint8_t>& bytes,
                               const std::filesystem::path& path = "<memory>") {
  const std::uint32_t magic = detail::read_be32(bytes, 0, path);
  if (magic != kIdxImageMagic) {
    throw IdxError("bad magic " + detail::hex32(magic) + " in '" + path.string() +
                   "', expected " + detail::hex32(kIdxImageMagic));
  }
  const std::size_t count = detail::read_be32(bytes, 4, path);
  const std::size_t rows = detail::read_be32(bytes, 8, path);
  const std::size_t cols = detail::read_be32(bytes, 12, path);
  if (rows != kImageSide || cols != kImageSide) {
    throw IdxError("dimension mismatch in '" + path.string() + "': " + std::to_string(rows) + "x" +
                   std::to_string(cols) + ", expected 28x28");
  }
  const std::size_t need = 16 + count * kImagePixels;
  if (bytes.size() < need) {
    throw IdxError("truncated image data in '" + path.string() + "': " +
                   std::to_string(bytes.size()) + " bytes, expected " + std::to_string(need));
  }
  Tensor images({count, kImagePixels});
  for (std::size_t i = 0; i < count * kImagePixels; ++i) images.data[i] = bytes[16 + i] / 255.0;
  return images;
}

/// Parses an IDX1 label file (magic 0x00000801) with values in 0..9.
inline std::vector<int> parse_idx_labels(const std::vector<std::uint8_t>& bytes,
                                         const std::filesystem::path& path = "<memory>") {
  const std::uint32_t magic = detail::read_be32(bytes, 0, path);
  if (magic != kIdxLabelMagic) {
    throw IdxError("bad magic " + detail::hex32(magic) + " in '" + path.string() +
                   "', expected " + detail::hex32(kIdxLabelMagic));
  }
  const std::size_t count = detail::read_be32(bytes, 4, path);
  if (bytes.size() < 8 + count) {
    throw IdxError("truncated label data in '" + path.string() + "': " +
                   std::to_string(bytes.size()) + " bytes, expected " + std::to_string(8 + count));
  }
  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    labels[i] = bytes[8 + i];
    if (labels[i] >= static_cast<int>(kClasses)) {
      throw IdxError("label " + std::to_string(labels[i]) + " at index " + std::to_string(i) +
                     " in '" + path.string() + "' is outside 0..9");
    }
  }
  return labels;
}

inline Dataset load_idx_pair(const std::filesystem::path& images, const std::filesystem::path& labels) {
  Dataset d{parse_idx_images(detail::read_file(images), images),
            parse_idx_labels(detail::read_file(labels), labels)};
  if (d.images.rows() != d.labels.size()) {
    throw IdxError("dimension mismatch: " + std::to_string(d.images.rows()) + " images in '" +
                   images.string() + "' but " + std::to_string(d.labels.size()) + " labels in '" +
                   labels.string() + "'");
  }
  return d;
}

/// Loads the four standard MNIST IDX files from `dir`.
inline MnistData load_idx(const std::filesystem::path& dir) {
  return {load_idx_pair(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte"),
          load_idx_pair(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte")};
}

/// Rows of `d` at `indices`, in that order.
inline Dataset select(const Dataset& d, const std::vector<std::size_t>& indices) {
  const std::size_t width = d.images.cols();
  Dataset out{Tensor({indices.size(), width}), {}};
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = d.images.row(indices[r]);
    std::copy(src.begin(), src.end(), out.images.data.begin() + static_cast<std::ptrdiff_t>(r * width));
    out.labels.push_back(d.labels[indices[r]]);
  }
  return out;
}

template <typename T>
void shuffle(std::vector<T>& v, XorShift64Star& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

/// Deterministic class-stratified subset of size n.
///
/// Per-class quotas are as equal as possible: classes too small for an equal
/// share give everything and the rest is spread over the larger classes, with
/// leftover units going to the lowest labels. Each class is shuffled with a
/// xorshift64* stream seeded by `seed` before taking its quota, and the
/// selection is shuffled once more so classes are interleaved.
inline Dataset subsample(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n > d.size()) {
    throw std::invalid_argument("subsample: requested " + std::to_string(n) + " of " +
                                std::to_string(d.size()) + " samples");
  }
  std::array<std::vector<std::size_t>, kClasses> by_class;
  for (std::size_t i = 0; i < d.size(); ++i) by_class[d.labels[i]].push_back(i);

  std::array<std::size_t, kClasses> quota{};
  std::size_t remaining = n;
  std::vector<std::size_t> open;
  for (std::size_t c = 0; c < kClasses; ++c) {
    if (!by_class[c].empty()) open.push_back(c);
  }
  while (remaining > 0 && !open.empty()) {
    const std::size_t share = remaining / open.size();
    std::size_t extra = remaining % open.size();
    std::vector<std::size_t> still_open;
    for (std::size_t c : open) {
      const std::size_t want = share + (extra > 0 ? 1 : 0);
      if (extra > 0) --extra;
      const std::size_t room = by_class[c].size() - quota[c];
      const std::size_t take = std::min(want, room);
      quota[c] += take;
      remaining -= take;
      if (quota[c] < by_class[c].size()) still_open.push_back(c);
    }
    open = std::move(still_open);
  }

  XorShift64Star rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  for (std::size_t c = 0; c < kClasses; ++c) {
    shuffle(by_class[c], rng);
    chosen.insert(chosen.end(), by_class[c].begin(),
                  by_class[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
  }
  shuffle(chosen, rng);
  return select(d, chosen);
}

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_DATASET_HPP
