#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssync/image.hpp"
#include "ssync/matrix.hpp"
#include "ssync/sae.hpp"
#include "ssync/whitening.hpp"

namespace ssync {

// Super blocks are cropped densely from the video; each super block holds a
// grid of overlapping sub blocks that are encoded and concatenated.
struct BlockSpec {
  std::size_t super_t = 14, super_h = 20, super_w = 20;
  std::size_t super_stride_t = 7, super_stride_s = 10;
  std::size_t sub_t = 10, sub_h = 16, sub_w = 16;
  std::size_t sub_stride_t = 4, sub_stride_s = 4;

  void validate() const;
  std::size_t sub_pixel_count() const { return sub_t * sub_h * sub_w; }
};

struct BlockOffset {
  std::size_t t = 0, y = 0, x = 0;
  friend bool operator==(const BlockOffset&, const BlockOffset&) = default;
};

// Sub-block offsets relative to the super-block origin, t-major then y, x.
std::vector<BlockOffset> enumerate_subblocks(const BlockSpec& spec);
std::size_t subblock_count(const BlockSpec& spec);
std::vector<BlockOffset> enumerate_superblocks(const BlockSpec& spec, std::size_t frames,
                                               std::size_t height, std::size_t width);

// Concatenated hidden codes of every super block (count x subblocks*Q) plus
// the L1 norm of each concatenation, used for interest-point thresholding.
struct SuperBlockCodes {
  std::vector<BlockOffset> positions;
  Matrix codes;
  Vector norms;
};

// Whitens each sub-block channel, encodes it with `mode` and concatenates the
// codes. Motion reads the left channel only.
SuperBlockCodes extract_codes(const StereoSequence& video, const FilterBank& bank,
                              EncodingMode mode, const BlockSpec& spec,
                              const WhiteningTransform& whitening,
                              Backend backend = Backend::OpenMP);

struct DescriptorSet {
  std::vector<BlockOffset> positions;
  Matrix descriptors;
  Vector norms;
};

DescriptorSet reduce_descriptors(const SuperBlockCodes& codes, const WhiteningTransform& reducer);

DescriptorSet extract_descriptors(const StereoSequence& video, const FilterBank& bank,
                                  EncodingMode mode, const BlockSpec& spec,
                                  const WhiteningTransform& whitening,
                                  const WhiteningTransform& reducer,
                                  Backend backend = Backend::OpenMP);

DescriptorSet fuse_concat(const DescriptorSet& depth, const DescriptorSet& motion);

struct Codebook {
  Matrix centroids;                // K x d
  std::vector<double> objective;  // within-cluster sum of squares per assignment step
  std::size_t iterations = 0;

  std::size_t words() const { return centroids.rows(); }
};

// k-means++ seeding, then Lloyd iterations until the assignment stops
// changing or max_iters. Empty clusters are re-seeded at the point farthest
// from its centroid.
Codebook build_codebook(const Matrix& descriptors, std::size_t k, std::size_t max_iters,
                        std::uint64_t seed, Backend backend = Backend::OpenMP);

struct BowHistogram {
  Vector frequencies;  // L1-normalized, uniform when degenerate
  std::size_t retained = 0;
  bool degenerate = false;
};

// Nearest-centroid counts over the retained descriptors (all when mask is
// empty).
BowHistogram quantize_histogram(const Matrix& descriptors, const Codebook& codebook,
                                const std::vector<bool>& keep = {},
                                Backend backend = Backend::OpenMP);

// Per-class mean of two confidence vectors over the same class list.
Vector fuse_average(std::span<const double> depth_conf, std::span<const int> depth_classes,
                    std::span<const double> motion_conf, std::span<const int> motion_classes);

// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> v);

}  // namespace ssync
