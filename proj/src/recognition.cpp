#include "ssync/recognition.hpp"

#include <algorithm>
#include <random>

#include "ssync/corpus.hpp"
#include "ssync/error.hpp"
#include "ssync/interest.hpp"
#include "ssync/kernels.hpp"

namespace ssync {

void BlockSpec::validate() const {
  require(sub_t >= 1 && sub_h >= 1 && sub_w >= 1, ErrorCode::InvalidArgument,
          "sub-block dims must be >= 1");
  require(sub_t <= super_t && sub_h <= super_h && sub_w <= super_w, ErrorCode::InvalidArgument,
          "sub-block dims exceed super-block dims");
  require(super_stride_t >= 1 && super_stride_s >= 1 && sub_stride_t >= 1 && sub_stride_s >= 1,
          ErrorCode::InvalidArgument, "block strides must be >= 1");
}

namespace {

std::size_t positions_along(std::size_t extent, std::size_t size, std::size_t stride) {
  return (extent - size) / stride + 1;
}

void check_bank_for_mode(const FilterBank& bank, EncodingMode mode) {
  switch (mode) {
    case EncodingMode::Depth:
      require(!bank.tied() && bank.mode() == EncodingMode::Depth, ErrorCode::ModeMismatch,
              "SAE-D extraction needs an untied D bank");
      break;
    case EncodingMode::Motion:
      require(bank.tied() && bank.mode() == EncodingMode::Motion, ErrorCode::ModeMismatch,
              "SAE-M extraction needs a tied M bank");
      break;
    case EncodingMode::Joint:
      require(!bank.tied() &&
                  (bank.mode() == EncodingMode::Depth || bank.mode() == EncodingMode::Joint),
              ErrorCode::ModeMismatch, "SAE-MD extraction needs a D-trained bank");
      break;
  }
}

}  // namespace

std::vector<BlockOffset> enumerate_subblocks(const BlockSpec& spec) {
  spec.validate();
  std::vector<BlockOffset> out;
  for (std::size_t t = 0; t + spec.sub_t <= spec.super_t; t += spec.sub_stride_t)
    for (std::size_t y = 0; y + spec.sub_h <= spec.super_h; y += spec.sub_stride_s)
      for (std::size_t x = 0; x + spec.sub_w <= spec.super_w; x += spec.sub_stride_s)
        out.push_back({t, y, x});
  return out;
}

std::size_t subblock_count(const BlockSpec& spec) {
  spec.validate();
  return positions_along(spec.super_t, spec.sub_t, spec.sub_stride_t) *
         positions_along(spec.super_h, spec.sub_h, spec.sub_stride_s) *
         positions_along(spec.super_w, spec.sub_w, spec.sub_stride_s);
}

std::vector<BlockOffset> enumerate_superblocks(const BlockSpec& spec, std::size_t frames,
                                               std::size_t height, std::size_t width) {
  spec.validate();
  require(frames >= spec.super_t && height >= spec.super_h && width >= spec.super_w,
          ErrorCode::OutOfRange, "video is smaller than one super block");
  std::vector<BlockOffset> out;
  for (std::size_t t = 0; t + spec.super_t <= frames; t += spec.super_stride_t)
    for (std::size_t y = 0; y + spec.super_h <= height; y += spec.super_stride_s)
      for (std::size_t x = 0; x + spec.super_w <= width; x += spec.super_stride_s)
        out.push_back({t, y, x});
  return out;
}

SuperBlockCodes extract_codes(const StereoSequence& video, const FilterBank& bank,
                              EncodingMode mode, const BlockSpec& spec,
                              const WhiteningTransform& whitening, Backend backend) {
  video.validate();
  check_bank_for_mode(bank, mode);
  require(whitening.input_dim() == spec.sub_pixel_count(), ErrorCode::DimensionMismatch,
          "whitening input does not match the sub-block size");
  require(whitening.output_dim() == bank.input_dim(), ErrorCode::DimensionMismatch,
          "whitening output does not match the bank");

  SuperBlockCodes out;
  out.positions = enumerate_superblocks(spec, video.length(), video.height(), video.width());
  const auto subs = enumerate_subblocks(spec);
  const std::size_t n_super = out.positions.size(), n_sub = subs.size();
  const PatchGeometry g{spec.sub_w, spec.sub_h, spec.sub_t};

  PatchBatch batch(n_super * n_sub, whitening.output_dim());
  const bool motion = mode == EncodingMode::Motion;
  const auto total = static_cast<std::ptrdiff_t>(n_super * n_sub);
#pragma omp parallel for schedule(static) if (backend == Backend::OpenMP)
  for (std::ptrdiff_t ii = 0; ii < total; ++ii) {
    const auto i = std::size_t(ii);
    const BlockOffset& s = out.positions[i / n_sub];
    const BlockOffset& b = subs[i % n_sub];
    const CropWindow w{0, s.t + b.t, s.y + b.y, s.x + b.x};
    const Vector x = apply_whitening(whitening, crop_block(video.left, w, g));
    std::copy(x.begin(), x.end(), batch.x.row(i).begin());
    if (!motion) {
      const Vector y = apply_whitening(whitening, crop_block(video.right, w, g));
      std::copy(y.begin(), y.end(), batch.y.row(i).begin());
    }
  }
  const Matrix sub_codes = encode_batch(bank, batch, mode, backend);

  const std::size_t q = bank.hidden_units();
  out.codes = Matrix(n_super, n_sub * q);
  out.norms.resize(n_super);
  for (std::size_t s = 0; s < n_super; ++s) {
    auto dst = out.codes.row(s);
    for (std::size_t b = 0; b < n_sub; ++b) {
      const auto src = sub_codes.row(s * n_sub + b);
      std::copy(src.begin(), src.end(), dst.begin() + std::ptrdiff_t(b * q));
    }
    out.norms[s] = feature_norm(dst);
  }
  return out;
}

DescriptorSet reduce_descriptors(const SuperBlockCodes& codes, const WhiteningTransform& reducer) {
  DescriptorSet out{codes.positions, apply_whitening_rows(reducer, codes.codes), codes.norms};
  return out;
}

DescriptorSet extract_descriptors(const StereoSequence& video, const FilterBank& bank,
                                  EncodingMode mode, const BlockSpec& spec,
                                  const WhiteningTransform& whitening,
                                  const WhiteningTransform& reducer, Backend backend) {
  return reduce_descriptors(extract_codes(video, bank, mode, spec, whitening, backend), reducer);
}

DescriptorSet fuse_concat(const DescriptorSet& depth, const DescriptorSet& motion) {
  require(depth.positions == motion.positions, ErrorCode::DimensionMismatch,
          "descriptor position lists differ");
  const std::size_t n = depth.positions.size();
  const std::size_t d1 = depth.descriptors.cols(), d2 = motion.descriptors.cols();
  DescriptorSet out{depth.positions, Matrix(n, d1 + d2), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = out.descriptors.row(i);
    std::copy(depth.descriptors.row(i).begin(), depth.descriptors.row(i).end(), dst.begin());
    std::copy(motion.descriptors.row(i).begin(), motion.descriptors.row(i).end(),
              dst.begin() + std::ptrdiff_t(d1));
    out.norms[i] = (depth.norms.empty() ? 0.0 : depth.norms[i]) +
                   (motion.norms.empty() ? 0.0 : motion.norms[i]);
  }
  return out;
}

Codebook build_codebook(const Matrix& descriptors, std::size_t k, std::size_t max_iters,
                        std::uint64_t seed, Backend backend) {
  const std::size_t n = descriptors.rows(), d = descriptors.cols();
  require(k >= 1, ErrorCode::InvalidArgument, "codebook needs K >= 1");
  require(n >= k, ErrorCode::InsufficientData,
          "k-means needs at least K=" + std::to_string(k) + " descriptors, got " +
              std::to_string(n));
  auto assign = [&](const Matrix& c) {
    return backend == Backend::Serial ? serial::assign_nearest(descriptors, c)
                                      : parallel::assign_nearest(descriptors, c);
  };

  // k-means++ seeding.
  std::mt19937_64 rng(seed);
  Codebook cb;
  cb.centroids = Matrix(k, d);
  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  std::copy(descriptors.row(first).begin(), descriptors.row(first).end(),
            cb.centroids.row(0).begin());
  Vector nearest(n);
  for (std::size_t p = 0; p < n; ++p) {
    double dd = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = descriptors(p, i) - cb.centroids(0, i);
      dd += diff * diff;
    }
    nearest[p] = dd;
  }
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : nearest) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t p = 0; p < n; ++p) {
        acc += nearest[p];
        if (acc > target && nearest[p] > 0.0) {
          pick = p;
          break;
        }
      }
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
    std::copy(descriptors.row(pick).begin(), descriptors.row(pick).end(),
              cb.centroids.row(c).begin());
    for (std::size_t p = 0; p < n; ++p) {
      double dd = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = descriptors(p, i) - cb.centroids(c, i);
        dd += diff * diff;
      }
      nearest[p] = std::min(nearest[p], dd);
    }
  }

  // Lloyd iterations.
  std::vector<std::size_t> previous;
  for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iters, 1); ++iter) {
    const Assignment a = assign(cb.centroids);
    double obj = 0.0;
    for (double v : a.squared_distance) obj += v;
    cb.objective.push_back(obj);
    cb.iterations = iter + 1;
    if (a.index == previous) break;
    previous = a.index;
    if (iter + 1 == max_iters) break;

    Matrix sums(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t p = 0; p < n; ++p) {
      auto row = sums.row(a.index[p]);
      const auto src = descriptors.row(p);
      for (std::size_t i = 0; i < d; ++i) row[i] += src[i];
      ++counts[a.index[p]];
    }
    Vector far = a.squared_distance;
    for (std::size_t c = 0; c < k; ++c) {
      auto dst = cb.centroids.row(c);
      if (counts[c] > 0) {
        for (std::size_t i = 0; i < d; ++i) dst[i] = sums(c, i) / double(counts[c]);
        continue;
      }
      const auto p = std::size_t(std::distance(far.begin(), std::max_element(far.begin(), far.end())));
      std::copy(descriptors.row(p).begin(), descriptors.row(p).end(), dst.begin());
      far[p] = -1.0;
    }
  }
  return cb;
}

BowHistogram quantize_histogram(const Matrix& descriptors, const Codebook& codebook,
                                const std::vector<bool>& keep, Backend backend) {
  const std::size_t k = codebook.words();
  require(k >= 1, ErrorCode::InvalidArgument, "empty codebook");
  require(descriptors.rows() == 0 || descriptors.cols() == codebook.centroids.cols(),
          ErrorCode::DimensionMismatch, "descriptor dim does not match codebook");
  require(keep.empty() || keep.size() == descriptors.rows(), ErrorCode::DimensionMismatch,
          "interest mask size does not match descriptors");

  BowHistogram hist;
  hist.frequencies.assign(k, 0.0);
  if (descriptors.rows() > 0) {
    const Assignment a = backend == Backend::Serial
                             ? serial::assign_nearest(descriptors, codebook.centroids)
                             : parallel::assign_nearest(descriptors, codebook.centroids);
    for (std::size_t p = 0; p < descriptors.rows(); ++p) {
      if (!keep.empty() && !keep[p]) continue;
      hist.frequencies[a.index[p]] += 1.0;
      ++hist.retained;
    }
  }
  if (hist.retained == 0) {
    hist.degenerate = true;
    std::fill(hist.frequencies.begin(), hist.frequencies.end(), 1.0 / double(k));
    return hist;
  }
  for (auto& f : hist.frequencies) f /= double(hist.retained);
  return hist;
}

Vector fuse_average(std::span<const double> depth_conf, std::span<const int> depth_classes,
                    std::span<const double> motion_conf, std::span<const int> motion_classes) {
  require(depth_conf.size() == depth_classes.size() && motion_conf.size() == motion_classes.size(),
          ErrorCode::DimensionMismatch, "one confidence per class required");
  require(std::equal(depth_classes.begin(), depth_classes.end(), motion_classes.begin(),
                     motion_classes.end()),
          ErrorCode::UnknownClass, "confidence vectors cover different class sets");
  Vector out(depth_conf.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (depth_conf[i] + motion_conf[i]);
  return out;
}

std::size_t argmax(std::span<const double> v) {
  require(!v.empty(), ErrorCode::InvalidArgument, "argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace ssync
