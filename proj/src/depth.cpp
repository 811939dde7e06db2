#include "ssync/depth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "ssync/corpus.hpp"
#include "ssync/error.hpp"

namespace ssync {

Vector linear_depth_bins(double lo, double hi, std::size_t bins) {
  require(bins >= 1 && hi > lo, ErrorCode::InvalidArgument, "linear bins need hi > lo");
  Vector edges(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) edges[k] = lo + (hi - lo) * double(k) / double(bins);
  return edges;
}

Vector fit_depth_bins(std::span<const double> patch_means, std::size_t bins) {
  require(bins >= 1, ErrorCode::InvalidArgument, "need at least one bin");
  const std::set<double> distinct(patch_means.begin(), patch_means.end());
  require(distinct.size() >= bins, ErrorCode::InsufficientData,
          "need at least " + std::to_string(bins) + " distinct patch means, got " +
              std::to_string(distinct.size()));
  std::vector<double> sorted(patch_means.begin(), patch_means.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  Vector edges(bins + 1);
  edges.front() = sorted.front();
  edges.back() = sorted.back();
  for (std::size_t k = 1; k < bins; ++k) edges[k] = sorted[k * n / bins];
  for (std::size_t k = 1; k <= bins; ++k)
    require(edges[k] > edges[k - 1], ErrorCode::InsufficientData,
            "quantile edges collapse; too many tied patch means");
  return edges;
}

double nonzero_mean(std::span<const double> ground_truth) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : ground_truth)
    if (v != 0.0) {
      sum += v;
      ++count;
    }
  require(count > 0, ErrorCode::InvalidArgument, "ground-truth patch has no nonzero value");
  return sum / double(count);
}

int bin_label(double v, std::span<const double> edges) {
  require(edges.size() >= 2, ErrorCode::InvalidArgument, "need at least two bin edges");
  const std::size_t bins = edges.size() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  std::ptrdiff_t k = std::distance(edges.begin(), it) - 1;
  k = std::clamp<std::ptrdiff_t>(k, 0, std::ptrdiff_t(bins) - 1);
  return int(k) + 1;
}

int make_depth_label(std::span<const double> ground_truth, std::span<const double> edges) {
  return bin_label(nonzero_mean(ground_truth), edges);
}

namespace {

void softmax_inplace(Vector& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

Vector standardize(const DepthCalibrator& cal, std::span<const double> code) {
  require(code.size() == cal.code_dim(), ErrorCode::DimensionMismatch,
          "code length does not match calibrator");
  Vector z(code.size());
  for (std::size_t i = 0; i < code.size(); ++i)
    z[i] = (code[i] - cal.feature_mean[i]) / cal.feature_scale[i];
  return z;
}

Vector logits(const DepthCalibrator& cal, std::span<const double> z) {
  Vector out = matvec(cal.weights, z);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += cal.bias[k];
  return out;
}

}  // namespace

CalibratorFit fit_calibrator(const Matrix& codes, std::span<const int> labels,
                             const CalibratorConfig& config, Vector bin_edges) {
  const std::size_t n = codes.rows(), d = codes.cols(), bins = config.bins;
  require(n > 0, ErrorCode::InsufficientData, "no codes to calibrate on");
  require(labels.size() == n, ErrorCode::DimensionMismatch, "one label per code required");
  require(bins >= 2 && config.batch_size >= 1 && config.learning_rate >= 0.0,
          ErrorCode::InvalidArgument, "invalid calibrator config");
  for (int l : labels)
    require(l >= 1 && std::size_t(l) <= bins, ErrorCode::OutOfRange,
            "depth label " + std::to_string(l) + " outside 1.." + std::to_string(bins));

  DepthCalibrator cal;
  cal.weights = Matrix(bins, d);
  cal.bias.assign(bins, 0.0);
  cal.bin_edges = std::move(bin_edges);
  cal.feature_mean.assign(d, 0.0);
  cal.feature_scale.assign(d, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < d; ++i) cal.feature_mean[i] += codes(s, i);
  for (auto& m : cal.feature_mean) m /= double(n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < d; ++i) {
      const double c = codes(s, i) - cal.feature_mean[i];
      cal.feature_scale[i] += c * c;
    }
  for (auto& sc : cal.feature_scale) sc = std::sqrt(sc / double(n)) + 1e-8;

  Matrix z(n, d);
  for (std::size_t s = 0; s < n; ++s) {
    const Vector zs = standardize(cal, codes.row(s));
    std::copy(zs.begin(), zs.end(), z.row(s).begin());
  }

  CalibratorFit fit;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  Matrix grad_w(bins, d);
  Vector grad_b(bins);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      std::fill(grad_w.data().begin(), grad_w.data().end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      for (std::size_t b = begin; b < end; ++b) {
        const auto zs = z.row(order[b]);
        Vector p = logits(cal, zs);
        softmax_inplace(p);
        const auto target = std::size_t(labels[order[b]] - 1);
        loss -= std::log(std::max(p[target], 1e-300));
        p[target] -= 1.0;
        for (std::size_t k = 0; k < bins; ++k) {
          grad_b[k] += p[k];
          auto gw = grad_w.row(k);
          for (std::size_t i = 0; i < d; ++i) gw[i] += p[k] * zs[i];
        }
      }
      const double scale = config.learning_rate / double(end - begin);
      for (std::size_t k = 0; k < bins; ++k) {
        cal.bias[k] -= scale * grad_b[k];
        auto w = cal.weights.row(k);
        const auto gw = grad_w.row(k);
        for (std::size_t i = 0; i < d; ++i)
          w[i] -= scale * gw[i] + config.learning_rate * config.l2 * w[i];
      }
    }
    fit.loss_trace.push_back(loss / double(n));
  }
  fit.calibrator = std::move(cal);
  return fit;
}

Vector calibrator_confidences(const DepthCalibrator& cal, std::span<const double> code) {
  Vector p = logits(cal, standardize(cal, code));
  softmax_inplace(p);
  return p;
}

int predict_depth_label(const DepthCalibrator& cal, std::span<const double> code) {
  const Vector p = logits(cal, standardize(cal, code));
  return int(std::distance(p.begin(), std::max_element(p.begin(), p.end()))) + 1;
}

std::size_t grid_count(std::size_t dim, std::size_t patch, std::size_t stride) {
  require(stride >= 1, ErrorCode::InvalidArgument, "stride must be >= 1");
  require(patch >= 1 && patch <= dim, ErrorCode::OutOfRange, "patch larger than frame");
  return (dim - patch) / stride + 1;
}

DenseCodes dense_codes(const FilterBank& bank, const WhiteningTransform& whitening,
                       const ImageFrame& left, const ImageFrame& right, std::size_t patch,
                       std::size_t stride, EncodingMode mode, Backend backend) {
  require(left.width == right.width && left.height == right.height,
          ErrorCode::DimensionMismatch, "stereo views differ in size");
  DenseCodes out;
  out.grid_width = grid_count(left.width, patch, stride);
  out.grid_height = grid_count(left.height, patch, stride);
  out.stride = stride;
  out.patch = patch;
  require(whitening.input_dim() == patch * patch, ErrorCode::DimensionMismatch,
          "whitening input does not match patch size");
  require(whitening.output_dim() == bank.input_dim(), ErrorCode::DimensionMismatch,
          "whitening output does not match bank");

  const std::size_t cells = out.grid_width * out.grid_height;
  PatchBatch batch(cells, whitening.output_dim());
  const PatchGeometry g{patch, patch, 1};
  const std::vector<ImageFrame> lv{left}, rv{right};
  const auto count = static_cast<std::ptrdiff_t>(cells);
#pragma omp parallel for schedule(static) if (backend == Backend::OpenMP)
  for (std::ptrdiff_t ci = 0; ci < count; ++ci) {
    const auto c = std::size_t(ci);
    const CropWindow w{0, 0, (c / out.grid_width) * stride, (c % out.grid_width) * stride};
    const Vector x = apply_whitening(whitening, crop_block(lv, w, g));
    const Vector y = apply_whitening(whitening, crop_block(rv, w, g));
    std::copy(x.begin(), x.end(), batch.x.row(c).begin());
    std::copy(y.begin(), y.end(), batch.y.row(c).begin());
  }
  out.codes = encode_batch(bank, batch, mode, backend);
  return out;
}

DepthMap predict_depth_map(const DepthCalibrator& cal, const DenseCodes& codes) {
  DepthMap map{codes.grid_width, codes.grid_height, codes.stride, codes.patch, {}};
  map.labels.resize(codes.codes.rows());
  for (std::size_t c = 0; c < map.labels.size(); ++c)
    map.labels[c] = predict_depth_label(cal, codes.codes.row(c));
  return map;
}

DepthMap predict_depth_map(const FilterBank& bank, const WhiteningTransform& whitening,
                           const DepthCalibrator& cal, const ImageFrame& left,
                           const ImageFrame& right, std::size_t patch, std::size_t stride,
                           Backend backend) {
  return predict_depth_map(
      cal, dense_codes(bank, whitening, left, right, patch, stride, EncodingMode::Depth, backend));
}

DepthMap mask_depth_map(const DepthMap& map, const std::vector<bool>& keep) {
  require(keep.size() == map.labels.size(), ErrorCode::DimensionMismatch,
          "mask size does not match depth map");
  DepthMap out = map;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (!keep[i]) out.labels[i] = 0;
  return out;
}

std::vector<unsigned char> depth_map_levels(const DepthMap& map) {
  std::vector<unsigned char> levels(map.labels.size());
  for (std::size_t i = 0; i < levels.size(); ++i)
    levels[i] = static_cast<unsigned char>(std::clamp(map.labels[i] * 10, 0, 255));
  return levels;
}

}  // namespace ssync
