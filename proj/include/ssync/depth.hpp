#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssync/image.hpp"
#include "ssync/matrix.hpp"
#include "ssync/sae.hpp"
#include "ssync/whitening.hpp"

namespace ssync {

inline constexpr std::size_t kDepthBins = 25;

// Equal-width edges over [lo, hi]; bins + 1 values.
Vector linear_depth_bins(double lo, double hi, std::size_t bins = kDepthBins);

// Equal-population edges over the training patch means; bins + 1 strictly
// increasing values, first = min and last = max.
Vector fit_depth_bins(std::span<const double> patch_means, std::size_t bins = kDepthBins);

// Mean over the nonzero ground-truth values.
double nonzero_mean(std::span<const double> ground_truth);

// 1-based label of the half-open bin [edge_k, edge_k+1) holding v; the last
// bin is closed and values outside the edges clamp to the end bins.
int bin_label(double v, std::span<const double> edges);
int make_depth_label(std::span<const double> ground_truth, std::span<const double> edges);

// Softmax regression from hidden codes to depth bins. Inputs are standardized
// with the stored feature mean/scale before the linear map.
struct DepthCalibrator {
  Matrix weights;  // bins x Q
  Vector bias;     // bins
  Vector bin_edges;
  Vector feature_mean;
  Vector feature_scale;

  std::size_t bins() const { return weights.rows(); }
  std::size_t code_dim() const { return weights.cols(); }
};

struct CalibratorConfig {
  std::size_t bins = kDepthBins;
  std::size_t epochs = 50;
  double learning_rate = 0.1;
  std::size_t batch_size = 100;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
};

struct CalibratorFit {
  DepthCalibrator calibrator;
  std::vector<double> loss_trace;  // mean cross-entropy per epoch
};

// codes: one row per sample; labels in 1..bins.
CalibratorFit fit_calibrator(const Matrix& codes, std::span<const int> labels,
                             const CalibratorConfig& config, Vector bin_edges = {});

Vector calibrator_confidences(const DepthCalibrator& cal, std::span<const double> code);
int predict_depth_label(const DepthCalibrator& cal, std::span<const double> code);

// Codes of every densely sampled patch pair, grid_h * grid_w rows (row-major).
struct DenseCodes {
  std::size_t grid_width = 0;
  std::size_t grid_height = 0;
  std::size_t stride = 1;
  std::size_t patch = 16;
  Matrix codes;
};

std::size_t grid_count(std::size_t dim, std::size_t patch, std::size_t stride);

DenseCodes dense_codes(const FilterBank& bank, const WhiteningTransform& whitening,
                       const ImageFrame& left, const ImageFrame& right, std::size_t patch,
                       std::size_t stride, EncodingMode mode = EncodingMode::Depth,
                       Backend backend = Backend::OpenMP);

// Labels 1..bins; 0 marks an absent (masked) cell.
struct DepthMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t stride = 1;
  std::size_t patch = 16;
  std::vector<int> labels;

  friend bool operator==(const DepthMap&, const DepthMap&) = default;
};

DepthMap predict_depth_map(const DepthCalibrator& cal, const DenseCodes& codes);
DepthMap predict_depth_map(const FilterBank& bank, const WhiteningTransform& whitening,
                           const DepthCalibrator& cal, const ImageFrame& left,
                           const ImageFrame& right, std::size_t patch = 16, std::size_t stride = 4,
                           Backend backend = Backend::OpenMP);

DepthMap mask_depth_map(const DepthMap& map, const std::vector<bool>& keep);

// Labels 1..25 map to gray levels 10..250; absent cells are 0.
std::vector<unsigned char> depth_map_levels(const DepthMap& map);

}  // namespace ssync
