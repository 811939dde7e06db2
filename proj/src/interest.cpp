#include "ssync/interest.hpp"

#include <cmath>

#include "ssync/error.hpp"

namespace ssync {

double feature_norm(std::span<const double> code) {
  double n = 0.0;
  for (double v : code) n += std::abs(v);
  return n;
}

double calibrate_delta(std::span<const double> training_norms, double delta_factor) {
  require(!training_norms.empty(), ErrorCode::InsufficientData, "no training codes for delta");
  require(delta_factor >= 0.0, ErrorCode::InvalidArgument, "delta factor must be >= 0");
  double sum = 0.0;
  for (double n : training_norms) sum += n;
  return delta_factor * sum / double(training_norms.size());
}

double calibrate_delta(const Matrix& training_codes, double delta_factor) {
  Vector norms(training_codes.rows());
  for (std::size_t r = 0; r < norms.size(); ++r) norms[r] = feature_norm(training_codes.row(r));
  return calibrate_delta(norms, delta_factor);
}

std::vector<bool> threshold_mask(std::span<const double> norms, double delta) {
  std::vector<bool> mask(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) mask[i] = !(norms[i] < delta);
  return mask;
}

std::vector<bool> threshold_mask(const Matrix& codes, double delta) {
  Vector norms(codes.rows());
  for (std::size_t r = 0; r < norms.size(); ++r) norms[r] = feature_norm(codes.row(r));
  return threshold_mask(norms, delta);
}

}  // namespace ssync
