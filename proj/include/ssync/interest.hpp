#pragma once

#include <span>
#include <vector>

#include "ssync/matrix.hpp"

namespace ssync {

struct InterestConfig {
  double delta = 0.0;
  double delta_factor = 1.0;
};

// L1 norm of a hidden code.
double feature_norm(std::span<const double> code);

// delta_factor * mean L1 norm over the rows of training_codes. Deltas are
// only meaningful for codes of the mode they were calibrated on.
double calibrate_delta(const Matrix& training_codes, double delta_factor);
double calibrate_delta(std::span<const double> training_norms, double delta_factor);

// true = retained (norm >= delta); norm < delta is discarded.
std::vector<bool> threshold_mask(const Matrix& codes, double delta);
std::vector<bool> threshold_mask(std::span<const double> norms, double delta);

}  // namespace ssync
