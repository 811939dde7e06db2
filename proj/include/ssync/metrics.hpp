#pragma once

#include <span>
#include <vector>

#include "ssync/matrix.hpp"

namespace ssync {

// Mean over positive items of precision at their rank. Items are ranked by
// descending score, ties by ascending index. Throws when no positive exists.
double average_precision(std::span<const double> scores, std::span<const bool> positive);
double average_precision(std::span<const double> scores, const std::vector<bool>& positive);

double mean_ap(std::span<const double> per_class_ap);

double correct_classification_rate(std::span<const int> predictions, std::span<const int> labels);

struct EvaluationReport {
  std::vector<int> classes;
  std::vector<int> ap_classes;  // classes with at least one positive test item
  Vector per_class_ap;          // parallel to ap_classes
  double mean_ap = 0.0;
  double cc_rate = 0.0;
};

// confidences: one row per test item, columns in `classes` order.
EvaluationReport evaluate(const Matrix& confidences, std::span<const int> classes,
                          std::span<const int> labels);

}  // namespace ssync
