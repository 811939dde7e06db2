#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssync/matrix.hpp"

namespace ssync {

// One-vs-rest logistic regression over BoW histograms.
struct ActionClassifier {
  std::vector<int> classes;
  Matrix weights;  // classes x d
  Vector bias;

  std::size_t class_count() const { return classes.size(); }
  // Position of `label` in classes; throws UnknownClass.
  std::size_t class_index(int label) const;
};

struct ClassifierConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
};

// Full-batch gradient descent on the per-class logistic loss. The seed only
// orders the per-epoch sample sweep, which fixes the summation order.
ActionClassifier train_classifier(const Matrix& histograms, std::span<const int> labels,
                                  const ClassifierConfig& config);

// Per-class sigmoid confidences in class-list order.
Vector predict_confidences(const ActionClassifier& clf, std::span<const double> histogram);
int predict_class(const ActionClassifier& clf, std::span<const double> histogram);

}  // namespace ssync
