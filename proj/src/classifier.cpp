#include "ssync/classifier.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ssync/error.hpp"
#include "ssync/recognition.hpp"
#include "ssync/sae.hpp"

namespace ssync {

std::size_t ActionClassifier::class_index(int label) const {
  const auto it = std::find(classes.begin(), classes.end(), label);
  require(it != classes.end(), ErrorCode::UnknownClass,
          "class " + std::to_string(label) + " was not seen in training");
  return std::size_t(std::distance(classes.begin(), it));
}

ActionClassifier train_classifier(const Matrix& histograms, std::span<const int> labels,
                                  const ClassifierConfig& config) {
  const std::size_t n = histograms.rows(), d = histograms.cols();
  require(n > 0, ErrorCode::InsufficientData, "no training histograms");
  require(labels.size() == n, ErrorCode::DimensionMismatch, "one label per histogram required");
  require(config.learning_rate >= 0.0, ErrorCode::InvalidArgument, "learning rate must be >= 0");

  ActionClassifier clf;
  const std::set<int> distinct(labels.begin(), labels.end());
  clf.classes.assign(distinct.begin(), distinct.end());
  const std::size_t c = clf.classes.size();
  clf.weights = Matrix(c, d);
  clf.bias.assign(c, 0.0);

  std::vector<std::size_t> target(n);
  for (std::size_t s = 0; s < n; ++s) target[s] = clf.class_index(labels[s]);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  Matrix grad_w(c, d);
  Vector grad_b(c);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    std::fill(grad_w.data().begin(), grad_w.data().end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (std::size_t s : order) {
      const auto h = histograms.row(s);
      for (std::size_t k = 0; k < c; ++k) {
        const double p = sigmoid(dot(clf.weights.row(k), h) + clf.bias[k]);
        const double err = p - (target[s] == k ? 1.0 : 0.0);
        grad_b[k] += err;
        auto gw = grad_w.row(k);
        for (std::size_t i = 0; i < d; ++i) gw[i] += err * h[i];
      }
    }
    const double scale = config.learning_rate / double(n);
    for (std::size_t k = 0; k < c; ++k) {
      clf.bias[k] -= scale * grad_b[k];
      auto w = clf.weights.row(k);
      const auto gw = grad_w.row(k);
      for (std::size_t i = 0; i < d; ++i)
        w[i] -= scale * gw[i] + config.learning_rate * config.l2 * w[i];
    }
  }
  return clf;
}

Vector predict_confidences(const ActionClassifier& clf, std::span<const double> histogram) {
  require(histogram.size() == clf.weights.cols(), ErrorCode::DimensionMismatch,
          "histogram length does not match classifier");
  Vector conf(clf.class_count());
  for (std::size_t k = 0; k < conf.size(); ++k)
    conf[k] = sigmoid(dot(clf.weights.row(k), histogram) + clf.bias[k]);
  return conf;
}

int predict_class(const ActionClassifier& clf, std::span<const double> histogram) {
  return clf.classes[argmax(predict_confidences(clf, histogram))];
}

}  // namespace ssync
