#include "ssync/metrics.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

#include "ssync/error.hpp"
#include "ssync/recognition.hpp"

namespace ssync {

double average_precision(std::span<const double> scores, std::span<const bool> positive) {
  require(scores.size() == positive.size(), ErrorCode::DimensionMismatch,
          "one label per score required");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (!positive[order[rank]]) continue;
    ++hits;
    sum += double(hits) / double(rank + 1);
  }
  require(hits > 0, ErrorCode::InsufficientData, "average precision needs a positive item");
  return sum / double(hits);
}

double average_precision(std::span<const double> scores, const std::vector<bool>& positive) {
  const std::unique_ptr<bool[]> flags(new bool[positive.size()]);
  std::copy(positive.begin(), positive.end(), flags.get());
  return average_precision(scores, std::span<const bool>(flags.get(), positive.size()));
}

double mean_ap(std::span<const double> per_class_ap) {
  require(!per_class_ap.empty(), ErrorCode::InsufficientData, "no per-class APs");
  return std::accumulate(per_class_ap.begin(), per_class_ap.end(), 0.0) /
         double(per_class_ap.size());
}

double correct_classification_rate(std::span<const int> predictions, std::span<const int> labels) {
  require(predictions.size() == labels.size() && !labels.empty(), ErrorCode::DimensionMismatch,
          "predictions and labels must be nonempty and equally long");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i];
  return double(correct) / double(labels.size());
}

EvaluationReport evaluate(const Matrix& confidences, std::span<const int> classes,
                          std::span<const int> labels) {
  require(confidences.rows() == labels.size() && confidences.cols() == classes.size(),
          ErrorCode::DimensionMismatch, "confidence matrix shape mismatch");
  for (int l : labels)
    require(std::find(classes.begin(), classes.end(), l) != classes.end(),
            ErrorCode::UnknownClass, "test label " + std::to_string(l) + " unknown to classifier");

  EvaluationReport r;
  r.classes.assign(classes.begin(), classes.end());
  std::vector<int> predicted(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    predicted[i] = classes[argmax(confidences.row(i))];
  for (std::size_t k = 0; k < classes.size(); ++k) {
    Vector scores(labels.size());
    std::vector<bool> pos(labels.size());
    bool any = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      scores[i] = confidences(i, k);
      pos[i] = labels[i] == classes[k];
      any = any || pos[i];
    }
    if (!any) continue;
    r.ap_classes.push_back(classes[k]);
    r.per_class_ap.push_back(average_precision(scores, pos));
  }
  r.mean_ap = mean_ap(r.per_class_ap);
  r.cc_rate = correct_classification_rate(predicted, labels);
  return r;
}

}  // namespace ssync
