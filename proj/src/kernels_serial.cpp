#include <limits>

#include "ssync/error.hpp"
#include "ssync/kernels.hpp"

namespace ssync::serial {

Matrix covariance(const Matrix& samples, const Vector& mean) {
  const std::size_t n = samples.rows(), d = samples.cols();
  require(mean.size() == d, ErrorCode::DimensionMismatch, "mean length mismatch");
  Matrix cov(d, d);
  Vector centered(d);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < d; ++i) centered[i] = samples(s, i) - mean[i];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) cov(i, j) += centered[i] * centered[j];
  }
  for (auto& c : cov.data()) c /= double(n);
  return cov;
}

double objective(const FilterBank& bank, const PatchBatch& batch, const ObjectiveOptions& opts) {
  require(batch.count() > 0, ErrorCode::InvalidArgument, "objective of an empty batch");
  double total = 0.0;
  for (std::size_t s = 0; s < batch.count(); ++s) total += sample_objective(bank, batch[s], opts);
  return total / double(batch.count());
}

ObjectiveGradient objective_and_gradient(const FilterBank& bank, const PatchBatch& batch,
                                         const ObjectiveOptions& opts) {
  require(batch.count() > 0, ErrorCode::InvalidArgument, "gradient of an empty batch");
  const std::size_t q = bank.hidden_units(), n = bank.input_dim();
  Matrix gx(q, n), gy(q, n);
  const double weight = 1.0 / double(batch.count());
  double total = 0.0;
  for (std::size_t s = 0; s < batch.count(); ++s)
    total += accumulate_sample_gradient(bank, batch[s], opts, weight, gx, gy);

  ObjectiveGradient out;
  out.objective = total / double(batch.count());
  if (bank.tied()) {
    for (std::size_t i = 0; i < gx.data().size(); ++i) gx.data()[i] += gy.data()[i];
    out.gradient = {std::move(gx), Matrix(), true};
  } else {
    out.gradient = {std::move(gx), std::move(gy), false};
  }
  return out;
}

Matrix encode_batch(const FilterBank& bank, const PatchBatch& batch, EncodingMode mode) {
  Matrix codes(batch.count(), bank.hidden_units());
  for (std::size_t s = 0; s < batch.count(); ++s) {
    const auto code = encode(bank, batch[s], mode);
    std::copy(code.h.begin(), code.h.end(), codes.row(s).begin());
  }
  return codes;
}

Assignment assign_nearest(const Matrix& points, const Matrix& centroids) {
  require(points.cols() == centroids.cols() && centroids.rows() > 0,
          ErrorCode::DimensionMismatch, "point/centroid dimension mismatch");
  Assignment a{std::vector<std::size_t>(points.rows()), Vector(points.rows())};
  for (std::size_t p = 0; p < points.rows(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < centroids.rows(); ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < points.cols(); ++i) {
        const double diff = points(p, i) - centroids(k, i);
        d += diff * diff;
      }
      if (d < best) {
        best = d;
        arg = k;
      }
    }
    a.index[p] = arg;
    a.squared_distance[p] = best;
  }
  return a;
}

}  // namespace ssync::serial
