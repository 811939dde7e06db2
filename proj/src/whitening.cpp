#include "ssync/whitening.hpp"

#include <cmath>

#include "ssync/error.hpp"
#include "ssync/kernels.hpp"
#include "ssync/symmetric_eigen.hpp"

namespace ssync {
namespace {

WhiteningTransform fit_pca(const Matrix& samples, const KeepRule& keep, double epsilon,
                           bool rescale, Backend backend) {
  const std::size_t n = samples.rows(), d = samples.cols();
  require(n >= 2, ErrorCode::InsufficientData, "PCA needs at least 2 samples");
  require(d >= 1, ErrorCode::InvalidArgument, "PCA needs D >= 1");
  require(epsilon >= 0.0, ErrorCode::InvalidArgument, "epsilon must be non-negative");

  Vector mean(d, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t i = 0; i < d; ++i) mean[i] += samples(s, i);
  for (auto& m : mean) m /= double(n);

  const Matrix cov = backend == Backend::Serial ? serial::covariance(samples, mean)
                                                : parallel::covariance(samples, mean);
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += cov(i, i);
  require(trace > 0.0, ErrorCode::DegenerateData, "samples have zero covariance");

  const auto eig = symmetric_eigen(cov);
  std::size_t usable = d;
  if (rescale) {
    const double floor = 1e-12 * eig.values.front();
    usable = 0;
    while (usable < d && eig.values[usable] > floor) ++usable;
  }

  std::size_t keep_n = usable;
  if (keep.components) {
    require(*keep.components >= 1, ErrorCode::InvalidArgument, "must keep at least 1 component");
    keep_n = std::min(keep_n, *keep.components);
  }
  if (keep.variance_fraction) {
    const double frac = *keep.variance_fraction;
    require(frac > 0.0 && frac <= 1.0, ErrorCode::InvalidArgument,
            "variance fraction must lie in (0, 1]");
    double acc = 0.0;
    std::size_t k = 0;
    while (k < keep_n && acc < frac * trace) acc += eig.values[k++];
    keep_n = std::max<std::size_t>(k, 1);
  }

  WhiteningTransform t;
  t.mean = std::move(mean);
  t.epsilon = epsilon;
  t.rescaled = rescale;
  t.eigenvalues.assign(eig.values.begin(), eig.values.begin() + std::ptrdiff_t(keep_n));
  t.projection = Matrix(keep_n, d);
  for (std::size_t k = 0; k < keep_n; ++k) {
    const double scale = rescale ? 1.0 / std::sqrt(eig.values[k] + epsilon) : 1.0;
    for (std::size_t i = 0; i < d; ++i) t.projection(k, i) = scale * eig.vectors(i, k);
  }
  return t;
}

}  // namespace

WhiteningTransform WhiteningTransform::identity(std::size_t dim) {
  WhiteningTransform t;
  t.mean.assign(dim, 0.0);
  t.projection = Matrix::identity(dim);
  t.eigenvalues.assign(dim, 1.0);
  return t;
}

WhiteningTransform fit_pca_whitening(const Matrix& samples, const KeepRule& keep, double epsilon,
                                     Backend backend) {
  return fit_pca(samples, keep, epsilon, true, backend);
}

Vector apply_whitening(const WhiteningTransform& t, std::span<const double> v) {
  require(v.size() == t.input_dim(), ErrorCode::DimensionMismatch,
          "vector length " + std::to_string(v.size()) + " does not match transform input " +
              std::to_string(t.input_dim()));
  Vector centered(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) centered[i] = v[i] - t.mean[i];
  return matvec(t.projection, centered);
}

Matrix apply_whitening_rows(const WhiteningTransform& t, const Matrix& rows, Backend backend) {
  require(rows.cols() == t.input_dim(), ErrorCode::DimensionMismatch,
          "row length does not match transform input");
  Matrix out(rows.rows(), t.output_dim());
  const auto count = static_cast<std::ptrdiff_t>(rows.rows());
#pragma omp parallel for schedule(static) if (backend == Backend::OpenMP)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    const auto w = apply_whitening(t, rows.row(std::size_t(r)));
    std::copy(w.begin(), w.end(), out.row(std::size_t(r)).begin());
  }
  return out;
}

WhiteningTransform pca_reduce_fit(const Matrix& descriptors, std::size_t d_out, Backend backend) {
  require(d_out >= 1 && d_out <= descriptors.cols(), ErrorCode::InvalidArgument,
          "PCA target dimension must lie in [1, D]");
  return fit_pca(descriptors, KeepRule{d_out, std::nullopt}, 0.0, false, backend);
}

Vector pca_reduce_apply(const WhiteningTransform& t, std::span<const double> v) {
  return apply_whitening(t, v);
}

Vector pca_reconstruct(const WhiteningTransform& t, std::span<const double> reduced) {
  require(reduced.size() == t.output_dim(), ErrorCode::DimensionMismatch,
          "reduced vector length mismatch");
  Vector out = matvec_transposed(t.projection, reduced);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += t.mean[i];
  return out;
}

}  // namespace ssync
