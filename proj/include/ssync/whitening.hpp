#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "ssync/matrix.hpp"
#include "ssync/sae.hpp"

namespace ssync {

// projection is d_keep x D. For whitening, row k is e_k / sqrt(lambda_k + eps);
// for plain PCA reduction (rescaled == false) rows are unit eigenvectors.
struct WhiteningTransform {
  Vector mean;
  Matrix projection;
  Vector eigenvalues;
  double epsilon = 0.0;
  bool rescaled = true;

  std::size_t input_dim() const { return mean.size(); }
  std::size_t output_dim() const { return projection.rows(); }

  static WhiteningTransform identity(std::size_t dim);
};

// How many principal components to keep. Unset fields keep everything.
struct KeepRule {
  std::optional<std::size_t> components;
  std::optional<double> variance_fraction;
};

inline constexpr double kDefaultWhiteningEpsilon = 1e-8;

// Rows of samples are observations. Components whose eigenvalue is
// numerically zero (<= 1e-12 of the largest) are always dropped.
WhiteningTransform fit_pca_whitening(const Matrix& samples, const KeepRule& keep = {},
                                     double epsilon = kDefaultWhiteningEpsilon,
                                     Backend backend = Backend::OpenMP);

Vector apply_whitening(const WhiteningTransform& t, std::span<const double> v);
Matrix apply_whitening_rows(const WhiteningTransform& t, const Matrix& rows,
                            Backend backend = Backend::OpenMP);

WhiteningTransform pca_reduce_fit(const Matrix& descriptors, std::size_t d_out,
                                  Backend backend = Backend::OpenMP);
Vector pca_reduce_apply(const WhiteningTransform& t, std::span<const double> v);
// proj^T v + mean, the inverse of pca_reduce_apply on the retained subspace.
Vector pca_reconstruct(const WhiteningTransform& t, std::span<const double> reduced);

}  // namespace ssync
