#pragma once

// Data-parallel kernels. `serial` is the straightforward reference kept for
// testing; `parallel` is the OpenMP version used by default. Every parallel
// kernel reduces in sample-index order, so its output does not depend on the
// thread count.

#include <cstddef>
#include <vector>

#include "ssync/matrix.hpp"
#include "ssync/patch.hpp"
#include "ssync/sae.hpp"

namespace ssync {

struct Assignment {
  std::vector<std::size_t> index;  // nearest centroid, lowest index on ties
  Vector squared_distance;
};

namespace serial {

// Population covariance (1/n) of the rows of samples about mean.
Matrix covariance(const Matrix& samples, const Vector& mean);
double objective(const FilterBank& bank, const PatchBatch& batch, const ObjectiveOptions& opts);
ObjectiveGradient objective_and_gradient(const FilterBank& bank, const PatchBatch& batch,
                                         const ObjectiveOptions& opts);
Matrix encode_batch(const FilterBank& bank, const PatchBatch& batch, EncodingMode mode);
Assignment assign_nearest(const Matrix& points, const Matrix& centroids);

}  // namespace serial

namespace parallel {

Matrix covariance(const Matrix& samples, const Vector& mean);
double objective(const FilterBank& bank, const PatchBatch& batch, const ObjectiveOptions& opts);
ObjectiveGradient objective_and_gradient(const FilterBank& bank, const PatchBatch& batch,
                                         const ObjectiveOptions& opts);
Matrix encode_batch(const FilterBank& bank, const PatchBatch& batch, EncodingMode mode);
Assignment assign_nearest(const Matrix& points, const Matrix& centroids);

}  // namespace parallel

// Caps OpenMP workers; 0 leaves the runtime default.
void set_thread_count(int threads);
int thread_count();

}  // namespace ssync
