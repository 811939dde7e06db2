#pragma once

#include "ssync/matrix.hpp"

namespace ssync {

struct EigenDecomposition {
  Vector values;   // descending
  Matrix vectors;  // column k is the unit eigenvector for values[k]
};

// Cyclic Jacobi rotations. Stops once every off-diagonal magnitude is below
// tolerance * |trace| (or the sweep limit is hit).
EigenDecomposition symmetric_eigen(const Matrix& a, double tolerance = 1e-10,
                                   int max_sweeps = 100);

}  // namespace ssync
