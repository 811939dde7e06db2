#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssync/matrix.hpp"

namespace ssync {

// Two vectorized crops taken at identical positions of two views (or, for
// sequences, T frames concatenated frame-major so N = T * M).
struct PatchPair {
  Vector x;
  Vector y;
  std::size_t size() const { return x.size(); }
  friend bool operator==(const PatchPair&, const PatchPair&) = default;
};

// Non-owning view of a pair, e.g. one row of a PatchBatch.
struct PairRef {
  std::span<const double> x;
  std::span<const double> y;

  PairRef(std::span<const double> x_, std::span<const double> y_) : x(x_), y(y_) {}
  PairRef(const PatchPair& p) : x(p.x), y(p.y) {}  // NOLINT(google-explicit-constructor)
  std::size_t size() const { return x.size(); }
};

// Row i of x and y hold sample i.
struct PatchBatch {
  Matrix x;
  Matrix y;

  PatchBatch() = default;
  PatchBatch(std::size_t count, std::size_t dim) : x(count, dim), y(count, dim) {}

  std::size_t count() const { return x.rows(); }
  std::size_t dim() const { return x.cols(); }
  PairRef operator[](std::size_t i) const { return {x.row(i), y.row(i)}; }

  static PatchBatch from_pairs(std::span<const PatchPair> pairs);
  // Selects rows in the given order.
  PatchBatch gather(std::span<const std::size_t> rows) const;
};

}  // namespace ssync
