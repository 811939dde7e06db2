#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ssync/matrix.hpp"

namespace ssync {

// On-disk layout: "SSTF", version 0x01, dtype 0x01 (float32 LE), rank byte,
// rank x uint32 LE dims, row-major payload.
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

inline constexpr std::uint8_t kTensorVersion = 0x01;
inline constexpr std::uint8_t kDtypeFloat32 = 0x01;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void save_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);

// Convenience conversions for the double-precision types used in memory.
Tensor to_tensor(const Matrix& m);
Tensor to_tensor(std::span<const double> v);
Matrix tensor_to_matrix(const Tensor& t);
Vector tensor_to_vector(const Tensor& t);

}  // namespace ssync
