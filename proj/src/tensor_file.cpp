#include "ssync/tensor_file.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "ssync/error.hpp"

namespace ssync {
namespace {

constexpr char kMagic[4] = {'S', 'S', 'T', 'F'};
constexpr std::size_t kFixedHeader = 7;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = dims.empty() ? 0 : 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  require(!t.dims.empty() && t.dims.size() <= 255, ErrorCode::InvalidArgument,
          "tensor rank must be in [1, 255]");
  for (auto d : t.dims) require(d >= 1, ErrorCode::InvalidArgument, "tensor dims must be >= 1");
  require(t.values.size() == t.element_count(), ErrorCode::DimensionMismatch,
          "tensor payload does not match dims");
  for (float v : t.values)
    require(std::isfinite(v), ErrorCode::InvalidArgument, "tensor payload must be finite");

  std::vector<std::uint8_t> out;
  out.reserve(kFixedHeader + 4 * t.dims.size() + 4 * t.values.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kTensorVersion);
  out.push_back(kDtypeFloat32);
  out.push_back(static_cast<std::uint8_t>(t.dims.size()));
  for (auto d : t.dims) put_u32(out, d);
  for (float v : t.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  require(bytes.size() >= kFixedHeader && std::memcmp(bytes.data(), kMagic, 4) == 0,
          ErrorCode::MalformedHeader, "missing SSTF magic");
  require(bytes[4] == kTensorVersion, ErrorCode::MalformedHeader,
          "unsupported tensor version " + std::to_string(bytes[4]));
  require(bytes[5] == kDtypeFloat32, ErrorCode::UnsupportedDtype,
          "unsupported dtype code " + std::to_string(bytes[5]));
  const std::size_t rank = bytes[6];
  require(rank >= 1, ErrorCode::MalformedHeader, "tensor rank is zero");
  require(bytes.size() >= kFixedHeader + 4 * rank, ErrorCode::MalformedHeader,
          "header shorter than declared rank");

  Tensor t;
  const std::uint8_t* p = bytes.data() + kFixedHeader;
  for (std::size_t i = 0; i < rank; ++i, p += 4) {
    t.dims.push_back(get_u32(p));
    require(t.dims.back() >= 1, ErrorCode::MalformedHeader, "zero-sized dimension");
  }
  const std::size_t n = t.element_count();
  const std::size_t payload = bytes.size() - kFixedHeader - 4 * rank;
  require(payload >= 4 * n, ErrorCode::TruncatedPayload,
          "payload holds " + std::to_string(payload / 4) + " values, expected " +
              std::to_string(n));
  require(payload == 4 * n, ErrorCode::MalformedHeader, "trailing bytes after payload");
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i, p += 4) t.values[i] = std::bit_cast<float>(get_u32(p));
  return t;
}

void save_tensor(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::Io, "write failed: " + path.string());
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

Tensor to_tensor(const Matrix& m) {
  Tensor t{{static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())}, {}};
  t.values.assign(m.data().begin(), m.data().end());
  return t;
}

Tensor to_tensor(std::span<const double> v) {
  Tensor t{{static_cast<std::uint32_t>(v.size())}, {}};
  t.values.assign(v.begin(), v.end());
  return t;
}

Matrix tensor_to_matrix(const Tensor& t) {
  require(t.dims.size() == 2, ErrorCode::DimensionMismatch, "expected a rank-2 tensor");
  Matrix m(t.dims[0], t.dims[1]);
  std::copy(t.values.begin(), t.values.end(), m.data().begin());
  return m;
}

Vector tensor_to_vector(const Tensor& t) {
  require(t.dims.size() == 1, ErrorCode::DimensionMismatch, "expected a rank-1 tensor");
  return Vector(t.values.begin(), t.values.end());
}

}  // namespace ssync
