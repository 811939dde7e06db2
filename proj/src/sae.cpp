#include "ssync/sae.hpp"

#include <cmath>
#include <random>

#include "ssync/error.hpp"
#include "ssync/kernels.hpp"

namespace ssync {

std::string to_string(EncodingMode mode) {
  switch (mode) {
    case EncodingMode::Depth: return "D";
    case EncodingMode::Motion: return "M";
    case EncodingMode::Joint: return "MD";
  }
  return "?";
}

EncodingMode parse_encoding_mode(const std::string& text) {
  if (text == "D") return EncodingMode::Depth;
  if (text == "M") return EncodingMode::Motion;
  if (text == "MD") return EncodingMode::Joint;
  throw Error(ErrorCode::InvalidArgument, "unknown encoding mode '" + text + "' (want D, M or MD)");
}

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

FilterBank::FilterBank(Matrix wx, Matrix wy, EncodingMode mode)
    : wx_(std::move(wx)), wy_(std::move(wy)), tied_(false), mode_(mode) {
  require(wx_.rows() == wy_.rows() && wx_.cols() == wy_.cols(), ErrorCode::DimensionMismatch,
          "Wx and Wy must share one shape");
}

FilterBank FilterBank::make_tied(Matrix w, EncodingMode mode) {
  FilterBank b;
  b.wx_ = std::move(w);
  b.tied_ = true;
  b.mode_ = mode;
  return b;
}

FilterBank FilterBank::random(std::size_t hidden, std::size_t input_dim, bool tied,
                              EncodingMode mode, double scale, std::uint64_t seed) {
  require(hidden >= 1 && input_dim >= 1, ErrorCode::InvalidArgument, "bank shape must be positive");
  if (scale <= 0.0) scale = 1.0 / std::sqrt(double(input_dim));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix wx(hidden, input_dim);
  for (auto& w : wx.data()) w = u(rng);
  if (tied) return make_tied(std::move(wx), mode);
  Matrix wy(hidden, input_dim);
  for (auto& w : wy.data()) w = u(rng);
  return FilterBank(std::move(wx), std::move(wy), mode);
}

Matrix& FilterBank::mutable_wy() {
  require(!tied_, ErrorCode::InvalidArgument, "tied bank has no separate Wy");
  return wy_;
}

namespace {

void check_pair(const FilterBank& bank, PairRef pair) {
  require(pair.x.size() == bank.input_dim() && pair.y.size() == bank.input_dim(),
          ErrorCode::DimensionMismatch,
          "pair length " + std::to_string(pair.x.size()) + "/" + std::to_string(pair.y.size()) +
              " does not match bank input dim " + std::to_string(bank.input_dim()));
}

}  // namespace

Factors factors(const FilterBank& bank, PairRef pair) {
  check_pair(bank, pair);
  return {matvec(bank.wx(), pair.x), matvec(bank.wy(), pair.y)};
}

HiddenCode encode_pair(const FilterBank& bank, PairRef pair) {
  const auto f = factors(bank, pair);
  HiddenCode code{Vector(f.fx.size()), EncodingMode::Depth};
  for (std::size_t q = 0; q < f.fx.size(); ++q) code.h[q] = sigmoid(f.fx[q] * f.fy[q]);
  return code;
}

HiddenCode encode_motion(const FilterBank& bank, std::span<const double> x) {
  require(bank.tied(), ErrorCode::ModeMismatch, "motion encoding needs a tied bank");
  require(x.size() == bank.input_dim(), ErrorCode::DimensionMismatch,
          "input length does not match bank");
  const Vector fx = matvec(bank.wx(), x);
  HiddenCode code{Vector(fx.size()), EncodingMode::Motion};
  for (std::size_t q = 0; q < fx.size(); ++q) code.h[q] = sigmoid(fx[q] * fx[q]);
  return code;
}

HiddenCode encode_joint(const FilterBank& bank, PairRef pair) {
  const auto f = factors(bank, pair);
  HiddenCode code{Vector(f.fx.size()), EncodingMode::Joint};
  for (std::size_t q = 0; q < f.fx.size(); ++q) {
    const double sx = f.fx[q] * f.fx[q], sy = f.fy[q] * f.fy[q];
    code.h[q] = sigmoid(sx * sy);
  }
  return code;
}

HiddenCode encode(const FilterBank& bank, PairRef pair, EncodingMode mode) {
  switch (mode) {
    case EncodingMode::Depth: return encode_pair(bank, pair);
    case EncodingMode::Motion: return encode_motion(bank, pair.x);
    case EncodingMode::Joint: return encode_joint(bank, pair);
  }
  throw Error(ErrorCode::InvalidArgument, "bad encoding mode");
}

Reconstruction decode(const FilterBank& bank, const HiddenCode& code, const Factors& f) {
  const std::size_t q = bank.hidden_units();
  require(code.h.size() == q && f.fx.size() == q && f.fy.size() == q,
          ErrorCode::DimensionMismatch, "code/factor length does not match bank");
  Vector u(q), v(q);
  for (std::size_t j = 0; j < q; ++j) {
    u[j] = code.h[j] * f.fy[j];
    v[j] = code.h[j] * f.fx[j];
  }
  return {matvec_transposed(bank.wx(), u), matvec_transposed(bank.wy(), v)};
}

double reconstruction_loss(PairRef pair, const Reconstruction& r) {
  require(pair.x.size() == r.x.size() && pair.y.size() == r.y.size(),
          ErrorCode::DimensionMismatch, "reconstruction length mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) loss += (pair.x[i] - r.x[i]) * (pair.x[i] - r.x[i]);
  for (std::size_t i = 0; i < r.y.size(); ++i) loss += (pair.y[i] - r.y[i]) * (pair.y[i] - r.y[i]);
  return loss;
}

double contraction_penalty(const FilterBank& bank, PairRef pair, JacobianPairing pairing) {
  const auto f = factors(bank, pair);
  double penalty = 0.0;
  for (std::size_t j = 0; j < f.fx.size(); ++j) {
    const double h = sigmoid(f.fx[j] * f.fy[j]);
    const double s = h * (1.0 - h);
    const double cx = squared_norm(bank.wx().row(j));
    const double cy = squared_norm(bank.wy().row(j));
    const double fx2 = f.fx[j] * f.fx[j], fy2 = f.fy[j] * f.fy[j];
    const double e = pairing == JacobianPairing::Analytic ? fy2 * cx + fx2 * cy
                                                          : fx2 * cx + fy2 * cy;
    penalty += s * s * e;
  }
  return penalty;
}

double sample_objective(const FilterBank& bank, PairRef pair, const ObjectiveOptions& opts) {
  const auto f = factors(bank, pair);
  const auto code = encode_pair(bank, pair);
  const double loss = reconstruction_loss(pair, decode(bank, code, f));
  if (opts.lambda == 0.0) return loss;
  return loss + opts.lambda * contraction_penalty(bank, pair, opts.pairing);
}

double accumulate_sample_gradient(const FilterBank& bank, PairRef pair, const ObjectiveOptions& opts,
                                  double weight, Matrix& grad_wx, Matrix& grad_wy) {
  check_pair(bank, pair);
  const std::size_t nq = bank.hidden_units(), n = bank.input_dim();
  require(grad_wx.rows() == nq && grad_wx.cols() == n && grad_wy.rows() == nq &&
              grad_wy.cols() == n,
          ErrorCode::DimensionMismatch, "gradient buffers must be Q x N");
  const Matrix& wx = bank.wx();
  const Matrix& wy = bank.wy();
  const auto f = factors(bank, pair);

  Vector h(nq), u(nq), v(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    h[q] = sigmoid(f.fx[q] * f.fy[q]);
    u[q] = h[q] * f.fy[q];
    v[q] = h[q] * f.fx[q];
  }
  Vector rx = matvec_transposed(wx, u);
  Vector ry = matvec_transposed(wy, v);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rx[i] -= pair.x[i];
    ry[i] -= pair.y[i];
    loss += rx[i] * rx[i] + ry[i] * ry[i];
  }

  const bool analytic = opts.pairing == JacobianPairing::Analytic;
  double penalty = 0.0;
  for (std::size_t q = 0; q < nq; ++q) {
    const double fx = f.fx[q], fy = f.fy[q], a = fx * fy;
    const double s = h[q] * (1.0 - h[q]);
    const double gu = 2.0 * dot(rx, wx.row(q));
    const double gv = 2.0 * dot(ry, wy.row(q));
    double gfx = gu * s * fy * fy + gv * (h[q] + s * a);
    double gfy = gu * (h[q] + s * a) + gv * s * fx * fx;

    double direct_x = 0.0, direct_y = 0.0;
    if (opts.lambda != 0.0) {
      const double cx = squared_norm(wx.row(q)), cy = squared_norm(wy.row(q));
      const double alpha = analytic ? fy * fy : fx * fx;  // multiplies |Wx_q|^2
      const double beta = analytic ? fx * fx : fy * fy;   // multiplies |Wy_q|^2
      const double e = alpha * cx + beta * cy;
      penalty += s * s * e;
      const double dp_da = 2.0 * s * s * (1.0 - 2.0 * h[q]) * e;
      const double dp_dfx = dp_da * fy + s * s * 2.0 * fx * (analytic ? cy : cx);
      const double dp_dfy = dp_da * fx + s * s * 2.0 * fy * (analytic ? cx : cy);
      gfx += opts.lambda * dp_dfx;
      gfy += opts.lambda * dp_dfy;
      direct_x = opts.lambda * 2.0 * s * s * alpha;
      direct_y = opts.lambda * 2.0 * s * s * beta;
    }

    auto gx = grad_wx.row(q);
    auto gy = grad_wy.row(q);
    const auto wxq = wx.row(q);
    const auto wyq = wy.row(q);
    for (std::size_t i = 0; i < n; ++i) {
      gx[i] += weight * (gfx * pair.x[i] + 2.0 * u[q] * rx[i] + direct_x * wxq[i]);
      gy[i] += weight * (gfy * pair.y[i] + 2.0 * v[q] * ry[i] + direct_y * wyq[i]);
    }
  }
  return loss + opts.lambda * penalty;
}

double objective(const FilterBank& bank, const PatchBatch& batch, const ObjectiveOptions& opts,
                 Backend backend) {
  return backend == Backend::Serial ? serial::objective(bank, batch, opts)
                                    : parallel::objective(bank, batch, opts);
}

ObjectiveGradient objective_and_gradient(const FilterBank& bank, const PatchBatch& batch,
                                         const ObjectiveOptions& opts, Backend backend) {
  return backend == Backend::Serial ? serial::objective_and_gradient(bank, batch, opts)
                                    : parallel::objective_and_gradient(bank, batch, opts);
}

BankGradient gradient(const FilterBank& bank, const PatchBatch& batch, const ObjectiveOptions& opts,
                      Backend backend) {
  return objective_and_gradient(bank, batch, opts, backend).gradient;
}

Matrix encode_batch(const FilterBank& bank, const PatchBatch& batch, EncodingMode mode,
                    Backend backend) {
  return backend == Backend::Serial ? serial::encode_batch(bank, batch, mode)
                                    : parallel::encode_batch(bank, batch, mode);
}

}  // namespace ssync
