#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ssync/matrix.hpp"
#include "ssync/patch.hpp"

namespace ssync {

// D: synchrony across the two views, h = sigma(fx * fy).
// M: synchrony across time within one channel, h = sigma(fx^2), tied bank.
// MD: h = sigma(fx^2 * fy^2), always evaluated with a D-trained bank.
enum class EncodingMode { Depth, Motion, Joint };

std::string to_string(EncodingMode mode);
EncodingMode parse_encoding_mode(const std::string& text);

// Pairing of factor and filter norms in the closed-form contraction penalty.
// Analytic is the derivative of the encoder; AsPrinted swaps the pairing
// (fx^2 with |Wx|^2) and exists only for comparison.
enum class JacobianPairing { Analytic, AsPrinted };

double sigmoid(double a);

// Paired Q x N filter matrices. A tied bank stores one matrix used for both
// views.
class FilterBank {
 public:
  FilterBank() = default;
  FilterBank(Matrix wx, Matrix wy, EncodingMode mode = EncodingMode::Depth);
  static FilterBank make_tied(Matrix w, EncodingMode mode = EncodingMode::Motion);
  // Entries i.i.d. uniform in [-scale, scale]; scale <= 0 selects 1/sqrt(N).
  static FilterBank random(std::size_t hidden, std::size_t input_dim, bool tied, EncodingMode mode,
                           double scale, std::uint64_t seed);

  const Matrix& wx() const { return wx_; }
  const Matrix& wy() const { return tied_ ? wx_ : wy_; }
  Matrix& mutable_wx() { return wx_; }
  Matrix& mutable_wy();

  bool tied() const { return tied_; }
  EncodingMode mode() const { return mode_; }
  void set_mode(EncodingMode mode) { mode_ = mode; }

  std::size_t hidden_units() const { return wx_.rows(); }
  std::size_t input_dim() const { return wx_.cols(); }

  friend bool operator==(const FilterBank&, const FilterBank&) = default;

 private:
  Matrix wx_;
  Matrix wy_;
  bool tied_ = false;
  EncodingMode mode_ = EncodingMode::Depth;
};

struct Factors {
  Vector fx;
  Vector fy;
};

struct HiddenCode {
  Vector h;
  EncodingMode mode = EncodingMode::Depth;
};

struct Reconstruction {
  Vector x;
  Vector y;
};

Factors factors(const FilterBank& bank, PairRef pair);

HiddenCode encode_pair(const FilterBank& bank, PairRef pair);
HiddenCode encode_motion(const FilterBank& bank, std::span<const double> x);
HiddenCode encode_joint(const FilterBank& bank, PairRef pair);
// Dispatches on mode; Motion reads only pair.x.
HiddenCode encode(const FilterBank& bank, PairRef pair, EncodingMode mode);

Reconstruction decode(const FilterBank& bank, const HiddenCode& code, const Factors& f);

double reconstruction_loss(PairRef pair, const Reconstruction& r);

double contraction_penalty(const FilterBank& bank, PairRef pair,
                           JacobianPairing pairing = JacobianPairing::Analytic);

struct ObjectiveOptions {
  double lambda = 0.5;
  JacobianPairing pairing = JacobianPairing::Analytic;
};

// Gradient with the shape of a bank; tied banks fold both parts into wx.
struct BankGradient {
  Matrix wx;
  Matrix wy;
  bool tied = false;
};

// Reconstruction loss plus lambda times the contraction penalty for one pair.
double sample_objective(const FilterBank& bank, PairRef pair, const ObjectiveOptions& opts);

// Adds d(sample_objective)/dW * weight into grad (untied layout: both wx and
// wy must be sized Q x N). Returns the sample objective.
double accumulate_sample_gradient(const FilterBank& bank, PairRef pair, const ObjectiveOptions& opts,
                                  double weight, Matrix& grad_wx, Matrix& grad_wy);

enum class Backend { Serial, OpenMP };

// Batch mean of sample_objective.
double objective(const FilterBank& bank, const PatchBatch& batch, const ObjectiveOptions& opts,
                 Backend backend = Backend::OpenMP);

struct ObjectiveGradient {
  double objective = 0.0;
  BankGradient gradient;
};

ObjectiveGradient objective_and_gradient(const FilterBank& bank, const PatchBatch& batch,
                                         const ObjectiveOptions& opts,
                                         Backend backend = Backend::OpenMP);

BankGradient gradient(const FilterBank& bank, const PatchBatch& batch, const ObjectiveOptions& opts,
                      Backend backend = Backend::OpenMP);

// Codes for every pair of a batch, one row per sample.
Matrix encode_batch(const FilterBank& bank, const PatchBatch& batch, EncodingMode mode,
                    Backend backend = Backend::OpenMP);

}  // namespace ssync
