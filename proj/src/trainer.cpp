#include "ssync/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ssync/error.hpp"

namespace ssync {

void TrainConfig::validate() const {
  require(lambda >= 0.0, ErrorCode::InvalidArgument, "lambda must be >= 0");
  require(learning_rate >= 0.0, ErrorCode::InvalidArgument, "learning rate must be >= 0");
  require(momentum >= 0.0 && momentum < 1.0, ErrorCode::InvalidArgument,
          "momentum must lie in [0, 1)");
  require(batch_size >= 1, ErrorCode::InvalidArgument, "batch size must be >= 1");
}

namespace {

void step(Matrix& weights, Matrix& velocity, const Matrix& grad, double lr, double momentum) {
  auto& w = weights.data();
  auto& vel = velocity.data();
  const auto& g = grad.data();
  for (std::size_t i = 0; i < w.size(); ++i) {
    vel[i] = momentum * vel[i] - lr * g[i];
    w[i] += vel[i];
  }
}

}  // namespace

TrainResult train(const TrainConfig& config, const PatchBatch& data, EncodingMode mode,
                  std::size_t hidden_units, const FilterBank* init_bank,
                  const EpochCallback& on_epoch, Backend backend) {
  config.validate();

  if (mode == EncodingMode::Joint) {
    require(init_bank != nullptr && init_bank->mode() == EncodingMode::Depth && !init_bank->tied(),
            ErrorCode::ModeMismatch, "MD encoding reuses a D-trained bank; pass one as init_bank");
    TrainResult r{*init_bank, 0.0, {}};
    r.bank.set_mode(EncodingMode::Joint);
    return r;
  }
  require(data.count() > 0, ErrorCode::InsufficientData, "training data is empty");

  const bool tied = mode == EncodingMode::Motion;
  FilterBank bank;
  if (init_bank) {
    require(init_bank->input_dim() == data.dim(), ErrorCode::DimensionMismatch,
            "initial bank does not match data dimension");
    require(init_bank->tied() == tied, ErrorCode::ModeMismatch,
            tied ? "motion training needs a tied bank" : "depth training needs an untied bank");
    bank = *init_bank;
    bank.set_mode(mode);
  } else {
    bank = FilterBank::random(hidden_units, data.dim(), tied, mode, config.init_scale, config.seed);
  }

  PatchBatch motion_data;
  const PatchBatch* source = &data;
  if (tied) {
    motion_data.x = data.x;
    motion_data.y = data.x;
    source = &motion_data;
  }

  const ObjectiveOptions opts{config.lambda, config.pairing};
  TrainResult result;
  result.initial_objective = objective(bank, *source, opts, backend);

  Matrix vel_x(bank.hidden_units(), bank.input_dim());
  Matrix vel_y = tied ? Matrix() : Matrix(bank.hidden_units(), bank.input_dim());
  std::vector<std::size_t> order(source->count());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const auto rows = std::span<const std::size_t>(order).subspan(begin, end - begin);
      const PatchBatch batch = source->gather(rows);
      const auto og = objective_and_gradient(bank, batch, opts, backend);
      if (!std::isfinite(og.objective))
        throw Error(ErrorCode::Divergence,
                    "training objective became non-finite in epoch " + std::to_string(epoch));
      sum += og.objective;
      ++batches;
      if (config.learning_rate == 0.0) continue;
      step(bank.mutable_wx(), vel_x, og.gradient.wx, config.learning_rate, config.momentum);
      if (!tied)
        step(bank.mutable_wy(), vel_y, og.gradient.wy, config.learning_rate, config.momentum);
    }
    const double mean = sum / double(batches);
    result.trace.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  result.bank = std::move(bank);
  return result;
}

}  // namespace ssync
