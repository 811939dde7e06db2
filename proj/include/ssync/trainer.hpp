#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ssync/patch.hpp"
#include "ssync/sae.hpp"

namespace ssync {

struct TrainConfig {
  double lambda = 0.5;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::size_t batch_size = 100;
  std::size_t epochs = 50;
  std::uint64_t seed = 1;
  double init_scale = 0.0;  // <= 0 selects 1/sqrt(N)
  JacobianPairing pairing = JacobianPairing::Analytic;

  void validate() const;
};

struct TrainResult {
  FilterBank bank;
  double initial_objective = 0.0;
  // Mean minibatch objective of each epoch, evaluated before each update.
  std::vector<double> trace;
};

using EpochCallback = std::function<void(std::size_t epoch, double objective)>;

// Minibatch gradient descent with momentum on the contractive objective.
// Depth trains an untied bank on (x, y). Motion trains a tied bank on (x, x);
// data.y is ignored. Joint never trains: it re-tags a Depth-trained
// init_bank. When init_bank is null a random bank of `hidden_units` rows is
// drawn from config.seed.
TrainResult train(const TrainConfig& config, const PatchBatch& data, EncodingMode mode,
                  std::size_t hidden_units, const FilterBank* init_bank = nullptr,
                  const EpochCallback& on_epoch = {}, Backend backend = Backend::OpenMP);

}  // namespace ssync
