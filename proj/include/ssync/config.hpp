#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "ssync/classifier.hpp"
#include "ssync/corpus.hpp"
#include "ssync/depth.hpp"
#include "ssync/interest.hpp"
#include "ssync/recognition.hpp"
#include "ssync/trainer.hpp"
#include "ssync/whitening.hpp"

namespace ssync {

struct PatchConfig {
  PatchGeometry geometry;
  std::size_t samples = 100000;
  bool require_ground_truth = false;
};

struct WhiteningConfig {
  double epsilon = kDefaultWhiteningEpsilon;
  std::optional<double> variance_keep;
  std::optional<std::size_t> components;
  std::string motion_channel = "left";  // left | right | both
};

struct DepthConfig {
  std::size_t bins = kDepthBins;
  std::string binning = "quantile";  // quantile | linear
  std::size_t stride = 4;
  std::size_t samples = 20000;
  CalibratorConfig calibrator;
};

struct CodebookConfig {
  std::size_t words = 3000;
  std::size_t max_iters = 100;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 0;
  EncodingMode mode = EncodingMode::Depth;
  std::size_t hidden_units = 300;
  PatchConfig patch;
  WhiteningConfig whitening;
  TrainConfig train;
  BlockSpec blocks;
  InterestConfig interest;
  bool use_interest = false;
  DepthConfig depth;
  CodebookConfig codebook;
  std::size_t reducer_dim = 0;  // 0 selects hidden_units
  ClassifierConfig classifier;
  std::string corpus;

  nlohmann::json to_json() const;
  // Digest of the canonical JSON of the effective config.
  std::string digest() const;
  KeepRule keep_rule() const { return {whitening.components, whitening.variance_keep}; }
};

// Unknown keys, wrong types and invalid values raise ErrorCode::Config.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace ssync
