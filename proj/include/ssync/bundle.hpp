#pragma once

// Directory bundles: TensorFiles for arrays plus a JSON sidecar for metadata.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "ssync/classifier.hpp"
#include "ssync/depth.hpp"
#include "ssync/recognition.hpp"
#include "ssync/sae.hpp"
#include "ssync/whitening.hpp"

namespace ssync {

struct BankMetadata {
  std::size_t frames = 1;        // T
  std::size_t frame_pixels = 0;  // M, per-frame pixels before whitening
  std::string whitening;         // file stem of the whitening transform, if any
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

void save_bank(const std::filesystem::path& dir, const FilterBank& bank, const BankMetadata& meta);
FilterBank load_bank(const std::filesystem::path& dir, BankMetadata* meta = nullptr);

// Files <stem>_mean.sstf, <stem>_projection.sstf, <stem>_eigenvalues.sstf, <stem>.json.
void save_transform(const std::filesystem::path& dir, const std::string& stem,
                    const WhiteningTransform& t);
WhiteningTransform load_transform(const std::filesystem::path& dir, const std::string& stem);

void save_calibrator(const std::filesystem::path& dir, const DepthCalibrator& cal);
DepthCalibrator load_calibrator(const std::filesystem::path& dir);

void save_codebook(const std::filesystem::path& path, const Codebook& cb);
Codebook load_codebook(const std::filesystem::path& path);

void save_classifier(const std::filesystem::path& dir, const ActionClassifier& clf);
ActionClassifier load_classifier(const std::filesystem::path& dir);

// Depth map as TensorFile (height x width, labels as floats, 0 = absent).
void save_depth_map(const std::filesystem::path& path, const DepthMap& map);
DepthMap load_depth_map(const std::filesystem::path& path);

}  // namespace ssync
