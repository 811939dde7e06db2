#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssync/image.hpp"
#include "ssync/patch.hpp"

namespace ssync {

// One manifest line: left, right, optional depth, optional class id.
struct ManifestRecord {
  std::string left;
  std::string right;
  std::optional<std::string> depth;
  std::optional<int> label;
  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

// UTF-8 text, one tab-separated record per line; "-" marks an absent field,
// blank lines and lines starting with '#' are skipped.
std::vector<ManifestRecord> parse_manifest(const std::string& text);
std::string format_manifest(const std::vector<ManifestRecord>& records);
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records);

struct CorpusItem {
  StereoSequence sequence;
  std::optional<ImageFrame> depth;  // 0 = missing
};

using Corpus = std::vector<CorpusItem>;

// Loads every record; relative paths resolve against the manifest directory.
Corpus load_corpus(const std::filesystem::path& manifest_path);

struct CropWindow {
  std::size_t item = 0;
  std::size_t frame = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const CropWindow&, const CropWindow&) = default;
};

struct GroundTruthPatch {
  Vector values;
  CropWindow window;
  std::size_t width = 0;
  std::size_t height = 0;

  bool has_data() const;
};

struct SampledPatch {
  PatchPair pair;
  CropWindow window;
  std::optional<GroundTruthPatch> ground_truth;
};

struct PatchGeometry {
  std::size_t width = 16;
  std::size_t height = 16;
  std::size_t frames = 1;
  std::size_t pixel_count() const { return width * height * frames; }
};

// Crops a T-frame block of one channel, frame-major.
Vector crop_block(const std::vector<ImageFrame>& frames, const CropWindow& w,
                  const PatchGeometry& g);

// Uniformly random crops at identical positions of both channels. With
// require_ground_truth, windows whose depth crop is all zero are redrawn; the
// draw gives up after 100 * count attempts.
std::vector<SampledPatch> sample_stereo_patches(const Corpus& corpus, const PatchGeometry& geometry,
                                                std::size_t count, bool require_ground_truth,
                                                std::uint64_t seed);

}  // namespace ssync
