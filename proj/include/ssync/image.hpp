#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace ssync {

// Grayscale frame, row-major. Intensities loaded from PGM are scaled to [0,1].
struct ImageFrame {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  ImageFrame() = default;
  ImageFrame(std::size_t w, std::size_t h, double fill = 0.0)
      : width(w), height(h), pixels(w * h, fill) {}

  double& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }

  void validate() const;
  friend bool operator==(const ImageFrame&, const ImageFrame&) = default;
};

// Two time-aligned frame stacks. A still stereo pair is T = 1.
struct StereoSequence {
  std::vector<ImageFrame> left;
  std::vector<ImageFrame> right;
  std::optional<int> label;

  std::size_t length() const { return left.size(); }
  std::size_t width() const { return left.empty() ? 0 : left.front().width; }
  std::size_t height() const { return left.empty() ? 0 : left.front().height; }

  void validate() const;
};

// Area-average resampling; upsampling is rejected.
ImageFrame downsample(const ImageFrame& frame, std::size_t new_w, std::size_t new_h);

// Binary (P5) PGM, maxval <= 255. Multiple images may be concatenated in one
// file; each becomes one frame.
std::vector<ImageFrame> read_pgm(const std::filesystem::path& path);
ImageFrame read_pgm_single(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const std::vector<ImageFrame>& frames);
void write_pgm(const std::filesystem::path& path, const ImageFrame& frame);

// Raw 8-bit PGM from integer levels (no rescaling).
void write_pgm_levels(const std::filesystem::path& path, std::size_t width, std::size_t height,
                      const std::vector<unsigned char>& levels);
// Binary (P4) PBM, 1 = black = set.
void write_pbm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               const std::vector<bool>& bits);

}  // namespace ssync
