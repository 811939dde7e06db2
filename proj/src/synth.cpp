#include "ssync/synth.hpp"

#include <cstdlib>
#include <random>

#include "ssync/error.hpp"

namespace ssync {
namespace {

ImageFrame random_dots(std::size_t width, std::size_t height, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution dot(density);
  ImageFrame f(width, height);
  for (auto& p : f.pixels) p = dot(rng) ? 1.0 : 0.0;
  return f;
}

std::size_t wrap(long long v, std::size_t n) {
  const long long m = static_cast<long long>(n);
  return static_cast<std::size_t>(((v % m) + m) % m);
}

ImageFrame translate(const ImageFrame& src, long long dx, long long dy) {
  ImageFrame out(src.width, src.height);
  for (std::size_t r = 0; r < src.height; ++r)
    for (std::size_t c = 0; c < src.width; ++c)
      out.at(r, c) = src.at(wrap(static_cast<long long>(r) - dy, src.height),
                            wrap(static_cast<long long>(c) - dx, src.width));
  return out;
}

void check_density(double density) {
  require(density > 0.0 && density < 1.0, ErrorCode::InvalidArgument,
          "dot density must lie in (0, 1)");
}

}  // namespace

RegionBounds stereogram_region(std::size_t width, std::size_t height) {
  return {height / 4, height / 4 + height / 2, width / 4, width / 4 + width / 2};
}

Stereogram gen_random_dot_stereogram(std::size_t width, std::size_t height, int disparity_px,
                                     double dot_density, std::uint64_t seed) {
  require(width >= 1 && height >= 1, ErrorCode::InvalidArgument, "empty stereogram");
  require(static_cast<std::size_t>(std::abs(disparity_px)) < width, ErrorCode::OutOfRange,
          "disparity must be smaller than the width");
  check_density(dot_density);

  std::mt19937_64 rng(seed);
  ImageFrame left = random_dots(width, height, dot_density, rng);
  ImageFrame right = random_dots(width, height, dot_density, rng);
  const auto region = stereogram_region(width, height);
  for (std::size_t r = region.row0; r < region.row1; ++r)
    for (std::size_t c = region.col0; c < region.col1; ++c)
      right.at(r, c) = left.at(r, wrap(static_cast<long long>(c) - disparity_px, width));

  Stereogram s;
  s.pair.left.push_back(std::move(left));
  s.pair.right.push_back(std::move(right));
  s.pair.label = disparity_px;
  s.disparity = disparity_px;
  return s;
}

StereoSequence gen_moving_pattern(std::size_t width, std::size_t height, std::size_t frames,
                                  int velocity_x, int velocity_y, std::uint64_t seed) {
  require(frames >= 2, ErrorCode::InvalidArgument, "moving pattern needs T >= 2");
  return gen_moving_stereo(width, height, frames, velocity_x, velocity_y, 0, 0.5, seed);
}

StereoSequence gen_moving_stereo(std::size_t width, std::size_t height, std::size_t frames,
                                 int velocity_x, int velocity_y, int disparity_px,
                                 double dot_density, std::uint64_t seed) {
  require(frames >= 1 && width >= 1 && height >= 1, ErrorCode::InvalidArgument,
          "empty sequence requested");
  require(static_cast<std::size_t>(std::abs(disparity_px)) < width, ErrorCode::OutOfRange,
          "disparity must be smaller than the width");
  check_density(dot_density);

  std::mt19937_64 rng(seed);
  const ImageFrame base = random_dots(width, height, dot_density, rng);
  StereoSequence seq;
  for (std::size_t t = 0; t < frames; ++t) {
    const auto step = static_cast<long long>(t);
    ImageFrame left = translate(base, step * velocity_x, step * velocity_y);
    ImageFrame right = disparity_px == 0 ? left : translate(left, disparity_px, 0);
    seq.left.push_back(std::move(left));
    seq.right.push_back(std::move(right));
  }
  return seq;
}

StereoSequence gen_action_clip(int label, std::size_t width, std::size_t height,
                               std::size_t frames, std::uint64_t seed) {
  require(label == 1 || label == 2, ErrorCode::OutOfRange, "action clips have classes 1 and 2");
  std::mt19937_64 rng(seed);
  const double density = std::uniform_real_distribution<double>(0.3, 0.7)(rng);
  const bool near = label == 1;
  StereoSequence seq =
      gen_moving_stereo(width, height, frames, near ? 1 : -1, 0, near ? 4 : 1, density, rng());
  seq.label = label;
  return seq;
}

StereoSequence gen_half_textured_pair(std::size_t width, std::size_t height, int disparity_px,
                                      double dot_density, std::uint64_t seed) {
  StereoSequence seq = gen_moving_stereo(width, height, 1, 0, 0, disparity_px, dot_density, seed);
  for (auto* f : {&seq.left.front(), &seq.right.front()})
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = width / 2; c < width; ++c) f->at(r, c) = dot_density;
  return seq;
}

}  // namespace ssync
