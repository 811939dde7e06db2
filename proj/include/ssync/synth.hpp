#pragma once

#include <cstdint>

#include "ssync/image.hpp"

namespace ssync {

struct Stereogram {
  StereoSequence pair;  // T = 1
  int disparity = 0;
};

struct RegionBounds {
  std::size_t row0, row1, col0, col1;  // half-open
};

// Central region in which the right view is the shifted left view.
RegionBounds stereogram_region(std::size_t width, std::size_t height);

// Binary dots (1 with probability dot_density). Inside the central region
// right(r, c) = left(r, c - disparity) (column index wrapped); elsewhere the
// right view is drawn independently.
Stereogram gen_random_dot_stereogram(std::size_t width, std::size_t height, int disparity_px,
                                     double dot_density, std::uint64_t seed);

// Single-channel moving texture: frame t+1 is frame t translated by velocity
// with toroidal wrap. left == right.
StereoSequence gen_moving_pattern(std::size_t width, std::size_t height, std::size_t frames,
                                  int velocity_x, int velocity_y, std::uint64_t seed);

// Moving texture seen by two cameras: the right view is the left view shifted
// horizontally by disparity_px (wrapped). Used for the synthetic action corpus.
StereoSequence gen_moving_stereo(std::size_t width, std::size_t height, std::size_t frames,
                                 int velocity_x, int velocity_y, int disparity_px,
                                 double dot_density, std::uint64_t seed);

// Two-class synthetic action clip. Class 1 is a near texture (disparity 4)
// drifting right; class 2 is a far texture (disparity 1) drifting left. Dot
// density varies per clip in [0.3, 0.7]. Other labels are rejected.
StereoSequence gen_action_clip(int label, std::size_t width, std::size_t height,
                               std::size_t frames, std::uint64_t seed);

// Left half textured with random dots, right half a flat gray equal to the dot
// density. Both views identical apart from a disparity shift of the texture.
StereoSequence gen_half_textured_pair(std::size_t width, std::size_t height, int disparity_px,
                                      double dot_density, std::uint64_t seed);

}  // namespace ssync
