/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

// Procedural reference content. Ten seeded recipes with distinct
// spatial/temporal signatures stand in for a licensed source corpus.

#ifndef NRVQ_SYNTH_H_
#define NRVQ_SYNTH_H_

#include <array>
#include <cstdint>
#include <string_view>

#include "nrvq/frame_io.h"

namespace nrvq {

inline constexpr int kSynthClassCount = 10;

// Recipe labels, in recipe order.
inline constexpr std::array<std::string_view, kSynthClassCount>
    kSynthClassIds = {"bs1", "mc1", "pa1", "pr1", "rb1",
                      "rh1", "sf1", "sh1", "st1", "tr1"};

struct SynthOptions {
  int width = 320;
  int height = 240;
  int frames = 250;
  FrameRate fps{25, 1};
};

//   bs1  smooth sky gradient, slow drifting clouds
//   mc1  fine texture, slow pan, moving bright card
//   pa1  static textured scene with wandering blobs
//   pr1  fast pan over dense foliage-like texture
//   rb1  evolving water-like texture (cross-fading noise fields)
//   rh1  striped street with many small moving vehicles
//   sf1  slow zoom into a radial petal pattern
//   sh1  vertical edges under a random-walk camera pan
//   st1  static line structure, two slow movers, sensor noise
//   tr1  textured field with camera shake and a moving object
VideoClip SynthesizeClass(int recipe, const SynthOptions& options,
                          uint64_t seed);

}  // namespace nrvq

#endif  // NRVQ_SYNTH_H_
