/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

// Clip builders shared by the unit and acceptance tests.

#ifndef NRVQ_TESTS_TEST_CLIPS_H_
#define NRVQ_TESTS_TEST_CLIPS_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nrvq/frame_io.h"
#include "nrvq/rng.h"

namespace nrvq::testing {

inline LumaFrame ConstantFrame(int w, int h, uint8_t value) {
  return LumaFrame(w, h, std::vector<uint8_t>(static_cast<size_t>(w) * h,
                                              value));
}

inline LumaFrame FrameFrom(int w, int h,
                           const std::function<int(int, int)>& f) {
  LumaFrame frame(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int v = f(x, y);
      frame.at(x, y) = static_cast<uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
    }
  }
  return frame;
}

inline LumaFrame RandomFrame(int w, int h, Rng& rng) {
  LumaFrame frame(w, h);
  for (uint8_t& v : frame.samples()) v = static_cast<uint8_t>(rng.Index(256));
  return frame;
}

inline LumaFrame GaussianFrame(int w, int h, double mean, double sigma,
                               Rng& rng) {
  LumaFrame frame(w, h);
  for (uint8_t& v : frame.samples()) {
    const double x = std::round(mean + sigma * rng.Gaussian());
    v = static_cast<uint8_t>(x < 0 ? 0 : (x > 255 ? 255 : x));
  }
  return frame;
}

inline VideoClip ConstantClip(int w, int h, int frames, uint8_t value) {
  return VideoClip(std::vector<LumaFrame>(frames, ConstantFrame(w, h, value)),
                   FrameRate{25, 1}, "constant");
}

inline VideoClip RandomClip(int w, int h, int frames, uint64_t seed,
                            const std::string& id = "random") {
  Rng rng(seed);
  std::vector<LumaFrame> out;
  for (int i = 0; i < frames; ++i) out.push_back(RandomFrame(w, h, rng));
  return VideoClip(std::move(out), FrameRate{25, 1}, id);
}

// Smooth seeded texture translating by `speed` px/frame.
inline VideoClip MovingTextureClip(int w, int h, int frames, int speed,
                                   uint64_t seed) {
  Rng rng(seed);
  const int tw = w + speed * frames + 16;
  std::vector<double> tex(static_cast<size_t>(tw) * h);
  // Box-smoothed noise so neighbouring pixels correlate.
  std::vector<double> raw(tex.size());
  for (double& v : raw) v = rng.Uniform(0, 255);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < tw; ++x) {
      double s = 0.0;
      int n = 0;
      for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= tw || yy >= h) continue;
          s += raw[yy * tw + xx];
          ++n;
        }
      }
      tex[y * tw + x] = s / n;
    }
  }
  std::vector<LumaFrame> out;
  for (int f = 0; f < frames; ++f) {
    out.push_back(FrameFrom(w, h, [&](int x, int y) {
      return static_cast<int>(std::lround(
          (tex[y * tw + x + speed * f] - 100.0) * 3.0 + 128.0));
    }));
  }
  return VideoClip(std::move(out), FrameRate{25, 1}, "moving");
}

}  // namespace nrvq::testing

#endif  // NRVQ_TESTS_TEST_CLIPS_H_
