/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/synth.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nrvq/error.h"
#include "nrvq/rng.h"

namespace nrvq {

namespace {

// Wrapping multi-octave value noise, values roughly in [0,1].
class Texture {
 public:
  Texture(int width, int height, int base_cell, int octaves, double falloff,
          Rng& rng)
      : width_(width), height_(height), v_(width * height, 0.0f) {
    double amp = 1.0, total = 0.0;
    int cell = base_cell;
    for (int o = 0; o < octaves && cell >= 1; ++o) {
      AddOctave(cell, amp, rng);
      total += amp;
      amp *= falloff;
      cell /= 2;
    }
    for (float& x : v_) x = static_cast<float>(x / total);
  }

  float At(int x, int y) const {
    x %= width_;
    y %= height_;
    if (x < 0) x += width_;
    if (y < 0) y += height_;
    return v_[y * width_ + x];
  }

  float Sample(double x, double y) const {
    const double fx = std::floor(x), fy = std::floor(y);
    const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
    const float tx = static_cast<float>(x - fx);
    const float ty = static_cast<float>(y - fy);
    const float a = At(ix, iy) + (At(ix + 1, iy) - At(ix, iy)) * tx;
    const float b = At(ix, iy + 1) + (At(ix + 1, iy + 1) - At(ix, iy + 1)) * tx;
    return a + (b - a) * ty;
  }

 private:
  void AddOctave(int cell, double amp, Rng& rng) {
    const int gw = (width_ + cell - 1) / cell;
    const int gh = (height_ + cell - 1) / cell;
    std::vector<double> grid(gw * gh);
    for (double& g : grid) g = rng.Uniform();
    for (int y = 0; y < height_; ++y) {
      const int gy = y / cell;
      double ty = static_cast<double>(y % cell) / cell;
      ty = ty * ty * (3 - 2 * ty);
      for (int x = 0; x < width_; ++x) {
        const int gx = x / cell;
        double tx = static_cast<double>(x % cell) / cell;
        tx = tx * tx * (3 - 2 * tx);
        auto g = [&](int i, int j) {
          return grid[(j % gh) * gw + (i % gw)];
        };
        const double a = g(gx, gy) + (g(gx + 1, gy) - g(gx, gy)) * tx;
        const double b =
            g(gx, gy + 1) + (g(gx + 1, gy + 1) - g(gx, gy + 1)) * tx;
        v_[y * width_ + x] += static_cast<float>(amp * (a + (b - a) * ty));
      }
    }
  }

  int width_;
  int height_;
  std::vector<float> v_;
};

uint8_t ToPixel(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

struct Mover {
  double x, y, vx, vy, rx, ry, level;
};

std::vector<Mover> MakeMovers(int count, int w, int h, double speed,
                              double min_r, double max_r, Rng& rng) {
  std::vector<Mover> movers;
  for (int i = 0; i < count; ++i) {
    Mover m;
    m.x = rng.Uniform(0, w);
    m.y = rng.Uniform(0, h);
    const double angle = rng.Uniform(0, 2 * M_PI);
    const double s = speed * rng.Uniform(0.5, 1.5);
    m.vx = s * std::cos(angle);
    m.vy = s * std::sin(angle);
    m.rx = rng.Uniform(min_r, max_r);
    m.ry = rng.Uniform(min_r, max_r);
    m.level = rng.Uniform(20, 235);
    movers.push_back(m);
  }
  return movers;
}

void StepMovers(std::vector<Mover>& movers, int w, int h) {
  for (Mover& m : movers) {
    m.x += m.vx;
    m.y += m.vy;
    if (m.x < 0 || m.x >= w) m.vx = -m.vx;
    if (m.y < 0 || m.y >= h) m.vy = -m.vy;
    m.x = std::clamp(m.x, 0.0, w - 1.0);
    m.y = std::clamp(m.y, 0.0, h - 1.0);
  }
}

// Ellipses when `boxes` is false, rectangles otherwise.
void DrawMovers(const std::vector<Mover>& movers, bool boxes,
                std::vector<double>& canvas, int w, int h) {
  for (const Mover& m : movers) {
    const int x0 = std::max(0, static_cast<int>(m.x - m.rx));
    const int x1 = std::min(w - 1, static_cast<int>(m.x + m.rx));
    const int y0 = std::max(0, static_cast<int>(m.y - m.ry));
    const int y1 = std::min(h - 1, static_cast<int>(m.y + m.ry));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (!boxes) {
          const double dx = (x - m.x) / m.rx, dy = (y - m.y) / m.ry;
          if (dx * dx + dy * dy > 1.0) continue;
        }
        canvas[y * w + x] = m.level;
      }
    }
  }
}

LumaFrame ToFrame(const std::vector<double>& canvas, int w, int h) {
  std::vector<uint8_t> px(canvas.size());
  for (size_t i = 0; i < canvas.size(); ++i) px[i] = ToPixel(canvas[i]);
  return LumaFrame(w, h, std::move(px));
}

void AddSensorNoise(std::vector<double>& canvas, double sigma, Rng& rng) {
  for (double& v : canvas) v += sigma * rng.Gaussian();
}

}  // namespace

VideoClip SynthesizeClass(int recipe, const SynthOptions& options,
                          uint64_t seed) {
  if (recipe < 0 || recipe >= kSynthClassCount) {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown recipe " + std::to_string(recipe));
  }
  const int w = options.width;
  const int h = options.height;
  const int frames = options.frames;
  Rng rng(MixSeed(seed, static_cast<uint64_t>(recipe)));
  Rng noise(MixSeed(seed, 1000 + static_cast<uint64_t>(recipe)));
  const int tw = 2 * w + 64;
  const int th = 2 * h + 64;

  std::vector<LumaFrame> out;
  out.reserve(frames);
  std::vector<double> canvas(static_cast<size_t>(w) * h);

  switch (recipe) {
    case 0: {  // bs1
      Texture clouds(tw, th, 64, 4, 0.5, rng);
      for (int f = 0; f < frames; ++f) {
        const double ox = 0.4 * f, oy = 0.1 * f;
        for (int y = 0; y < h; ++y) {
          const double sky = 70.0 + 110.0 * y / h;
          for (int x = 0; x < w; ++x) {
            const double c = clouds.Sample(x + ox, y + oy);
            canvas[y * w + x] = sky + 90.0 * std::max(0.0, c - 0.45) * 2.0;
          }
        }
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
    case 1: {  // mc1
      Texture detail(tw, th, 8, 4, 0.7, rng);
      auto card = MakeMovers(1, w, h, 1.5, 24, 36, rng);
      card[0].level = 235;
      for (int f = 0; f < frames; ++f) {
        const double ox = 1.0 * f;
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            canvas[y * w + x] = 20.0 + 215.0 * detail.At(x + static_cast<int>(ox), y);
          }
        }
        DrawMovers(card, true, canvas, w, h);
        StepMovers(card, w, h);
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
    case 2: {  // pa1
      Texture scene(tw, th, 32, 4, 0.6, rng);
      auto people = MakeMovers(7, w, h, 1.2, 6, 18, rng);
      for (int f = 0; f < frames; ++f) {
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            canvas[y * w + x] = 30.0 + 190.0 * scene.At(x, y);
          }
        }
        DrawMovers(people, false, canvas, w, h);
        StepMovers(people, w, h);
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
    case 3: {  // pr1
      Texture foliage(tw, th, 16, 5, 0.65, rng);
      for (int f = 0; f < frames; ++f) {
        const int ox = 4 * f;
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            canvas[y * w + x] = 10.0 + 230.0 * foliage.At(x + ox, y + f / 8);
          }
        }
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
    case 4: {  // rb1
      Texture a(tw, th, 24, 4, 0.6, rng);
      Texture b(tw, th, 24, 4, 0.6, rng);
      for (int f = 0; f < frames; ++f) {
        const double t = 0.5 + 0.5 * std::sin(f * 0.08);
        const double flow = 0.7 * f;
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            const double v = t * a.Sample(x + flow, y) +
                             (1 - t) * b.Sample(x, y + flow * 0.5);
            canvas[y * w + x] = 40.0 + 180.0 * v;
          }
        }
        AddSensorNoise(canvas, 2.0, noise);
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
    case 5: {  // rh1
      auto cars = MakeMovers(24, w, h, 2.5, 4, 9, rng);
      for (Mover& c : cars) c.vy *= 0.2;
      for (int f = 0; f < frames; ++f) {
        for (int y = 0; y < h; ++y) {
          const bool lane = (y / 24) % 2 == 0;
          for (int x = 0; x < w; ++x) {
            canvas[y * w + x] = lane ? 90.0 : 120.0 + ((x / 20) % 2) * 40.0;
          }
        }
        DrawMovers(cars, true, canvas, w, h);
        StepMovers(cars, w, h);
        AddSensorNoise(canvas, 1.0, noise);
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
    case 6: {  // sf1
      Texture petals(tw, th, 16, 3, 0.5, rng);
      const double cx = w / 2.0, cy = h / 2.0;
      for (int f = 0; f < frames; ++f) {
        const double zoom = 1.0 + 0.002 * f;
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            const double dx = (x - cx) / zoom, dy = (y - cy) / zoom;
            const double r = std::sqrt(dx * dx + dy * dy);
            const double ang = std::atan2(dy, dx);
            const double petal = 0.5 + 0.5 * std::cos(12 * ang + r * 0.05);
            const double tex = petals.Sample(cx + dx + w, cy + dy + h);
            canvas[y * w + x] = 30.0 + 120.0 * petal * (r < 100 ? 1.0 : 0.5) +
                                80.0 * tex;
          }
        }
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
    case 7: {  // sh1
      Texture grain(tw, th, 8, 3, 0.5, rng);
      std::vector<double> bars(tw);
      for (int x = 0; x < tw; ++x) {
        bars[x] = ((x / 12) % 3 == 0) ? 200.0 : ((x / 12) % 3 == 1 ? 60.0 : 130.0);
      }
      double pan = 0.0;
      for (int f = 0; f < frames; ++f) {
        // Sub-pixel steps: an integer pan would repeat frames exactly.
        pan = std::fmod(pan + 2.0 + rng.Uniform(-1.0, 1.0), w);
        const int ox = static_cast<int>(pan);
        const double frac = pan - ox;
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            const double bar =
                bars[x + ox] + frac * (bars[x + ox + 1] - bars[x + ox]);
            canvas[y * w + x] = bar + 30.0 * (grain.Sample(x + pan, y) - 0.5);
          }
        }
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
    case 8: {  // st1
      auto walkers = MakeMovers(2, w, h, 0.6, 5, 12, rng);
      std::vector<double> base(static_cast<size_t>(w) * h);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double v = 150.0 - 40.0 * y / h;
          if (x % 40 < 3 || y % 30 < 2) v = 40.0;
          if (y > h * 2 / 3 && ((x + y) / 10) % 2 == 0) v += 35.0;
          base[y * w + x] = v;
        }
      }
      for (int f = 0; f < frames; ++f) {
        canvas = base;
        DrawMovers(walkers, false, canvas, w, h);
        StepMovers(walkers, w, h);
        AddSensorNoise(canvas, 3.0, noise);
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
    case 9: {  // tr1
      Texture field(tw, th, 12, 4, 0.6, rng);
      auto tractor = MakeMovers(1, w, h, 1.0, 30, 20, rng);
      tractor[0].level = 35;
      double jx = 0.0, jy = 0.0;
      for (int f = 0; f < frames; ++f) {
        jx = std::clamp(jx + rng.Uniform(-2.0, 2.0), -12.0, 12.0);
        jy = std::clamp(jy + rng.Uniform(-2.0, 2.0), -12.0, 12.0);
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            const double rows = ((y + static_cast<int>(jy)) / 6) % 2 ? 25.0 : 0.0;
            canvas[y * w + x] =
                60.0 + rows + 150.0 * field.Sample(x + jx + 32, y + jy + 32);
          }
        }
        DrawMovers(tractor, true, canvas, w, h);
        StepMovers(tractor, w, h);
        out.push_back(ToFrame(canvas, w, h));
      }
      break;
    }
  }
  return VideoClip(std::move(out), options.fps,
                   std::string(kSynthClassIds[recipe]));
}

}  // namespace nrvq
