/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/fr_benchmark.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nrvq/error.h"

namespace nrvq {

namespace {

constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

void CheckSameGeometry(const LumaFrame& a, const LumaFrame& b) {
  if (!a.SameGeometry(b)) {
    throw Error(ErrorCode::kGeometryMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                    " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

}  // namespace

double Psnr(const LumaFrame& ref, const LumaFrame& dist) {
  CheckSameGeometry(ref, dist);
  const auto a = ref.samples();
  const auto b = dist.samples();
  int64_t sse = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    sse += d * d;
  }
  if (sse == 0) return kPsnrCapDb;
  const double mse = static_cast<double>(sse) / static_cast<double>(a.size());
  return std::min(kPsnrCapDb, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double SsimFrame(const LumaFrame& ref, const LumaFrame& dist) {
  CheckSameGeometry(ref, dist);
  constexpr int kN = kSsimWindow;
  constexpr int64_t kArea = kN * kN;
  const int w = ref.width();
  const int h = ref.height();

  // Vertical 8-row sums per column, slid down one row at a time.
  std::vector<int64_t> sx(w, 0), sy(w, 0), sxx(w, 0), syy(w, 0), sxy(w, 0);
  auto accumulate_row = [&](int y, int sign) {
    const uint8_t* a = ref.row(y).data();
    const uint8_t* b = dist.row(y).data();
    for (int x = 0; x < w; ++x) {
      const int64_t va = a[x];
      const int64_t vb = b[x];
      sx[x] += sign * va;
      sy[x] += sign * vb;
      sxx[x] += sign * va * va;
      syy[x] += sign * vb * vb;
      sxy[x] += sign * va * vb;
    }
  };
  for (int y = 0; y < kN; ++y) accumulate_row(y, 1);

  double total = 0.0;
  int64_t windows = 0;
  for (int y0 = 0; y0 + kN <= h; ++y0) {
    if (y0 > 0) {
      accumulate_row(y0 - 1, -1);
      accumulate_row(y0 + kN - 1, 1);
    }
    int64_t wx = 0, wy = 0, wxx = 0, wyy = 0, wxy = 0;
    for (int x = 0; x < kN; ++x) {
      wx += sx[x];
      wy += sy[x];
      wxx += sxx[x];
      wyy += syy[x];
      wxy += sxy[x];
    }
    for (int x0 = 0;; ++x0) {
      const double mx = static_cast<double>(wx) / kArea;
      const double my = static_cast<double>(wy) / kArea;
      constexpr double kArea2 = static_cast<double>(kArea * kArea);
      const double vx = static_cast<double>(kArea * wxx - wx * wx) / kArea2;
      const double vy = static_cast<double>(kArea * wyy - wy * wy) / kArea2;
      const double cxy = static_cast<double>(kArea * wxy - wx * wy) / kArea2;
      const double num = (2.0 * mx * my + kC1) * (2.0 * cxy + kC2);
      const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
      total += num / den;
      ++windows;
      if (x0 + kN >= w) break;
      wx += sx[x0 + kN] - sx[x0];
      wy += sy[x0 + kN] - sy[x0];
      wxx += sxx[x0 + kN] - sxx[x0];
      wyy += syy[x0 + kN] - syy[x0];
      wxy += sxy[x0 + kN] - sxy[x0];
    }
  }
  return total / static_cast<double>(windows);
}

double SsimOracle::Score(const VideoClip& ref, const VideoClip& dist) const {
  if (ref.frame_count() != dist.frame_count()) {
    throw Error(ErrorCode::kAlignmentError,
                std::to_string(ref.frame_count()) + " reference frames vs " +
                    std::to_string(dist.frame_count()) + " distorted");
  }
  double total = 0.0;
  for (size_t i = 0; i < ref.frame_count(); ++i) {
    total += SsimFrame(ref.frame(i), dist.frame(i));
  }
  return std::clamp(total / static_cast<double>(ref.frame_count()), 0.0, 1.0);
}

std::unique_ptr<QualityOracle> MakeOracle(std::string_view name) {
  if (name == "ssim") return std::make_unique<SsimOracle>();
  return nullptr;
}

double BenchmarkIndex(const VideoClip& ref, const VideoClip& dist) {
  return SsimOracle().Score(ref, dist);
}

}  // namespace nrvq
