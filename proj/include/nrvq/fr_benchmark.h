/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#ifndef NRVQ_FR_BENCHMARK_H_
#define NRVQ_FR_BENCHMARK_H_

#include <memory>
#include <string>
#include <string_view>

#include "nrvq/frame_io.h"

namespace nrvq {

inline constexpr double kPsnrCapDb = 100.0;
inline constexpr int kSsimWindow = 8;

double Psnr(const LumaFrame& ref, const LumaFrame& dist);

// Mean SSIM over all 8x8 windows (stride 1) with uniform weights and
// C1 = (0.01*255)^2, C2 = (0.03*255)^2.
double SsimFrame(const LumaFrame& ref, const LumaFrame& dist);

// Full-reference ground truth. Higher is better, range [0,1].
class QualityOracle {
 public:
  virtual ~QualityOracle() = default;
  virtual std::string_view name() const = 0;
  virtual double Score(const VideoClip& ref, const VideoClip& dist) const = 0;
};

// clamp(mean over frames of SsimFrame, 0, 1).
class SsimOracle : public QualityOracle {
 public:
  std::string_view name() const override { return "ssim"; }
  double Score(const VideoClip& ref, const VideoClip& dist) const override;
};

// Returns nullptr for unknown names. "ssim" is the only shipped oracle.
std::unique_ptr<QualityOracle> MakeOracle(std::string_view name);

// Shipped oracle entry point. Throws AlignmentError on frame count mismatch
// and GeometryMismatch on differing frame sizes.
double BenchmarkIndex(const VideoClip& ref, const VideoClip& dist);

}  // namespace nrvq

#endif  // NRVQ_FR_BENCHMARK_H_
