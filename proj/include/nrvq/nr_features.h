/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#ifndef NRVQ_NR_FEATURES_H_
#define NRVQ_NR_FEATURES_H_

#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nrvq/frame_io.h"
#include "nrvq/impairment.h"

namespace nrvq {

inline constexpr int kFeatureCount = 10;
inline constexpr int kRawFeatureCount = 8;

// Fixed, versioned order of the model inputs.
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "cx", "mo", "bm", "br", "nm", "nr", "bl", "je", "bitrate", "loss"};

// Tunable constants of the feature extractors. Serialized into model files
// and echoed into dataset metadata.
struct FeatureConfig {
  std::string version = "nrvq-features-1";
  double blur_width_threshold = 5.0;     // px, for the blur ratio
  double freeze_threshold = 0.05;        // mean |diff| below this is frozen
  double noise_sigma_multiplier = 3.0;   // noisy-pixel rule
  double blockiness_epsilon = 1e-6;
  double jerkiness_freeze_weight = 0.5;  // jump term gets 1 - this
  double bitrate_min_kbps = 64.0;
  double bitrate_max_kbps = 5120.0;
  double loss_min = 0.0;
  double loss_max = 0.10;

  std::vector<std::pair<std::string, std::string>> ToKeyValues() const;
  // Unknown keys are UsageError; missing keys keep their defaults.
  static FeatureConfig FromKeyValues(
      const std::vector<std::pair<std::string, std::string>>& kv);

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

struct RawFeatures {
  double cx = 0.0;  // spatial information
  double mo = 0.0;  // temporal information
  double bm = 0.0;  // mean edge width
  double br = 0.0;  // fraction of wide edges
  double nm = 0.0;  // estimated noise sigma
  double nr = 0.0;  // fraction of noisy pixels
  double bl = 0.0;  // grid-boundary excess contrast
  double je = 0.0;  // freeze/jump blend

  std::array<double, kRawFeatureCount> ToArray() const {
    return {cx, mo, bm, br, nm, nr, bl, je};
  }
  static RawFeatures FromArray(std::span<const double, kRawFeatureCount> a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
  }
  friend bool operator==(const RawFeatures&, const RawFeatures&) = default;
};

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double operator[](size_t i) const { return values[i]; }
  double& operator[](size_t i) { return values[i]; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct FeatureBounds {
  double min = 0.0;
  double max = 1.0;
  friend bool operator==(const FeatureBounds&, const FeatureBounds&) = default;
};

class Normalizer {
 public:
  Normalizer() = default;
  // Throws DegenerateFeature if any max <= min.
  explicit Normalizer(std::array<FeatureBounds, kFeatureCount> bounds);

  const std::array<FeatureBounds, kFeatureCount>& bounds() const {
    return bounds_;
  }

  // Linear map into [0,1], clamped outside the fitted range.
  double Apply(int feature, double value) const;
  FeatureVector Apply(const RawFeatures& raw, const ChannelStats& stats) const;

  friend bool operator==(const Normalizer&, const Normalizer&) = default;

 private:
  std::array<FeatureBounds, kFeatureCount> bounds_{};
};

// Per-frame building blocks, exposed for tests.
double FrameSpatialInformation(const LumaFrame& frame);
struct PairStats {
  double ti = 0.0;             // population std-dev of the difference
  double mean_abs_diff = 0.0;
};
PairStats FramePairStats(const LumaFrame& prev, const LumaFrame& next);
// Edge widths of every horizontal-gradient edge pixel of one frame.
std::vector<int> FrameEdgeWidths(const LumaFrame& frame);
struct NoiseEstimate {
  double sigma = 0.0;
  double noisy_fraction = 0.0;
};
NoiseEstimate FrameNoise(const LumaFrame& frame, const FeatureConfig& config);
double FrameBlockinessRatio(const LumaFrame& frame,
                            const FeatureConfig& config);
// Otsu threshold over integer values in [0, max_value].
int OtsuThreshold(std::span<const int64_t> histogram);

double SpatialComplexity(const VideoClip& clip);
double Motion(const VideoClip& clip);
std::pair<double, double> Blur(const VideoClip& clip,
                               const FeatureConfig& config = {});
std::pair<double, double> Noise(const VideoClip& clip,
                                const FeatureConfig& config = {});
double Blockiness(const VideoClip& clip, const FeatureConfig& config = {});
// Zero when no pair or every pair is frozen.
double Jerkiness(const VideoClip& clip, const FeatureConfig& config = {});
// Same as Jerkiness but from precomputed pair statistics.
double JerkinessFromPairs(std::span<const PairStats> pairs,
                          const FeatureConfig& config);

// All eight content features, sharing per-pair work.
RawFeatures ComputeRawFeatures(const VideoClip& clip,
                               const FeatureConfig& config = {});

// Content bounds are the corpus min/max; network bounds are fixed by the
// config. Requires >= 2 rows.
Normalizer FitNormalizer(
    std::span<const std::pair<RawFeatures, ChannelStats>> rows,
    const FeatureConfig& config = {});

FeatureVector ExtractFeatures(const VideoClip& clip, const ChannelStats& stats,
                              const Normalizer& norm,
                              const FeatureConfig& config = {});

}  // namespace nrvq

#endif  // NRVQ_NR_FEATURES_H_
