/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/nr_features.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "nrvq/error.h"
#include "nrvq/text.h"

namespace nrvq {

namespace {

constexpr int kMaxAbsSobel = 1020;  // 4 * 255

double PopulationStd(double sum, double sum_sq, double n) {
  const double mean = sum / n;
  return std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
}

double ParseConfigValue(const std::string& key, const std::string& value) {
  auto v = ParseDouble(value);
  if (!v) {
    throw Error(ErrorCode::kSchemaError, "feature config " + key);
  }
  return *v;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> FeatureConfig::ToKeyValues()
    const {
  return {
      {"version", version},
      {"blur_width_threshold", FormatDouble(blur_width_threshold)},
      {"freeze_threshold", FormatDouble(freeze_threshold)},
      {"noise_sigma_multiplier", FormatDouble(noise_sigma_multiplier)},
      {"blockiness_epsilon", FormatDouble(blockiness_epsilon)},
      {"jerkiness_freeze_weight", FormatDouble(jerkiness_freeze_weight)},
      {"bitrate_min_kbps", FormatDouble(bitrate_min_kbps)},
      {"bitrate_max_kbps", FormatDouble(bitrate_max_kbps)},
      {"loss_min", FormatDouble(loss_min)},
      {"loss_max", FormatDouble(loss_max)},
  };
}

FeatureConfig FeatureConfig::FromKeyValues(
    const std::vector<std::pair<std::string, std::string>>& kv) {
  FeatureConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "version") {
      c.version = value;
    } else if (key == "blur_width_threshold") {
      c.blur_width_threshold = ParseConfigValue(key, value);
    } else if (key == "freeze_threshold") {
      c.freeze_threshold = ParseConfigValue(key, value);
    } else if (key == "noise_sigma_multiplier") {
      c.noise_sigma_multiplier = ParseConfigValue(key, value);
    } else if (key == "blockiness_epsilon") {
      c.blockiness_epsilon = ParseConfigValue(key, value);
    } else if (key == "jerkiness_freeze_weight") {
      c.jerkiness_freeze_weight = ParseConfigValue(key, value);
    } else if (key == "bitrate_min_kbps") {
      c.bitrate_min_kbps = ParseConfigValue(key, value);
    } else if (key == "bitrate_max_kbps") {
      c.bitrate_max_kbps = ParseConfigValue(key, value);
    } else if (key == "loss_min") {
      c.loss_min = ParseConfigValue(key, value);
    } else if (key == "loss_max") {
      c.loss_max = ParseConfigValue(key, value);
    } else {
      throw Error(ErrorCode::kUsageError, "unknown feature config key " + key);
    }
  }
  return c;
}

Normalizer::Normalizer(std::array<FeatureBounds, kFeatureCount> bounds)
    : bounds_(bounds) {
  for (int i = 0; i < kFeatureCount; ++i) {
    if (!(bounds_[i].max > bounds_[i].min)) {
      throw Error(ErrorCode::kDegenerateFeature, kFeatureNames[i]);
    }
  }
}

double Normalizer::Apply(int feature, double value) const {
  const FeatureBounds& b = bounds_[feature];
  return std::clamp((value - b.min) / (b.max - b.min), 0.0, 1.0);
}

FeatureVector Normalizer::Apply(const RawFeatures& raw,
                                const ChannelStats& stats) const {
  FeatureVector v;
  const auto a = raw.ToArray();
  for (int i = 0; i < kRawFeatureCount; ++i) v[i] = Apply(i, a[i]);
  v[8] = Apply(8, stats.nominal_bitrate_kbps);
  v[9] = Apply(9, stats.measured_loss_ratio);
  return v;
}

double FrameSpatialInformation(const LumaFrame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int y = 1; y < h - 1; ++y) {
    const uint8_t* up = frame.row(y - 1).data();
    const uint8_t* mid = frame.row(y).data();
    const uint8_t* dn = frame.row(y + 1).data();
    int64_t row_sq = 0;
    for (int x = 1; x < w - 1; ++x) {
      const int gx = (up[x + 1] + 2 * mid[x + 1] + dn[x + 1]) -
                     (up[x - 1] + 2 * mid[x - 1] + dn[x - 1]);
      const int gy = (dn[x - 1] + 2 * dn[x] + dn[x + 1]) -
                     (up[x - 1] + 2 * up[x] + up[x + 1]);
      const int m2 = gx * gx + gy * gy;
      row_sq += m2;
      sum += std::sqrt(static_cast<double>(m2));
    }
    sum_sq += static_cast<double>(row_sq);
  }
  return PopulationStd(sum, sum_sq, static_cast<double>(w - 2) * (h - 2));
}

PairStats FramePairStats(const LumaFrame& prev, const LumaFrame& next) {
  const auto a = prev.samples();
  const auto b = next.samples();
  int64_t sum = 0;
  int64_t sum_abs = 0;
  int64_t sum_sq = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    const int d = static_cast<int>(b[i]) - static_cast<int>(a[i]);
    sum += d;
    sum_abs += std::abs(d);
    sum_sq += d * d;
  }
  const double n = static_cast<double>(a.size());
  // Exact integer numerator: n * sum_sq - sum^2.
  const double var_num = static_cast<double>(
      static_cast<__int128>(sum_sq) * static_cast<__int128>(a.size()) -
      static_cast<__int128>(sum) * sum);
  PairStats s;
  s.ti = std::sqrt(std::max(0.0, var_num)) / n;
  s.mean_abs_diff = static_cast<double>(sum_abs) / n;
  return s;
}

int OtsuThreshold(std::span<const int64_t> histogram) {
  double total = 0.0;
  double total_sum = 0.0;
  for (size_t i = 0; i < histogram.size(); ++i) {
    total += static_cast<double>(histogram[i]);
    total_sum += static_cast<double>(i) * static_cast<double>(histogram[i]);
  }
  if (total <= 0.0) return 0;
  double w0 = 0.0;
  double sum0 = 0.0;
  double best = -1.0;
  int best_t = 0;
  for (size_t t = 0; t + 1 < histogram.size(); ++t) {
    w0 += static_cast<double>(histogram[t]);
    sum0 += static_cast<double>(t) * static_cast<double>(histogram[t]);
    const double w1 = total - w0;
    if (w0 <= 0.0 || w1 <= 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (total_sum - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = static_cast<int>(t);
    }
  }
  if (best < 0.0) {
    // Single occupied bin: nothing lies above it.
    for (size_t i = histogram.size(); i-- > 0;) {
      if (histogram[i] > 0) return static_cast<int>(i);
    }
  }
  return best_t;
}

std::vector<int> FrameEdgeWidths(const LumaFrame& frame) {
  const int w = frame.width();
  const int h = frame.height();
  std::vector<int16_t> gx(static_cast<size_t>(w) * h, 0);
  std::vector<int64_t> hist(kMaxAbsSobel + 1, 0);
  for (int y = 1; y < h - 1; ++y) {
    const uint8_t* up = frame.row(y - 1).data();
    const uint8_t* mid = frame.row(y).data();
    const uint8_t* dn = frame.row(y + 1).data();
    int16_t* g = gx.data() + static_cast<size_t>(y) * w;
    for (int x = 1; x < w - 1; ++x) {
      const int v = (up[x + 1] + 2 * mid[x + 1] + dn[x + 1]) -
                    (up[x - 1] + 2 * mid[x - 1] + dn[x - 1]);
      g[x] = static_cast<int16_t>(v);
      ++hist[std::abs(v)];
    }
  }
  const int threshold = OtsuThreshold(hist);

  std::vector<int> widths;
  std::vector<int> inc_left(w), inc_right(w), dec_left(w), dec_right(w);
  for (int y = 1; y < h - 1; ++y) {
    const int16_t* g = gx.data() + static_cast<size_t>(y) * w;
    bool any = false;
    for (int x = 1; x < w - 1; ++x) {
      if (std::abs(g[x]) > threshold) {
        any = true;
        break;
      }
    }
    if (!any) continue;
    const uint8_t* p = frame.row(y).data();
    // Lengths of the strictly monotone runs reaching x from each side.
    inc_left[0] = dec_left[0] = 0;
    for (int x = 1; x < w; ++x) {
      inc_left[x] = p[x - 1] < p[x] ? inc_left[x - 1] + 1 : 0;
      dec_left[x] = p[x - 1] > p[x] ? dec_left[x - 1] + 1 : 0;
    }
    inc_right[w - 1] = dec_right[w - 1] = 0;
    for (int x = w - 2; x >= 0; --x) {
      inc_right[x] = p[x + 1] > p[x] ? inc_right[x + 1] + 1 : 0;
      dec_right[x] = p[x + 1] < p[x] ? dec_right[x + 1] + 1 : 0;
    }
    for (int x = 1; x < w - 1; ++x) {
      if (std::abs(g[x]) <= threshold) continue;
      widths.push_back(g[x] > 0 ? inc_left[x] + inc_right[x]
                                : dec_left[x] + dec_right[x]);
    }
  }
  return widths;
}

NoiseEstimate FrameNoise(const LumaFrame& frame, const FeatureConfig& config) {
  const int w = frame.width();
  const int h = frame.height();
  std::vector<int> residual(static_cast<size_t>(w - 2) * (h - 2));
  int64_t sum_abs = 0;
  size_t k = 0;
  for (int y = 1; y < h - 1; ++y) {
    const uint8_t* up = frame.row(y - 1).data();
    const uint8_t* mid = frame.row(y).data();
    const uint8_t* dn = frame.row(y + 1).data();
    for (int x = 1; x < w - 1; ++x) {
      const int r = (up[x - 1] - 2 * up[x] + up[x + 1]) -
                    2 * (mid[x - 1] - 2 * mid[x] + mid[x + 1]) +
                    (dn[x - 1] - 2 * dn[x] + dn[x + 1]);
      residual[k++] = std::abs(r);
      sum_abs += std::abs(r);
    }
  }
  const double n = static_cast<double>(residual.size());
  NoiseEstimate est;
  est.sigma = std::sqrt(M_PI / 2.0) * static_cast<double>(sum_abs) / (6.0 * n);
  const double limit = config.noise_sigma_multiplier * est.sigma;
  int64_t noisy = 0;
  for (int r : residual) noisy += r > limit ? 1 : 0;
  est.noisy_fraction = static_cast<double>(noisy) / n;
  return est;
}

double FrameBlockinessRatio(const LumaFrame& frame,
                            const FeatureConfig& config) {
  const int w = frame.width();
  const int h = frame.height();
  int64_t boundary_sum = 0, boundary_n = 0;
  int64_t interior_sum = 0, interior_n = 0;
  for (int y = 0; y < h; ++y) {
    const uint8_t* p = frame.row(y).data();
    int64_t b = 0, in = 0;
    for (int x = 1; x < w; ++x) {
      const int d = std::abs(p[x] - p[x - 1]);
      if (x % kBlockAlign == 0) {
        b += d;
      } else {
        in += d;
      }
    }
    boundary_sum += b;
    interior_sum += in;
    boundary_n += (w - 1) / kBlockAlign;
    interior_n += (w - 1) - (w - 1) / kBlockAlign;
  }
  for (int y = 1; y < h; ++y) {
    const uint8_t* p = frame.row(y).data();
    const uint8_t* q = frame.row(y - 1).data();
    int64_t s = 0;
    for (int x = 0; x < w; ++x) s += std::abs(p[x] - q[x]);
    if (y % kBlockAlign == 0) {
      boundary_sum += s;
      boundary_n += w;
    } else {
      interior_sum += s;
      interior_n += w;
    }
  }
  const double boundary =
      boundary_n > 0 ? static_cast<double>(boundary_sum) / boundary_n : 0.0;
  const double interior =
      interior_n > 0 ? static_cast<double>(interior_sum) / interior_n : 0.0;
  return boundary / (interior + config.blockiness_epsilon);
}

double SpatialComplexity(const VideoClip& clip) {
  double total = 0.0;
  for (const LumaFrame& f : clip.frames()) total += FrameSpatialInformation(f);
  return total / static_cast<double>(clip.frame_count());
}

namespace {

std::vector<PairStats> AllPairStats(const VideoClip& clip) {
  std::vector<PairStats> pairs;
  pairs.reserve(clip.frame_count() - 1);
  for (size_t i = 1; i < clip.frame_count(); ++i) {
    pairs.push_back(FramePairStats(clip.frame(i - 1), clip.frame(i)));
  }
  return pairs;
}

double MotionFromPairs(std::span<const PairStats> pairs) {
  double total = 0.0;
  for (const PairStats& p : pairs) total += p.ti;
  return total / static_cast<double>(pairs.size());
}

struct BlurAccumulator {
  int64_t edges = 0;
  int64_t width_sum = 0;
  int64_t wide = 0;

  void Add(const std::vector<int>& widths, double threshold) {
    for (int w : widths) {
      ++edges;
      width_sum += w;
      if (w > threshold) ++wide;
    }
  }
  std::pair<double, double> Result() const {
    if (edges == 0) return {0.0, 0.0};
    const double n = static_cast<double>(edges);
    return {static_cast<double>(width_sum) / n, static_cast<double>(wide) / n};
  }
};

}  // namespace

double Motion(const VideoClip& clip) {
  return MotionFromPairs(AllPairStats(clip));
}

std::pair<double, double> Blur(const VideoClip& clip,
                               const FeatureConfig& config) {
  BlurAccumulator acc;
  for (const LumaFrame& f : clip.frames()) {
    acc.Add(FrameEdgeWidths(f), config.blur_width_threshold);
  }
  return acc.Result();
}

std::pair<double, double> Noise(const VideoClip& clip,
                                const FeatureConfig& config) {
  double sigma = 0.0, fraction = 0.0;
  for (const LumaFrame& f : clip.frames()) {
    const NoiseEstimate e = FrameNoise(f, config);
    sigma += e.sigma;
    fraction += e.noisy_fraction;
  }
  const double n = static_cast<double>(clip.frame_count());
  return {sigma / n, fraction / n};
}

double Blockiness(const VideoClip& clip, const FeatureConfig& config) {
  double total = 0.0;
  for (const LumaFrame& f : clip.frames()) {
    total += std::max(FrameBlockinessRatio(f, config) - 1.0, 0.0);
  }
  return total / static_cast<double>(clip.frame_count());
}

double JerkinessFromPairs(std::span<const PairStats> pairs,
                          const FeatureConfig& config) {
  if (pairs.empty()) return 0.0;
  const double mean_ti = MotionFromPairs(pairs);
  int64_t frozen = 0;
  int64_t jumps = 0;
  double jump_sum = 0.0;
  bool in_run = false;
  for (const PairStats& p : pairs) {
    const bool is_frozen = p.mean_abs_diff < config.freeze_threshold;
    if (is_frozen) {
      ++frozen;
      in_run = true;
      continue;
    }
    if (in_run) {
      ++jumps;
      if (mean_ti > 0.0) jump_sum += std::min(p.ti / mean_ti, 1.0);
      in_run = false;
    }
  }
  // A clip that never moves has no presentation to interrupt.
  if (frozen == 0 || frozen == static_cast<int64_t>(pairs.size())) return 0.0;
  const double freeze_ratio =
      static_cast<double>(frozen) / static_cast<double>(pairs.size());
  const double jump = jumps > 0 ? jump_sum / static_cast<double>(jumps) : 0.0;
  const double wf = config.jerkiness_freeze_weight;
  return wf * freeze_ratio + (1.0 - wf) * jump;
}

double Jerkiness(const VideoClip& clip, const FeatureConfig& config) {
  return JerkinessFromPairs(AllPairStats(clip), config);
}

RawFeatures ComputeRawFeatures(const VideoClip& clip,
                               const FeatureConfig& config) {
  RawFeatures raw;
  const double n = static_cast<double>(clip.frame_count());
  BlurAccumulator blur;
  for (const LumaFrame& f : clip.frames()) {
    raw.cx += FrameSpatialInformation(f);
    blur.Add(FrameEdgeWidths(f), config.blur_width_threshold);
    const NoiseEstimate e = FrameNoise(f, config);
    raw.nm += e.sigma;
    raw.nr += e.noisy_fraction;
    raw.bl += std::max(FrameBlockinessRatio(f, config) - 1.0, 0.0);
  }
  raw.cx /= n;
  raw.nm /= n;
  raw.nr /= n;
  raw.bl /= n;
  std::tie(raw.bm, raw.br) = blur.Result();
  const std::vector<PairStats> pairs = AllPairStats(clip);
  raw.mo = MotionFromPairs(pairs);
  raw.je = JerkinessFromPairs(pairs, config);
  return raw;
}

Normalizer FitNormalizer(
    std::span<const std::pair<RawFeatures, ChannelStats>> rows,
    const FeatureConfig& config) {
  if (rows.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "normalizer needs at least 2 samples");
  }
  std::array<FeatureBounds, kFeatureCount> bounds;
  for (int i = 0; i < kRawFeatureCount; ++i) {
    bounds[i] = {HUGE_VAL, -HUGE_VAL};
  }
  for (const auto& [raw, stats] : rows) {
    const auto a = raw.ToArray();
    for (int i = 0; i < kRawFeatureCount; ++i) {
      bounds[i].min = std::min(bounds[i].min, a[i]);
      bounds[i].max = std::max(bounds[i].max, a[i]);
    }
  }
  bounds[8] = {config.bitrate_min_kbps, config.bitrate_max_kbps};
  bounds[9] = {config.loss_min, config.loss_max};
  return Normalizer(bounds);
}

FeatureVector ExtractFeatures(const VideoClip& clip, const ChannelStats& stats,
                              const Normalizer& norm,
                              const FeatureConfig& config) {
  return norm.Apply(ComputeRawFeatures(clip, config), stats);
}

}  // namespace nrvq
