/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/nr_features.h"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "nrvq/error.h"
#include "nrvq/synth.h"
#include "test_clips.h"

namespace nrvq {
namespace {

using testing::ConstantClip;
using testing::ConstantFrame;
using testing::FrameFrom;
using testing::GaussianFrame;
using testing::MovingTextureClip;
using testing::RandomClip;

VideoClip TwoFrames(const LumaFrame& a, const LumaFrame& b) {
  return VideoClip({a, b}, FrameRate{25, 1}, "pair");
}

VideoClip Repeat(const LumaFrame& f, int n) {
  return VideoClip(std::vector<LumaFrame>(n, f), FrameRate{25, 1}, "rep");
}

// Sobel magnitude std-dev evaluated straight from the kernel definition.
double BruteForceSi(const LumaFrame& f) {
  const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  std::vector<double> mags;
  for (int y = 1; y < f.height() - 1; ++y) {
    for (int x = 1; x < f.width() - 1; ++x) {
      double gx = 0, gy = 0;
      for (int j = -1; j <= 1; ++j) {
        for (int i = -1; i <= 1; ++i) {
          gx += kx[j + 1][i + 1] * f.at(x + i, y + j);
          gy += ky[j + 1][i + 1] * f.at(x + i, y + j);
        }
      }
      mags.push_back(std::hypot(gx, gy));
    }
  }
  double mean = 0;
  for (double m : mags) mean += m;
  mean /= mags.size();
  double var = 0;
  for (double m : mags) var += (m - mean) * (m - mean);
  return std::sqrt(var / mags.size());
}

TEST(SpatialComplexityTest, ConstantIsZero) {
  EXPECT_EQ(SpatialComplexity(ConstantClip(16, 16, 3, 90)), 0.0);
}

TEST(SpatialComplexityTest, StepEdgeMatchesBruteForce) {
  const LumaFrame edge =
      FrameFrom(16, 16, [](int x, int) { return x < 8 ? 0 : 255; });
  const double expected = BruteForceSi(edge);
  EXPECT_GT(expected, 0.0);
  EXPECT_NEAR(SpatialComplexity(Repeat(edge, 2)), expected, 1e-9);
}

TEST(SpatialComplexityTest, MoreEdgesMoreComplexity) {
  const LumaFrame one =
      FrameFrom(64, 64, [](int x, int) { return x < 32 ? 50 : 200; });
  const LumaFrame four =
      FrameFrom(64, 64, [](int x, int) { return (x / 13) % 2 ? 200 : 50; });
  EXPECT_GT(SpatialComplexity(Repeat(four, 2)),
            SpatialComplexity(Repeat(one, 2)));
}

TEST(MotionTest, StaticIsZero) {
  EXPECT_EQ(Motion(ConstantClip(16, 16, 4, 3)), 0.0);
  const LumaFrame f = testing::RandomClip(16, 16, 2, 1).frame(0);
  EXPECT_EQ(Motion(Repeat(f, 3)), 0.0);
}

TEST(MotionTest, HalfPixelsPlusTen) {
  const LumaFrame a = ConstantFrame(16, 16, 100);
  const LumaFrame b =
      FrameFrom(16, 16, [](int x, int) { return x < 8 ? 110 : 100; });
  EXPECT_DOUBLE_EQ(Motion(TwoFrames(a, b)), 5.0);
}

TEST(MotionTest, FasterTranslationMoreMotion) {
  EXPECT_GE(Motion(MovingTextureClip(64, 64, 8, 2, 5)),
            Motion(MovingTextureClip(64, 64, 8, 1, 5)));
}

TEST(BlurTest, IdealStepHasUnitWidth) {
  const LumaFrame edge =
      FrameFrom(32, 16, [](int x, int) { return x < 16 ? 0 : 255; });
  auto [bm, br] = Blur(Repeat(edge, 2));
  EXPECT_EQ(bm, 1.0);
  EXPECT_EQ(br, 0.0);
}

TEST(BlurTest, BoxFilteredEdgeMatchesProfileOracle) {
  const int w = 48, c = 24;
  std::vector<int> profile(w);
  for (int x = 0; x < w; ++x) {
    int hits = 0;
    for (int t = -3; t <= 3; ++t) hits += (x + t >= c) ? 1 : 0;
    profile[x] = static_cast<int>(std::lround(255.0 * hits / 7));
  }
  // Oracle: the strictly increasing segment [a, b] of the profile; every
  // pixel with a nonzero horizontal gradient lies in it.
  int a = 0;
  while (profile[a + 1] <= profile[a]) ++a;
  int b = a;
  while (b + 1 < w && profile[b + 1] > profile[b]) ++b;
  const double width = b - a;
  const LumaFrame f = FrameFrom(w, 16, [&](int x, int) { return profile[x]; });
  auto [bm, br] = Blur(Repeat(f, 2));
  EXPECT_EQ(bm, width);
  EXPECT_EQ(br, width > 5 ? 1.0 : 0.0);
}

TEST(BlurTest, ConstantHasNoEdges) {
  auto [bm, br] = Blur(ConstantClip(16, 16, 2, 33));
  EXPECT_EQ(bm, 0.0);
  EXPECT_EQ(br, 0.0);
}

TEST(OtsuTest, SplitsBimodalHistogram) {
  std::vector<int64_t> hist(11, 0);
  hist[1] = 50;
  hist[9] = 20;
  const int t = OtsuThreshold(hist);
  EXPECT_GE(t, 1);
  EXPECT_LT(t, 9);
}

TEST(NoiseTest, ConstantIsZero) {
  auto [nm, nr] = Noise(ConstantClip(16, 16, 2, 77));
  EXPECT_EQ(nm, 0.0);
  EXPECT_EQ(nr, 0.0);
}

TEST(NoiseTest, GaussianSigmaTen) {
  Rng rng(2024);
  const LumaFrame f = GaussianFrame(256, 256, 128, 10, rng);
  const LumaFrame g = GaussianFrame(256, 256, 128, 10, rng);
  auto [nm, nr] = Noise(TwoFrames(f, g));
  EXPECT_GE(nm, 9.0);
  EXPECT_LE(nm, 11.0);
  EXPECT_GT(nr, 0.0);
  EXPECT_LE(nr, 1.0);
}

TEST(NoiseTest, RampIsAnnihilated) {
  const LumaFrame ramp =
      FrameFrom(64, 64, [](int x, int y) { return 2 * x + y; });
  auto [nm, nr] = Noise(Repeat(ramp, 2));
  EXPECT_LE(nm, 0.01);
}

TEST(BlockinessTest, ConstantIsZero) {
  EXPECT_EQ(Blockiness(ConstantClip(16, 16, 2, 10)), 0.0);
}

TEST(BlockinessTest, CheckerboardOfBlocks) {
  const LumaFrame f = FrameFrom(
      32, 32, [](int x, int y) { return ((x / 8 + y / 8) % 2) ? 255 : 0; });
  EXPECT_GT(Blockiness(Repeat(f, 2)), 1e6);
}

TEST(BlockinessTest, NoiseHasNoGrid) {
  EXPECT_LE(Blockiness(RandomClip(128, 128, 2, 31)), 0.1);
}

TEST(JerkinessTest, NoFreezesIsZero) {
  EXPECT_EQ(Jerkiness(RandomClip(16, 16, 6, 8)), 0.0);
}

TEST(JerkinessTest, TrailingFreezeFormula) {
  const VideoClip src = RandomClip(16, 16, 5, 4);
  std::vector<LumaFrame> frames = src.frames();
  for (int i = 5; i < 10; ++i) frames.push_back(frames[4]);
  const VideoClip clip(frames, FrameRate{25, 1}, "freeze");
  EXPECT_NEAR(Jerkiness(clip), 5.0 / 18.0, 1e-15);
}

TEST(JerkinessTest, JumpsAddToFreezes) {
  const VideoClip src = RandomClip(16, 16, 12, 5);
  // Alternating: frame pairs frozen then moving.
  std::vector<LumaFrame> alt;
  for (int i = 0; i < 6; ++i) {
    alt.push_back(src.frame(i));
    alt.push_back(src.frame(i));
  }
  // Same freeze count, all at the end.
  std::vector<LumaFrame> tail;
  for (int i = 0; i < 6; ++i) tail.push_back(src.frame(i));
  for (int i = 0; i < 6; ++i) tail.push_back(src.frame(5));
  const VideoClip a(alt, FrameRate{}, "alt");
  const VideoClip b(tail, FrameRate{}, "tail");
  EXPECT_GT(Jerkiness(a), Jerkiness(b));
}

RawFeatures Raw(double cx) {
  RawFeatures r;
  r.cx = cx;
  return r;
}

std::vector<std::pair<RawFeatures, ChannelStats>> Corpus() {
  std::vector<std::pair<RawFeatures, ChannelStats>> rows;
  RawFeatures a{2, 0, 0, 0, 0, 0, 0, 0};
  RawFeatures b{4, 1, 1, 1, 1, 1, 1, 1};
  rows.push_back({a, ChannelStats{}});
  rows.push_back({b, ChannelStats{}});
  return rows;
}

TEST(NormalizerTest, MidpointAndClamp) {
  const Normalizer n = FitNormalizer(Corpus());
  EXPECT_EQ(n.bounds()[0], (FeatureBounds{2, 4}));
  EXPECT_EQ(n.Apply(0, 3.0), 0.5);
  EXPECT_EQ(n.Apply(0, 1.0), 0.0);
  EXPECT_EQ(n.Apply(0, 9.0), 1.0);
}

TEST(NormalizerTest, FixedNetworkBounds) {
  const Normalizer n = FitNormalizer(Corpus());
  EXPECT_NEAR(n.Apply(8, 2048.0), (2048.0 - 64.0) / (5120.0 - 64.0), 1e-15);
  EXPECT_NEAR(n.Apply(8, 2048.0), 0.3924, 1e-4);
  EXPECT_EQ(n.Apply(9, 0.10), 1.0);
  EXPECT_EQ(n.Apply(9, 0.25), 1.0);
  EXPECT_EQ(n.Apply(9, 0.0), 0.0);
}

TEST(NormalizerTest, DegenerateFeatureNamed) {
  auto rows = Corpus();
  rows[1].first.bl = 0;  // bl constant
  try {
    FitNormalizer(rows);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateFeature);
    EXPECT_EQ(e.detail(), "bl");
  }
}

TEST(ExtractFeaturesTest, ConstantStaticClipIsAllZero) {
  std::array<FeatureBounds, kFeatureCount> bounds;
  for (auto& b : bounds) b = {0.0, 1.0};
  bounds[8] = {64, 5120};
  bounds[9] = {0, 0.10};
  const Normalizer n(bounds);
  ChannelStats stats;
  stats.nominal_bitrate_kbps = 64;
  const FeatureVector v = ExtractFeatures(ConstantClip(16, 16, 4, 50), stats, n);
  for (int i = 0; i < kFeatureCount; ++i) EXPECT_EQ(v[i], 0.0) << i;
}

TEST(ExtractFeaturesTest, DeterministicAndLossAtUpperBound) {
  const VideoClip clip = MovingTextureClip(64, 48, 20, 1, 2);
  auto [impaired, stats] = Degrade(clip, StandardLadder()[0],
                                   LossModel::Bernoulli(0.10, 3));
  stats.measured_loss_ratio = 0.10;
  std::vector<std::pair<RawFeatures, ChannelStats>> rows = {
      {ComputeRawFeatures(clip), stats}, {ComputeRawFeatures(impaired), stats}};
  rows[0].first.je = 0.5;  // keep every feature non-degenerate
  rows[0].first.br = 0.5;
  const Normalizer n = FitNormalizer(rows);
  const FeatureVector a = ExtractFeatures(impaired, stats, n);
  const FeatureVector b = ExtractFeatures(impaired, stats, n);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[9], 1.0);
  for (int i = 0; i < kFeatureCount; ++i) {
    EXPECT_GE(a[i], 0.0);
    EXPECT_LE(a[i], 1.0);
  }
}

TEST(FeaturePropertyTest, RatiosStayInUnitInterval) {
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const VideoClip clip = seed % 2 ? RandomClip(32, 32, 6, seed)
                                    : MovingTextureClip(48, 32, 8, 1, seed);
    auto [impaired, stats] = Degrade(
        clip, StandardLadder()[seed], LossModel::Bernoulli(0.3, seed));
    const RawFeatures r = ComputeRawFeatures(impaired);
    for (double v : {r.br, r.nr, r.je}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    for (double v : {r.cx, r.mo, r.bm, r.nm, r.bl}) EXPECT_GE(v, 0.0);
  }
}

TEST(FeaturePropertyTest, CombinedMatchesIndividualOperations) {
  const VideoClip clip = MovingTextureClip(64, 48, 12, 2, 9);
  const RawFeatures r = ComputeRawFeatures(clip);
  EXPECT_EQ(r.cx, SpatialComplexity(clip));
  EXPECT_EQ(r.mo, Motion(clip));
  EXPECT_EQ(std::make_pair(r.bm, r.br), Blur(clip));
  EXPECT_EQ(std::make_pair(r.nm, r.nr), Noise(clip));
  EXPECT_EQ(r.bl, Blockiness(clip));
  EXPECT_EQ(r.je, Jerkiness(clip));
}

// Appending a copy of a clip to itself leaves per-frame means unchanged;
// the temporal features change only through the one new boundary pair.
TEST(FeaturePropertyTest, SelfConcatenation) {
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    const VideoClip base = MovingTextureClip(48, 32, 10, 1, seed);
    auto [clip, stats] = Degrade(base, StandardLadder()[0],
                                 LossModel::Bernoulli(0.3, seed));
    std::vector<LumaFrame> doubled = clip.frames();
    doubled.insert(doubled.end(), clip.frames().begin(), clip.frames().end());
    const VideoClip twice(doubled, clip.fps(), "twice");
    const RawFeatures a = ComputeRawFeatures(clip);
    const RawFeatures b = ComputeRawFeatures(twice);
    EXPECT_NEAR(a.cx, b.cx, 1e-9);
    EXPECT_NEAR(a.bm, b.bm, 1e-9);
    EXPECT_NEAR(a.br, b.br, 1e-9);
    EXPECT_NEAR(a.nm, b.nm, 1e-9);
    EXPECT_NEAR(a.nr, b.nr, 1e-9);
    EXPECT_NEAR(a.bl, b.bl, 1e-9);
    const double f = static_cast<double>(clip.frame_count());
    const double boundary_ti =
        FramePairStats(clip.frames().back(), clip.frame(0)).ti;
    // mean over 2F-1 pairs vs F-1 pairs
    EXPECT_NEAR(b.mo, (2 * (f - 1) * a.mo + boundary_ti) / (2 * f - 1), 1e-9);
    EXPECT_LE(std::abs(b.je - a.je), 1.0 / (2 * (f - 1)));
  }
}

TEST(FeaturePropertyTest, RealTimeOnFullSizeClip) {
  SynthOptions opts;
  const VideoClip clip = SynthesizeClass(3, opts, 1);
  const auto start = std::chrono::steady_clock::now();
  const RawFeatures r = ComputeRawFeatures(clip);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  EXPECT_GT(r.cx, 0.0);
  EXPECT_LT(secs, 1.0);
}

}  // namespace
}  // namespace nrvq
