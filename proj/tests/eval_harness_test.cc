/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/eval_harness.h"

#include <gtest/gtest.h>

#include <cmath>
#include <regex>
#include <set>

#include "nrvq/error.h"
#include "nrvq/rng.h"
#include "nrvq/text.h"

namespace nrvq {
namespace {

// Textbook two-pass formula.
double NaivePearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(PearsonTest, HandCases) {
  const std::vector<double> a = {1, 2, 3}, b = {3, 2, 1}, c = {1, 3, 2};
  EXPECT_DOUBLE_EQ(Pearson(a, a), 1.0);
  EXPECT_DOUBLE_EQ(Pearson(a, b), -1.0);
  EXPECT_DOUBLE_EQ(Pearson(a, c), 0.5);
}

TEST(PearsonTest, AgreesWithTwoPassOracle) {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const size_t n = 2 + rng.Index(499);
    std::vector<double> x(n), y(n);
    const double scale = std::pow(10.0, rng.Uniform(-3, 3));
    for (size_t i = 0; i < n; ++i) {
      x[i] = scale * rng.Gaussian() + 5.0;
      y[i] = 0.3 * x[i] + rng.Gaussian();
    }
    EXPECT_NEAR(Pearson(x, y), NaivePearson(x, y), 1e-12) << t;
  }
}

TEST(PearsonTest, SymmetryAndAffineInvariance) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const size_t n = 2 + rng.Index(200);
    std::vector<double> x(n), y(n), ax(n), nx(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = rng.Uniform();
      y[i] = x[i] * x[i] + 0.3 * rng.Uniform();
    }
    const double a = rng.Uniform(0.1, 10.0);
    const double b = rng.Uniform(-5.0, 5.0);
    for (size_t i = 0; i < n; ++i) {
      ax[i] = a * x[i] + b;
      nx[i] = -a * x[i] + b;
    }
    const double r = Pearson(x, y);
    EXPECT_EQ(Pearson(y, x), r);
    EXPECT_NEAR(Pearson(ax, y), r, 1e-12);
    EXPECT_NEAR(Pearson(nx, y), -r, 1e-12);
  }
}

TEST(PearsonTest, Errors) {
  const std::vector<double> a = {1, 2, 3}, k = {2, 2, 2}, s = {1, 2};
  try {
    Pearson(a, k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedCorrelation);
  }
  EXPECT_THROW(Pearson(a, s), Error);
  EXPECT_THROW(Pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
}

Normalizer UnitNormalizer() {
  std::array<FeatureBounds, kFeatureCount> b;
  for (auto& x : b) x = {0.0, 1.0};
  return Normalizer(b);
}

// q is an exact affine function of the first feature unless constant_q.
Dataset ToyDataset(int classes, int per_class, uint64_t seed,
                   int constant_class = -1) {
  Rng rng(seed);
  std::vector<Sample> samples;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      Sample s;
      s.class_id = "c" + std::to_string(c);
      s.level_index = i / 12;
      s.bitrate_kbps = 64.0 * (s.level_index + 1);
      s.loss_rate = 0.005 * (i % 12);
      std::array<double, kRawFeatureCount> raw;
      for (double& v : raw) v = rng.Uniform();
      s.raw = RawFeatures::FromArray(raw);
      for (int f = 0; f < kRawFeatureCount; ++f) s.features[f] = raw[f];
      s.features[8] = rng.Uniform();
      s.features[9] = rng.Uniform();
      s.q = c == constant_class ? 0.5 : 0.2 + 0.6 * raw[0];
      samples.push_back(s);
    }
  }
  return Dataset(samples, UnitNormalizer(), FeatureConfig{}, seed);
}

std::vector<LearnerSpec> Specs(std::initializer_list<Algo> algos) {
  std::vector<LearnerSpec> s;
  for (Algo a : algos) s.emplace_back(a);
  return s;
}

TEST(BlindEvalTest, LinearToyIsPerfectForLr) {
  const Dataset ds = ToyDataset(2, 48, 3);
  const auto specs = Specs({Algo::kLr});
  const EvaluationReport rep = RunBlindEval(ds, specs, 1);
  EXPECT_NEAR(rep.Cell("LR", "c0").pcc, 1.0, 1e-9);
  EXPECT_NEAR(rep.Cell("LR", "c1").pcc, 1.0, 1e-9);
  EXPECT_EQ(rep.Cell("LR", "c0").n, 48u);
}

TEST(BlindEvalTest, LayoutAndClassSeparation) {
  const Dataset ds = ToyDataset(10, 24, 4);
  const auto specs = Specs({Algo::kLr, Algo::kRt});
  const EvaluationReport rep = RunBlindEval(ds, specs, 1);
  EXPECT_EQ(rep.groups.size(), 10u);
  EXPECT_EQ(rep.summary_groups, std::vector<std::string>{"overall"});
  const std::string csv = RenderReport(rep, "csv").at("report.csv");
  const auto lines = Split(csv, '\n');
  // Header, algos x (groups + 1) rows, trailing empty piece.
  EXPECT_EQ(lines.size(), 1 + 2 * 11 + 1u);
  EXPECT_EQ(lines[0], kReportCsvHeader);
  for (const NamedSplit& s : rep.splits) {
    std::set<std::string> train_classes, test_classes;
    for (size_t i : s.indices.train) train_classes.insert(ds[i].class_id);
    for (size_t i : s.indices.test) test_classes.insert(ds[i].class_id);
    EXPECT_EQ(test_classes, std::set<std::string>{s.group});
    EXPECT_EQ(train_classes.count(s.group), 0u);
  }
}

TEST(BlindEvalTest, ConstantClassIsFlaggedAndExcluded) {
  const Dataset ds = ToyDataset(3, 24, 5, 2);
  const auto specs = Specs({Algo::kLr});
  const EvaluationReport rep = RunBlindEval(ds, specs, 1);
  EXPECT_FALSE(rep.Cell("LR", "c2").defined);
  const ReportSummary& s = rep.Summary("LR");
  EXPECT_EQ(s.count, 2u);
  EXPECT_EQ(s.undefined, 1u);
  EXPECT_DOUBLE_EQ(s.mean,
                   (rep.Cell("LR", "c0").pcc + rep.Cell("LR", "c1").pcc) / 2);
  const std::string csv = RenderReport(rep, "csv").at("report.csv");
  EXPECT_NE(csv.find("blind,LR,c2,undefined,24,,1"), std::string::npos);
  const std::string md = RenderReport(rep, "markdown").at("report.md");
  EXPECT_NE(md.find("(1 undefined)"), std::string::npos);
}

TEST(RandomCvTest, PerfectLinearAndPopulationStd) {
  const Dataset ds = ToyDataset(2, 48, 6);
  const auto specs = Specs({Algo::kLr, Algo::kRt});
  const EvaluationReport rep = RunRandomCv(ds, specs, 5, 7);
  EXPECT_NEAR(rep.Summary("LR").mean, 1.0, 1e-9);
  std::vector<double> v;
  for (int f = 1; f <= 5; ++f) {
    v.push_back(rep.Cell("RT", "fold" + std::to_string(f)).pcc);
  }
  double m = 0, ss = 0;
  for (double x : v) m += x / 5;
  for (double x : v) ss += (x - m) * (x - m);
  EXPECT_NEAR(rep.Summary("RT").mean, m, 1e-15);
  EXPECT_NEAR(rep.Summary("RT").std, std::sqrt(ss / 5), 1e-15);
  std::set<size_t> seen;
  for (const NamedSplit& s : rep.splits) {
    for (size_t i : s.indices.test) EXPECT_TRUE(seen.insert(i).second);
  }
  EXPECT_EQ(seen.size(), ds.size());
}

TEST(RandomCvTest, DeterministicReportBytes) {
  const Dataset ds = ToyDataset(3, 36, 8);
  const auto specs = Specs({Algo::kRt, Algo::kErtBr});
  EvalOptions par;
  par.jobs = 3;
  const EvaluationReport a = RunRandomCv(ds, specs, 5, 9);
  const EvaluationReport b = RunRandomCv(ds, specs, 5, 9, par);
  for (const char* fmt : {"csv", "markdown", "svg"}) {
    EXPECT_EQ(RenderReport(a, fmt), RenderReport(b, fmt)) << fmt;
  }
}

TEST(SizeSweepTest, FractionOrderAndPerfectToy) {
  const Dataset ds = ToyDataset(2, 60, 10);
  const auto specs = Specs({Algo::kLr});
  const EvaluationReport rep =
      RunSizeSweep(ds, specs, StandardFractions(), 11);
  EXPECT_EQ(rep.summary_groups,
            (std::vector<std::string>{"0.8", "0.6", "0.4", "0.2"}));
  EXPECT_EQ(rep.groups.size(), 20u);
  EXPECT_EQ(rep.groups[0], "0.8/1");
  for (const std::string& g : rep.summary_groups) {
    EXPECT_NEAR(rep.Summary("LR", g).mean, 1.0, 1e-9) << g;
    EXPECT_EQ(rep.Summary("LR", g).count, 5u);
  }
  EXPECT_EQ(rep.Cell("LR", "0.2/3").n, 120u - 24u);
}

TEST(TimingTest, TimesOnlyInTimingReports) {
  const Dataset ds = ToyDataset(2, 60, 12);
  const auto specs = Specs({Algo::kLr, Algo::kRt});
  const std::vector<double> fractions = {0.8, 0.2};
  const EvaluationReport t = TimeTraining(ds, specs, fractions, 1);
  for (const ReportCell& c : t.cells) EXPECT_GT(c.train_time_s, 0.0);
  const std::string csv = RenderReport(t, "csv").at("report.csv");
  const auto row = Split(Split(csv, '\n')[1], ',');
  ASSERT_EQ(row.size(), 7u);
  EXPECT_FALSE(row[5].empty());
  EXPECT_TRUE(RenderReport(t, "markdown").at("report.md").find(
                  "Training time") != std::string::npos);
  EXPECT_TRUE(RenderReport(t, "svg").count("time_vs_fraction.svg"));
  const EvaluationReport s = RunSizeSweep(ds, specs, fractions, 1);
  const auto srow =
      Split(Split(RenderReport(s, "csv").at("report.csv"), '\n')[1], ',');
  EXPECT_TRUE(srow[5].empty());
}

TEST(RenderTest, MarkdownShowsCsvNumbers) {
  const Dataset ds = ToyDataset(4, 24, 13);
  const auto specs = Specs({Algo::kLr, Algo::kRt});
  const EvaluationReport rep = RunBlindEval(ds, specs, 2);
  const std::string md = RenderReport(rep, "markdown").at("report.md");
  const std::string csv = RenderReport(rep, "csv").at("report.csv");
  for (const std::string& line : Split(csv, '\n')) {
    const auto f = Split(line, ',');
    if (f.size() != 7 || f[0] != "blind" || f[2] == "overall") continue;
    // The markdown row of the group lists LR then RT.
    const std::regex row("\\| " + f[2] + " \\| ([^ ]+) \\| ([^ ]+) \\|");
    std::smatch m;
    ASSERT_TRUE(std::regex_search(md, m, row)) << f[2];
    EXPECT_EQ(f[1] == "LR" ? m[1].str() : m[2].str(), f[3]);
  }
  for (const std::string& algo : rep.algos) {
    const std::string mean = FormatFixed(rep.Summary(algo).mean, 6);
    EXPECT_NE(md.find(mean + " ± "), std::string::npos);
    EXPECT_NE(csv.find("blind," + algo + ",overall," + mean), std::string::npos);
  }
}

TEST(RenderTest, PerfectPredictorScatterOnDiagonal) {
  EvaluationReport rep;
  rep.experiment = Experiment::kCv;
  rep.algos = {"LR"};
  ReportCell c;
  c.algo = "LR";
  c.group = "fold1";
  for (int i = 0; i <= 20; ++i) {
    c.actual.push_back(i / 20.0);
    c.predicted.push_back(i / 20.0);
  }
  rep.cells.push_back(c);
  const std::string svg = RenderReport(rep, "svg").at("scatter_LR.svg");
  const std::regex circle("cx=\"([0-9.]+)\" cy=\"([0-9.]+)\"");
  int count = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), circle);
       it != std::sregex_iterator(); ++it) {
    const double cx = std::stod((*it)[1]);
    const double cy = std::stod((*it)[2]);
    // Plot area [50, 450] in both axes, y grows downward.
    EXPECT_NEAR((cx - 50.0) + (cy - 50.0), 400.0, 1e-3);
    ++count;
  }
  EXPECT_EQ(count, 21);
  EXPECT_EQ(svg.find("href"), std::string::npos);
}

TEST(RenderTest, UnknownFormat) {
  try {
    RenderReport(EvaluationReport{}, "pdf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUsageError);
  }
}

TEST(BaselineTest, SingleFeatureBaselines) {
  const Dataset ds = ToyDataset(3, 24, 14);
  const FeatureBaseline whole = BestSingleFeaturePcc(ds);
  EXPECT_EQ(whole.feature, 0);
  EXPECT_NEAR(whole.pcc, 1.0, 1e-12);
  const FeatureBaseline blind = BestSingleFeatureBlindPcc(ds);
  EXPECT_EQ(blind.feature, 0);
  EXPECT_NEAR(blind.pcc, 1.0, 1e-12);
}

TEST(BaselineTest, NegativeSlopeKeepsSign) {
  Dataset ds = ToyDataset(3, 24, 15);
  std::vector<Sample> s = ds.samples();
  for (Sample& x : s) x.q = 1.0 - x.q;
  const Dataset flipped(s, ds.normalizer(), ds.feature_config());
  EXPECT_NEAR(BestSingleFeatureBlindPcc(flipped).pcc, 1.0, 1e-12);
}

}  // namespace
}  // namespace nrvq
