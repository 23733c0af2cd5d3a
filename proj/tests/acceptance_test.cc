/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

// End-to-end acceptance run on the full 960-sample grid. Prints one
// PASS/FAIL line per criterion and exits non-zero if any fails.
//
// Usage: acceptance_test WORK_DIR [PROPERTY_TEST_BINARY...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nrvq/cli.h"
#include "nrvq/dataset.h"
#include "nrvq/eval_harness.h"
#include "nrvq/impairment.h"
#include "nrvq/learners.h"
#include "nrvq/rng.h"
#include "nrvq/text.h"

namespace nrvq {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr uint64_t kSeed = 1;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string F(double v, int digits = 4) { return FormatFixed(v, digits); }

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Ledger {
 public:
  void Report(int id, bool pass, const std::string& name,
              const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << " "
              << name << ": " << detail << std::endl;
    failed_ = failed_ || !pass;
  }
  bool failed() const { return failed_; }

 private:
  bool failed_ = false;
};

int Cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "nrvq");
  std::ostringstream o, e;
  const int rc = RunCli(args, o, e);
  if (rc != kExitOk) std::cerr << e.str();
  if (out) *out = o.str();
  return rc;
}

std::vector<LearnerSpec> AllSpecs() {
  std::vector<LearnerSpec> specs;
  for (Algo a : kAllAlgos) specs.emplace_back(a);
  return specs;
}

void Progress(const char* what, size_t done, size_t total) {
  if (done % 10 == 0 || done == total) {
    std::cerr << what << " " << done << "/" << total << std::endl;
  }
}

int Main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance_test WORK_DIR [TEST_BINARY...]\n";
    return 2;
  }
  const fs::path work(argv[1]);
  fs::remove_all(work);
  fs::create_directories(work);
  Ledger ledger;

  // 1. Grid reproduction.
  const auto grid_start = Clock::now();
  const bool synth_ok =
      Cli({"synth", "--out", (work / "corpus").string(), "--classes", "10",
           "--seed", std::to_string(kSeed)}) == kExitOk;
  const bool extract_ok =
      synth_ok &&
      Cli({"extract", "--clips", (work / "corpus/clips").string(), "--refs",
           (work / "corpus/refs").string(), "--out",
           (work / "dataset.csv").string(), "--seed", std::to_string(kSeed),
           "--jobs", "1", "--progress"}) == kExitOk;
  const double grid_s = Seconds(grid_start);
  if (!extract_ok) {
    ledger.Report(1, false, "grid", "synth/extract failed");
    return 1;
  }
  const Dataset ds = LoadCsv(work / "dataset.csv");
  ledger.Report(1, ds.size() == 960 && ds.ClassIds().size() == 10 &&
                       grid_s < 15 * 60,
                "grid", std::to_string(ds.size()) + " samples, " +
                            std::to_string(ds.ClassIds().size()) +
                            " classes, " + F(grid_s, 1) + " s (< 900 s)");

  // 2/3. Random 5-fold cross-validation.
  const LearnerSpec lsb(Algo::kErtLsb);
  const std::vector<LearnerSpec> lsb_only = {lsb};
  EvalOptions opts;
  const auto cv_start = Clock::now();
  const EvaluationReport cv = RunRandomCv(ds, lsb_only, 5, kSeed, opts);
  const double cv_s = Seconds(cv_start);
  const ReportSummary& cvs = cv.Summary("ERT-LSB");
  ledger.Report(2, cvs.count == 5 && cvs.mean >= 0.90 && cvs.std <= 0.05 &&
                       cv_s < 30 * 60,
                "cv", "ERT-LSB pcc " + F(cvs.mean) + " +- " + F(cvs.std) +
                          " (>= 0.90, std <= 0.05), " + F(cv_s, 1) +
                          " s (< 1800 s)");
  const FeatureBaseline single = BestSingleFeaturePcc(ds);
  ledger.Report(3, cvs.mean - single.pcc >= 0.10, "hybrid-vs-single",
                "ERT-LSB " + F(cvs.mean) + " vs best raw feature " +
                    std::to_string(single.feature) + " |pcc| " +
                    F(single.pcc) + " (margin >= 0.10)");

  // 4. Leave-one-class-out for every learner.
  EvalOptions blind_opts;
  blind_opts.progress = [](size_t d, size_t t) { Progress("blind", d, t); };
  const std::vector<LearnerSpec> all = AllSpecs();
  const EvaluationReport blind = RunBlindEval(ds, all, kSeed, blind_opts);
  const FeatureBaseline single_blind = BestSingleFeatureBlindPcc(ds);
  bool blind_ok = blind.Summary("ERT-LSB").mean >= 0.70;
  std::string detail = "baseline feature " +
                       std::to_string(single_blind.feature) + " " +
                       F(single_blind.pcc) + ";";
  for (const LearnerSpec& s : all) {
    const std::string name(AlgoName(s.algo()));
    const ReportSummary& sum = blind.Summary(name);
    blind_ok = blind_ok && sum.count > 0 && sum.mean > single_blind.pcc;
    detail += " " + name + " " + F(sum.mean);
  }
  ledger.Report(4, blind_ok, "blind", detail + " (ERT-LSB >= 0.70, all > baseline)");

  // 5. Training-set size sweep.
  const std::vector<double>& fractions = StandardFractions();
  const EvaluationReport sweep =
      RunSizeSweep(ds, lsb_only, fractions, kSeed, opts);
  bool sweep_ok = true;
  std::vector<double> means;
  detail.clear();
  for (const std::string& g : sweep.summary_groups) {
    means.push_back(sweep.Summary("ERT-LSB", g).mean);
    detail += (detail.empty() ? "" : " ") + g + " " + F(means.back());
  }
  for (size_t i = 1; i < means.size(); ++i) {
    sweep_ok = sweep_ok && means[i] <= means[i - 1] + 0.02;
  }
  sweep_ok = sweep_ok && means.size() == fractions.size() &&
             means.front() - means.back() <= 0.10;
  ledger.Report(5, sweep_ok, "sweep",
                detail + " (steps rise <= 0.02, total drop " +
                    F(means.front() - means.back()) + " <= 0.10)");

  // 6. Training and prediction time on the full grid. The faster learners
  // take the best of several runs to keep scheduler noise out.
  auto train_time = [&](Algo a, int runs) {
    double best = INFINITY;
    for (int r = 0; r < runs; ++r) {
      best = std::min(best,
                      Train(LearnerSpec(a), ds, kSeed).train_time_seconds());
    }
    return best;
  };
  const double t_lr = train_time(Algo::kLr, 5);
  const double t_rt = train_time(Algo::kRt, 3);
  const double t_br = train_time(Algo::kErtBr, 1);
  const double t_lsb = train_time(Algo::kErtLsb, 1);
  Rng rng(MixSeed(kSeed, 77));
  std::vector<FeatureVector> queries(1000);
  for (FeatureVector& q : queries) {
    for (double& v : q.values) v = rng.Uniform();
  }
  double worst_predict = 0.0;
  std::string worst_algo;
  for (Algo a : kAllAlgos) {
    const QualityModel m = Train(LearnerSpec(a), ds, kSeed);
    double sink = 0.0;
    const auto start = Clock::now();
    for (const FeatureVector& q : queries) sink += m.Predict(q);
    double per = Seconds(start) / queries.size();
    if (!(sink >= 0.0)) per = INFINITY;
    if (per > worst_predict) {
      worst_predict = per;
      worst_algo = std::string(AlgoName(a));
    }
  }
  ledger.Report(6, t_lr < t_rt && t_rt < t_br && t_lr <= t_lsb / 100 &&
                       worst_predict <= 1e-3,
                "timing", "LR " + F(t_lr, 6) + " s, RT " + F(t_rt, 6) +
                              " s, ERT-BR " + F(t_br, 3) + " s, ERT-LSB " +
                              F(t_lsb, 3) + " s (ratio " +
                              F(t_lsb / t_lr, 0) + " >= 100); slowest predict " +
                              worst_algo + " " + F(worst_predict * 1e6, 1) +
                              " us (<= 1000 us)");

  // 7. Property suites plus end-to-end determinism reruns.
  const auto suite_start = Clock::now();
  bool suites_ok = true;
  for (int i = 2; i < argc; ++i) {
    const std::string cmd = std::string("\"") + argv[i] + "\" > \"" +
                            (work / ("suite_" + std::to_string(i) + ".log"))
                                .string() +
                            "\" 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      std::cerr << "suite failed: " << argv[i] << "\n";
      suites_ok = false;
    }
  }
  const double suite_s = Seconds(suite_start);
  const fs::path model_a = work / "a.model", model_b = work / "b.model";
  bool same = Cli({"train", "--dataset", (work / "dataset.csv").string(),
                   "--algo", "ERT-LSB", "--out", model_a.string()}) == kExitOk &&
              Cli({"train", "--dataset", (work / "dataset.csv").string(),
                   "--algo", "ERT-LSB", "--out", model_b.string()}) == kExitOk &&
              Slurp(model_a) == Slurp(model_b);
  for (const char* dir : {"cv_a", "cv_b"}) {
    same = same && Cli({"eval", "cv", "--dataset",
                        (work / "dataset.csv").string(), "--algos",
                        "LR,RT,ERT-LSB", "--seed", "3", "--out",
                        (work / dir).string()}) == kExitOk;
  }
  for (const char* f : {"report.csv", "report.md", "splits.csv"}) {
    same = same && !Slurp(work / "cv_a" / f).empty() &&
           Slurp(work / "cv_a" / f) == Slurp(work / "cv_b" / f);
  }
  // The first two classes are rebuilt from their stored references.
  std::vector<VideoClip> refs;
  for (const char* id : {"bs1", "mc1"}) {
    refs.push_back(ReadY4m(work / "corpus/refs" / (std::string(id) + ".y4m")));
  }
  const Dataset rebuilt =
      BuildGrid(refs, StandardLadder(), StandardLossGrid(), kSeed);
  same = same && rebuilt.size() == 192;
  for (size_t c = 0; c < 2 && same; ++c) {
    for (size_t i = c * 96; i < (c + 1) * 96 && same; ++i) {
      same = rebuilt[i].raw == ds[i].raw && rebuilt[i].q == ds[i].q;
    }
  }
  ledger.Report(7, suites_ok && suite_s < 60 && same, "properties",
                std::to_string(argc - 2) + " suites " +
                    (suites_ok ? "passed" : "FAILED") + " in " +
                    F(suite_s, 1) + " s (< 60 s); reruns " +
                    (same ? "byte-identical" : "DIFFER"));

  // End-to-end smoke: a grid-trained ERT-LSB model scores a pristine
  // reference highly.
  std::string printed;
  const double top_kbps = StandardLadder().back().nominal_bitrate_kbps;
  const bool predict_ok =
      Cli({"predict", "--model", model_a.string(), "--clip",
           (work / "corpus/refs/mc1.y4m").string(), "--loss", "0",
           "--bitrate", FormatDouble(top_kbps)},
          &printed) == kExitOk;
  const auto q = ParseDouble(Trim(printed));
  const bool smoke = predict_ok && q && *q >= 0.9;
  std::cout << (smoke ? "PASS" : "FAIL")
            << " smoke predict: reference clip mc1 at loss 0 scored "
            << (q ? F(*q, 6) : "nothing") << " (>= 0.9)" << std::endl;

  return ledger.failed() || !smoke ? 1 : 0;
}

}  // namespace
}  // namespace nrvq

int main(int argc, char** argv) { return nrvq::Main(argc, argv); }
