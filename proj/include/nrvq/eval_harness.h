/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#ifndef NRVQ_EVAL_HARNESS_H_
#define NRVQ_EVAL_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nrvq/dataset.h"
#include "nrvq/learners.h"

namespace nrvq {

// Sample Pearson coefficient, one pass. Exactly symmetric in its arguments.
// UndefinedCorrelation if either input is constant; InvalidArgument on a
// length mismatch or fewer than two values.
double Pearson(std::span<const double> x, std::span<const double> y);

enum class Experiment { kBlind, kCv, kSweep, kTime };
std::string_view ExperimentName(Experiment e);
Experiment ParseExperiment(std::string_view name);

struct ReportCell {
  std::string algo;
  std::string group;  // class id, fold, or "fraction/repetition"
  double pcc = 0.0;
  bool defined = true;  // false when the correlation is undefined
  size_t n = 0;         // held-out samples
  double train_time_s = 0.0;
  std::vector<double> predicted;  // held-out, in split test order
  std::vector<double> actual;
};

// Mean and population std over the defined cells of one (algo, group).
struct ReportSummary {
  std::string algo;
  std::string group;  // "overall" or a fraction label
  double mean = 0.0;
  double std = 0.0;
  size_t count = 0;  // defined cells averaged
  size_t undefined = 0;
  double time_mean = 0.0;
  double time_std = 0.0;
};

struct NamedSplit {
  std::string group;
  SplitIndices indices;
};

struct EvaluationReport {
  Experiment experiment = Experiment::kCv;
  uint64_t seed = 0;
  uint64_t dataset_fingerprint = 0;
  std::vector<std::string> algos;   // in spec order
  std::vector<std::string> groups;  // in evaluation order
  std::vector<std::string> summary_groups;
  std::vector<ReportCell> cells;    // algo-major, then group
  std::vector<ReportSummary> summaries;
  std::vector<NamedSplit> splits;

  const ReportCell& Cell(std::string_view algo, std::string_view group) const;
  const ReportSummary& Summary(std::string_view algo,
                               std::string_view group = "overall") const;
};

struct EvalOptions {
  int jobs = 1;
  // Called after each finished training job with (done, total).
  std::function<void(size_t, size_t)> progress;
};

inline constexpr int kSweepRepetitions = 5;

const std::vector<double>& StandardFractions();

EvaluationReport RunBlindEval(const Dataset& ds,
                              std::span<const LearnerSpec> specs,
                              uint64_t seed, const EvalOptions& options = {});
EvaluationReport RunRandomCv(const Dataset& ds,
                             std::span<const LearnerSpec> specs, int k,
                             uint64_t seed, const EvalOptions& options = {});
EvaluationReport RunSizeSweep(const Dataset& ds,
                              std::span<const LearnerSpec> specs,
                              std::span<const double> fractions, uint64_t seed,
                              const EvalOptions& options = {});
// Same subsamples as the sweep; wall time measured around training only.
EvaluationReport TimeTraining(const Dataset& ds,
                              std::span<const LearnerSpec> specs,
                              std::span<const double> fractions,
                              uint64_t seed, const EvalOptions& options = {});

// File name -> content. Formats: csv, markdown, svg. UsageError otherwise.
std::map<std::string, std::string> RenderReport(const EvaluationReport& rep,
                                                std::string_view format);
// Every format plus splits.csv into dir.
void WriteReport(const EvaluationReport& rep, const std::filesystem::path& dir);

inline constexpr const char* kReportCsvHeader =
    "experiment,algo,group,pcc,n,train_time_s,seed";

// Single-feature baselines over the raw NR features.
struct FeatureBaseline {
  int feature = -1;
  double pcc = 0.0;
};
// Largest |pcc(raw feature, q)| over the whole dataset.
FeatureBaseline BestSingleFeaturePcc(const Dataset& ds);
// Per held-out class, a univariate least-squares fit on the other classes;
// the result is the best mean held-out pcc over the raw features.
FeatureBaseline BestSingleFeatureBlindPcc(const Dataset& ds);

}  // namespace nrvq

#endif  // NRVQ_EVAL_HARNESS_H_
