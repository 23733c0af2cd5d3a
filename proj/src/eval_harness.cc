/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/eval_harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "nrvq/error.h"
#include "nrvq/rng.h"
#include "nrvq/text.h"

namespace nrvq {

namespace {

constexpr const char* kOverall = "overall";
constexpr int kPccDigits = 6;

struct Job {
  size_t spec;
  size_t split;
};

// Runs fn(job_index) for every job on up to `jobs` threads. Results are
// written by index, so the output never depends on scheduling.
void RunJobs(size_t count, const EvalOptions& options,
             const std::function<void(size_t)>& fn) {
  const int threads =
      std::max(1, std::min<int>(options.jobs, static_cast<int>(count)));
  std::atomic<size_t> next{0};
  std::atomic<size_t> done{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const size_t i = next++;
      if (i >= count) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
      const size_t d = ++done;
      if (options.progress) {
        std::lock_guard<std::mutex> lock(mu);
        options.progress(d, count);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::string FractionLabel(double f) { return FormatDouble(f); }

void PopulationStats(const std::vector<double>& v, double& mean,
                     double& std) {
  mean = 0.0;
  std = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) std += (x - mean) * (x - mean);
  std = std::sqrt(std / static_cast<double>(v.size()));
}

// Trains every spec on every split and fills the cells; groups[i] labels
// splits[i].
EvaluationReport Evaluate(Experiment experiment, const Dataset& ds,
                          std::span<const LearnerSpec> specs,
                          std::vector<NamedSplit> splits, uint64_t seed,
                          const EvalOptions& options) {
  if (specs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no learners to evaluate");
  }
  EvaluationReport rep;
  rep.experiment = experiment;
  rep.seed = seed;
  rep.dataset_fingerprint = ds.Fingerprint();
  for (const LearnerSpec& s : specs) rep.algos.emplace_back(AlgoName(s.algo()));
  for (const NamedSplit& s : splits) rep.groups.push_back(s.group);

  std::vector<Job> jobs;
  for (size_t a = 0; a < specs.size(); ++a) {
    for (size_t g = 0; g < splits.size(); ++g) jobs.push_back({a, g});
  }
  rep.cells.resize(jobs.size());
  // Subsets are shared by all algorithms of a split.
  std::vector<Dataset> train_sets(splits.size());
  for (size_t g = 0; g < splits.size(); ++g) {
    train_sets[g] = ds.Subset(splits[g].indices.train);
  }
  RunJobs(jobs.size(), options, [&](size_t j) {
    const Job& job = jobs[j];
    const NamedSplit& split = splits[job.split];
    const QualityModel model =
        Train(specs[job.spec], train_sets[job.split], MixSeed(seed, job.split));
    ReportCell cell;
    cell.algo = rep.algos[job.spec];
    cell.group = split.group;
    cell.train_time_s = model.train_time_seconds();
    cell.n = split.indices.test.size();
    for (size_t i : split.indices.test) {
      cell.predicted.push_back(model.Predict(ds[i].features));
      cell.actual.push_back(ds[i].q);
    }
    try {
      cell.pcc = Pearson(cell.predicted, cell.actual);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUndefinedCorrelation) throw;
      cell.defined = false;
      cell.pcc = 0.0;
    }
    rep.cells[j] = std::move(cell);
  });
  rep.splits = std::move(splits);
  return rep;
}

// Summary group of a cell group: "overall" or the fraction before '/'.
void Summarize(EvaluationReport& rep, bool by_fraction) {
  rep.summary_groups.clear();
  for (const std::string& g : rep.groups) {
    const std::string s = by_fraction ? g.substr(0, g.find('/')) : kOverall;
    if (std::find(rep.summary_groups.begin(), rep.summary_groups.end(), s) ==
        rep.summary_groups.end()) {
      rep.summary_groups.push_back(s);
    }
  }
  for (const std::string& algo : rep.algos) {
    for (const std::string& sg : rep.summary_groups) {
      std::vector<double> pcc, time;
      ReportSummary s;
      s.algo = algo;
      s.group = sg;
      for (const ReportCell& c : rep.cells) {
        if (c.algo != algo) continue;
        if (by_fraction && c.group.substr(0, c.group.find('/')) != sg) {
          continue;
        }
        time.push_back(c.train_time_s);
        if (c.defined) {
          pcc.push_back(c.pcc);
        } else {
          ++s.undefined;
        }
      }
      s.count = pcc.size();
      PopulationStats(pcc, s.mean, s.std);
      PopulationStats(time, s.time_mean, s.time_std);
      rep.summaries.push_back(s);
    }
  }
}

std::vector<NamedSplit> SweepSplits(const Dataset& ds,
                                    std::span<const double> fractions,
                                    uint64_t seed) {
  std::vector<NamedSplit> splits;
  for (size_t f = 0; f < fractions.size(); ++f) {
    for (int r = 0; r < kSweepRepetitions; ++r) {
      const uint64_t s = MixSeed(seed, f * kSweepRepetitions + r);
      splits.push_back({FractionLabel(fractions[f]) + "/" +
                            std::to_string(r + 1),
                        SubsampleFraction(ds, fractions[f], s)});
    }
  }
  return splits;
}

std::string PccText(const ReportCell& c) {
  return c.defined ? FormatFixed(c.pcc, kPccDigits) : "undefined";
}

std::string XmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                    "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#bcbd22"};
constexpr double kPlot = 400.0;   // plot area side
constexpr double kMargin = 50.0;  // left/top offset of the plot area

std::string SvgOpen(const std::string& title) {
  const std::string side = FormatFixed(kPlot + 2 * kMargin, 0);
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + side +
         "\" height=\"" + side + "\" viewBox=\"0 0 " + side + " " + side +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         "<text x=\"" + FormatFixed(kMargin, 0) + "\" y=\"30\" "
         "font-family=\"sans-serif\" font-size=\"14\">" + XmlEscape(title) +
         "</text>\n<rect x=\"" + FormatFixed(kMargin, 0) + "\" y=\"" +
         FormatFixed(kMargin, 0) + "\" width=\"" + FormatFixed(kPlot, 0) +
         "\" height=\"" + FormatFixed(kPlot, 0) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
}

std::string AxisLabels(const std::string& x, const std::string& y) {
  return "<text x=\"" + FormatFixed(kMargin + kPlot / 2, 0) + "\" y=\"" +
         FormatFixed(2 * kMargin + kPlot - 15, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">" + XmlEscape(x) + "</text>\n<text x=\"15\" "
         "y=\"" + FormatFixed(kMargin + kPlot / 2, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 15 " + FormatFixed(kMargin + kPlot / 2, 0) +
         ")\" text-anchor=\"middle\">" + XmlEscape(y) + "</text>\n";
}

// Scatter of predicted against benchmark q over all held-out cells.
std::string ScatterSvg(const EvaluationReport& rep, const std::string& algo) {
  std::string svg = SvgOpen(std::string(ExperimentName(rep.experiment)) +
                            ": " + algo + " predicted vs benchmark");
  svg += "<line x1=\"" + FormatFixed(kMargin, 3) + "\" y1=\"" +
         FormatFixed(kMargin + kPlot, 3) + "\" x2=\"" +
         FormatFixed(kMargin + kPlot, 3) + "\" y2=\"" +
         FormatFixed(kMargin, 3) +
         "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  for (const ReportCell& c : rep.cells) {
    if (c.algo != algo) continue;
    for (size_t i = 0; i < c.actual.size(); ++i) {
      svg += "<circle cx=\"" + FormatFixed(kMargin + kPlot * c.actual[i], 3) +
             "\" cy=\"" +
             FormatFixed(kMargin + kPlot * (1.0 - c.predicted[i]), 3) +
             "\" r=\"2\" fill=\"" + kPalette[0] + "\" fill-opacity=\"0.5\"/>\n";
    }
  }
  svg += AxisLabels("benchmark q", "predicted q");
  return svg + "</svg>\n";
}

// One polyline per algorithm over the summary groups (fractions).
std::string FractionSvg(const EvaluationReport& rep, bool time) {
  double lo = 0.0;
  double hi = time ? 0.0 : 1.0;
  for (const ReportSummary& s : rep.summaries) {
    if (time) {
      hi = std::max(hi, s.time_mean);
    } else {
      lo = std::min(lo, s.mean);
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const size_t n = rep.summary_groups.size();
  auto px = [&](size_t i) {
    return kMargin + (n > 1 ? kPlot * static_cast<double>(i) / (n - 1) : 0.0);
  };
  auto py = [&](double v) { return kMargin + kPlot * (hi - v) / (hi - lo); };
  std::string svg = SvgOpen(time ? "training time vs training fraction"
                                 : "pcc vs training fraction");
  for (size_t i = 0; i < n; ++i) {
    svg += "<text x=\"" + FormatFixed(px(i), 3) + "\" y=\"" +
           FormatFixed(kMargin + kPlot + 15, 3) +
           "\" font-family=\"sans-serif\" font-size=\"10\" "
           "text-anchor=\"middle\">" + XmlEscape(rep.summary_groups[i]) +
           "</text>\n";
  }
  for (size_t a = 0; a < rep.algos.size(); ++a) {
    const char* color = kPalette[a % std::size(kPalette)];
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" points=\"";
    for (size_t i = 0; i < n; ++i) {
      const ReportSummary& s = rep.Summary(rep.algos[a], rep.summary_groups[i]);
      svg += (i ? " " : "") + FormatFixed(px(i), 3) + "," +
             FormatFixed(py(time ? s.time_mean : s.mean), 3);
    }
    svg += "\"/>\n<text x=\"" + FormatFixed(kMargin + kPlot + 5, 0) +
           "\" y=\"" + FormatFixed(kMargin + 12 + 14 * a, 0) +
           "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" + color +
           "\">" + XmlEscape(rep.algos[a]) + "</text>\n";
  }
  svg += AxisLabels("training fraction", time ? "seconds" : "mean pcc");
  return svg + "</svg>\n";
}

std::string MarkdownRow(const std::vector<std::string>& cols) {
  std::string row = "|";
  for (const std::string& c : cols) row += " " + c + " |";
  return row + "\n";
}

std::string MarkdownTable(
    const std::string& corner, const std::vector<std::string>& rows,
    const std::vector<std::string>& algos,
    const std::function<std::string(const std::string&, const std::string&)>&
        value) {
  std::vector<std::string> header = {corner};
  header.insert(header.end(), algos.begin(), algos.end());
  std::string out = MarkdownRow(header);
  out += MarkdownRow(std::vector<std::string>(header.size(), "---"));
  for (const std::string& r : rows) {
    std::vector<std::string> cols = {r};
    for (const std::string& a : algos) cols.push_back(value(a, r));
    out += MarkdownRow(cols);
  }
  return out;
}

std::string RenderCsv(const EvaluationReport& rep) {
  const std::string exp(ExperimentName(rep.experiment));
  const std::string seed = std::to_string(rep.seed);
  const bool timed = rep.experiment == Experiment::kTime;
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const std::string& algo : rep.algos) {
    for (const ReportCell& c : rep.cells) {
      if (c.algo != algo) continue;
      out += exp + "," + algo + "," + c.group + "," + PccText(c) + "," +
             std::to_string(c.n) + "," +
             (timed ? FormatFixed(c.train_time_s, kPccDigits) : "") + "," +
             seed + "\n";
    }
    for (const ReportSummary& s : rep.summaries) {
      if (s.algo != algo) continue;
      out += exp + "," + algo + "," + s.group + "," +
             (s.count ? FormatFixed(s.mean, kPccDigits) : "undefined") + "," +
             std::to_string(s.count) + "," +
             (timed ? FormatFixed(s.time_mean, kPccDigits) : "") + "," + seed +
             "\n";
    }
  }
  return out;
}

std::string RenderMarkdown(const EvaluationReport& rep) {
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(rep.dataset_fingerprint));
  std::string out = "# " + std::string(ExperimentName(rep.experiment)) +
                    " evaluation\n\n";
  out += "- seed: " + std::to_string(rep.seed) + "\n";
  out += "- dataset fingerprint: " + std::string(fp) + "\n";
  out += "- std: population, over defined cells\n";
  out += "- splits: " + std::to_string(rep.splits.size()) +
         " (see splits.csv)\n\n";
  const bool timed = rep.experiment == Experiment::kTime;

  out += "## Pearson correlation per group\n\n";
  out += MarkdownTable("group", rep.groups, rep.algos,
                       [&](const std::string& a, const std::string& g) {
                         return PccText(rep.Cell(a, g));
                       });
  out += "\n## Summary (mean ± std)\n\n";
  out += MarkdownTable(
      "group", rep.summary_groups, rep.algos,
      [&](const std::string& a, const std::string& g) {
        const ReportSummary& s = rep.Summary(a, g);
        std::string v = s.count ? FormatFixed(s.mean, kPccDigits) + " ± " +
                                      FormatFixed(s.std, kPccDigits)
                                : "undefined";
        if (s.undefined) v += " (" + std::to_string(s.undefined) + " undefined)";
        return v;
      });
  if (timed) {
    out += "\n## Training time in seconds per group\n\n";
    out += MarkdownTable("group", rep.groups, rep.algos,
                         [&](const std::string& a, const std::string& g) {
                           return FormatFixed(rep.Cell(a, g).train_time_s,
                                              kPccDigits);
                         });
    out += "\n## Training time summary (mean ± std)\n\n";
    out += MarkdownTable("group", rep.summary_groups, rep.algos,
                         [&](const std::string& a, const std::string& g) {
                           const ReportSummary& s = rep.Summary(a, g);
                           return FormatFixed(s.time_mean, kPccDigits) +
                                  " ± " + FormatFixed(s.time_std, kPccDigits);
                         });
  }
  return out;
}

std::string RenderSplits(const EvaluationReport& rep) {
  std::string out = "group,role,indices\n";
  for (const NamedSplit& s : rep.splits) {
    for (int role = 0; role < 2; ++role) {
      const auto& idx = role == 0 ? s.indices.train : s.indices.test;
      out += s.group + (role == 0 ? ",train," : ",test,");
      for (size_t i = 0; i < idx.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(idx[i]);
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace

double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "pearson: length " + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "pearson: needs 2 values");
  }
  // Welford co-moments with the pre-update deviations, symmetric in x, y.
  double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    const double w = (n - 1.0) / n;
    sxx += w * (dx * dx);
    syy += w * (dy * dy);
    sxy += w * (dx * dy);
    mx += dx / n;
    my += dy / n;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(ErrorCode::kUndefinedCorrelation,
                "pearson: constant input sequence");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string_view ExperimentName(Experiment e) {
  switch (e) {
    case Experiment::kBlind: return "blind";
    case Experiment::kCv: return "cv";
    case Experiment::kSweep: return "sweep";
    case Experiment::kTime: return "time";
  }
  return "?";
}

Experiment ParseExperiment(std::string_view name) {
  for (Experiment e : {Experiment::kBlind, Experiment::kCv, Experiment::kSweep,
                       Experiment::kTime}) {
    if (name == ExperimentName(e)) return e;
  }
  throw Error(ErrorCode::kUsageError,
              "unknown experiment '" + std::string(name) + "'");
}

const ReportCell& EvaluationReport::Cell(std::string_view algo,
                                         std::string_view group) const {
  for (const ReportCell& c : cells) {
    if (c.algo == algo && c.group == group) return c;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "no cell " + std::string(algo) + "/" + std::string(group));
}

const ReportSummary& EvaluationReport::Summary(std::string_view algo,
                                               std::string_view group) const {
  for (const ReportSummary& s : summaries) {
    if (s.algo == algo && s.group == group) return s;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "no summary " + std::string(algo) + "/" + std::string(group));
}

const std::vector<double>& StandardFractions() {
  static const std::vector<double> f = {0.8, 0.6, 0.4, 0.2};
  return f;
}

EvaluationReport RunBlindEval(const Dataset& ds,
                              std::span<const LearnerSpec> specs,
                              uint64_t seed, const EvalOptions& options) {
  const std::vector<std::string> classes = ds.ClassIds();
  if (classes.size() < 2) {
    throw Error(ErrorCode::kBadSplit, "blind evaluation needs >= 2 classes");
  }
  std::vector<NamedSplit> splits;
  for (const std::string& c : classes) {
    splits.push_back({c, SplitLeaveClassOut(ds, c)});
  }
  EvaluationReport rep =
      Evaluate(Experiment::kBlind, ds, specs, std::move(splits), seed, options);
  Summarize(rep, false);
  return rep;
}

EvaluationReport RunRandomCv(const Dataset& ds,
                             std::span<const LearnerSpec> specs, int k,
                             uint64_t seed, const EvalOptions& options) {
  std::vector<NamedSplit> splits;
  const std::vector<SplitIndices> folds = SplitKFold(ds, k, seed);
  for (size_t f = 0; f < folds.size(); ++f) {
    splits.push_back({"fold" + std::to_string(f + 1), folds[f]});
  }
  EvaluationReport rep =
      Evaluate(Experiment::kCv, ds, specs, std::move(splits), seed, options);
  Summarize(rep, false);
  return rep;
}

EvaluationReport RunSizeSweep(const Dataset& ds,
                              std::span<const LearnerSpec> specs,
                              std::span<const double> fractions, uint64_t seed,
                              const EvalOptions& options) {
  EvaluationReport rep = Evaluate(Experiment::kSweep, ds, specs,
                                  SweepSplits(ds, fractions, seed), seed,
                                  options);
  Summarize(rep, true);
  return rep;
}

EvaluationReport TimeTraining(const Dataset& ds,
                              std::span<const LearnerSpec> specs,
                              std::span<const double> fractions,
                              uint64_t seed, const EvalOptions& options) {
  EvaluationReport rep = Evaluate(Experiment::kTime, ds, specs,
                                  SweepSplits(ds, fractions, seed), seed,
                                  options);
  Summarize(rep, true);
  return rep;
}

std::map<std::string, std::string> RenderReport(const EvaluationReport& rep,
                                                std::string_view format) {
  std::map<std::string, std::string> files;
  if (format == "csv") {
    files["report.csv"] = RenderCsv(rep);
  } else if (format == "markdown") {
    files["report.md"] = RenderMarkdown(rep);
  } else if (format == "svg") {
    if (rep.experiment == Experiment::kBlind ||
        rep.experiment == Experiment::kCv) {
      for (const std::string& algo : rep.algos) {
        files["scatter_" + algo + ".svg"] = ScatterSvg(rep, algo);
      }
    } else {
      files[rep.experiment == Experiment::kTime ? "time_vs_fraction.svg"
                                                : "pcc_vs_fraction.svg"] =
          FractionSvg(rep, rep.experiment == Experiment::kTime);
    }
  } else {
    throw Error(ErrorCode::kUsageError,
                "unknown report format '" + std::string(format) + "'");
  }
  return files;
}

void WriteReport(const EvaluationReport& rep,
                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
  std::map<std::string, std::string> files;
  for (const char* fmt : {"csv", "markdown", "svg"}) {
    files.merge(RenderReport(rep, fmt));
  }
  files["splits.csv"] = RenderSplits(rep);
  for (const auto& [name, content] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) {
      throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
    }
  }
}

FeatureBaseline BestSingleFeaturePcc(const Dataset& ds) {
  FeatureBaseline best;
  std::vector<double> q;
  for (const Sample& s : ds.samples()) q.push_back(s.q);
  for (int f = 0; f < kRawFeatureCount; ++f) {
    std::vector<double> v;
    for (const Sample& s : ds.samples()) v.push_back(s.raw.ToArray()[f]);
    try {
      const double r = std::abs(Pearson(v, q));
      if (best.feature < 0 || r > best.pcc) best = {f, r};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUndefinedCorrelation) throw;
    }
  }
  return best;
}

FeatureBaseline BestSingleFeatureBlindPcc(const Dataset& ds) {
  FeatureBaseline best;
  const std::vector<std::string> classes = ds.ClassIds();
  for (int f = 0; f < kRawFeatureCount; ++f) {
    double total = 0.0;
    int defined = 0;
    for (const std::string& c : classes) {
      const SplitIndices split = SplitLeaveClassOut(ds, c);
      // Univariate least squares: only the slope sign matters for pcc.
      std::vector<double> tx, ty;
      for (size_t i : split.train) {
        tx.push_back(ds[i].raw.ToArray()[f]);
        ty.push_back(ds[i].q);
      }
      double mx = 0.0, my = 0.0;
      for (size_t i = 0; i < tx.size(); ++i) {
        mx += tx[i];
        my += ty[i];
      }
      mx /= tx.size();
      my /= ty.size();
      double cov = 0.0;
      for (size_t i = 0; i < tx.size(); ++i) cov += (tx[i] - mx) * (ty[i] - my);
      std::vector<double> px, py;
      for (size_t i : split.test) {
        px.push_back(ds[i].raw.ToArray()[f]);
        py.push_back(ds[i].q);
      }
      if (cov == 0.0) continue;
      try {
        total += (cov > 0.0 ? 1.0 : -1.0) * Pearson(px, py);
        ++defined;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedCorrelation) throw;
      }
    }
    if (defined == 0) continue;
    const double mean = total / defined;
    if (best.feature < 0 || mean > best.pcc) best = {f, mean};
  }
  return best;
}

}  // namespace nrvq
