/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nrvq/dataset.h"
#include "nrvq/error.h"
#include "nrvq/eval_harness.h"
#include "nrvq/fr_benchmark.h"
#include "nrvq/learners.h"
#include "nrvq/rng.h"
#include "nrvq/synth.h"
#include "nrvq/text.h"

namespace nrvq {

namespace {

namespace fs = std::filesystem;

constexpr const char* kGridMagic = "# nrvq-grid v1";
constexpr const char* kGridFile = "grid.txt";

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsageError:
      return kExitUsage;
    case ErrorCode::kTrainingError:
      return kExitTraining;
    default:
      return kExitData;
  }
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
}

void EnsureParent(const fs::path& file) {
  if (file.has_parent_path()) EnsureDir(file.parent_path());
}

struct SynthArgs {
  std::string out;
  int classes = kSynthClassCount;
  uint64_t seed = 1;
  int width = 320;
  int height = 240;
  int frames = 250;
  bool materialize = false;
};

void RunSynth(const SynthArgs& a, std::ostream& out) {
  if (a.classes < 2 || a.classes > kSynthClassCount) {
    throw Error(ErrorCode::kUsageError, "--classes must be in [2, 10]");
  }
  SynthOptions opts;
  opts.width = a.width;
  opts.height = a.height;
  opts.frames = a.frames;
  const fs::path root(a.out);
  EnsureDir(root / "refs");
  EnsureDir(root / "clips");
  std::ostringstream grid;
  grid << kGridMagic << "\n";
  grid << "# width=" << a.width << " height=" << a.height
       << " frames=" << a.frames << " fps=" << opts.fps.num << "/"
       << opts.fps.den << " seed=" << a.seed << "\n";
  grid << "class level_index bitrate_kbps loss_rate\n";
  for (int c = 0; c < a.classes; ++c) {
    const VideoClip ref = SynthesizeClass(c, opts, MixSeed(a.seed, c));
    WriteY4m(ref, root / "refs" / (ref.clip_id() + ".y4m"));
    for (const CompressionLevel& level : StandardLadder()) {
      for (double loss : StandardLossGrid()) {
        grid << ref.clip_id() << " " << level.level_index << " "
             << FormatDouble(level.nominal_bitrate_kbps) << " "
             << FormatDouble(loss) << "\n";
        if (!a.materialize) continue;
        const LossModel model = LossModel::Bernoulli(
            loss, CellSeed(a.seed, static_cast<size_t>(c), level.level_index));
        auto [clip, stats] = Degrade(ref, level, model);
        const std::string stem = ref.clip_id() + "_l" +
                                 std::to_string(level.level_index) + "_p" +
                                 FormatDouble(loss);
        WriteY4m(clip, root / "clips" / (stem + ".y4m"));
        std::ofstream side(root / "clips" / (stem + ".txt"), std::ios::binary);
        side << "measured_loss_ratio=" << FormatDouble(stats.measured_loss_ratio)
             << "\nnominal_bitrate_kbps="
             << FormatDouble(stats.nominal_bitrate_kbps)
             << "\npackets_sent=" << stats.packets_sent
             << "\npackets_lost=" << stats.packets_lost << "\n";
      }
    }
  }
  std::ofstream g(root / "clips" / kGridFile, std::ios::binary);
  g << grid.str();
  if (!g) throw Error(ErrorCode::kIoError, "cannot write grid manifest");
  out << "wrote " << a.classes << " reference clips and a "
      << a.classes * StandardLadder().size() * StandardLossGrid().size()
      << "-cell grid manifest to " << a.out << "\n";
}

struct GridManifest {
  std::vector<std::string> classes;
  std::vector<int> levels;
  std::vector<double> losses;
};

GridManifest ReadManifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kGridMagic) {
    throw Error(ErrorCode::kSchemaError, "not a grid manifest: " +
                                             path.string());
  }
  GridManifest m;
  std::vector<std::tuple<std::string, int, double>> cells;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> t = Split(line, ' ');
    if (!header) {
      if (line != "class level_index bitrate_kbps loss_rate") {
        throw Error(ErrorCode::kSchemaError, "bad manifest header");
      }
      header = true;
      continue;
    }
    const auto level = t.size() == 4 ? ParseInt(t[1]) : std::nullopt;
    const auto loss = t.size() == 4 ? ParseDouble(t[3]) : std::nullopt;
    if (!level || !loss || *level < 0 ||
        *level >= static_cast<int64_t>(StandardLadder().size())) {
      throw Error(ErrorCode::kSchemaError, "bad manifest row: " + line);
    }
    cells.emplace_back(t[0], static_cast<int>(*level), *loss);
    auto add = [](auto& v, const auto& x) {
      if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    };
    add(m.classes, t[0]);
    add(m.levels, static_cast<int>(*level));
    add(m.losses, *loss);
  }
  // Rows must be the full class-major cross product.
  size_t i = 0;
  bool full = cells.size() == m.classes.size() * m.levels.size() *
                                  m.losses.size();
  for (size_t c = 0; full && c < m.classes.size(); ++c) {
    for (size_t l = 0; full && l < m.levels.size(); ++l) {
      for (size_t p = 0; full && p < m.losses.size(); ++p, ++i) {
        full = cells[i] ==
               std::make_tuple(m.classes[c], m.levels[l], m.losses[p]);
      }
    }
  }
  if (!full || cells.empty()) {
    throw Error(ErrorCode::kSchemaError,
                "manifest rows are not a full class x level x loss grid");
  }
  return m;
}

struct ExtractArgs {
  std::string clips;
  std::string refs;
  std::string out;
  uint64_t seed = 1;
  int jobs = 1;
  std::string oracle = "ssim";
  bool progress = false;
};

void RunExtract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  const GridManifest m = ReadManifest(fs::path(a.clips) / kGridFile);
  if (!MakeOracle(a.oracle)) {
    throw Error(ErrorCode::kUsageError, "unknown oracle '" + a.oracle + "'");
  }
  std::vector<VideoClip> classes;
  for (const std::string& id : m.classes) {
    classes.push_back(ReadY4m(fs::path(a.refs) / (id + ".y4m")));
  }
  std::vector<CompressionLevel> levels;
  for (int l : m.levels) levels.push_back(StandardLadder()[l]);
  GridOptions opts;
  opts.jobs = a.jobs;
  opts.oracle = a.oracle;
  if (a.progress) {
    opts.progress = [&err](size_t done, size_t total) {
      err << "extract: " << done << "/" << total << "\n";
    };
  }
  const Dataset ds = BuildGrid(classes, levels, m.losses, a.seed, opts);
  EnsureParent(a.out);
  SaveCsv(ds, a.out);
  out << "wrote " << ds.size() << " samples to " << a.out << "\n";
}

struct TrainArgs {
  std::string dataset;
  std::string algo;
  std::string out;
  std::vector<std::string> params;
  uint64_t seed = 1;
};

void RunTrain(const TrainArgs& a, std::ostream& out) {
  const LearnerSpec spec = LearnerSpec::Parse(a.algo, a.params);
  const Dataset ds = LoadCsv(a.dataset);
  const QualityModel model = Train(spec, ds, a.seed);
  EnsureParent(a.out);
  SaveModel(model, a.out);
  out << "trained " << AlgoName(spec.algo()) << " on " << ds.size()
      << " samples in " << FormatFixed(model.train_time_seconds(), 6)
      << " s; wrote " << a.out << "\n";
}

struct PredictArgs {
  std::string model;
  std::string clip;
  double loss = 0.0;
  double bitrate = 0.0;
};

void RunPredict(const PredictArgs& a, std::ostream& out) {
  const QualityModel model = LoadModel(a.model);
  const VideoClip clip = ReadY4m(a.clip);
  ChannelStats stats;
  stats.measured_loss_ratio = a.loss;
  stats.nominal_bitrate_kbps = a.bitrate;
  const FeatureVector v = ExtractFeatures(clip, stats, model.normalizer(),
                                          model.feature_config());
  out << FormatFixed(model.Predict(v), 6) << "\n";
}

struct EvalArgs {
  std::string experiment;
  std::string dataset;
  std::string algos;
  std::string out;
  uint64_t seed = 1;
  int jobs = 1;
  int k = 5;
  std::string fractions = "0.8,0.6,0.4,0.2";
  std::vector<std::string> params;
  bool progress = false;
};

void RunEval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const Experiment exp = ParseExperiment(a.experiment);
  std::vector<LearnerSpec> specs;
  if (a.algos.empty()) {
    for (Algo algo : kAllAlgos) specs.emplace_back(algo);
  } else {
    for (const std::string& name : Split(a.algos, ',')) {
      specs.push_back(LearnerSpec::Parse(Trim(name)));
    }
  }
  // --param algo:key=value overrides one learner's hyperparameter.
  for (const std::string& p : a.params) {
    const size_t colon = p.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kUsageError, "--param must be ALGO:key=value");
    }
    const Algo algo = ParseAlgo(p.substr(0, colon));
    const size_t eq = p.find('=', colon);
    const auto value =
        eq == std::string::npos ? std::nullopt : ParseDouble(p.substr(eq + 1));
    if (!value) {
      throw Error(ErrorCode::kUsageError, "bad --param value in '" + p + "'");
    }
    const std::string key = p.substr(colon + 1, eq - colon - 1);
    bool found = false;
    for (LearnerSpec& s : specs) {
      if (s.algo() != algo) continue;
      s.Set(key, *value);
      found = true;
    }
    if (!found) {
      throw Error(ErrorCode::kUsageError,
                  "--param names an algorithm not in --algos");
    }
  }
  std::vector<double> fractions;
  for (const std::string& f : Split(a.fractions, ',')) {
    const auto v = ParseDouble(Trim(f));
    if (!v) throw Error(ErrorCode::kUsageError, "bad fraction '" + f + "'");
    fractions.push_back(*v);
  }
  const Dataset ds = LoadCsv(a.dataset);
  EvalOptions opts;
  opts.jobs = a.jobs;
  if (a.progress) {
    opts.progress = [&err](size_t done, size_t total) {
      err << "eval: " << done << "/" << total << "\n";
    };
  }
  EvaluationReport rep;
  switch (exp) {
    case Experiment::kBlind:
      rep = RunBlindEval(ds, specs, a.seed, opts);
      break;
    case Experiment::kCv:
      rep = RunRandomCv(ds, specs, a.k, a.seed, opts);
      break;
    case Experiment::kSweep:
      rep = RunSizeSweep(ds, specs, fractions, a.seed, opts);
      break;
    case Experiment::kTime:
      rep = TimeTraining(ds, specs, fractions, a.seed, opts);
      break;
  }
  WriteReport(rep, a.out);
  for (const ReportSummary& s : rep.summaries) {
    out << ExperimentName(exp) << " " << s.algo << " " << s.group << " pcc "
        << FormatFixed(s.mean, 4) << " +- " << FormatFixed(s.std, 4);
    if (exp == Experiment::kTime) {
      out << " time " << FormatFixed(s.time_mean, 6) << " s";
    }
    out << "\n";
  }
}

// Reads flat key=value lines; '#' starts a comment line.
std::vector<std::pair<std::string, std::string>> ReadConfig(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUsageError, "cannot read config " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kUsageError,
                  "config line is not key=value: " + std::string(t));
    }
    kv.emplace_back(std::string(Trim(t.substr(0, eq))),
                    std::string(Trim(t.substr(eq + 1))));
  }
  return kv;
}

// Inserts config entries as --key=value after the sub-command unless the
// same flag already appears on the command line.
std::vector<std::string> ApplyConfig(std::vector<std::string> args) {
  std::string config;
  for (size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty() || args.size() < 2) return args;
  std::set<std::string> given;
  for (size_t i = 2; i < args.size(); ++i) {
    if (args[i].rfind("--", 0) != 0) continue;
    given.insert(args[i].substr(2, args[i].find('=') - 2));
  }
  std::vector<std::string> injected;
  for (const auto& [key, value] : ReadConfig(config)) {
    if (key == "config" || given.count(key)) continue;
    injected.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + 2, injected.begin(), injected.end());
  return args;
}

}  // namespace

int RunCli(const std::vector<std::string>& raw_args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"No-reference video quality estimation toolkit", "nrvq"};
  app.require_subcommand(1);
  app.fallthrough(false);
  std::string config_unused;

  SynthArgs synth;
  CLI::App* s = app.add_subcommand("synth", "generate reference clips and "
                                            "the impairment grid manifest");
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--classes", synth.classes, "number of clip classes");
  s->add_option("--seed", synth.seed, "content seed");
  s->add_option("--width", synth.width);
  s->add_option("--height", synth.height);
  s->add_option("--frames", synth.frames);
  s->add_flag("--materialize", synth.materialize,
              "also write every degraded clip (large)");
  s->add_option("--config", config_unused, "key=value defaults file");

  ExtractArgs extract;
  CLI::App* e = app.add_subcommand("extract", "build the dataset CSV");
  e->add_option("--clips", extract.clips, "directory with grid.txt")
      ->required();
  e->add_option("--refs", extract.refs, "reference clip directory")
      ->required();
  e->add_option("--out", extract.out, "dataset CSV path")->required();
  e->add_option("--seed", extract.seed, "channel seed");
  e->add_option("--jobs", extract.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  e->add_option("--oracle", extract.oracle, "full-reference oracle");
  e->add_flag("--progress", extract.progress);
  e->add_option("--config", config_unused, "key=value defaults file");

  TrainArgs train;
  CLI::App* t = app.add_subcommand("train", "train one quality model");
  t->add_option("--dataset", train.dataset)->required();
  t->add_option("--algo", train.algo)->required();
  t->add_option("--out", train.out, "model file")->required();
  t->add_option("--param", train.params, "hyperparameter key=value");
  t->add_option("--seed", train.seed);
  t->add_option("--config", config_unused, "key=value defaults file");

  PredictArgs predict;
  CLI::App* p = app.add_subcommand("predict", "score one received clip");
  p->add_option("--model", predict.model)->required();
  p->add_option("--clip", predict.clip)->required();
  p->add_option("--loss", predict.loss, "measured packet loss ratio")
      ->required();
  p->add_option("--bitrate", predict.bitrate, "coded bitrate in kbps")
      ->required();
  p->add_option("--config", config_unused, "key=value defaults file");

  EvalArgs eval;
  CLI::App* v = app.add_subcommand("eval", "run an evaluation experiment");
  v->add_option("experiment", eval.experiment, "blind, cv, sweep or time")
      ->required();
  v->add_option("--dataset", eval.dataset)->required();
  v->add_option("--algos", eval.algos, "comma-separated (default: all)");
  v->add_option("--out", eval.out, "report directory")->required();
  v->add_option("--seed", eval.seed);
  v->add_option("--jobs", eval.jobs)->check(CLI::PositiveNumber);
  v->add_option("--k", eval.k, "folds for cv");
  v->add_option("--fractions", eval.fractions, "training fractions");
  v->add_option("--param", eval.params, "ALGO:key=value");
  v->add_flag("--progress", eval.progress);
  v->add_option("--config", config_unused, "key=value defaults file");

  try {
    const std::vector<std::string> args = ApplyConfig(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "nrvq: " << ex.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& ex) {
    err << "nrvq: " << ex.what() << "\n";
    return ExitCodeFor(ex.code());
  }

  try {
    if (*s) RunSynth(synth, out);
    if (*e) RunExtract(extract, out, err);
    if (*t) RunTrain(train, out);
    if (*p) RunPredict(predict, out);
    if (*v) RunEval(eval, out, err);
  } catch (const Error& ex) {
    err << "nrvq: " << ex.what() << "\n";
    return ExitCodeFor(ex.code());
  } catch (const std::exception& ex) {
    err << "nrvq: " << ex.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace nrvq
