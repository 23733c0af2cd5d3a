/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/learners.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "nrvq/error.h"
#include "nrvq/text.h"

namespace nrvq {

namespace {

constexpr const char* kModelMagic = "nrvq-model";
constexpr int kModelVersion = 1;

struct AlgoInfo {
  Algo algo;
  const char* name;
  std::vector<std::pair<std::string, double>> defaults;
};

const std::vector<AlgoInfo>& AlgoTable() {
  static const std::vector<AlgoInfo> table = {
      {Algo::kLr, "LR", {}},
      {Algo::kRt, "RT", {{"min_parent", 16}}},
      {Algo::kErtLsb,
       "ERT-LSB",
       {{"stages", 500}, {"shrinkage", 0.01}, {"min_parent", 16}}},
      {Algo::kErtBr,
       "ERT-BR",
       {{"trees", 500}, {"min_parent", 16}, {"bootstrap", 1}}},
      {Algo::kEdtAb,
       "EDT-AB",
       {{"stages", 200},
        {"learning_rate", 0.2},
        {"classes", 100},
        {"min_parent", 11}}},
      {Algo::kGpr,
       "GPR",
       {{"optimize", 1},
        {"max_evals", 50},
        {"length_scale", 1.0},
        {"signal_variance", 0.01},
        {"noise_variance", 1e-4}}},
      {Algo::kSvr,
       "SVR",
       {{"cost", 20},
        {"epsilon", 0.1},
        {"gamma", 0},
        {"tolerance", 1e-3},
        {"max_iter", 100000}}},
      {Algo::kFnn,
       "FNN",
       {{"hidden", 20},
        {"epochs", 200},
        {"max_fail", 10},
        {"validation", 0.15},
        {"mu", 1e-3}}},
      {Algo::kCnn,
       "CNN",
       {{"hidden", 20},
        {"epochs", 200},
        {"max_fail", 10},
        {"validation", 0.15},
        {"mu", 1e-3}}},
  };
  return table;
}

const AlgoInfo& InfoOf(Algo algo) {
  for (const AlgoInfo& info : AlgoTable()) {
    if (info.algo == algo) return info;
  }
  throw Error(ErrorCode::kUsageError, "unknown algorithm");
}

int IntParam(const LearnerSpec& spec, const std::string& key) {
  const double v = spec.Get(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw Error(ErrorCode::kUsageError, key + " must be an integer");
  }
  return static_cast<int>(v);
}

std::shared_ptr<const Regressor> Fit(const LearnerSpec& spec, const Matrix& x,
                                     const Vector& y, uint64_t seed) {
  switch (spec.algo()) {
    case Algo::kLr:
      return std::make_shared<LinearRegression>(LinearRegression::Fit(x, y));
    case Algo::kRt:
      return std::make_shared<RegressionTreeModel>(
          RegressionTreeModel::Fit(x, y, IntParam(spec, "min_parent")));
    case Algo::kErtLsb:
      return std::make_shared<GradientBoosting>(GradientBoosting::Fit(
          x, y, IntParam(spec, "stages"), spec.Get("shrinkage"),
          IntParam(spec, "min_parent")));
    case Algo::kErtBr:
      return std::make_shared<Bagging>(Bagging::Fit(
          x, y, IntParam(spec, "trees"), IntParam(spec, "min_parent"),
          spec.Get("bootstrap") != 0.0, seed));
    case Algo::kEdtAb:
      return std::make_shared<AdaBoostSamme>(AdaBoostSamme::Fit(
          x, y, IntParam(spec, "stages"), spec.Get("learning_rate"),
          IntParam(spec, "classes"), IntParam(spec, "min_parent")));
    case Algo::kGpr: {
      GaussianProcess::Options o;
      o.optimize = spec.Get("optimize") != 0.0;
      o.max_evaluations = IntParam(spec, "max_evals");
      const double ell = spec.Get("length_scale");
      const double sf2 = spec.Get("signal_variance");
      const double sn2 = spec.Get("noise_variance");
      if (!(ell > 0.0 && sf2 > 0.0 && sn2 > 0.0)) {
        throw Error(ErrorCode::kUsageError,
                    "GPR length_scale and variances must be positive");
      }
      o.fixed = {std::log(ell), std::log(sf2), std::log(sn2)};
      return std::make_shared<GaussianProcess>(
          GaussianProcess::Fit(x, y, o, seed));
    }
    case Algo::kSvr: {
      SupportVectorRegression::Options o;
      o.cost = spec.Get("cost");
      o.epsilon = spec.Get("epsilon");
      o.gamma = spec.Get("gamma");
      o.tolerance = spec.Get("tolerance");
      o.max_iterations = IntParam(spec, "max_iter");
      return std::make_shared<SupportVectorRegression>(
          SupportVectorRegression::Fit(x, y, o));
    }
    case Algo::kFnn:
    case Algo::kCnn: {
      NeuralNetwork::Options o;
      o.hidden = IntParam(spec, "hidden");
      o.cascade = spec.algo() == Algo::kCnn;
      o.epochs = IntParam(spec, "epochs");
      o.max_fail = IntParam(spec, "max_fail");
      o.validation_fraction = spec.Get("validation");
      o.mu = spec.Get("mu");
      return std::make_shared<NeuralNetwork>(
          NeuralNetwork::Fit(x, y, o, seed));
    }
  }
  throw Error(ErrorCode::kUsageError, "unknown algorithm");
}

std::shared_ptr<const Regressor> ReadPayload(Algo algo, PayloadReader& in) {
  switch (algo) {
    case Algo::kLr:
      return std::make_shared<LinearRegression>(LinearRegression::Read(in));
    case Algo::kRt:
      return std::make_shared<RegressionTreeModel>(
          RegressionTreeModel::Read(in));
    case Algo::kErtLsb:
      return std::make_shared<GradientBoosting>(GradientBoosting::Read(in));
    case Algo::kErtBr:
      return std::make_shared<Bagging>(Bagging::Read(in));
    case Algo::kEdtAb:
      return std::make_shared<AdaBoostSamme>(AdaBoostSamme::Read(in));
    case Algo::kGpr:
      return std::make_shared<GaussianProcess>(GaussianProcess::Read(in));
    case Algo::kSvr:
      return std::make_shared<SupportVectorRegression>(
          SupportVectorRegression::Read(in));
    case Algo::kFnn:
    case Algo::kCnn:
      return std::make_shared<NeuralNetwork>(NeuralNetwork::Read(in));
  }
  throw Error(ErrorCode::kParseError, "unknown algorithm");
}

}  // namespace

std::string_view AlgoName(Algo algo) { return InfoOf(algo).name; }

Algo ParseAlgo(std::string_view name) {
  for (const AlgoInfo& info : AlgoTable()) {
    if (name == info.name) return info.algo;
  }
  throw Error(ErrorCode::kUsageError,
              "unknown algorithm '" + std::string(name) + "'");
}

LearnerSpec::LearnerSpec(Algo algo) : algo_(algo) {
  for (const auto& [key, value] : InfoOf(algo).defaults) params_[key] = value;
}

LearnerSpec LearnerSpec::Parse(std::string_view algo,
                               std::span<const std::string> assignments) {
  LearnerSpec spec(ParseAlgo(algo));
  for (const std::string& a : assignments) {
    const size_t eq = a.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kUsageError, "expected key=value, got '" + a + "'");
    }
    const std::string key(Trim(std::string_view(a).substr(0, eq)));
    const auto value = ParseDouble(Trim(std::string_view(a).substr(eq + 1)));
    if (!value) {
      throw Error(ErrorCode::kUsageError, "non-numeric value for " + key);
    }
    spec.Set(key, *value);
  }
  return spec;
}

double LearnerSpec::Get(const std::string& key) const {
  const auto it = params_.find(key);
  if (it == params_.end()) {
    throw Error(ErrorCode::kUsageError, "no parameter " + key);
  }
  return it->second;
}

void LearnerSpec::Set(const std::string& key, double value) {
  auto it = params_.find(key);
  if (it == params_.end()) {
    throw Error(ErrorCode::kUsageError, "unknown parameter '" + key +
                                            "' for " +
                                            std::string(AlgoName(algo_)));
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kUsageError, key + " must be finite");
  }
  it->second = value;
}

QualityModel::QualityModel(LearnerSpec spec,
                           std::shared_ptr<const Regressor> regressor,
                           Normalizer normalizer, FeatureConfig config,
                           uint64_t seed, double train_time_seconds)
    : spec_(std::move(spec)),
      regressor_(std::move(regressor)),
      normalizer_(std::move(normalizer)),
      config_(std::move(config)),
      seed_(seed),
      train_time_seconds_(train_time_seconds) {}

double QualityModel::Predict(std::span<const double> x) const {
  if (x.size() != static_cast<size_t>(kFeatureCount)) {
    throw Error(ErrorCode::kDimensionError,
                "expected " + std::to_string(kFeatureCount) +
                    " features, got " + std::to_string(x.size()));
  }
  const double q = regressor_->Predict(x);
  if (std::isnan(q)) return 0.0;
  return std::clamp(q, 0.0, 1.0);
}

Matrix FeatureMatrix(const Dataset& ds) {
  Matrix x(static_cast<Eigen::Index>(ds.size()), kFeatureCount);
  for (size_t i = 0; i < ds.size(); ++i) {
    for (int f = 0; f < kFeatureCount; ++f) {
      x(static_cast<Eigen::Index>(i), f) = ds[i].features[f];
    }
  }
  return x;
}

Vector TargetVector(const Dataset& ds) {
  Vector y(static_cast<Eigen::Index>(ds.size()));
  for (size_t i = 0; i < ds.size(); ++i) y[i] = ds[i].q;
  return y;
}

QualityModel TrainMatrix(const LearnerSpec& spec, const Matrix& x,
                         const Vector& y, uint64_t seed,
                         const Normalizer& normalizer,
                         const FeatureConfig& config) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::kDimensionError, "feature/target row mismatch");
  }
  const Eigen::Index needed = std::max<Eigen::Index>(10, x.cols() + 1);
  if (x.rows() < needed) {
    throw Error(ErrorCode::kTrainingError,
                std::string(AlgoName(spec.algo())) + ": needs at least " +
                    std::to_string(needed) + " samples, got " +
                    std::to_string(x.rows()));
  }
  if (!x.allFinite() || !(y.array() >= 0.0).all() ||
      !(y.array() <= 1.0).all()) {
    throw Error(ErrorCode::kInvalidArgument,
                "targets must lie in [0,1] and features be finite");
  }
  const auto start = std::chrono::steady_clock::now();
  std::shared_ptr<const Regressor> regressor = Fit(spec, x, y, seed);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  return QualityModel(spec, std::move(regressor), normalizer, config, seed,
                      seconds);
}

QualityModel Train(const LearnerSpec& spec, const Dataset& train,
                   uint64_t seed) {
  return TrainMatrix(spec, FeatureMatrix(train), TargetVector(train), seed,
                     train.normalizer(), train.feature_config());
}

std::string ModelToText(const QualityModel& model) {
  std::string out = std::string(kModelMagic) + " " +
                    std::to_string(kModelVersion) + "\n";
  out += "algo " + std::string(AlgoName(model.algo())) + "\n";
  out += "seed " + std::to_string(model.seed()) + "\n";
  for (const auto& [key, value] : model.spec().params()) {
    out += "param " + key + " " + FormatDouble(value) + "\n";
  }
  for (const auto& [key, value] : model.feature_config().ToKeyValues()) {
    out += "feature " + key + " " + value + "\n";
  }
  const auto& bounds = model.normalizer().bounds();
  for (int f = 0; f < kFeatureCount; ++f) {
    out += std::string("norm ") + kFeatureNames[f] + " " +
           FormatDouble(bounds[f].min) + " " + FormatDouble(bounds[f].max) +
           "\n";
  }
  PayloadWriter payload;
  model.regressor().Write(payload);
  out += "payload\n";
  out += payload.text();
  return out;
}

QualityModel ModelFromText(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (lines.empty() || lines[0] != std::string(kModelMagic) + " " +
                                       std::to_string(kModelVersion)) {
    throw Error(ErrorCode::kParseError, "not an nrvq model file (version " +
                                            std::to_string(kModelVersion) +
                                            ")");
  }
  std::optional<LearnerSpec> spec;
  std::optional<uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> features;
  std::array<FeatureBounds, kFeatureCount> bounds{};
  std::array<bool, kFeatureCount> have_bound{};
  size_t i = 1;
  for (; i < lines.size() && lines[i] != "payload"; ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> t = Split(lines[i], ' ');
    if (t[0] == "algo" && t.size() == 2) {
      spec.emplace(ParseAlgo(t[1]));
    } else if (t[0] == "seed" && t.size() == 2) {
      const auto v = ParseInt(t[1]);
      if (!v || *v < 0) throw Error(ErrorCode::kParseError, "bad seed");
      seed = static_cast<uint64_t>(*v);
    } else if (t[0] == "param" && t.size() == 3 && spec) {
      const auto v = ParseDouble(t[2]);
      if (!v) throw Error(ErrorCode::kParseError, "bad param " + t[1]);
      spec->Set(t[1], *v);
    } else if (t[0] == "feature" && t.size() == 3) {
      features.emplace_back(t[1], t[2]);
    } else if (t[0] == "norm" && t.size() == 4) {
      const auto it = std::find_if(
          kFeatureNames.begin(), kFeatureNames.end(),
          [&](const char* name) { return t[1] == name; });
      const auto lo = ParseDouble(t[2]);
      const auto hi = ParseDouble(t[3]);
      if (it == kFeatureNames.end() || !lo || !hi) {
        throw Error(ErrorCode::kParseError, "bad norm line");
      }
      const size_t f = static_cast<size_t>(it - kFeatureNames.begin());
      bounds[f] = {*lo, *hi};
      have_bound[f] = true;
    } else {
      throw Error(ErrorCode::kParseError,
                  "unexpected model line '" + std::string(lines[i]) + "'");
    }
  }
  if (!spec || !seed || i == lines.size() ||
      std::find(have_bound.begin(), have_bound.end(), false) !=
          have_bound.end()) {
    throw Error(ErrorCode::kParseError,
                "model header missing algo, seed, norm or payload");
  }
  std::string payload_text;
  for (size_t j = i + 1; j < lines.size(); ++j) {
    payload_text += lines[j];
    payload_text += '\n';
  }
  PayloadReader reader(payload_text);
  std::shared_ptr<const Regressor> regressor = ReadPayload(spec->algo(), reader);
  if (!reader.done()) {
    throw Error(ErrorCode::kParseError, "trailing payload fields");
  }
  FeatureConfig config;
  try {
    config = FeatureConfig::FromKeyValues(features);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.detail());
  }
  return QualityModel(*spec, std::move(regressor), Normalizer(bounds), config,
                      *seed, 0.0);
}

void SaveModel(const QualityModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << ModelToText(model);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

QualityModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ModelFromText(ss.str());
}

}  // namespace nrvq
