/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#ifndef NRVQ_LEARNERS_H_
#define NRVQ_LEARNERS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nrvq/dataset.h"
#include "nrvq/nr_features.h"
#include "nrvq/regressors.h"

namespace nrvq {

enum class Algo { kLr, kRt, kErtLsb, kErtBr, kEdtAb, kGpr, kSvr, kFnn, kCnn };

inline constexpr std::array<Algo, 9> kAllAlgos = {
    Algo::kLr,   Algo::kRt,  Algo::kErtLsb, Algo::kErtBr, Algo::kEdtAb,
    Algo::kGpr,  Algo::kSvr, Algo::kFnn,    Algo::kCnn};

std::string_view AlgoName(Algo algo);
// UsageError on an unknown name.
Algo ParseAlgo(std::string_view name);

// Algorithm plus its hyperparameters. Every algorithm has a fixed key set
// with defaults; Set rejects keys outside it.
class LearnerSpec {
 public:
  explicit LearnerSpec(Algo algo);
  // Parses "k=v" assignments over the defaults.
  static LearnerSpec Parse(std::string_view algo,
                           std::span<const std::string> assignments = {});

  Algo algo() const { return algo_; }
  const std::map<std::string, double>& params() const { return params_; }
  double Get(const std::string& key) const;
  // UsageError on an unknown key.
  void Set(const std::string& key, double value);

  friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;

 private:
  Algo algo_;
  std::map<std::string, double> params_;
};

class QualityModel {
 public:
  QualityModel(LearnerSpec spec, std::shared_ptr<const Regressor> regressor,
               Normalizer normalizer, FeatureConfig config, uint64_t seed,
               double train_time_seconds);

  // Clamped to [0, 1]. DimensionError unless x has kFeatureCount values.
  double Predict(std::span<const double> x) const;
  double Predict(const FeatureVector& x) const {
    return Predict(std::span<const double>(x.values));
  }

  const LearnerSpec& spec() const { return spec_; }
  Algo algo() const { return spec_.algo(); }
  const Regressor& regressor() const { return *regressor_; }
  const Normalizer& normalizer() const { return normalizer_; }
  const FeatureConfig& feature_config() const { return config_; }
  uint64_t seed() const { return seed_; }
  // Not serialized; zero after loading.
  double train_time_seconds() const { return train_time_seconds_; }

 private:
  LearnerSpec spec_;
  std::shared_ptr<const Regressor> regressor_;
  Normalizer normalizer_;
  FeatureConfig config_;
  uint64_t seed_;
  double train_time_seconds_;
};

// Requires at least max(10, dims + 1) samples with q in [0, 1].
QualityModel Train(const LearnerSpec& spec, const Dataset& train,
                   uint64_t seed);
// Same on a bare design matrix; normalizer and config are carried through.
QualityModel TrainMatrix(const LearnerSpec& spec, const Matrix& x,
                         const Vector& y, uint64_t seed,
                         const Normalizer& normalizer = {},
                         const FeatureConfig& config = {});

Matrix FeatureMatrix(const Dataset& ds);
Vector TargetVector(const Dataset& ds);

std::string ModelToText(const QualityModel& model);
QualityModel ModelFromText(std::string_view text);
void SaveModel(const QualityModel& model, const std::filesystem::path& path);
QualityModel LoadModel(const std::filesystem::path& path);

}  // namespace nrvq

#endif  // NRVQ_LEARNERS_H_
