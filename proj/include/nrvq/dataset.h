/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#ifndef NRVQ_DATASET_H_
#define NRVQ_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nrvq/frame_io.h"
#include "nrvq/impairment.h"
#include "nrvq/nr_features.h"

namespace nrvq {

// Exact CSV header of dataset files.
inline constexpr const char* kDatasetCsvHeader =
    "class_id,level_index,bitrate_kbps,loss_rate,cx,mo,bm,br,nm,nr,bl,je,"
    "f_bitrate,f_loss,q";

// The twelve channel loss rates of the standard grid.
const std::vector<double>& StandardLossGrid();

struct Sample {
  std::string class_id;
  int level_index = 0;
  double bitrate_kbps = 0.0;
  double loss_rate = 0.0;  // grid value, not the measured ratio
  RawFeatures raw;
  FeatureVector features;  // normalized model input
  double q = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

class Dataset {
 public:
  Dataset() = default;
  // Throws InvalidArgument on a duplicate (class, level, loss) triple.
  Dataset(std::vector<Sample> samples, Normalizer normalizer,
          FeatureConfig config, uint64_t seed = 0,
          std::string oracle = "ssim");

  const std::vector<Sample>& samples() const { return samples_; }
  size_t size() const { return samples_.size(); }
  const Sample& operator[](size_t i) const { return samples_[i]; }
  const Normalizer& normalizer() const { return normalizer_; }
  const FeatureConfig& feature_config() const { return config_; }
  uint64_t seed() const { return seed_; }
  const std::string& oracle() const { return oracle_; }

  // Distinct class ids in first-appearance order.
  std::vector<std::string> ClassIds() const;

  Dataset Subset(std::span<const size_t> indices) const;

  // FNV-1a over the CSV serialization; identifies a dataset in reports.
  uint64_t Fingerprint() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<Sample> samples_;
  Normalizer normalizer_;
  FeatureConfig config_;
  uint64_t seed_ = 0;
  std::string oracle_ = "ssim";
};

struct GridOptions {
  int jobs = 1;
  std::string oracle = "ssim";
  FeatureConfig feature_config;
  // Called after each finished cell with (done, total); may be empty.
  std::function<void(size_t, size_t)> progress;
};

// Loss-channel seed for one (class, level) cell. The same seed is used for
// every loss rate so heavier loss patterns contain the lighter ones.
uint64_t CellSeed(uint64_t grid_seed, size_t class_index, int level_index);

// Every (class, level, loss) cell: degrade, measure, score against the
// reference. Samples are ordered class-major, then level, then loss.
Dataset BuildGrid(std::span<const VideoClip> classes,
                  std::span<const CompressionLevel> levels,
                  std::span<const double> losses, uint64_t seed,
                  const GridOptions& options = {});

std::string DatasetToCsv(const Dataset& ds);
Dataset DatasetFromCsv(const std::string& text);
void SaveCsv(const Dataset& ds, const std::filesystem::path& path);
Dataset LoadCsv(const std::filesystem::path& path);

struct SplitIndices {
  std::vector<size_t> train;
  std::vector<size_t> test;
};

// Seeded shuffle then contiguous chunks; fold sizes differ by at most one.
std::vector<SplitIndices> SplitKFold(const Dataset& ds, int k, uint64_t seed);
SplitIndices SplitLeaveClassOut(const Dataset& ds, const std::string& class_id);
// Seeded shuffle; the first floor(f * n) indices train.
SplitIndices SubsampleFraction(const Dataset& ds, double train_fraction,
                               uint64_t seed);

}  // namespace nrvq

#endif  // NRVQ_DATASET_H_
