/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/dataset.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "nrvq/error.h"
#include "nrvq/fr_benchmark.h"
#include "nrvq/rng.h"
#include "nrvq/text.h"

namespace nrvq {

namespace {

constexpr const char* kDatasetMagic = "nrvq-dataset v1";

const std::vector<std::string>& CsvColumns() {
  static const std::vector<std::string> cols = Split(kDatasetCsvHeader, ',');
  return cols;
}

std::vector<size_t> ShuffledIndices(size_t n, uint64_t seed) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.Shuffle(std::span<size_t>(idx));
  return idx;
}

}  // namespace

const std::vector<double>& StandardLossGrid() {
  static const std::vector<double> grid = {0.0,  0.005, 0.01,  0.015,
                                           0.02, 0.025, 0.03,  0.035,
                                           0.04, 0.045, 0.05,  0.10};
  return grid;
}

Dataset::Dataset(std::vector<Sample> samples, Normalizer normalizer,
                 FeatureConfig config, uint64_t seed, std::string oracle)
    : samples_(std::move(samples)),
      normalizer_(normalizer),
      config_(std::move(config)),
      seed_(seed),
      oracle_(std::move(oracle)) {
  std::set<std::tuple<std::string, int, double>> seen;
  for (const Sample& s : samples_) {
    if (!seen.emplace(s.class_id, s.level_index, s.loss_rate).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate sample " + s.class_id + "/" +
                      std::to_string(s.level_index) + "/" +
                      FormatDouble(s.loss_rate));
    }
  }
}

std::vector<std::string> Dataset::ClassIds() const {
  std::vector<std::string> ids;
  for (const Sample& s : samples_) {
    if (std::find(ids.begin(), ids.end(), s.class_id) == ids.end()) {
      ids.push_back(s.class_id);
    }
  }
  return ids;
}

Dataset Dataset::Subset(std::span<const size_t> indices) const {
  std::vector<Sample> out;
  out.reserve(indices.size());
  for (size_t i : indices) out.push_back(samples_.at(i));
  return Dataset(std::move(out), normalizer_, config_, seed_, oracle_);
}

uint64_t Dataset::Fingerprint() const {
  const std::string text = DatasetToCsv(*this);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t CellSeed(uint64_t grid_seed, size_t class_index, int level_index) {
  return MixSeed(grid_seed, class_index * 64 + static_cast<uint64_t>(
                                                   level_index));
}

Dataset BuildGrid(std::span<const VideoClip> classes,
                  std::span<const CompressionLevel> levels,
                  std::span<const double> losses, uint64_t seed,
                  const GridOptions& options) {
  if (classes.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs at least 2 classes");
  }
  for (size_t i = 0; i < levels.size(); ++i) {
    for (size_t j = i + 1; j < levels.size(); ++j) {
      if (levels[i].level_index == levels[j].level_index) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate level index");
      }
    }
  }
  for (size_t i = 0; i < losses.size(); ++i) {
    for (size_t j = i + 1; j < losses.size(); ++j) {
      if (losses[i] == losses[j]) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate loss rate");
      }
    }
  }
  auto oracle = MakeOracle(options.oracle);
  if (!oracle) {
    throw Error(ErrorCode::kUsageError, "unknown oracle " + options.oracle);
  }

  const size_t per_class = levels.size() * losses.size();
  const size_t total = classes.size() * per_class;
  struct Cell {
    RawFeatures raw;
    ChannelStats stats;
    double q = 0.0;
  };
  std::vector<Cell> cells(total);

  // One unit = one (class, level): compress once, transmit at every loss.
  const size_t units = classes.size() * levels.size();
  std::atomic<size_t> next_unit{0};
  std::atomic<size_t> done{0};
  std::mutex progress_mu;
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    while (true) {
      const size_t u = next_unit.fetch_add(1);
      if (u >= units) return;
      const size_t ci = u / levels.size();
      const size_t li = u % levels.size();
      try {
        const VideoClip& ref = classes[ci];
        const CompressionLevel& level = levels[li];
        const VideoClip compressed = CompressProxy(ref, level);
        const uint64_t cell_seed = CellSeed(seed, ci, level.level_index);
        for (size_t pi = 0; pi < losses.size(); ++pi) {
          auto [impaired, stats] = TransmitCompressed(
              compressed, level, LossModel::Bernoulli(losses[pi], cell_seed));
          Cell& cell = cells[u * losses.size() + pi];
          cell.raw = ComputeRawFeatures(impaired, options.feature_config);
          cell.stats = stats;
          cell.q = oracle->Score(ref, impaired);
          const size_t d = done.fetch_add(1) + 1;
          if (options.progress) {
            std::lock_guard<std::mutex> lock(progress_mu);
            options.progress(d, total);
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next_unit.store(units);
        return;
      }
    }
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<std::pair<RawFeatures, ChannelStats>> rows;
  rows.reserve(total);
  for (const Cell& c : cells) rows.emplace_back(c.raw, c.stats);
  const Normalizer norm = FitNormalizer(rows, options.feature_config);

  std::vector<Sample> samples;
  samples.reserve(total);
  for (size_t i = 0; i < total; ++i) {
    const size_t ci = i / per_class;
    const size_t li = (i % per_class) / losses.size();
    const size_t pi = i % losses.size();
    Sample s;
    s.class_id = classes[ci].clip_id();
    s.level_index = levels[li].level_index;
    s.bitrate_kbps = levels[li].nominal_bitrate_kbps;
    s.loss_rate = losses[pi];
    s.raw = cells[i].raw;
    s.features = norm.Apply(cells[i].raw, cells[i].stats);
    s.q = cells[i].q;
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples), norm, options.feature_config, seed,
                 options.oracle);
}

std::string DatasetToCsv(const Dataset& ds) {
  std::ostringstream os;
  os << "# " << kDatasetMagic << "\n";
  os << "# seed=" << ds.seed() << "\n";
  os << "# oracle=" << ds.oracle() << "\n";
  for (const auto& [k, v] : ds.feature_config().ToKeyValues()) {
    os << "# feature." << k << "=" << v << "\n";
  }
  for (int i = 0; i < kFeatureCount; ++i) {
    const FeatureBounds& b = ds.normalizer().bounds()[i];
    os << "# norm." << kFeatureNames[i] << "=" << FormatDouble(b.min) << ","
       << FormatDouble(b.max) << "\n";
  }
  os << kDatasetCsvHeader << "\n";
  for (const Sample& s : ds.samples()) {
    os << s.class_id << "," << s.level_index << ","
       << FormatDouble(s.bitrate_kbps) << "," << FormatDouble(s.loss_rate);
    for (double v : s.raw.ToArray()) os << "," << FormatDouble(v);
    os << "," << FormatDouble(s.features[8]) << ","
       << FormatDouble(s.features[9]) << "," << FormatDouble(s.q) << "\n";
  }
  return os.str();
}

Dataset DatasetFromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  uint64_t seed = 0;
  std::string oracle = "ssim";
  std::vector<std::pair<std::string, std::string>> feature_kv;
  std::array<FeatureBounds, kFeatureCount> bounds{};
  std::array<bool, kFeatureCount> have_bound{};
  bool header_seen = false;
  std::vector<size_t> column_of(CsvColumns().size());
  std::vector<Sample> samples;
  size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body(Trim(std::string_view(line).substr(1)));
      const size_t eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "seed") {
        auto v = ParseInt(value);
        if (!v) throw Error(ErrorCode::kSchemaError, "seed");
        seed = static_cast<uint64_t>(*v);
      } else if (key == "oracle") {
        oracle = value;
      } else if (key.rfind("feature.", 0) == 0) {
        feature_kv.emplace_back(key.substr(8), value);
      } else if (key.rfind("norm.", 0) == 0) {
        const std::string name = key.substr(5);
        auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
        auto parts = Split(value, ',');
        if (it == kFeatureNames.end() || parts.size() != 2) {
          throw Error(ErrorCode::kSchemaError, key);
        }
        auto lo = ParseDouble(parts[0]);
        auto hi = ParseDouble(parts[1]);
        if (!lo || !hi) throw Error(ErrorCode::kSchemaError, key);
        const size_t fi = static_cast<size_t>(it - kFeatureNames.begin());
        bounds[fi] = {*lo, *hi};
        have_bound[fi] = true;
      }
      continue;
    }
    const std::vector<std::string> fields = Split(line, ',');
    if (!header_seen) {
      for (size_t c = 0; c < CsvColumns().size(); ++c) {
        auto it = std::find(fields.begin(), fields.end(), CsvColumns()[c]);
        if (it == fields.end()) {
          throw Error(ErrorCode::kSchemaError, CsvColumns()[c]);
        }
        column_of[c] = static_cast<size_t>(it - fields.begin());
      }
      if (fields.size() != CsvColumns().size()) {
        for (const std::string& f : fields) {
          if (std::find(CsvColumns().begin(), CsvColumns().end(), f) ==
              CsvColumns().end()) {
            throw Error(ErrorCode::kSchemaError, f);
          }
        }
        throw Error(ErrorCode::kSchemaError, "duplicate column");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != CsvColumns().size()) {
      throw Error(ErrorCode::kSchemaError,
                  "row " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields");
    }
    auto num = [&](size_t c) {
      auto v = ParseDouble(fields[column_of[c]]);
      if (!v) {
        throw Error(ErrorCode::kSchemaError,
                    CsvColumns()[c] + " (row " + std::to_string(line_no) +
                        ")");
      }
      return *v;
    };
    Sample s;
    s.class_id = fields[column_of[0]];
    auto level = ParseInt(fields[column_of[1]]);
    if (!level) throw Error(ErrorCode::kSchemaError, "level_index");
    s.level_index = static_cast<int>(*level);
    s.bitrate_kbps = num(2);
    s.loss_rate = num(3);
    std::array<double, kRawFeatureCount> raw;
    for (int i = 0; i < kRawFeatureCount; ++i) raw[i] = num(4 + i);
    s.raw = RawFeatures::FromArray(raw);
    s.features[8] = num(12);
    s.features[9] = num(13);
    s.q = num(14);
    samples.push_back(std::move(s));
  }
  if (!header_seen) throw Error(ErrorCode::kSchemaError, "header");
  for (int i = 0; i < kFeatureCount; ++i) {
    if (!have_bound[i]) {
      throw Error(ErrorCode::kSchemaError,
                  std::string("norm.") + kFeatureNames[i]);
    }
  }
  const Normalizer norm(bounds);
  for (Sample& s : samples) {
    const auto raw = s.raw.ToArray();
    for (int i = 0; i < kRawFeatureCount; ++i) {
      s.features[i] = norm.Apply(i, raw[i]);
    }
  }
  return Dataset(std::move(samples), norm,
                 FeatureConfig::FromKeyValues(feature_kv), seed, oracle);
}

void SaveCsv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << DatasetToCsv(ds);
  if (!out) throw Error(ErrorCode::kIoError, "write failed " + path.string());
}

Dataset LoadCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return DatasetFromCsv(os.str());
}

std::vector<SplitIndices> SplitKFold(const Dataset& ds, int k, uint64_t seed) {
  const size_t n = ds.size();
  if (k < 2 || static_cast<size_t>(k) > n) {
    throw Error(ErrorCode::kBadSplit,
                "k=" + std::to_string(k) + " for " + std::to_string(n) +
                    " samples");
  }
  const std::vector<size_t> order = ShuffledIndices(n, seed);
  std::vector<SplitIndices> folds(k);
  size_t start = 0;
  for (int f = 0; f < k; ++f) {
    const size_t len = n / k + (static_cast<size_t>(f) < n % k ? 1 : 0);
    for (size_t i = 0; i < n; ++i) {
      if (i >= start && i < start + len) {
        folds[f].test.push_back(order[i]);
      } else {
        folds[f].train.push_back(order[i]);
      }
    }
    start += len;
  }
  return folds;
}

SplitIndices SplitLeaveClassOut(const Dataset& ds,
                                const std::string& class_id) {
  SplitIndices split;
  for (size_t i = 0; i < ds.size(); ++i) {
    (ds[i].class_id == class_id ? split.test : split.train).push_back(i);
  }
  if (split.test.empty()) {
    throw Error(ErrorCode::kUnknownClass, class_id);
  }
  return split;
}

SplitIndices SubsampleFraction(const Dataset& ds, double train_fraction,
                               uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kBadSplit,
                "train fraction " + FormatDouble(train_fraction));
  }
  const std::vector<size_t> order = ShuffledIndices(ds.size(), seed);
  const size_t n_train = static_cast<size_t>(
      std::floor(train_fraction * static_cast<double>(ds.size()) + 1e-9));
  SplitIndices split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.test.assign(order.begin() + n_train, order.end());
  return split;
}

}  // namespace nrvq
