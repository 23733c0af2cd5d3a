/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nrvq/error.h"
#include "nrvq/regressors.h"
#include "nrvq/rng.h"

namespace nrvq {

namespace {

constexpr double kTieTolerance = 1e-12;

// Grows a tree over "slots"; slot s is training row rows[s]. Every node
// owns the same contiguous range [lo, hi) in each per-feature order.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> rows, int min_parent)
      : x_(x), rows_(rows.begin(), rows.end()), min_parent_(min_parent) {
    const int m = static_cast<int>(rows_.size());
    order_.resize(x.cols());
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      std::vector<int>& o = order_[f];
      o.resize(m);
      std::iota(o.begin(), o.end(), 0);
      std::stable_sort(o.begin(), o.end(), [&](int a, int b) {
        return Value(a, f) < Value(b, f);
      });
    }
    goes_left_.assign(m, 0);
    scratch_.resize(m);
  }

  double Value(int slot, Eigen::Index f) const { return x_(rows_[slot], f); }
  int slots() const { return static_cast<int>(rows_.size()); }

  struct Split {
    int feature = -1;
    int position = 0;  // left child is [lo, position]
    double threshold = 0.0;
  };

  // Partitions every order by the chosen split; returns the left size.
  int Apply(int lo, int hi, const Split& s) {
    const std::vector<int>& base = order_[s.feature];
    for (int i = lo; i < hi; ++i) goes_left_[base[i]] = i <= s.position;
    for (auto& o : order_) {
      int l = lo;
      int r = 0;
      for (int i = lo; i < hi; ++i) {
        if (goes_left_[o[i]]) {
          o[l++] = o[i];
        } else {
          scratch_[r++] = o[i];
        }
      }
      std::copy_n(scratch_.begin(), r, o.begin() + l);
    }
    return s.position - lo + 1;
  }

  double MidThreshold(int feature, int position) const {
    const double a = Value(order_[feature][position], feature);
    const double b = Value(order_[feature][position + 1], feature);
    const double mid = 0.5 * (a + b);
    return mid < b ? mid : a;
  }

  const std::vector<int>& order(int f) const { return order_[f]; }
  int min_parent() const { return min_parent_; }

  std::vector<DecisionTree::Node> nodes;

 private:
  const Matrix& x_;
  std::vector<int> rows_;
  int min_parent_;
  std::vector<std::vector<int>> order_;
  std::vector<char> goes_left_;
  std::vector<int> scratch_;
};

class RegressionGrower {
 public:
  RegressionGrower(TreeBuilder& b, std::vector<double> targets, int features)
      : b_(b), t_(std::move(targets)), features_(features) {}

  int Grow(int lo, int hi) {
    const int id = static_cast<int>(b_.nodes.size());
    b_.nodes.emplace_back();
    const std::vector<int>& o0 = b_.order(0);
    double sum = 0.0;
    double lo_t = t_[o0[lo]];
    double hi_t = lo_t;
    for (int i = lo; i < hi; ++i) {
      const double v = t_[o0[i]];
      sum += v;
      lo_t = std::min(lo_t, v);
      hi_t = std::max(hi_t, v);
    }
    const int n = hi - lo;
    b_.nodes[id].value = sum / n;
    if (n < b_.min_parent() || lo_t == hi_t) return id;

    // Gains use node-centred targets so a constant shift of all targets
    // leaves the chosen split unchanged. The centred total is ~0, so the
    // right sum is -left.
    const double mean = sum / n;
    TreeBuilder::Split best;
    double best_gain = 0.0;
    for (int f = 0; f < features_; ++f) {
      const std::vector<int>& o = b_.order(f);
      double left = 0.0;
      for (int i = lo; i + 1 < hi; ++i) {
        left += t_[o[i]] - mean;
        if (b_.Value(o[i], f) == b_.Value(o[i + 1], f)) continue;
        const int k = i - lo + 1;
        const double gain = left * left * n / (static_cast<double>(k) * (n - k));
        // Equal partitions reached through different features tie up to
        // rounding; the first candidate wins.
        if (gain > best_gain * (1.0 + kTieTolerance)) {
          best_gain = gain;
          best.feature = f;
          best.position = i;
        }
      }
    }
    if (best.feature < 0) return id;
    best.threshold = b_.MidThreshold(best.feature, best.position);
    const int mid = lo + b_.Apply(lo, hi, best);
    const int left = Grow(lo, mid);
    const int right = Grow(mid, hi);
    DecisionTree::Node& node = b_.nodes[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

 private:
  TreeBuilder& b_;
  std::vector<double> t_;
  int features_;
};

class ClassifierGrower {
 public:
  ClassifierGrower(TreeBuilder& b, std::span<const int> labels,
                   const Vector& weights, int classes, int features)
      : b_(b),
        labels_(labels),
        weights_(weights),
        classes_(classes),
        features_(features),
        left_(classes),
        right_(classes) {}

  int Grow(int lo, int hi) {
    const int id = static_cast<int>(b_.nodes.size());
    b_.nodes.emplace_back();
    std::vector<double> total(classes_, 0.0);
    const std::vector<int>& o0 = b_.order(0);
    double w_total = 0.0;
    for (int i = lo; i < hi; ++i) {
      total[labels_[o0[i]]] += weights_[o0[i]];
      w_total += weights_[o0[i]];
    }
    int majority = 0;
    int present = 0;
    for (int c = 0; c < classes_; ++c) {
      if (total[c] > total[majority]) majority = c;
      if (total[c] > 0.0) ++present;
    }
    b_.nodes[id].value = majority;
    const int n = hi - lo;
    if (n < b_.min_parent() || present <= 1 || w_total <= 0.0) return id;

    double sq_total = 0.0;
    for (double w : total) sq_total += w * w;
    TreeBuilder::Split best;
    double best_score = sq_total / w_total;
    for (int f = 0; f < features_; ++f) {
      const std::vector<int>& o = b_.order(f);
      std::fill(left_.begin(), left_.end(), 0.0);
      right_ = total;
      double sq_left = 0.0;
      double sq_right = sq_total;
      double w_left = 0.0;
      for (int i = lo; i + 1 < hi; ++i) {
        const int c = labels_[o[i]];
        const double w = weights_[o[i]];
        sq_left += w * (2.0 * left_[c] + w);
        sq_right += w * (w - 2.0 * right_[c]);
        left_[c] += w;
        right_[c] -= w;
        w_left += w;
        if (b_.Value(o[i], f) == b_.Value(o[i + 1], f)) continue;
        const double w_right = w_total - w_left;
        if (w_left <= 0.0 || w_right <= 0.0) continue;
        const double score = sq_left / w_left + sq_right / w_right;
        if (score > best_score * (1.0 + kTieTolerance)) {
          best_score = score;
          best.feature = f;
          best.position = i;
        }
      }
    }
    if (best.feature < 0) return id;
    best.threshold = b_.MidThreshold(best.feature, best.position);
    const int mid = lo + b_.Apply(lo, hi, best);
    const int left = Grow(lo, mid);
    const int right = Grow(mid, hi);
    DecisionTree::Node& node = b_.nodes[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

 private:
  TreeBuilder& b_;
  std::span<const int> labels_;
  const Vector& weights_;
  int classes_;
  int features_;
  std::vector<double> left_;
  std::vector<double> right_;
};

std::vector<int> AllRows(Eigen::Index n) {
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

std::span<const double> Row(const Matrix& x, Eigen::Index i,
                            std::vector<double>& buffer) {
  buffer.resize(x.cols());
  for (Eigen::Index f = 0; f < x.cols(); ++f) buffer[f] = x(i, f);
  return buffer;
}

void CheckMinParent(int min_parent) {
  if (min_parent < 2) {
    throw Error(ErrorCode::kInvalidArgument, "min_parent must be >= 2");
  }
}

}  // namespace

DecisionTree DecisionTree::FitRegression(const Matrix& x, const Vector& y,
                                         std::span<const int> rows,
                                         int min_parent) {
  CheckMinParent(min_parent);
  if (rows.empty()) {
    throw Error(ErrorCode::kTrainingError, "tree: no training rows");
  }
  TreeBuilder builder(x, rows, min_parent);
  std::vector<double> targets(rows.size());
  for (size_t s = 0; s < rows.size(); ++s) targets[s] = y[rows[s]];
  RegressionGrower grower(builder, std::move(targets),
                         static_cast<int>(x.cols()));
  grower.Grow(0, builder.slots());
  DecisionTree tree;
  tree.nodes_ = std::move(builder.nodes);
  return tree;
}

DecisionTree DecisionTree::FitClassifier(const Matrix& x,
                                         std::span<const int> labels,
                                         const Vector& weights, int classes,
                                         int min_parent) {
  CheckMinParent(min_parent);
  const std::vector<int> rows = AllRows(x.rows());
  TreeBuilder builder(x, rows, min_parent);
  ClassifierGrower grower(builder, labels, weights, classes,
                          static_cast<int>(x.cols()));
  grower.Grow(0, builder.slots());
  DecisionTree tree;
  tree.nodes_ = std::move(builder.nodes);
  return tree;
}

double DecisionTree::Predict(std::span<const double> x) const {
  int i = 0;
  while (nodes_[i].feature >= 0) {
    const Node& n = nodes_[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].value;
}

void DecisionTree::Write(PayloadWriter& out) const {
  const size_t n = nodes_.size();
  std::vector<double> feature(n), threshold(n), left(n), right(n), value(n);
  for (size_t i = 0; i < n; ++i) {
    feature[i] = nodes_[i].feature;
    threshold[i] = nodes_[i].threshold;
    left[i] = nodes_[i].left;
    right[i] = nodes_[i].right;
    value[i] = nodes_[i].value;
  }
  out.Add("tree.feature", feature);
  out.Add("tree.threshold", threshold);
  out.Add("tree.left", left);
  out.Add("tree.right", right);
  out.Add("tree.value", value);
}

DecisionTree DecisionTree::Read(PayloadReader& in) {
  const std::vector<double> feature = in.Vector("tree.feature");
  const std::vector<double> threshold = in.Vector("tree.threshold");
  const std::vector<double> left = in.Vector("tree.left");
  const std::vector<double> right = in.Vector("tree.right");
  const std::vector<double> value = in.Vector("tree.value");
  const size_t n = feature.size();
  if (n == 0 || threshold.size() != n || left.size() != n ||
      right.size() != n || value.size() != n) {
    throw Error(ErrorCode::kParseError, "inconsistent tree arrays");
  }
  DecisionTree tree;
  tree.nodes_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    Node& node = tree.nodes_[i];
    node.feature = static_cast<int>(feature[i]);
    node.threshold = threshold[i];
    node.left = static_cast<int>(left[i]);
    node.right = static_cast<int>(right[i]);
    node.value = value[i];
    // Children always follow their parent, so traversal terminates.
    if (node.feature >= 0 &&
        (node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
         node.left >= static_cast<int>(n) || node.right >= static_cast<int>(n))) {
      throw Error(ErrorCode::kParseError, "bad tree child index");
    }
  }
  return tree;
}

RegressionTreeModel RegressionTreeModel::Fit(const Matrix& x, const Vector& y,
                                             int min_parent) {
  RegressionTreeModel m;
  m.tree_ = DecisionTree::FitRegression(x, y, AllRows(x.rows()), min_parent);
  return m;
}

RegressionTreeModel RegressionTreeModel::Read(PayloadReader& in) {
  RegressionTreeModel m;
  m.tree_ = DecisionTree::Read(in);
  return m;
}

GradientBoosting GradientBoosting::Fit(const Matrix& x, const Vector& y,
                                       int stages, double shrinkage,
                                       int min_parent) {
  if (stages < 1 || !(shrinkage > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "ERT-LSB needs stages >= 1 and shrinkage > 0");
  }
  GradientBoosting m;
  m.shrinkage_ = shrinkage;
  m.initial_ = y.mean();
  const std::vector<int> rows = AllRows(x.rows());
  Vector fitted = Vector::Constant(y.size(), m.initial_);
  std::vector<double> buffer;
  m.trees_.reserve(stages);
  for (int s = 0; s < stages; ++s) {
    const Vector residual = y - fitted;
    DecisionTree tree =
        DecisionTree::FitRegression(x, residual, rows, min_parent);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      fitted[i] += shrinkage * tree.Predict(Row(x, i, buffer));
    }
    m.trees_.push_back(std::move(tree));
  }
  return m;
}

double GradientBoosting::Predict(std::span<const double> x) const {
  double s = initial_;
  for (const DecisionTree& t : trees_) s += shrinkage_ * t.Predict(x);
  return s;
}

void GradientBoosting::Write(PayloadWriter& out) const {
  out.Add("initial", initial_);
  out.Add("shrinkage", shrinkage_);
  out.Add("stages", static_cast<double>(trees_.size()));
  for (const DecisionTree& t : trees_) t.Write(out);
}

GradientBoosting GradientBoosting::Read(PayloadReader& in) {
  GradientBoosting m;
  m.initial_ = in.Scalar("initial");
  m.shrinkage_ = in.Scalar("shrinkage");
  const int64_t stages = in.Integer("stages");
  for (int64_t s = 0; s < stages; ++s) m.trees_.push_back(DecisionTree::Read(in));
  return m;
}

Bagging Bagging::Fit(const Matrix& x, const Vector& y, int trees,
                     int min_parent, bool bootstrap, uint64_t seed) {
  if (trees < 1) {
    throw Error(ErrorCode::kInvalidArgument, "ERT-BR needs trees >= 1");
  }
  Bagging m;
  Rng rng(seed);
  const Eigen::Index n = x.rows();
  std::vector<int> rows = AllRows(n);
  for (int t = 0; t < trees; ++t) {
    if (bootstrap) {
      for (Eigen::Index i = 0; i < n; ++i) {
        rows[i] = static_cast<int>(rng.Index(static_cast<uint64_t>(n)));
      }
    }
    m.trees_.push_back(DecisionTree::FitRegression(x, y, rows, min_parent));
  }
  return m;
}

double Bagging::Predict(std::span<const double> x) const {
  // Running mean: identical members reproduce the member value exactly.
  double mean = 0.0;
  for (size_t t = 0; t < trees_.size(); ++t) {
    mean += (trees_[t].Predict(x) - mean) / static_cast<double>(t + 1);
  }
  return mean;
}

void Bagging::Write(PayloadWriter& out) const {
  out.Add("trees", static_cast<double>(trees_.size()));
  for (const DecisionTree& t : trees_) t.Write(out);
}

Bagging Bagging::Read(PayloadReader& in) {
  Bagging m;
  const int64_t trees = in.Integer("trees");
  for (int64_t t = 0; t < trees; ++t) m.trees_.push_back(DecisionTree::Read(in));
  if (m.trees_.empty()) throw Error(ErrorCode::kParseError, "empty ensemble");
  return m;
}

int AdaBoostSamme::ClassOf(double q, int classes) {
  const long c = std::lround(q * classes);
  return static_cast<int>(std::clamp<long>(c, 0, classes - 1));
}

AdaBoostSamme AdaBoostSamme::Fit(const Matrix& x, const Vector& y,
                                 int stages, double learning_rate,
                                 int classes, int min_parent) {
  if (stages < 1 || classes < 2 || !(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "EDT-AB needs stages >= 1, classes >= 2, learning_rate > 0");
  }
  const Eigen::Index n = x.rows();
  AdaBoostSamme m;
  m.classes_ = classes;
  std::vector<int> labels(n);
  std::vector<int> counts(classes, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    labels[i] = ClassOf(y[i], classes);
    ++counts[labels[i]];
  }
  m.prior_class_ = static_cast<int>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());

  constexpr double kMinError = 1e-10;
  const double chance_error = 1.0 - 1.0 / classes;
  Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  std::vector<double> buffer;
  std::vector<char> miss(n);
  for (int s = 0; s < stages; ++s) {
    ++m.rounds_;
    DecisionTree tree =
        DecisionTree::FitClassifier(x, labels, w, classes, min_parent);
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      miss[i] = static_cast<int>(tree.Predict(Row(x, i, buffer))) != labels[i];
      if (miss[i]) err += w[i];
    }
    err /= w.sum();
    if (err >= chance_error) break;
    const bool perfect = err <= 0.0;
    err = std::max(err, kMinError);
    const double alpha =
        learning_rate * (std::log((1.0 - err) / err) + std::log(classes - 1.0));
    m.alphas_.push_back(alpha);
    m.trees_.push_back(std::move(tree));
    // Later rounds would refit the same tree to unchanged weights.
    if (perfect) break;
    const double boost = std::exp(alpha);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (miss[i]) w[i] *= boost;
    }
    w /= w.sum();
  }
  return m;
}

double AdaBoostSamme::Predict(std::span<const double> x) const {
  if (trees_.empty()) return static_cast<double>(prior_class_) / classes_;
  std::vector<double> votes(classes_, 0.0);
  for (size_t t = 0; t < trees_.size(); ++t) {
    votes[static_cast<int>(trees_[t].Predict(x))] += alphas_[t];
  }
  const int best = static_cast<int>(
      std::max_element(votes.begin(), votes.end()) - votes.begin());
  return static_cast<double>(best) / classes_;
}

void AdaBoostSamme::Write(PayloadWriter& out) const {
  out.Add("classes", classes_);
  out.Add("prior_class", prior_class_);
  out.Add("rounds", rounds_);
  out.Add("alphas", alphas_);
  for (const DecisionTree& t : trees_) t.Write(out);
}

AdaBoostSamme AdaBoostSamme::Read(PayloadReader& in) {
  AdaBoostSamme m;
  m.classes_ = static_cast<int>(in.Integer("classes"));
  m.prior_class_ = static_cast<int>(in.Integer("prior_class"));
  m.rounds_ = static_cast<int>(in.Integer("rounds"));
  m.alphas_ = in.Vector("alphas");
  if (m.classes_ < 2 || m.prior_class_ < 0 || m.prior_class_ >= m.classes_) {
    throw Error(ErrorCode::kParseError, "bad EDT-AB class count");
  }
  for (size_t t = 0; t < m.alphas_.size(); ++t) {
    m.trees_.push_back(DecisionTree::Read(in));
    for (const DecisionTree::Node& node : m.trees_.back().nodes()) {
      if (node.feature < 0 &&
          (node.value < 0 || node.value >= m.classes_)) {
        throw Error(ErrorCode::kParseError, "bad EDT-AB leaf class");
      }
    }
  }
  return m;
}

}  // namespace nrvq
