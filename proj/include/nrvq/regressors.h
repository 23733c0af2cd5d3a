/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

// Concrete regressors behind QualityModel. Exposed so property tests can
// inspect trained internals (tree stages, SVR duals, network gradients).

#ifndef NRVQ_REGRESSORS_H_
#define NRVQ_REGRESSORS_H_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nrvq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Named numeric vectors, one per line: "name count v1 v2 ...".
class PayloadWriter {
 public:
  void Add(std::string_view name, std::span<const double> values);
  void Add(std::string_view name, double value) { Add(name, {&value, 1}); }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// Reads fields in the order they were written; ParseError on mismatch.
class PayloadReader {
 public:
  explicit PayloadReader(std::string_view text);
  std::vector<double> Vector(std::string_view name);
  double Scalar(std::string_view name);
  int64_t Integer(std::string_view name);
  bool done() const { return pos_ >= lines_.size(); }

 private:
  std::vector<std::string_view> lines_;
  size_t pos_ = 0;
};

class Regressor {
 public:
  virtual ~Regressor() = default;
  // x has the training dimensionality; the caller checks it.
  virtual double Predict(std::span<const double> x) const = 0;
  virtual void Write(PayloadWriter& out) const = 0;
};

class LinearRegression final : public Regressor {
 public:
  // Minimum-norm least squares on [x 1].
  static LinearRegression Fit(const Matrix& x, const Vector& y);
  static LinearRegression Read(PayloadReader& in);

  double Predict(std::span<const double> x) const override;
  void Write(PayloadWriter& out) const override;
  const Vector& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Vector weights_;
  double bias_ = 0.0;
};

// Axis-aligned binary tree, x[feature] <= threshold goes left. Leaves hold
// either a regression value or a class index.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  // Variance-reduction splits. rows indexes x/y and may repeat (bootstrap).
  // A node is split only if it holds at least min_parent rows.
  static DecisionTree FitRegression(const Matrix& x, const Vector& y,
                                    std::span<const int> rows,
                                    int min_parent);
  // Weighted-gini splits over labels in [0, classes).
  static DecisionTree FitClassifier(const Matrix& x,
                                    std::span<const int> labels,
                                    const Vector& weights, int classes,
                                    int min_parent);

  double Predict(std::span<const double> x) const;
  const std::vector<Node>& nodes() const { return nodes_; }

  void Write(PayloadWriter& out) const;
  static DecisionTree Read(PayloadReader& in);

 private:
  std::vector<Node> nodes_;
};

class RegressionTreeModel final : public Regressor {
 public:
  static RegressionTreeModel Fit(const Matrix& x, const Vector& y,
                                 int min_parent);
  static RegressionTreeModel Read(PayloadReader& in);
  double Predict(std::span<const double> x) const override {
    return tree_.Predict(x);
  }
  void Write(PayloadWriter& out) const override { tree_.Write(out); }
  const DecisionTree& tree() const { return tree_; }

 private:
  DecisionTree tree_;
};

// Least-squares boosting: F0 = mean(y), F_m = F_{m-1} + shrinkage * tree_m.
class GradientBoosting final : public Regressor {
 public:
  static GradientBoosting Fit(const Matrix& x, const Vector& y, int stages,
                              double shrinkage, int min_parent);
  static GradientBoosting Read(PayloadReader& in);
  double Predict(std::span<const double> x) const override;
  void Write(PayloadWriter& out) const override;

  double initial() const { return initial_; }
  double shrinkage() const { return shrinkage_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  double initial_ = 0.0;
  double shrinkage_ = 0.0;
  std::vector<DecisionTree> trees_;
};

// Equal-weight mean over trees grown on bootstrap resamples.
class Bagging final : public Regressor {
 public:
  static Bagging Fit(const Matrix& x, const Vector& y, int trees,
                     int min_parent, bool bootstrap, uint64_t seed);
  static Bagging Read(PayloadReader& in);
  double Predict(std::span<const double> x) const override;
  void Write(PayloadWriter& out) const override;
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

// SAMME over classes = round(q * classes) clipped to [0, classes - 1]; the
// prediction is the winning class index divided by classes.
class AdaBoostSamme final : public Regressor {
 public:
  static AdaBoostSamme Fit(const Matrix& x, const Vector& y, int stages,
                           double learning_rate, int classes,
                           int min_parent);
  static AdaBoostSamme Read(PayloadReader& in);
  double Predict(std::span<const double> x) const override;
  void Write(PayloadWriter& out) const override;

  static int ClassOf(double q, int classes);
  const std::vector<double>& stage_weights() const { return alphas_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  // Boosting rounds tried, including a terminating one that was discarded.
  int rounds() const { return rounds_; }

 private:
  int classes_ = 0;
  int prior_class_ = 0;  // used when no stage survives
  int rounds_ = 0;
  std::vector<double> alphas_;
  std::vector<DecisionTree> trees_;
};

struct GprHyper {
  double log_length = 0.0;  // log of the length-scale
  double log_signal = 0.0;  // log of the signal variance
  double log_noise = 0.0;   // log of the noise variance
};

struct GprFit {
  double log_likelihood = 0.0;
  double mean = 0.0;         // GLS constant mean
  double jitter = 0.0;       // diagonal added to factorize
  Vector alpha;              // K^-1 (y - mean)
};

// Squared-exponential kernel with a constant mean estimated by generalized
// least squares. Throws TrainingError if no jitter up to 1e-2 factorizes.
GprFit GprSolve(const Matrix& x, const Vector& y, const GprHyper& hyper);

// The three fixed starting points of the likelihood search.
std::array<GprHyper, 3> GprStartPoints(const Vector& y);
// Population variance of y, floored at 1e-6.
double GprTargetVariance(const Vector& y);
// Smallest log noise variance the search may visit: (0.01 std(y))^2.
double GprLogNoiseFloor(const Vector& y);

class GaussianProcess final : public Regressor {
 public:
  struct Options {
    bool optimize = true;
    int max_evaluations = 50;  // per start
    GprHyper fixed;            // used when !optimize
  };
  static GaussianProcess Fit(const Matrix& x, const Vector& y,
                             const Options& options, uint64_t seed);
  static GaussianProcess Read(PayloadReader& in);
  double Predict(std::span<const double> x) const override;
  void Write(PayloadWriter& out) const override;

  const GprHyper& hyper() const { return hyper_; }
  double log_likelihood() const { return log_likelihood_; }

 private:
  GprHyper hyper_;
  double log_likelihood_ = 0.0;
  double mean_ = 0.0;
  Matrix x_;  // training inputs, one row per sample
  Vector alpha_;
};

// Epsilon-SVR with an RBF kernel, solved by SMO over the 2n-variable dual
// with second-order working-set selection.
class SupportVectorRegression final : public Regressor {
 public:
  struct Options {
    double cost = 20.0;
    double epsilon = 0.1;
    double gamma = 0.0;  // <= 0 selects 1 / (10 * mean feature variance)
    double tolerance = 1e-3;
    int64_t max_iterations = 100000;
  };
  static SupportVectorRegression Fit(const Matrix& x, const Vector& y,
                                     const Options& options);
  static SupportVectorRegression Read(PayloadReader& in);
  double Predict(std::span<const double> x) const override;
  void Write(PayloadWriter& out) const override;

  // alpha_i - alpha*_i for every training row (zeros included).
  const Vector& coefficients() const { return coef_; }
  // The 2n dual variables, alpha then alpha*; empty after Read.
  const Vector& dual() const { return dual_; }
  double bias() const { return bias_; }
  double gamma() const { return gamma_; }
  int64_t iterations() const { return iterations_; }
  bool converged() const { return converged_; }

 private:
  double gamma_ = 0.0;
  double bias_ = 0.0;
  int64_t iterations_ = 0;
  bool converged_ = false;
  Matrix x_;  // rows with nonzero coefficient after Fit
  Vector coef_;
  Vector dual_;
  Vector sv_coef_;
};

double RbfKernel(std::span<const double> a, std::span<const double> b,
                 double gamma);

// One tanh hidden layer and a linear output; the cascade variant adds
// direct input-to-output weights.
struct NetworkShape {
  int inputs = 10;
  int hidden = 20;
  bool cascade = false;

  int WeightCount() const {
    return hidden * inputs + 2 * hidden + 1 + (cascade ? inputs : 0);
  }
};

double NetworkForward(const NetworkShape& shape, const Vector& w,
                      std::span<const double> x);
// Loss = 0.5 * sum of squared residuals over the rows of x.
double NetworkLoss(const NetworkShape& shape, const Vector& w,
                   const Matrix& x, const Vector& y);
Vector NetworkGradient(const NetworkShape& shape, const Vector& w,
                       const Matrix& x, const Vector& y);

class NeuralNetwork final : public Regressor {
 public:
  struct Options {
    int hidden = 20;
    bool cascade = false;
    int epochs = 200;
    int max_fail = 10;
    double validation_fraction = 0.15;
    double mu = 1e-3;
  };
  static NeuralNetwork Fit(const Matrix& x, const Vector& y,
                           const Options& options, uint64_t seed);
  static NeuralNetwork Read(PayloadReader& in);
  // Uniform +-1/sqrt(fan-in) initialization.
  static Vector InitialWeights(const NetworkShape& shape, uint64_t seed);
  double Predict(std::span<const double> x) const override;
  void Write(PayloadWriter& out) const override;

  const NetworkShape& shape() const { return shape_; }
  const Vector& weights() const { return weights_; }
  int epochs_run() const { return epochs_; }

 private:
  NetworkShape shape_;
  Vector weights_;
  int epochs_ = 0;
};

}  // namespace nrvq

#endif  // NRVQ_REGRESSORS_H_
