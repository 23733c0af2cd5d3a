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

constexpr double kMaxMu = 1e10;
constexpr double kMinMu = 1e-20;

// Weight layout: W1 (hidden x inputs, row-major), b1, w2, b2, then the
// cascade weights (inputs) if present.
struct Layout {
  explicit Layout(const NetworkShape& s)
      : w1(0),
        b1(s.hidden * s.inputs),
        w2(b1 + s.hidden),
        b2(w2 + s.hidden),
        cascade(b2 + 1) {}
  int w1, b1, w2, b2, cascade;
};

// Output and, if jac is set, the derivative of the output w.r.t. weights.
double Forward(const NetworkShape& s, const Layout& lay, const double* w,
               std::span<const double> x, double* jac) {
  double out = w[lay.b2];
  if (jac) jac[lay.b2] = 1.0;
  for (int h = 0; h < s.hidden; ++h) {
    double z = w[lay.b1 + h];
    const double* wr = w + lay.w1 + h * s.inputs;
    for (int f = 0; f < s.inputs; ++f) z += wr[f] * x[f];
    const double a = std::tanh(z);
    out += w[lay.w2 + h] * a;
    if (jac) {
      const double da = w[lay.w2 + h] * (1.0 - a * a);
      double* jr = jac + lay.w1 + h * s.inputs;
      for (int f = 0; f < s.inputs; ++f) jr[f] = da * x[f];
      jac[lay.b1 + h] = da;
      jac[lay.w2 + h] = a;
    }
  }
  if (s.cascade) {
    for (int f = 0; f < s.inputs; ++f) {
      out += w[lay.cascade + f] * x[f];
      if (jac) jac[lay.cascade + f] = x[f];
    }
  }
  return out;
}

std::span<const double> RowOf(const Matrix& x, Eigen::Index i,
                              std::vector<double>& buf) {
  buf.resize(x.cols());
  for (Eigen::Index f = 0; f < x.cols(); ++f) buf[f] = x(i, f);
  return buf;
}

void CheckShape(const NetworkShape& s, const Vector& w, const Matrix& x) {
  if (w.size() != s.WeightCount() || x.cols() != s.inputs) {
    throw Error(ErrorCode::kDimensionError, "network shape mismatch");
  }
}

double Sse(const NetworkShape& s, const Vector& w, const Matrix& x,
           const Vector& y) {
  const Layout lay(s);
  std::vector<double> buf;
  double sse = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double e = Forward(s, lay, w.data(), RowOf(x, i, buf), nullptr) - y[i];
    sse += e * e;
  }
  return sse;
}

}  // namespace

double NetworkForward(const NetworkShape& shape, const Vector& w,
                      std::span<const double> x) {
  return Forward(shape, Layout(shape), w.data(), x, nullptr);
}

double NetworkLoss(const NetworkShape& shape, const Vector& w,
                   const Matrix& x, const Vector& y) {
  CheckShape(shape, w, x);
  return 0.5 * Sse(shape, w, x, y);
}

Vector NetworkGradient(const NetworkShape& shape, const Vector& w,
                       const Matrix& x, const Vector& y) {
  CheckShape(shape, w, x);
  const Layout lay(shape);
  Vector grad = Vector::Zero(w.size());
  Vector jac(w.size());
  std::vector<double> buf;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double e =
        Forward(shape, lay, w.data(), RowOf(x, i, buf), jac.data()) - y[i];
    grad += e * jac;
  }
  return grad;
}

Vector NeuralNetwork::InitialWeights(const NetworkShape& shape,
                                     uint64_t seed) {
  const Layout lay(shape);
  Rng rng(seed);
  Vector w(shape.WeightCount());
  const double hidden_bound = 1.0 / std::sqrt(static_cast<double>(shape.inputs));
  const int out_fan_in = shape.hidden + (shape.cascade ? shape.inputs : 0);
  const double out_bound = 1.0 / std::sqrt(static_cast<double>(out_fan_in));
  for (int i = 0; i < w.size(); ++i) {
    const double bound = i < lay.w2 ? hidden_bound : out_bound;
    w[i] = rng.Uniform(-bound, bound);
  }
  return w;
}

NeuralNetwork NeuralNetwork::Fit(const Matrix& x, const Vector& y,
                                 const Options& options, uint64_t seed) {
  if (options.hidden < 1 || options.epochs < 1 || options.max_fail < 1 ||
      !(options.validation_fraction >= 0.0 &&
        options.validation_fraction < 1.0) ||
      !(options.mu > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad network options");
  }
  NeuralNetwork m;
  m.shape_ = {static_cast<int>(x.cols()), options.hidden, options.cascade};
  const NetworkShape& shape = m.shape_;
  const Layout lay(shape);
  const int p = shape.WeightCount();

  const Eigen::Index n = x.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(MixSeed(seed, 1));
  split_rng.Shuffle(std::span(order));
  const Eigen::Index n_val = static_cast<Eigen::Index>(
      std::floor(options.validation_fraction * static_cast<double>(n)));
  const Eigen::Index n_train = n - n_val;
  Matrix xt(n_train, x.cols()), xv(n_val, x.cols());
  Vector yt(n_train), yv(n_val);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i < n_val) {
      xv.row(i) = x.row(order[i]);
      yv[i] = y[order[i]];
    } else {
      xt.row(i - n_val) = x.row(order[i]);
      yt[i - n_val] = y[order[i]];
    }
  }

  Vector w = InitialWeights(shape, MixSeed(seed, 2));
  Vector best_w = w;
  double best_val = n_val > 0 ? Sse(shape, w, xv, yv) : HUGE_VAL;
  double mu = options.mu;
  int fails = 0;
  Matrix jac(n_train, p);
  Vector e(n_train);
  std::vector<double> buf;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    ++m.epochs_;
    double sse = 0.0;
    for (Eigen::Index i = 0; i < n_train; ++i) {
      Eigen::Matrix<double, 1, Eigen::Dynamic> jrow(p);
      e[i] = Forward(shape, lay, w.data(), RowOf(xt, i, buf), jrow.data()) -
             yt[i];
      jac.row(i) = jrow;
      sse += e[i] * e[i];
    }
    const Matrix h = jac.transpose() * jac;
    const Vector g = jac.transpose() * e;
    bool accepted = false;
    Vector trial;
    while (mu <= kMaxMu) {
      Matrix damped = h;
      damped.diagonal().array() += mu;
      trial = w - damped.ldlt().solve(g);
      const double trial_sse = trial.allFinite()
                                   ? Sse(shape, trial, xt, yt)
                                   : HUGE_VAL;
      if (trial_sse < sse) {
        accepted = true;
        mu = std::max(mu / 10.0, kMinMu);
        break;
      }
      mu *= 10.0;
    }
    if (!accepted) break;
    w = trial;
    if (n_val == 0) {
      best_w = w;
      continue;
    }
    const double val = Sse(shape, w, xv, yv);
    if (val < best_val) {
      best_val = val;
      best_w = w;
      fails = 0;
    } else if (++fails >= options.max_fail) {
      break;
    }
  }
  if (!best_w.allFinite()) {
    throw Error(ErrorCode::kTrainingError, "network: non-finite weights");
  }
  m.weights_ = best_w;
  return m;
}

double NeuralNetwork::Predict(std::span<const double> x) const {
  return Forward(shape_, Layout(shape_), weights_.data(), x, nullptr);
}

void NeuralNetwork::Write(PayloadWriter& out) const {
  out.Add("shape", std::vector<double>{static_cast<double>(shape_.inputs),
                                       static_cast<double>(shape_.hidden),
                                       shape_.cascade ? 1.0 : 0.0});
  out.Add("epochs", static_cast<double>(epochs_));
  out.Add("weights", {weights_.data(), static_cast<size_t>(weights_.size())});
}

NeuralNetwork NeuralNetwork::Read(PayloadReader& in) {
  NeuralNetwork m;
  const std::vector<double> s = in.Vector("shape");
  if (s.size() != 3 || s[0] < 1 || s[1] < 1) {
    throw Error(ErrorCode::kParseError, "bad network shape");
  }
  m.shape_ = {static_cast<int>(s[0]), static_cast<int>(s[1]), s[2] != 0.0};
  m.epochs_ = static_cast<int>(in.Integer("epochs"));
  const std::vector<double> w = in.Vector("weights");
  if (static_cast<int>(w.size()) != m.shape_.WeightCount()) {
    throw Error(ErrorCode::kParseError, "network weight count mismatch");
  }
  m.weights_ = Eigen::Map<const Vector>(w.data(), w.size());
  return m;
}

}  // namespace nrvq
