/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nrvq/error.h"
#include "nrvq/regressors.h"
#include "nrvq/rng.h"

namespace nrvq {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;
constexpr double kFirstJitter = 1e-8;
constexpr double kMaxJitter = 1e-2;
// Search box in log space; outside it the objective is +inf.
constexpr double kLogMin = -25.0;
constexpr double kLogMax = 8.0;
// Noise std-dev is kept at or above this fraction of the target std-dev.
constexpr double kNoiseStdFloor = 1e-2;

Matrix SquaredDistances(const Matrix& x) {
  const Vector norms = x.rowwise().squaredNorm();
  Matrix d = -2.0 * (x * x.transpose());
  d.colwise() += norms;
  d.rowwise() += norms.transpose();
  return d.cwiseMax(0.0);
}

GprFit SolveWithDistances(const Matrix& sq, const Vector& y,
                          const GprHyper& h) {
  const Eigen::Index n = y.size();
  const double ell2 = std::exp(2.0 * h.log_length);
  const double sf2 = std::exp(h.log_signal);
  const double sn2 = std::exp(h.log_noise);
  Matrix k = (sq * (-0.5 / ell2)).array().exp() * sf2;
  k.diagonal().array() += sn2;

  double jitter = 0.0;
  Eigen::LLT<Matrix> llt(k);
  while (llt.info() != Eigen::Success) {
    jitter = jitter == 0.0 ? kFirstJitter : jitter * 10.0;
    if (jitter > kMaxJitter * (1.0 + 1e-9)) {
      throw Error(ErrorCode::kTrainingError,
                  "GPR: covariance not positive definite up to jitter 1e-2");
    }
    Matrix kj = k;
    kj.diagonal().array() += jitter;
    llt.compute(kj);
  }
  const Vector ki_one = llt.solve(Vector::Ones(n));
  const Vector ki_y = llt.solve(y);
  GprFit fit;
  fit.jitter = jitter;
  fit.mean = ki_y.sum() / ki_one.sum();
  fit.alpha = ki_y - fit.mean * ki_one;
  const Vector r = y.array() - fit.mean;
  const Matrix& l = llt.matrixLLT();
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det_half += std::log(l(i, i));
  fit.log_likelihood =
      -0.5 * r.dot(fit.alpha) - log_det_half - 0.5 * n * kLogTwoPi;
  if (!std::isfinite(fit.log_likelihood) || !fit.alpha.allFinite()) {
    throw Error(ErrorCode::kTrainingError, "GPR: non-finite likelihood");
  }
  return fit;
}

using Point = std::array<double, 3>;

GprHyper ToHyper(const Point& p) { return {p[0], p[1], p[2]}; }
Point ToPoint(const GprHyper& h) {
  return {h.log_length, h.log_signal, h.log_noise};
}

// Minimizes f from start within a fixed evaluation budget; every evaluated
// point is offered to `visit`.
template <typename F>
void NelderMead(F&& f, const Point& start, int budget, Rng& rng) {
  constexpr int kDim = 3;
  constexpr double kStep = 0.5;
  std::array<Point, kDim + 1> simplex;
  std::array<double, kDim + 1> value;
  simplex[0] = start;
  int evals = 0;
  auto eval = [&](const Point& p) {
    ++evals;
    return f(p);
  };
  value[0] = eval(start);
  for (int i = 0; i < kDim; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1][i] += rng.Uniform() < 0.5 ? -kStep : kStep;
    value[i + 1] = eval(simplex[i + 1]);
  }
  std::array<int, kDim + 1> idx;
  while (evals < budget) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return value[a] < value[b]; });
    const int best = idx[0];
    const int worst = idx[kDim];
    const int second = idx[kDim - 1];
    Point centroid{};
    for (int i = 0; i < kDim; ++i) {
      for (int d = 0; d < kDim; ++d) centroid[d] += simplex[idx[i]][d] / kDim;
    }
    auto along = [&](double t) {
      Point p;
      for (int d = 0; d < kDim; ++d) {
        p[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
      }
      return p;
    };
    const Point reflected = along(-1.0);
    const double fr = eval(reflected);
    if (fr < value[best]) {
      const Point expanded = along(-2.0);
      const double fe = evals < budget ? eval(expanded) : HUGE_VAL;
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
      continue;
    }
    if (fr < value[second]) {
      simplex[worst] = reflected;
      value[worst] = fr;
      continue;
    }
    const bool outside = fr < value[worst];
    const Point contracted = along(outside ? -0.5 : 0.5);
    const double fc = evals < budget ? eval(contracted) : HUGE_VAL;
    if (fc < std::min(fr, value[worst])) {
      simplex[worst] = contracted;
      value[worst] = fc;
      continue;
    }
    for (int i = 1; i <= kDim && evals < budget; ++i) {
      Point& p = simplex[idx[i]];
      for (int d = 0; d < kDim; ++d) {
        p[d] = simplex[best][d] + 0.5 * (p[d] - simplex[best][d]);
      }
      value[idx[i]] = eval(p);
    }
  }
}

}  // namespace

GprFit GprSolve(const Matrix& x, const Vector& y, const GprHyper& hyper) {
  return SolveWithDistances(SquaredDistances(x), y, hyper);
}

double GprTargetVariance(const Vector& y) {
  return std::max((y.array() - y.mean()).square().mean(), 1e-6);
}

double GprLogNoiseFloor(const Vector& y) {
  return std::log(kNoiseStdFloor * kNoiseStdFloor * GprTargetVariance(y));
}

std::array<GprHyper, 3> GprStartPoints(const Vector& y) {
  const double lv = std::log(GprTargetVariance(y));
  return {GprHyper{std::log(0.25), lv, lv + std::log(0.1)},
          GprHyper{std::log(1.0), lv, lv + std::log(0.01)},
          GprHyper{std::log(4.0), lv, lv + std::log(0.001)}};
}

GaussianProcess GaussianProcess::Fit(const Matrix& x, const Vector& y,
                                     const Options& options, uint64_t seed) {
  const Matrix sq = SquaredDistances(x);
  GprHyper chosen = options.fixed;
  if (options.optimize) {
    if (options.max_evaluations < 4) {
      throw Error(ErrorCode::kInvalidArgument, "GPR: max_evals must be >= 4");
    }
    Rng rng(seed);
    const double noise_floor = GprLogNoiseFloor(y);
    Point best_point{};
    double best = HUGE_VAL;
    auto objective = [&](const Point& p) {
      for (double v : p) {
        if (!(v >= kLogMin && v <= kLogMax)) return HUGE_VAL;
      }
      if (p[2] < noise_floor) return HUGE_VAL;
      double value;
      try {
        value = -SolveWithDistances(sq, y, ToHyper(p)).log_likelihood;
      } catch (const Error&) {
        return HUGE_VAL;
      }
      if (value < best) {
        best = value;
        best_point = p;
      }
      return value;
    };
    for (const GprHyper& start : GprStartPoints(y)) {
      NelderMead(objective, ToPoint(start), options.max_evaluations, rng);
    }
    if (!std::isfinite(best)) {
      throw Error(ErrorCode::kTrainingError,
                  "GPR: no starting point could be factorized");
    }
    chosen = ToHyper(best_point);
  }
  const GprFit fit = SolveWithDistances(sq, y, chosen);
  GaussianProcess m;
  m.hyper_ = chosen;
  m.log_likelihood_ = fit.log_likelihood;
  m.mean_ = fit.mean;
  m.x_ = x;
  m.alpha_ = fit.alpha;
  return m;
}

double GaussianProcess::Predict(std::span<const double> x) const {
  const double inv = -0.5 * std::exp(-2.0 * hyper_.log_length);
  const double sf2 = std::exp(hyper_.log_signal);
  const Eigen::Index d = x_.cols();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x_.rows(); ++i) {
    double d2 = 0.0;
    for (Eigen::Index f = 0; f < d; ++f) {
      const double diff = x_(i, f) - x[f];
      d2 += diff * diff;
    }
    s += alpha_[i] * std::exp(inv * d2);
  }
  return mean_ + sf2 * s;
}

void GaussianProcess::Write(PayloadWriter& out) const {
  out.Add("hyper", Point{hyper_.log_length, hyper_.log_signal,
                         hyper_.log_noise});
  out.Add("log_likelihood", log_likelihood_);
  out.Add("mean", mean_);
  out.Add("dims", static_cast<double>(x_.cols()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      rows = x_;
  out.Add("inputs", {rows.data(), static_cast<size_t>(rows.size())});
  out.Add("alpha", {alpha_.data(), static_cast<size_t>(alpha_.size())});
}

GaussianProcess GaussianProcess::Read(PayloadReader& in) {
  GaussianProcess m;
  const std::vector<double> h = in.Vector("hyper");
  if (h.size() != 3) throw Error(ErrorCode::kParseError, "GPR hyper size");
  m.hyper_ = {h[0], h[1], h[2]};
  m.log_likelihood_ = in.Scalar("log_likelihood");
  m.mean_ = in.Scalar("mean");
  const int64_t dims = in.Integer("dims");
  const std::vector<double> inputs = in.Vector("inputs");
  const std::vector<double> alpha = in.Vector("alpha");
  if (dims <= 0 || inputs.size() != alpha.size() * static_cast<size_t>(dims)) {
    throw Error(ErrorCode::kParseError, "GPR input/alpha size mismatch");
  }
  m.x_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(
      inputs.data(), static_cast<Eigen::Index>(alpha.size()), dims);
  m.alpha_ = Eigen::Map<const Vector>(alpha.data(), alpha.size());
  return m;
}

}  // namespace nrvq
