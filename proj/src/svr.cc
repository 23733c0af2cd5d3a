/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include <algorithm>
#include <cmath>

#include "nrvq/error.h"
#include "nrvq/regressors.h"

namespace nrvq {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

double RbfKernel(std::span<const double> a, std::span<const double> b,
                 double gamma) {
  double d2 = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

SupportVectorRegression SupportVectorRegression::Fit(const Matrix& x,
                                                     const Vector& z,
                                                     const Options& options) {
  const Eigen::Index n = x.rows();
  const double c = options.cost;
  if (!(c > 0.0) || !(options.epsilon >= 0.0) || !(options.tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "SVR needs cost > 0, epsilon >= 0, tolerance > 0");
  }
  double gamma = options.gamma;
  if (gamma <= 0.0) {
    const double mean_var =
        (x.rowwise() - x.colwise().mean()).array().square().mean();
    if (!(mean_var > 0.0)) {
      throw Error(ErrorCode::kTrainingError, "SVR: all features constant");
    }
    gamma = 1.0 / (10.0 * mean_var);
  }

  Matrix k(n, n);
  {
    const Vector norms = x.rowwise().squaredNorm();
    Matrix d = -2.0 * (x * x.transpose());
    d.colwise() += norms;
    d.rowwise() += norms.transpose();
    k = (d.cwiseMax(0.0) * -gamma).array().exp();
    k.diagonal().setOnes();
  }

  // Variable t < n is alpha_t (sign +1); t >= n is alpha*_{t-n} (sign -1).
  const Eigen::Index l = 2 * n;
  auto sign = [n](Eigen::Index t) { return t < n ? 1.0 : -1.0; };
  auto row = [n](Eigen::Index t) { return t < n ? t : t - n; };
  auto q = [&](Eigen::Index a, Eigen::Index b) {
    return sign(a) * sign(b) * k(row(a), row(b));
  };
  Vector alpha = Vector::Zero(l);
  Vector grad(l);
  for (Eigen::Index t = 0; t < n; ++t) {
    grad[t] = options.epsilon - z[t];
    grad[t + n] = options.epsilon + z[t];
  }
  auto at_upper = [&](Eigen::Index t) { return alpha[t] >= c; };
  auto at_lower = [&](Eigen::Index t) { return alpha[t] <= 0.0; };

  SupportVectorRegression m;
  int64_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    double gmax = -HUGE_VAL;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < l; ++t) {
      if (sign(t) > 0) {
        if (!at_upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (!at_lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    double gmax2 = -HUGE_VAL;
    double best_obj = HUGE_VAL;
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < l && i >= 0; ++t) {
      if (sign(t) > 0) {
        if (at_lower(t)) continue;
        gmax2 = std::max(gmax2, grad[t]);
        const double diff = gmax + grad[t];
        if (diff > 0.0) {
          double quad = 2.0 - 2.0 * sign(i) * q(i, t);
          if (quad <= 0.0) quad = kTau;
          const double obj = -diff * diff / quad;
          if (obj <= best_obj) {
            best_obj = obj;
            j = t;
          }
        }
      } else {
        if (at_upper(t)) continue;
        gmax2 = std::max(gmax2, -grad[t]);
        const double diff = gmax - grad[t];
        if (diff > 0.0) {
          double quad = 2.0 + 2.0 * sign(i) * q(i, t);
          if (quad <= 0.0) quad = kTau;
          const double obj = -diff * diff / quad;
          if (obj <= best_obj) {
            best_obj = obj;
            j = t;
          }
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < options.tolerance) {
      m.converged_ = true;
      break;
    }

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double qij = q(i, j);
    if (sign(i) != sign(j)) {
      double quad = 2.0 + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (Eigen::Index t = 0; t < l; ++t) {
      grad[t] += q(i, t) * di + q(j, t) * dj;
    }
  }
  m.iterations_ = iter;

  double ub = HUGE_VAL;
  double lb = -HUGE_VAL;
  double free_sum = 0.0;
  int64_t free_count = 0;
  for (Eigen::Index t = 0; t < l; ++t) {
    const double yg = sign(t) * grad[t];
    if (at_upper(t)) {
      if (sign(t) < 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (at_lower(t)) {
      if (sign(t) > 0) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho =
      free_count > 0 ? free_sum / static_cast<double>(free_count)
                     : 0.5 * (ub + lb);

  m.gamma_ = gamma;
  m.bias_ = -rho;
  m.dual_ = alpha;
  m.coef_ = alpha.head(n) - alpha.tail(n);
  Eigen::Index svs = 0;
  for (Eigen::Index t = 0; t < n; ++t) svs += m.coef_[t] != 0.0;
  m.x_.resize(svs, x.cols());
  m.sv_coef_.resize(svs);
  for (Eigen::Index t = 0, s = 0; t < n; ++t) {
    if (m.coef_[t] == 0.0) continue;
    m.x_.row(s) = x.row(t);
    m.sv_coef_[s++] = m.coef_[t];
  }
  if (!std::isfinite(m.bias_)) {
    throw Error(ErrorCode::kTrainingError, "SVR: non-finite bias");
  }
  return m;
}

double SupportVectorRegression::Predict(std::span<const double> x) const {
  double s = bias_;
  const Eigen::Index d = x_.cols();
  for (Eigen::Index i = 0; i < x_.rows(); ++i) {
    double d2 = 0.0;
    for (Eigen::Index f = 0; f < d; ++f) {
      const double diff = x_(i, f) - x[f];
      d2 += diff * diff;
    }
    s += sv_coef_[i] * std::exp(-gamma_ * d2);
  }
  return s;
}

void SupportVectorRegression::Write(PayloadWriter& out) const {
  out.Add("gamma", gamma_);
  out.Add("bias", bias_);
  out.Add("iterations", static_cast<double>(iterations_));
  out.Add("converged", converged_ ? 1.0 : 0.0);
  out.Add("dims", static_cast<double>(x_.cols()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      rows = x_;
  out.Add("support_vectors", {rows.data(), static_cast<size_t>(rows.size())});
  out.Add("coefficients",
          {sv_coef_.data(), static_cast<size_t>(sv_coef_.size())});
}

SupportVectorRegression SupportVectorRegression::Read(PayloadReader& in) {
  SupportVectorRegression m;
  m.gamma_ = in.Scalar("gamma");
  m.bias_ = in.Scalar("bias");
  m.iterations_ = in.Integer("iterations");
  m.converged_ = in.Scalar("converged") != 0.0;
  const int64_t dims = in.Integer("dims");
  const std::vector<double> sv = in.Vector("support_vectors");
  const std::vector<double> coef = in.Vector("coefficients");
  if (dims <= 0 || sv.size() != coef.size() * static_cast<size_t>(dims)) {
    throw Error(ErrorCode::kParseError, "SVR support vector size mismatch");
  }
  m.x_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(
      sv.data(), static_cast<Eigen::Index>(coef.size()), dims);
  m.sv_coef_ = Eigen::Map<const Vector>(coef.data(), coef.size());
  m.coef_ = m.sv_coef_;
  return m;
}

}  // namespace nrvq
