/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include <string>

#include "nrvq/error.h"
#include "nrvq/regressors.h"
#include "nrvq/text.h"

namespace nrvq {

void PayloadWriter::Add(std::string_view name, std::span<const double> values) {
  text_ += name;
  text_ += ' ';
  text_ += std::to_string(values.size());
  for (double v : values) {
    text_ += ' ';
    text_ += FormatDouble(v);
  }
  text_ += '\n';
}

PayloadReader::PayloadReader(std::string_view text) {
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    if (end > start) lines_.push_back(text.substr(start, end - start));
    start = end + 1;
  }
}

std::vector<double> PayloadReader::Vector(std::string_view name) {
  if (pos_ >= lines_.size()) {
    throw Error(ErrorCode::kParseError,
                "payload ends before " + std::string(name));
  }
  const std::vector<std::string> tokens = Split(lines_[pos_++], ' ');
  if (tokens.size() < 2 || tokens[0] != name) {
    throw Error(ErrorCode::kParseError,
                "expected payload field " + std::string(name));
  }
  const auto count = ParseInt(tokens[1]);
  if (!count || *count < 0 ||
      static_cast<size_t>(*count) + 2 != tokens.size()) {
    throw Error(ErrorCode::kParseError,
                "bad value count in field " + std::string(name));
  }
  std::vector<double> values;
  values.reserve(static_cast<size_t>(*count));
  for (size_t i = 2; i < tokens.size(); ++i) {
    const auto v = ParseDouble(tokens[i]);
    if (!v) {
      throw Error(ErrorCode::kParseError,
                  "bad number in field " + std::string(name));
    }
    values.push_back(*v);
  }
  return values;
}

double PayloadReader::Scalar(std::string_view name) {
  const std::vector<double> v = Vector(name);
  if (v.size() != 1) {
    throw Error(ErrorCode::kParseError,
                "field " + std::string(name) + " is not a scalar");
  }
  return v[0];
}

int64_t PayloadReader::Integer(std::string_view name) {
  const double v = Scalar(name);
  if (v != static_cast<double>(static_cast<int64_t>(v))) {
    throw Error(ErrorCode::kParseError,
                "field " + std::string(name) + " is not an integer");
  }
  return static_cast<int64_t>(v);
}

LinearRegression LinearRegression::Fit(const Matrix& x, const Vector& y) {
  Matrix a(x.rows(), x.cols() + 1);
  a.leftCols(x.cols()) = x;
  a.col(x.cols()).setOnes();
  const Vector beta = a.completeOrthogonalDecomposition().solve(y);
  if (!beta.allFinite()) {
    throw Error(ErrorCode::kTrainingError, "LR: non-finite solution");
  }
  LinearRegression m;
  m.weights_ = beta.head(x.cols());
  m.bias_ = beta[x.cols()];
  return m;
}

double LinearRegression::Predict(std::span<const double> x) const {
  double s = bias_;
  for (Eigen::Index i = 0; i < weights_.size(); ++i) s += weights_[i] * x[i];
  return s;
}

void LinearRegression::Write(PayloadWriter& out) const {
  out.Add("weights", {weights_.data(), static_cast<size_t>(weights_.size())});
  out.Add("bias", bias_);
}

LinearRegression LinearRegression::Read(PayloadReader& in) {
  LinearRegression m;
  const std::vector<double> w = in.Vector("weights");
  m.weights_ = Eigen::Map<const Vector>(w.data(), w.size());
  m.bias_ = in.Scalar("bias");
  return m;
}

}  // namespace nrvq
