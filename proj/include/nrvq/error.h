/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#ifndef NRVQ_ERROR_H_
#define NRVQ_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace nrvq {

enum class ErrorCode {
  kParseError,
  kUnsupportedGeometry,
  kTruncatedInput,
  kIoError,
  kInvalidClip,
  kMtuTooSmall,
  kGeometryMismatch,
  kAlignmentError,
  kDegenerateFeature,
  kSchemaError,
  kBadSplit,
  kUnknownClass,
  kTrainingError,
  kDimensionError,
  kUndefinedCorrelation,
  kUsageError,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this one exception type; the
// code identifies the failure class and the message carries the detail
// (offending column, feature name, algorithm cause...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace nrvq

#endif  // NRVQ_ERROR_H_
