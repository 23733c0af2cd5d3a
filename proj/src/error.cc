/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include "nrvq/error.h"

namespace nrvq {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorCode::kTruncatedInput: return "TruncatedInput";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidClip: return "InvalidClip";
    case ErrorCode::kMtuTooSmall: return "MtuTooSmall";
    case ErrorCode::kGeometryMismatch: return "GeometryMismatch";
    case ErrorCode::kAlignmentError: return "AlignmentError";
    case ErrorCode::kDegenerateFeature: return "DegenerateFeature";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kBadSplit: return "BadSplit";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kTrainingError: return "TrainingError";
    case ErrorCode::kDimensionError: return "DimensionError";
    case ErrorCode::kUndefinedCorrelation: return "UndefinedCorrelation";
    case ErrorCode::kUsageError: return "UsageError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace nrvq
