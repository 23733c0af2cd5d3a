/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#ifndef NRVQ_TEXT_H_
#define NRVQ_TEXT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nrvq {

// Shortest decimal that parses back to the same binary64 value.
std::string FormatDouble(double value);

// Fixed notation with `digits` decimals, for human-facing output.
std::string FormatFixed(double value, int digits);

std::optional<double> ParseDouble(std::string_view text);
std::optional<int64_t> ParseInt(std::string_view text);

std::vector<std::string> Split(std::string_view text, char sep);
std::string_view Trim(std::string_view text);

}  // namespace nrvq

#endif  // NRVQ_TEXT_H_
