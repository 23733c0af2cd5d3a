/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#ifndef NRVQ_CLI_H_
#define NRVQ_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace nrvq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitTraining = 3;

// args[0] is the program name. Results go to out, diagnostics to err.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace nrvq

#endif  // NRVQ_CLI_H_
