/*
 *  Copyright (c) 2026 The nrvq project authors. All Rights Reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source
 *  tree.
 */

#include <iostream>
#include <string>
#include <vector>

#include "nrvq/cli.h"

int main(int argc, char** argv) {
  return nrvq::RunCli(std::vector<std::string>(argv, argv + argc), std::cout,
                      std::cerr);
}
