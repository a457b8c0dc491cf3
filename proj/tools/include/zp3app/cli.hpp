// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>
#include <string>

namespace zp3app {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitOptimization = 3,
  kExitBridge = 4,
};

/// Runs the zp3 command line. Never throws; failures map to ExitCode.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace zp3app
