// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3app/cli.hpp"

int main(int argc, char** argv) { return zp3app::run_cli(argc, argv); }
