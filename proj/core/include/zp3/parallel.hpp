// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace zp3 {

/// Worker count: ZP3_THREADS if set and positive, else hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, n). Work items must write disjoint outputs;
/// callers reduce per-item results in index order so the result does not
/// depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace zp3
