// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/error.hpp"

namespace zp3 {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kDegenerateTimestep: return "degenerate-timestep";
    case ErrorKind::kOptimizationFailure: return "optimization-failure";
    case ErrorKind::kBridgeTimeout: return "bridge-timeout";
    case ErrorKind::kProtocolError: return "protocol-error";
    case ErrorKind::kBackendError: return "backend-error";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

void rethrow_with_context(const Error& e, const std::string& prefix) {
  const std::string what = prefix + e.what();
  switch (e.kind()) {
    case ErrorKind::kInvalidArgument: throw InvalidArgument(what);
    case ErrorKind::kDegenerateTimestep: throw DegenerateTimestep(what);
    case ErrorKind::kOptimizationFailure: throw OptimizationFailure(what);
    case ErrorKind::kBridgeTimeout: throw BridgeTimeout(what);
    case ErrorKind::kProtocolError: throw ProtocolError(what);
    case ErrorKind::kBackendError: throw BackendError(what);
    case ErrorKind::kIo: throw IoError(what);
  }
  throw Error(e.kind(), what);
}

}  // namespace zp3
