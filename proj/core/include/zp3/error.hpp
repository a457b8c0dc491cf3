// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace zp3 {

enum class ErrorKind {
  kInvalidArgument,
  kDegenerateTimestep,
  kOptimizationFailure,
  kBridgeTimeout,
  kProtocolError,
  kBackendError,
  kIo,
};

const char* to_string(ErrorKind kind);

/// Base of every exception thrown by the library. Callers that need to map
/// failures onto exit codes switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

class DegenerateTimestep : public Error {
 public:
  explicit DegenerateTimestep(const std::string& what)
      : Error(ErrorKind::kDegenerateTimestep, what) {}
};

class OptimizationFailure : public Error {
 public:
  explicit OptimizationFailure(const std::string& what)
      : Error(ErrorKind::kOptimizationFailure, what) {}
};

class BridgeTimeout : public Error {
 public:
  explicit BridgeTimeout(const std::string& what)
      : Error(ErrorKind::kBridgeTimeout, what) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what)
      : Error(ErrorKind::kProtocolError, what) {}
};

class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what)
      : Error(ErrorKind::kBackendError, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

/// Rethrows `e` as the same kind with `prefix` prepended to the message.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& prefix);

}  // namespace zp3
