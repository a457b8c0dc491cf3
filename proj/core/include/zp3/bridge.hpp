// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "zp3/predictor.hpp"
#include "zp3/wire.hpp"

namespace zp3 {

enum class Transport { kStdioSubprocess, kDirectoryHandoff };

const char* to_string(Transport transport);
Transport transport_from_string(const std::string& name);

struct BridgeConfig {
  Transport transport = Transport::kStdioSubprocess;
  /// Backend executable and its arguments (stdio transport).
  std::string executable;
  std::vector<std::string> args;
  /// Shared directory (directory-handoff transport).
  std::string directory;
  double timeout_seconds = 30.0;
};

void validate(const BridgeConfig& cfg);

/// One connection to an external backend. Calls are serialized; hold
/// several clients for parallel requests. A stdio backend is launched on
/// first use and relaunched after a timeout.
class BridgeClient {
 public:
  explicit BridgeClient(BridgeConfig cfg);
  ~BridgeClient();
  BridgeClient(const BridgeClient&) = delete;
  BridgeClient& operator=(const BridgeClient&) = delete;

  /// Raw exchange. Throws BridgeTimeout, ProtocolError or BackendError.
  BridgeReply call(const BridgeRequest& request);

  /// Noise prediction with reply validation: status must be 0, the tensor
  /// must match x_t's shape and be finite.
  Image predict(RequestKind kind, int t, const Image& x_t,
                std::span<const Image> condition);

  const BridgeConfig& config() const { return cfg_; }

 private:
  struct Process;

  BridgeReply call_stdio(const std::vector<std::uint8_t>& payload);
  BridgeReply call_directory(const std::vector<std::uint8_t>& payload);
  void launch();
  void shutdown();

  BridgeConfig cfg_;
  std::mutex mutex_;
  std::unique_ptr<Process> process_;
};

/// One-shot prediction through a fresh client.
Image bridge_predict(const Image& x_t, int t, std::span<const Image> condition,
                     const BridgeConfig& cfg,
                     RequestKind kind = RequestKind::kMvd);

class BridgePredictor final : public NoisePredictor {
 public:
  BridgePredictor(std::shared_ptr<BridgeClient> client, RequestKind kind);

  Image predict(const Image& x_t, int t,
                std::span<const Image> condition) const override;

 private:
  std::shared_ptr<BridgeClient> client_;
  RequestKind kind_;
};

struct PerceptualResult {
  double loss = 0.0;
  Image grad;  // d loss / d render, shaped like the render
};

/// Delegates a perceptual loss (for example LPIPS) to the backend.
PerceptualResult bridge_perceptual(BridgeClient& client, const Image& render,
                                   const Image& target, const Image& mask);

}  // namespace zp3
