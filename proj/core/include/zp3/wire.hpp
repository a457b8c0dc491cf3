// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "zp3/image.hpp"

namespace zp3 {

inline constexpr std::uint32_t kBridgeProtocolVersion = 1;

enum class RequestKind : std::uint8_t {
  kMvd = 0,
  kHf = 1,
  /// Perceptual loss: tensors are (render, target, mask); the reply is a
  /// 1 x (1 + H*W*3) x 1 tensor holding the loss then d loss / d render.
  kPerceptual = 2,
};

/// Request: "ZP3B", u32 version, u8 kind, u32 t, u32 n_condition, then
/// n_condition + 1 tensors, the first being x_t. A tensor is
/// u32 H, u32 W, u32 C and H*W*C f32 values, row-major interleaved.
struct BridgeRequest {
  RequestKind kind = RequestKind::kMvd;
  std::uint32_t t = 0;
  std::vector<Image> tensors;
};

/// Reply: "ZP3R", u32 status (0 = ok), one tensor.
struct BridgeReply {
  std::uint32_t status = 0;
  Image tensor;
};

std::vector<std::uint8_t> encode_request(const BridgeRequest& request);
BridgeRequest decode_request(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_reply(const BridgeReply& reply);
BridgeReply decode_reply(const std::vector<std::uint8_t>& bytes);

/// Total byte length of the message at the front of `bytes` once its header
/// is readable, or nullopt if more bytes are needed to tell. Throws
/// ProtocolError on a bad magic.
std::optional<std::size_t> request_length(const std::uint8_t* data,
                                          std::size_t size);
std::optional<std::size_t> reply_length(const std::uint8_t* data,
                                        std::size_t size);

}  // namespace zp3
