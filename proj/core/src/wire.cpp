// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/wire.hpp"

#include <limits>
#include <string_view>

#include "byte_io.hpp"
#include "zp3/error.hpp"

namespace zp3 {
namespace {

// Caps a single tensor at 2^28 values so corrupt headers cannot trigger
// huge allocations.
constexpr std::uint64_t kMaxTensorValues = std::uint64_t{1} << 28;

void put_tensor(detail::ByteWriter& w, const Image& img) {
  w.u32(static_cast<std::uint32_t>(img.height()));
  w.u32(static_cast<std::uint32_t>(img.width()));
  w.u32(static_cast<std::uint32_t>(img.channels()));
  for (double v : img.values()) w.f32(static_cast<float>(v));
}

std::uint64_t tensor_values(std::uint32_t h, std::uint32_t w, std::uint32_t c) {
  const std::uint64_t n = std::uint64_t{h} * w * c;
  if (n > kMaxTensorValues) throw ProtocolError("tensor too large");
  if ((h == 0 || w == 0 || c == 0) && n != 0) throw ProtocolError("bad dims");
  return n;
}

Image get_tensor(detail::ByteReader& r) {
  const std::uint32_t h = r.u32(), w = r.u32(), c = r.u32();
  const std::uint64_t n = tensor_values(h, w, c);
  if (h > static_cast<std::uint32_t>(std::numeric_limits<int>::max()) ||
      w > static_cast<std::uint32_t>(std::numeric_limits<int>::max()) ||
      c > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw ProtocolError("tensor dimension overflow");
  }
  r.need(n * 4);
  Image img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c),
            Domain::kSampling);
  for (std::uint64_t i = 0; i < n; ++i) img[i] = r.f32();
  return img;
}

// Reads a u32 at `offset` if available.
std::optional<std::uint32_t> peek_u32(const std::uint8_t* data,
                                      std::size_t size, std::size_t offset) {
  if (offset + 4 > size) return std::nullopt;
  detail::ByteReader r(data + offset, 4);
  return r.u32();
}

// Walks `count` tensors starting at `offset`; returns the end offset.
std::optional<std::size_t> tensors_end(const std::uint8_t* data,
                                       std::size_t size, std::size_t offset,
                                       std::uint64_t count) {
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto h = peek_u32(data, size, offset);
    const auto w = peek_u32(data, size, offset + 4);
    const auto c = peek_u32(data, size, offset + 8);
    if (!h || !w || !c) return std::nullopt;
    offset += 12 + tensor_values(*h, *w, *c) * 4;
  }
  return offset;
}

}  // namespace

std::vector<std::uint8_t> encode_request(const BridgeRequest& request) {
  if (request.tensors.empty()) {
    throw InvalidArgument("bridge request needs at least the x_t tensor");
  }
  detail::ByteWriter w;
  w.magic("ZP3B");
  w.u32(kBridgeProtocolVersion);
  w.u8(static_cast<std::uint8_t>(request.kind));
  w.u32(request.t);
  w.u32(static_cast<std::uint32_t>(request.tensors.size() - 1));
  for (const auto& t : request.tensors) put_tensor(w, t);
  return w.take();
}

BridgeRequest decode_request(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes.data(), bytes.size());
  if (!r.magic("ZP3B")) throw ProtocolError("bad request magic");
  if (r.u32() != kBridgeProtocolVersion) {
    throw ProtocolError("unsupported bridge protocol version");
  }
  BridgeRequest req;
  const std::uint8_t kind = r.u8();
  if (kind > 2) throw ProtocolError("unknown request kind");
  req.kind = static_cast<RequestKind>(kind);
  req.t = r.u32();
  const std::uint32_t n_condition = r.u32();
  if (n_condition > 4096) throw ProtocolError("too many condition tensors");
  for (std::uint32_t i = 0; i <= n_condition; ++i) {
    req.tensors.push_back(get_tensor(r));
  }
  if (r.remaining() != 0) throw ProtocolError("trailing bytes in request");
  return req;
}

std::vector<std::uint8_t> encode_reply(const BridgeReply& reply) {
  detail::ByteWriter w;
  w.magic("ZP3R");
  w.u32(reply.status);
  put_tensor(w, reply.tensor);
  return w.take();
}

BridgeReply decode_reply(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes.data(), bytes.size());
  if (!r.magic("ZP3R")) throw ProtocolError("bad reply magic");
  BridgeReply reply;
  reply.status = r.u32();
  reply.tensor = get_tensor(r);
  if (r.remaining() != 0) throw ProtocolError("trailing bytes in reply");
  return reply;
}

std::optional<std::size_t> request_length(const std::uint8_t* data,
                                          std::size_t size) {
  constexpr std::size_t kHeader = 4 + 4 + 1 + 4 + 4;
  if (size < 4) return std::nullopt;
  if (std::string_view(reinterpret_cast<const char*>(data), 4) != "ZP3B") {
    throw ProtocolError("bad request magic");
  }
  const auto n = peek_u32(data, size, 13);
  if (!n) return std::nullopt;
  return tensors_end(data, size, kHeader, std::uint64_t{*n} + 1);
}

std::optional<std::size_t> reply_length(const std::uint8_t* data,
                                        std::size_t size) {
  if (size < 4) return std::nullopt;
  if (std::string_view(reinterpret_cast<const char*>(data), 4) != "ZP3R") {
    throw ProtocolError("bad reply magic");
  }
  return tensors_end(data, size, 8, 1);
}

}  // namespace zp3
