// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

// Bridge backend used by tests and demos. Modes:
//   echo      reply with the first request tensor
//   zero      reply with zeros of the first tensor's shape
//   bad-dims  reply with one extra row
//   nan       reply with NaN values
//   status    reply with status 7 and no payload
//   hang      read requests, never reply
//   lpips     kind 2: masked mean squared error and its gradient;
//             other kinds behave like echo
// With --dir DIR the backend polls DIR for req_*.bin instead of using stdio.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "zp3/error.hpp"
#include "zp3/wire.hpp"

namespace {

namespace fs = std::filesystem;

zp3::BridgeReply respond(const std::string& mode, const zp3::BridgeRequest& req) {
  zp3::BridgeReply rep;
  if (mode == "status") {
    rep.status = 7;
    rep.tensor = zp3::Image(1, 1, 1, zp3::Domain::kSampling, 0.0);
    return rep;
  }
  if (req.tensors.empty()) {
    rep.status = 1;
    rep.tensor = zp3::Image(1, 1, 1, zp3::Domain::kSampling, 0.0);
    return rep;
  }
  const zp3::Image& x = req.tensors[0];
  if (mode == "lpips" && req.kind == zp3::RequestKind::kPerceptual &&
      req.tensors.size() >= 3) {
    const zp3::Image& target = req.tensors[1];
    const zp3::Image& mask = req.tensors[2];
    const int w = x.width(), h = x.height(), c = x.channels();
    double count = 0.0;
    for (int py = 0; py < h; ++py) {
      for (int px = 0; px < w; ++px) count += mask.at(px, py, 0) > 0.5 ? c : 0;
    }
    count = std::max(count, 1.0);
    rep.tensor = zp3::Image(1 + w * h * c, 1, 1, zp3::Domain::kSampling, 0.0);
    double loss = 0.0;
    int k = 1;
    for (int py = 0; py < h; ++py) {
      for (int px = 0; px < w; ++px) {
        const bool on = mask.at(px, py, 0) > 0.5;
        for (int ch = 0; ch < c; ++ch, ++k) {
          if (!on) continue;
          const double d = x.at(px, py, ch) - target.at(px, py, ch);
          loss += d * d / count;
          rep.tensor.values()[k] = 2.0 * d / count;
        }
      }
    }
    rep.tensor.values()[0] = loss;
    return rep;
  }
  if (mode == "bad-dims") {
    rep.tensor = zp3::Image(x.width(), x.height() + 1, x.channels(),
                            zp3::Domain::kSampling, 0.0);
  } else if (mode == "nan") {
    rep.tensor = zp3::Image(x.width(), x.height(), x.channels(), zp3::Domain::kSampling,
                            std::numeric_limits<double>::quiet_NaN());
  } else if (mode == "zero") {
    rep.tensor = zp3::Image(x.width(), x.height(), x.channels(),
                            zp3::Domain::kSampling, 0.0);
  } else {
    rep.tensor = x;
  }
  return rep;
}

bool write_all(int fd, const std::vector<std::uint8_t>& bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + off, bytes.size() - off);
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

int serve_stdio(const std::string& mode) {
  std::vector<std::uint8_t> buf;
  std::uint8_t chunk[1 << 16];
  for (;;) {
    const auto want = zp3::request_length(buf.data(), buf.size());
    if (want && buf.size() >= *want) {
      std::vector<std::uint8_t> msg(buf.begin(), buf.begin() + *want);
      buf.erase(buf.begin(), buf.begin() + *want);
      const zp3::BridgeRequest req = zp3::decode_request(msg);
      if (mode == "hang") continue;
      if (!write_all(STDOUT_FILENO, zp3::encode_reply(respond(mode, req)))) return 1;
      continue;
    }
    const ssize_t n = ::read(STDIN_FILENO, chunk, sizeof(chunk));
    if (n == 0) return 0;
    if (n < 0) return 1;
    buf.insert(buf.end(), chunk, chunk + n);
  }
}

int serve_directory(const std::string& mode, const fs::path& dir, int max_requests) {
  int served = 0;
  while (max_requests <= 0 || served < max_requests) {
    bool idle = true;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("req_", 0) != 0 || entry.path().extension() != ".bin") continue;
      idle = false;
      std::ifstream in(entry.path(), std::ios::binary);
      std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                      std::istreambuf_iterator<char>());
      in.close();
      fs::remove(entry.path(), ec);
      ++served;
      if (mode == "hang") continue;
      const zp3::BridgeRequest req = zp3::decode_request(bytes);
      const auto out = zp3::encode_reply(respond(mode, req));
      const std::string id = name.substr(4);  // "<pid>_<n>.bin"
      const fs::path tmp = dir / ("rep_" + id + ".tmp");
      {
        std::ofstream o(tmp, std::ios::binary);
        o.write(reinterpret_cast<const char*>(out.data()),
                static_cast<std::streamsize>(out.size()));
      }
      fs::rename(tmp, dir / ("rep_" + id));
    }
    if (idle) std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string mode = "echo";
  std::string dir;
  int max_requests = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--dir" && i + 1 < argc) {
      dir = argv[++i];
    } else if (arg == "--max-requests" && i + 1 < argc) {
      max_requests = std::atoi(argv[++i]);
    } else if (arg.rfind("--", 0) != 0) {
      mode = arg;
    } else {
      std::fprintf(stderr, "usage: %s [MODE] [--dir DIR [--max-requests N]]\n", argv[0]);
      return 2;
    }
  }
  try {
    return dir.empty() ? serve_stdio(mode) : serve_directory(mode, dir, max_requests);
  } catch (const zp3::Error& e) {
    std::fprintf(stderr, "zp3_echo_backend: %s\n", e.what());
    return 1;
  }
}
