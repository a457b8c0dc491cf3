// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <thread>

#include "byte_io.hpp"
#include "zp3/error.hpp"

namespace zp3 {
namespace {

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g s", s);
  return buf;
}


using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  const auto left =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

Clock::time_point deadline_after(double seconds) {
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(seconds));
}

}  // namespace

const char* to_string(Transport transport) {
  return transport == Transport::kStdioSubprocess ? "stdio-subprocess"
                                                  : "directory-handoff";
}

Transport transport_from_string(const std::string& name) {
  if (name == "stdio-subprocess") return Transport::kStdioSubprocess;
  if (name == "directory-handoff") return Transport::kDirectoryHandoff;
  throw InvalidArgument("unknown bridge transport '" + name + "'");
}

void validate(const BridgeConfig& cfg) {
  if (!(cfg.timeout_seconds > 0.0)) {
    throw InvalidArgument("bridge timeout must be > 0");
  }
  if (cfg.transport == Transport::kStdioSubprocess && cfg.executable.empty()) {
    throw InvalidArgument("stdio bridge needs an executable");
  }
  if (cfg.transport == Transport::kDirectoryHandoff && cfg.directory.empty()) {
    throw InvalidArgument("directory bridge needs a directory");
  }
}

struct BridgeClient::Process {
  pid_t pid = -1;
  int fd = -1;
};

BridgeClient::BridgeClient(BridgeConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
}

BridgeClient::~BridgeClient() { shutdown(); }

void BridgeClient::shutdown() {
  if (!process_) return;
  if (process_->fd >= 0) ::close(process_->fd);
  if (process_->pid > 0) {
    ::kill(process_->pid, SIGKILL);
    int status = 0;
    ::waitpid(process_->pid, &status, 0);
  }
  process_.reset();
}

void BridgeClient::launch() {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw BackendError(std::string("socketpair failed: ") + std::strerror(errno));
  }
  // Reports exec failure from the child; closed on successful exec.
  int status_pipe[2];
  if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw BackendError(std::string("pipe failed: ") + std::strerror(errno));
  }
  std::vector<std::string> argv_store;
  argv_store.push_back(cfg_.executable);
  argv_store.insert(argv_store.end(), cfg_.args.begin(), cfg_.args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    ::close(status_pipe[0]);
    ::close(status_pipe[1]);
    throw BackendError("fork failed");
  }
  if (pid == 0) {
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execvp(argv[0], argv.data());
    const int err = errno;
    [[maybe_unused]] auto n = ::write(status_pipe[1], &err, sizeof(err));
    ::_exit(127);
  }
  ::close(sv[1]);
  ::close(status_pipe[1]);
  int child_errno = 0;
  const ssize_t got = ::read(status_pipe[0], &child_errno, sizeof(child_errno));
  ::close(status_pipe[0]);
  if (got > 0) {
    ::close(sv[0]);
    int status = 0;
    ::waitpid(pid, &status, 0);
    throw BackendError("cannot launch bridge backend '" + cfg_.executable +
                       "': " + std::strerror(child_errno));
  }
  process_ = std::make_unique<Process>();
  process_->pid = pid;
  process_->fd = sv[0];
}

BridgeReply BridgeClient::call_stdio(const std::vector<std::uint8_t>& payload) {
  if (!process_) launch();
  const auto deadline = deadline_after(cfg_.timeout_seconds);
  const int fd = process_->fd;
  auto timeout = [&] {
    shutdown();
    return BridgeTimeout("bridge backend did not answer within " +
                         seconds_text(cfg_.timeout_seconds));
  };
  auto lost = [&](const char* what) {
    shutdown();
    return BackendError(std::string("bridge backend ") + what);
  };

  std::size_t sent = 0;
  while (sent < payload.size()) {
    pollfd p{fd, POLLOUT, 0};
    const int r = ::poll(&p, 1, remaining_ms(deadline));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) throw timeout();
    const ssize_t n = ::send(fd, payload.data() + sent, payload.size() - sent,
                             MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw lost("closed its input");
    }
    sent += static_cast<std::size_t>(n);
  }

  std::vector<std::uint8_t> buf;
  std::uint8_t chunk[65536];
  for (;;) {
    std::optional<std::size_t> want;
    try {
      want = reply_length(buf.data(), buf.size());
    } catch (const ProtocolError&) {
      shutdown();
      throw;
    }
    if (want && buf.size() >= *want) {
      if (buf.size() > *want) {
        shutdown();
        throw ProtocolError("unexpected bytes after bridge reply");
      }
      return decode_reply(buf);
    }
    pollfd p{fd, POLLIN, 0};
    const int r = ::poll(&p, 1, remaining_ms(deadline));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) throw timeout();
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw lost("connection failed");
    }
    if (n == 0) throw lost("exited before replying");
    buf.insert(buf.end(), chunk, chunk + n);
  }
}

BridgeReply BridgeClient::call_directory(
    const std::vector<std::uint8_t>& payload) {
  namespace fs = std::filesystem;
  static std::atomic<std::uint64_t> counter{0};
  const std::string id =
      std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const fs::path dir(cfg_.directory);
  const fs::path req = dir / ("req_" + id + ".bin");
  const fs::path rep = dir / ("rep_" + id + ".bin");
  const fs::path tmp = dir / ("req_" + id + ".bin.tmp");
  const auto deadline = deadline_after(cfg_.timeout_seconds);
  try {
    detail::write_file_bytes(tmp.string(), payload);
    fs::rename(tmp, req);
  } catch (const std::exception& e) {
    throw BridgeTimeout("cannot hand off request in " + cfg_.directory + ": " +
                        e.what());
  }
  for (;;) {
    std::error_code ec;
    if (fs::exists(rep, ec)) {
      const auto bytes = detail::read_file_bytes(rep.string());
      const auto want = reply_length(bytes.data(), bytes.size());
      if (want && bytes.size() >= *want) {
        fs::remove(rep, ec);
        return decode_reply(bytes);
      }
    }
    if (Clock::now() >= deadline) {
      fs::remove(req, ec);
      throw BridgeTimeout("no reply in " + cfg_.directory + " within " +
                          seconds_text(cfg_.timeout_seconds));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
}

BridgeReply BridgeClient::call(const BridgeRequest& request) {
  const auto payload = encode_request(request);
  std::lock_guard lock(mutex_);
  return cfg_.transport == Transport::kStdioSubprocess ? call_stdio(payload)
                                                       : call_directory(payload);
}

Image BridgeClient::predict(RequestKind kind, int t, const Image& x_t,
                            std::span<const Image> condition) {
  if (t < 0) throw InvalidArgument("negative timestep");
  BridgeRequest req;
  req.kind = kind;
  req.t = static_cast<std::uint32_t>(t);
  req.tensors.push_back(x_t);
  req.tensors.insert(req.tensors.end(), condition.begin(), condition.end());
  BridgeReply reply = call(req);
  if (reply.status != 0) {
    throw BackendError("bridge backend reported status " +
                       std::to_string(reply.status));
  }
  if (!reply.tensor.same_shape(x_t)) {
    throw ProtocolError("bridge reply shape does not match x_t");
  }
  for (double v : reply.tensor.values()) {
    if (!std::isfinite(v)) throw BackendError("bridge reply has non-finite values");
  }
  reply.tensor.set_domain(Domain::kSampling);
  return std::move(reply.tensor);
}

Image bridge_predict(const Image& x_t, int t, std::span<const Image> condition,
                     const BridgeConfig& cfg, RequestKind kind) {
  BridgeClient client(cfg);
  return client.predict(kind, t, x_t, condition);
}

BridgePredictor::BridgePredictor(std::shared_ptr<BridgeClient> client,
                                 RequestKind kind)
    : client_(std::move(client)), kind_(kind) {
  if (!client_) throw InvalidArgument("bridge predictor needs a client");
}

Image BridgePredictor::predict(const Image& x_t, int t,
                               std::span<const Image> condition) const {
  return client_->predict(kind_, t, x_t, condition);
}

PerceptualResult bridge_perceptual(BridgeClient& client, const Image& render,
                                   const Image& target, const Image& mask) {
  require_same_shape(render, target, "bridge_perceptual");
  BridgeRequest req;
  req.kind = RequestKind::kPerceptual;
  req.tensors = {render, target, mask};
  const BridgeReply reply = client.call(req);
  if (reply.status != 0) {
    throw BackendError("perceptual backend reported status " +
                       std::to_string(reply.status));
  }
  const std::size_t n = render.size();
  if (reply.tensor.height() != 1 || reply.tensor.channels() != 1 ||
      reply.tensor.size() != n + 1) {
    throw ProtocolError("perceptual reply must be 1 x (1 + H*W*C) x 1");
  }
  PerceptualResult out;
  out.loss = reply.tensor[0];
  out.grad = Image(render.width(), render.height(), render.channels(),
                   render.domain());
  for (std::size_t i = 0; i < n; ++i) out.grad[i] = reply.tensor[i + 1];
  if (!std::isfinite(out.loss)) throw BackendError("non-finite perceptual loss");
  for (double v : out.grad.values()) {
    if (!std::isfinite(v)) throw BackendError("non-finite perceptual gradient");
  }
  return out;
}

}  // namespace zp3
