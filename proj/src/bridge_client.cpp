#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "sattrack/errors.hpp"
#include "sattrack/observer.hpp"

namespace sattrack {

namespace {

constexpr int kProto = 1;

}  // namespace

BridgeObserver::BridgeObserver(BridgeOptions options, const TranscriptHeader& header)
    : options_(std::move(options)) {
  if (options_.command.empty()) throw ConfigError("bridge command is empty");
  if (options_.timeout_ms <= 0) throw ConfigError("bridge timeout must be positive");

  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw BridgeClosed(std::string("socketpair failed: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw BridgeClosed(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", options_.command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(sv[1]);
  fd_ = sv[0];
  pid_ = pid;

  const auto& b = header.prompt_box;
  try {
    send({{"type", "init"},
          {"proto", kProto},
          {"width", header.width},
          {"height", header.height},
          {"prompt_box", {b.cx, b.cy, b.w, b.h}},
          {"sequence", header.sequence}});
    const nlohmann::json reply = receive();
    if (reply.value("type", std::string()) != "ready") throw ProtocolError("expected ready, got " + reply.dump());
    if (!reply.contains("proto") || reply.at("proto") != kProto) {
      throw ProtocolError("backend speaks an unsupported protocol version");
    }
  } catch (...) {
    shutdown_child();
    throw;
  }
}

BridgeObserver::~BridgeObserver() {
  try {
    close();
  } catch (...) {
  }
  shutdown_child();
}

void BridgeObserver::send(const nlohmann::json& message) {
  if (fd_ < 0) throw BridgeClosed("connection already closed");
  const std::string line = message.dump() + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = ::send(fd_, line.data() + off, line.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BridgeClosed(std::string("write to backend failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string BridgeObserver::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(options_.timeout_ms);
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()).count();
    if (left <= 0) throw BridgeTimeout("no reply within " + std::to_string(options_.timeout_ms) + " ms");
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(left));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw BridgeClosed(std::string("poll failed: ") + std::strerror(errno));
    }
    if (r == 0) continue;
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw BridgeClosed(std::string("read from backend failed: ") + std::strerror(errno));
    }
    if (n == 0) throw BridgeClosed("backend closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

nlohmann::json BridgeObserver::receive() {
  const std::string line = read_line();
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("backend sent a line that is not JSON: " + line.substr(0, 80));
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ProtocolError("backend message lacks a type: " + line.substr(0, 80));
  }
  return j;
}

ObserverFrame BridgeObserver::observe(std::int64_t frame_index, bool memory_admit_prev) {
  if (closed_) throw BridgeClosed("connection already closed");
  if (frame_index != next_index_) {
    throw OutOfOrderFrame("bridge expected frame " + std::to_string(next_index_) + ", got " +
                          std::to_string(frame_index));
  }
  send({{"type", "frame"}, {"index", frame_index}, {"memory_admit_prev", memory_admit_prev}});
  const nlohmann::json reply = receive();
  if (reply.at("type") != "candidates") throw ProtocolError("expected candidates, got " + reply.dump());
  if (!reply.contains("index") || !reply.at("index").is_number_integer() ||
      reply.at("index").get<std::int64_t>() != frame_index) {
    throw ProtocolError("reply index does not echo request " + std::to_string(frame_index));
  }
  if (!reply.contains("candidates") || !reply.at("candidates").is_array()) {
    throw ProtocolError("reply lacks a candidates array");
  }
  ObserverFrame f;
  f.frame_index = frame_index;
  if (reply.at("candidates").size() > kMaxCandidates) {
    throw ProtocolError("frame " + std::to_string(frame_index) + " has " +
                        std::to_string(reply.at("candidates").size()) + " candidates, at most 3 allowed");
  }
  for (const auto& c : reply.at("candidates")) f.candidates.push_back(candidate_from_json(c));
  validate_frame(f);
  ++next_index_;
  return f;
}

void BridgeObserver::close() {
  if (closed_ || fd_ < 0) return;
  closed_ = true;
  send({{"type", "close"}});
  const nlohmann::json reply = receive();
  if (reply.at("type") != "done") throw ProtocolError("expected done, got " + reply.dump());
}

void BridgeObserver::shutdown_child() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, &status, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    // The shell may have forked the backend; kill its whole group.
    ::kill(-pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

}  // namespace sattrack
