// Copyright 2026 The Relworks Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relworks/transport.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "httplib.h"
#include "relworks/error.h"
#include "relworks/text.h"

namespace relworks::transport {
namespace {

Json ParseObject(const std::string& body, std::string_view who) {
  Json j = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kProtocolError,
                std::string(who) + " returned a non-object body");
  }
  return j;
}

void CloseFd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

HttpEndpoint::HttpEndpoint(std::string base_url, std::string path,
                           std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), path_(std::move(path)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

Json HttpEndpoint::Call(const Json& request) {
  httplib::Client client(base_url_);
  if (!client.is_valid()) {
    throw Error(ErrorCode::kTimeout, "cannot reach " + base_url_);
  }
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  auto res = client.Post(path_, request.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kTimeout,
                base_url_ + path_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProtocolError,
                base_url_ + path_ + " answered status " +
                    std::to_string(res->status));
  }
  return ParseObject(res->body, base_url_ + path_);
}

StdioEndpoint::StdioEndpoint(std::string command,
                             std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

StdioEndpoint::~StdioEndpoint() { Reap(); }

void StdioEndpoint::Spawn() {
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (::pipe(in_pipe) != 0) {
    throw Error(ErrorCode::kTimeout, std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorCode::kTimeout, std::string("pipe: ") + std::strerror(errno));
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw Error(ErrorCode::kTimeout, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  buffer_.clear();
}

void StdioEndpoint::Reap() {
  CloseFd(to_child_);
  CloseFd(from_child_);
  if (pid_ > 0) {
    ::kill(pid_, SIGTERM);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
  pid_ = -1;
  buffer_.clear();
}

Json StdioEndpoint::Call(const Json& request) {
  std::lock_guard<std::mutex> lock(mu_);
  if (pid_ < 0) Spawn();

  std::string line = request.dump() + "\n";
  // A dead child turns writes into EPIPE instead of killing the process.
  struct sigaction ignore {};
  struct sigaction previous {};
  ignore.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ignore, &previous);
  size_t written = 0;
  while (written < line.size()) {
    ssize_t n = ::write(to_child_, line.data() + written, line.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      ::sigaction(SIGPIPE, &previous, nullptr);
      Reap();
      throw Error(ErrorCode::kTimeout, "stdio peer closed its input: " + command_);
    }
    written += static_cast<size_t>(n);
  }
  ::sigaction(SIGPIPE, &previous, nullptr);

  auto deadline = std::chrono::steady_clock::now() + timeout_;
  size_t newline;
  while ((newline = buffer_.find('\n')) == std::string::npos) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      Reap();
      throw Error(ErrorCode::kTimeout, "no answer from " + command_);
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) continue;
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      Reap();
      throw Error(ErrorCode::kTimeout, "stdio peer exited: " + command_);
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
  std::string reply = buffer_.substr(0, newline);
  buffer_.erase(0, newline + 1);
  return ParseObject(reply, command_);
}

std::unique_ptr<JsonEndpoint> MakeEndpoint(std::string_view spec,
                                           std::string http_path,
                                           std::chrono::milliseconds timeout) {
  constexpr std::string_view kStdio = "stdio:";
  if (text::StartsWith(spec, kStdio)) {
    std::string command(text::Trim(spec.substr(kStdio.size())));
    if (command.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "stdio endpoint without command");
    }
    return std::make_unique<StdioEndpoint>(std::move(command), timeout);
  }
  if (text::StartsWith(spec, "http://") || text::StartsWith(spec, "https://")) {
    return std::make_unique<HttpEndpoint>(std::string(spec), std::move(http_path),
                                          timeout);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "endpoint must start with http://, https:// or stdio:, got " +
                  std::string(spec));
}

}  // namespace relworks::transport
