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

// Request/response JSON transports for out-of-process components: HTTP POST
// or line-delimited JSON over a child process's stdin/stdout.

#ifndef RELWORKS_TRANSPORT_H_
#define RELWORKS_TRANSPORT_H_

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "relworks/io.h"

namespace relworks::transport {

using Json = nlohmann::json;

class JsonEndpoint {
 public:
  virtual ~JsonEndpoint() = default;
  // Throws kTimeout when the peer cannot be reached or does not answer in
  // time, kProtocolError when the answer is not a JSON object.
  virtual Json Call(const Json& request) = 0;
};

class HttpEndpoint : public JsonEndpoint {
 public:
  // `base_url` like "http://127.0.0.1:8080".
  HttpEndpoint(std::string base_url, std::string path,
               std::chrono::milliseconds timeout);
  Json Call(const Json& request) override;

 private:
  std::string base_url_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

// Spawns `/bin/sh -c command` once and exchanges one line per request.
// Calls are serialized; the child is terminated on destruction.
class StdioEndpoint : public JsonEndpoint {
 public:
  StdioEndpoint(std::string command, std::chrono::milliseconds timeout);
  ~StdioEndpoint() override;
  StdioEndpoint(const StdioEndpoint&) = delete;
  StdioEndpoint& operator=(const StdioEndpoint&) = delete;

  Json Call(const Json& request) override;

 private:
  void Spawn();
  void Reap();

  std::string command_;
  std::chrono::milliseconds timeout_;
  std::mutex mu_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// "http://..." / "https://..." -> HttpEndpoint posting to `http_path`;
// "stdio:<command>" -> StdioEndpoint.
std::unique_ptr<JsonEndpoint> MakeEndpoint(std::string_view spec,
                                           std::string http_path,
                                           std::chrono::milliseconds timeout);

}  // namespace relworks::transport

#endif  // RELWORKS_TRANSPORT_H_
