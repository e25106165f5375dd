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

// HTTP service over an immutable pipeline snapshot. Routes:
//   GET  /health
//   GET  /papers/{id}
//   POST /plan     {version, paper_id | x, setting, n?, candidates?, ...}
//   POST /realize  {version, plan, x | paper_id, mode?, existing?, branch?}
//   POST /update   {version, plan, existing, branch} or
//                  {version, paper_id, existing | existing_text, insert}
// Every body carries "version": 1. Domain errors map to 404 (unknown
// paper) and 422 (invalid setting, plan or alignment); a segment that fell
// back to the template realizer is marked with status 502 inside a 200
// response.

#ifndef RELWORKS_SERVICE_H_
#define RELWORKS_SERVICE_H_

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>

#include "relworks/error.h"
#include "relworks/pipeline.h"

namespace httplib {
class Server;
}  // namespace httplib

namespace relworks::service {

using Json = nlohmann::json;

inline constexpr int kApiVersion = 1;

struct HttpResponse {
  int status = 200;
  Json body;
};

struct ServiceOptions {
  std::string realizer = "template";
  std::chrono::milliseconds timeout = std::chrono::seconds(30);
  std::string static_dir;  // mounted at "/" when set
};

// "host:port"; throws kInvalidArgument.
std::pair<std::string, int> ParseAddress(std::string_view address);

int StatusFor(ErrorCode code);

class Service {
 public:
  Service(std::shared_ptr<const pipeline::Engine> engine,
          ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Replaces the snapshot; requests in flight keep the old one.
  void Swap(std::shared_ptr<const pipeline::Engine> engine);
  std::shared_ptr<const pipeline::Engine> snapshot() const;

  // Transport-independent request handling.
  HttpResponse Handle(std::string_view method, std::string_view path,
                      std::string_view body) const;

  // Binds the listener; port 0 picks a free port. Returns the bound port or
  // -1.
  int Bind(const std::string& host, int port);
  // Serves until Stop(); call after Bind().
  bool Run();
  void Stop();

 private:
  struct Snapshot {
    std::shared_ptr<const pipeline::Engine> engine;
    std::shared_ptr<const realize::Realizer> realizer;
  };

  Snapshot Current() const;
  HttpResponse Health(const Snapshot& s) const;
  HttpResponse Paper(const Snapshot& s, std::string_view id) const;
  HttpResponse Plan(const Snapshot& s, const Json& body) const;
  HttpResponse Realize(const Snapshot& s, const Json& body) const;
  HttpResponse Update(const Snapshot& s, const Json& body) const;

  ServiceOptions options_;
  mutable std::mutex mu_;
  Snapshot current_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace relworks::service

#endif  // RELWORKS_SERVICE_H_
