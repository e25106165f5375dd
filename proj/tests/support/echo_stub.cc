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

// Line-delimited JSON peer for transport tests. Modes:
//   echo      realize requests get their prompt back as text; classify
//             requests get all mass on the label named by RELWORKS_STUB_LABEL
//             (default PSim)
//   garbage   answers every line with text that is not JSON
//   silent    reads requests and never answers
//   version   answers with an unsupported protocol version

#include <cstdlib>
#include <iostream>
#include <string>

#include "json.hpp"

int main(int argc, char** argv) {
  std::string mode = argc > 1 ? argv[1] : "echo";
  const char* env = std::getenv("RELWORKS_STUB_LABEL");
  std::string label = env != nullptr ? env : "PSim";
  std::string line;
  while (std::getline(std::cin, line)) {
    if (mode == "silent") continue;
    if (mode == "garbage") {
      std::cout << "not json at all" << std::endl;
      continue;
    }
    nlohmann::json req = nlohmann::json::parse(line, nullptr, false);
    nlohmann::json reply{{"version", mode == "version" ? 99 : 1}};
    if (req.is_object() && req.contains("labels")) {
      nlohmann::json scores = nlohmann::json::array();
      for (const auto& l : req["labels"]) scores.push_back(l == label ? 1.0 : 0.0);
      reply["scores"] = scores;
    } else if (req.is_object()) {
      reply["text"] = req.value("prompt", "");
    }
    std::cout << reply.dump() << std::endl;
  }
  return 0;
}
