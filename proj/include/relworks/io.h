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

#ifndef RELWORKS_IO_H_
#define RELWORKS_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace relworks::io {

using Json = nlohmann::json;

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written artifact.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

Json ReadJson(const std::filesystem::path& path);

// Pretty-printed with a trailing newline.
void WriteJsonAtomic(const std::filesystem::path& path, const Json& value);

// Blank lines are skipped. Parse errors report the 1-based line number.
std::vector<Json> ReadJsonLines(const std::filesystem::path& path);

void WriteJsonLinesAtomic(const std::filesystem::path& path,
                          const std::vector<Json>& rows);

std::string Sha256Hex(std::string_view data);

// Deterministic generator whose output sequence does not depend on the
// standard library implementation (unlike std::shuffle or the std
// distributions).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  // splitmix64
  uint64_t Next();

  // Uniform in [0, 1) with 53 bits of precision.
  double Uniform();

  // Uniform integer in [0, bound). `bound` must be positive.
  uint64_t Below(uint64_t bound);

  // Standard normal via Box-Muller.
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace relworks::io

#endif  // RELWORKS_IO_H_
