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

// Small ASCII-oriented string helpers shared by every module. Bytes >= 0x80
// are treated as word characters so UTF-8 names and words survive
// tokenization intact.

#ifndef RELWORKS_TEXT_H_
#define RELWORKS_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace relworks::text {

inline bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline char ToLowerAscii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string ToLower(std::string_view s);

std::string_view Trim(std::string_view s);

// Replaces every run of whitespace with a single space and trims both ends.
std::string CollapseWhitespace(std::string_view s);

// Lowercased maximal runs of word bytes. Punctuation and whitespace separate
// tokens and are discarded.
std::vector<std::string> WordTokens(std::string_view s);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

bool StartsWith(std::string_view s, std::string_view prefix);

// Removes every occurrence of `needle` from `s`.
std::string RemoveAll(std::string_view s, std::string_view needle);

// Number of non-overlapping occurrences of `needle` in `s`.
size_t CountOccurrences(std::string_view s, std::string_view needle);

}  // namespace relworks::text

#endif  // RELWORKS_TEXT_H_
