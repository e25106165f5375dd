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

#include "relworks/text.h"

#include "relworks/error.h"

namespace relworks {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kBadYear: return "BadYear";
    case ErrorCode::kEmptyAuthors: return "EmptyAuthors";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kEmptyEvaluationSplit: return "EmptyEvaluationSplit";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kNoCitations: return "NoCitations";
    case ErrorCode::kEmptyAbstract: return "EmptyAbstract";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kUnknownReason: return "UnknownReason";
    case ErrorCode::kUnknownCandidate: return "UnknownCandidate";
    case ErrorCode::kNoLegalAction: return "NoLegalAction";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kDuplicatePaper: return "DuplicatePaper";
    case ErrorCode::kEmptyBranch: return "EmptyBranch";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kAlignmentError: return "AlignmentError";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kNoReferences: return "NoReferences";
    case ErrorCode::kItemSetMismatch: return "ItemSetMismatch";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kInvalidPlan: return "InvalidPlan";
    case ErrorCode::kUnknownPaper: return "UnknownPaper";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kFormat: return "Format";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

namespace text {

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = ToLowerAscii(c);
  return out;
}

std::string_view Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && IsSpace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && IsSpace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string CollapseWhitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (IsSpace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> WordTokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (IsWordByte(static_cast<unsigned char>(c))) {
      cur.push_back(ToLowerAscii(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::string RemoveAll(std::string_view s, std::string_view needle) {
  if (needle.empty()) return std::string(s);
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t hit = s.find(needle, pos);
    if (hit == std::string_view::npos) break;
    out.append(s.substr(pos, hit - pos));
    pos = hit + needle.size();
  }
  out.append(s.substr(pos));
  return out;
}

size_t CountOccurrences(std::string_view s, std::string_view needle) {
  if (needle.empty()) return 0;
  size_t count = 0;
  size_t pos = 0;
  while ((pos = s.find(needle, pos)) != std::string_view::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace text
}  // namespace relworks
