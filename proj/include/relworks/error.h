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

#ifndef RELWORKS_ERROR_H_
#define RELWORKS_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace relworks {

// Domain error categories. Every failure raised by the library carries one of
// these so that callers (CLI, HTTP service) can map it to an exit or status
// code without parsing messages.
enum class ErrorCode {
  kMissingField,
  kBadYear,
  kEmptyAuthors,
  kDuplicateId,
  kEmptyEvaluationSplit,
  kEmptyCorpus,
  kNoCitations,
  kEmptyAbstract,
  kEmptyList,
  kUnknownReason,
  kUnknownCandidate,
  kNoLegalAction,
  kNoCandidates,
  kEmptyTrainingSet,
  kNonFiniteLoss,
  kDuplicatePaper,
  kEmptyBranch,
  kTimeout,
  kProtocolError,
  kAlignmentError,
  kEmptyReference,
  kNoReferences,
  kItemSetMismatch,
  kEmptySet,
  kInvalidPlan,
  kUnknownPaper,
  kInvalidArgument,
  kFormat,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace relworks

#endif  // RELWORKS_ERROR_H_
