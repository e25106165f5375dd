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

// Command-line entry point. Subcommands: ingest, index, derive-plans,
// train-planner, plan, realize, update, evaluate, serve. Exit status is 0 on
// success, 1 on a domain error and 2 on a usage error. Every run writes a
// manifest with its configuration, seeds and input/output hashes.

#ifndef RELWORKS_CLI_H_
#define RELWORKS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace relworks::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name.
int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace relworks::cli

#endif  // RELWORKS_CLI_H_
