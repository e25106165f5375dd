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

#ifndef RELWORKS_PLAN_H_
#define RELWORKS_PLAN_H_

#include <string>
#include <vector>

#include "relworks/io.h"
#include "relworks/reasons.h"

namespace relworks::planner {

using Json = nlohmann::json;

// One group of cited papers sharing a citation reason.
struct PlanBranch {
  std::vector<std::string> papers;
  reasons::Reason reason;

  bool operator==(const PlanBranch&) const = default;
};

// Depth-2 tree: plan -> branches -> papers.
struct ContentPlan {
  std::string source_paper_id;
  std::vector<PlanBranch> branches;

  bool operator==(const ContentPlan&) const = default;

  std::vector<std::string> AllPapers() const;
};

Json PlanToJson(const ContentPlan& plan);
// Structural parse only; see ValidatePlan.
ContentPlan PlanFromJson(const Json& j);

// kInvalidPlan unless every branch is non-empty, no id repeats anywhere and
// every reason belongs to the taxonomy.
void ValidatePlan(const ContentPlan& plan, const reasons::Taxonomy& taxonomy);

}  // namespace relworks::planner

#endif  // RELWORKS_PLAN_H_
