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

#include "relworks/plan.h"

#include <unordered_set>

#include "relworks/error.h"

namespace relworks::planner {

std::vector<std::string> ContentPlan::AllPapers() const {
  std::vector<std::string> out;
  for (const auto& b : branches) out.insert(out.end(), b.papers.begin(), b.papers.end());
  return out;
}

Json PlanToJson(const ContentPlan& plan) {
  Json branches = Json::array();
  for (const auto& b : plan.branches) {
    branches.push_back({{"papers", b.papers}, {"reason", b.reason.label}});
  }
  return Json{{"source_paper_id", plan.source_paper_id},
              {"branches", branches}};
}

ContentPlan PlanFromJson(const Json& j) {
  try {
    ContentPlan plan;
    plan.source_paper_id = j.value("source_paper_id", "");
    for (const Json& b : j.at("branches")) {
      PlanBranch branch;
      branch.papers = b.at("papers").get<std::vector<std::string>>();
      branch.reason.label = b.at("reason").get<std::string>();
      plan.branches.push_back(std::move(branch));
    }
    return plan;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidPlan, e.what());
  }
}

void ValidatePlan(const ContentPlan& plan, const reasons::Taxonomy& taxonomy) {
  if (plan.branches.empty()) throw Error(ErrorCode::kInvalidPlan, "no branches");
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < plan.branches.size(); ++i) {
    const auto& b = plan.branches[i];
    if (b.papers.empty()) {
      throw Error(ErrorCode::kInvalidPlan,
                  "branch " + std::to_string(i) + " is empty");
    }
    if (!taxonomy.Contains(b.reason.label)) {
      throw Error(ErrorCode::kInvalidPlan,
                  "branch " + std::to_string(i) + " has unknown reason " +
                      b.reason.label);
    }
    for (const auto& p : b.papers) {
      if (!seen.insert(p).second) {
        throw Error(ErrorCode::kInvalidPlan, "paper " + p + " appears twice");
      }
    }
  }
}

}  // namespace relworks::planner
