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

// Deterministic synthetic data: a small hand-written corpus with its answer
// key, update cases derived from it, planted topic clusters for planner
// training and labeled sentence/abstract pairs for the segmenter and the
// reason classifier.

#ifndef RELWORKS_SYNTHETIC_H_
#define RELWORKS_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "relworks/corpus.h"
#include "relworks/planner.h"
#include "relworks/segment.h"

namespace relworks::synthetic {

struct AnswerKey {
  std::string paper_id;
  planner::ContentPlan plan;
  segment::SegmentStarts segment_starts;  // includes 0
  size_t leading_unaligned = 0;
  size_t merged_segments = 0;
};

struct MiniCorpus {
  std::vector<corpus::PaperRecord> records;
  std::vector<AnswerKey> answers;  // one per record with related work
};

// Twenty papers from 2018 to 2020, six of them with a related-work section.
MiniCorpus BuildMiniCorpus();

// The related-work section of `citing` rendered without `omitted`.
struct RenderedSection {
  std::string text;
  AnswerKey answer;
};
RenderedSection RenderSection(const std::string& citing,
                              const std::string& omitted = "");

struct UpdateCase {
  std::string paper_id;
  std::string inserted;
  std::string existing_text;               // section without `inserted`
  segment::SegmentStarts existing_starts;
  std::string gold_text;                   // full section
  planner::ContentPlan gold_plan;
};

// One case per (citing paper, cited paper) whose removal leaves at least one
// branch, in corpus order; at most `limit`.
std::vector<UpdateCase> BuildUpdateCases(size_t limit = 20);

struct PlantedClusters {
  std::vector<corpus::PaperRecord> records;
  std::map<std::string, size_t> cluster_of;  // cluster papers only
  std::vector<std::string> train_queries;
  std::vector<std::string> test_queries;
  std::map<std::string, std::vector<std::string>> cited;  // per query
  size_t cluster_count = 0;
};

// `clusters` x `per_cluster` papers with disjoint topic vocabularies plus
// shared filler words; queries mix topics and cite subsets of the papers
// (test queries cite every paper).
PlantedClusters BuildPlantedClusters(uint64_t seed, size_t clusters = 3,
                                     size_t per_cluster = 6,
                                     size_t train_queries = 24,
                                     size_t test_queries = 4);

// Gold plan of a planted-cluster query: one branch per cluster ordered by
// the best cosine to the query, papers by descending cosine. Branch reasons
// come from the problem's pairwise reasons.
planner::ContentPlan ClusterGoldPlan(
    const planner::PlanningProblem& problem,
    const std::map<std::string, size_t>& cluster_of);

struct BoundaryPair {
  std::string s1;
  std::string s2;
  bool different = false;
};

// Half same-segment pairs (both sentences cite the same paper), half pairs
// about different papers, some opened by a discourse cue.
std::vector<BoundaryPair> BuildBoundaryPairs(const MiniCorpus& mini,
                                             size_t count, uint64_t seed);

struct ReasonPair {
  std::string x;
  std::string c;
  std::string label;
};

// Cited abstracts with an inserted cue sentence (CoCoGM, CoCoXY, Weak,
// PSim) or left untouched (Neut); half of the PSim cases rely on vocabulary
// overlap with the citing abstract instead of a cue.
std::vector<ReasonPair> BuildReasonPairs(const MiniCorpus& mini, size_t count,
                                         uint64_t seed);

}  // namespace relworks::synthetic

#endif  // RELWORKS_SYNTHETIC_H_
