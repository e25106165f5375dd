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

// Random planning problems and the planted-cluster training setup, shared
// by the planner unit tests and the acceptance checks.

#ifndef RELWORKS_TESTS_PLANNER_FIXTURES_H_
#define RELWORKS_TESTS_PLANNER_FIXTURES_H_

#include <string>
#include <vector>

#include "relworks/corpus.h"
#include "relworks/encode.h"
#include "relworks/io.h"
#include "relworks/metrics.h"
#include "relworks/planner.h"
#include "relworks/synthetic.h"

namespace relworks::testing {

inline encode::SparseVector RandomSparse(io::Rng& rng, int dims) {
  std::vector<encode::SparseVector::Entry> entries;
  for (int d = 0; d < dims; ++d) {
    if (rng.Below(3) == 0) entries.emplace_back(d, 0.05 + rng.Uniform());
  }
  if (entries.empty()) entries.emplace_back(static_cast<int>(rng.Below(dims)), 1.0);
  return encode::SparseVector(std::move(entries));
}

// Candidates with random vectors and reasons drawn from a few labels.
inline planner::PlanningProblem RandomProblem(io::Rng& rng, size_t n, int dims = 10) {
  static const char* kLabels[] = {"Neut", "PSim", "CoCoXY", "Weak"};
  std::vector<planner::Candidate> cands;
  for (size_t i = 0; i < n; ++i) {
    cands.push_back({"c" + std::to_string(i), RandomSparse(rng, dims),
                     reasons::Reason{kLabels[rng.Below(4)]}});
  }
  return planner::PlanningProblem("x", RandomSparse(rng, dims), std::move(cands));
}

inline planner::PlannerModel RandomModel(io::Rng& rng, size_t hidden) {
  planner::PlannerConfig cfg;
  cfg.hidden_dim = hidden;
  cfg.seed = rng.Next();
  cfg.init_scale = 0.3 + rng.Uniform();
  planner::PlannerModel m = planner::PlannerModel::Initialize(cfg);
  for (size_t k = 0; k < planner::kFeatureCount; ++k) {
    m.mean[k] = rng.Uniform() - 0.5;
    m.stdev[k] = 0.5 + rng.Uniform();
  }
  m.b2 = rng.Normal();
  return m;
}

// Random reachable state: every candidate is placed in a closed branch, the
// open branch or left remaining.
inline planner::PlannerState RandomState(io::Rng& rng,
                                         const planner::PlanningProblem& problem,
                                         const planner::PlannerConfig& config) {
  std::vector<std::vector<size_t>> closed;
  std::vector<size_t> open;
  size_t branches = rng.Below(std::min<size_t>(config.max_branches - 1, 4) + 1);
  closed.resize(branches);
  std::vector<size_t> order(problem.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.Shuffle(order);
  // Keep at least one candidate remaining.
  for (size_t i = 0; i + 1 < order.size(); ++i) {
    uint64_t where = rng.Below(branches + 2);
    if (where < branches) {
      closed[where].push_back(order[i]);
    } else if (where == branches) {
      open.push_back(order[i]);
    }
  }
  std::erase_if(closed, [](const std::vector<size_t>& b) { return b.empty(); });
  return planner::PlannerState::Arrange(problem, config, closed, open);
}

struct PlantedSetup {
  synthetic::PlantedClusters planted;
  corpus::Corpus corpus;
  encode::PaperIndex index;
  std::vector<planner::TrainingExample> train;
  std::vector<planner::TrainingExample> test;
};

inline PlantedSetup BuildPlantedSetup(uint64_t seed) {
  PlantedSetup s{synthetic::BuildPlantedClusters(seed), {}, {}, {}, {}};
  s.corpus = corpus::Corpus(s.planted.records);
  s.index = encode::PaperIndex::Build(s.corpus);
  reasons::CueReasonClassifier cue(reasons::Taxonomy::Default());
  auto example = [&](const std::string& q) {
    const corpus::PaperRecord& r = s.corpus.Get(q);
    encode::SparseVector x = s.index.vectorizer().Embed(encode::EncoderText(r));
    planner::PlanningProblem p = planner::BuildProblem(
        q, r.abstract_text, x, s.planted.cited.at(q), s.index, s.corpus, cue);
    planner::ContentPlan gold = synthetic::ClusterGoldPlan(p, s.planted.cluster_of);
    return planner::TrainingExample{std::move(p), std::move(gold)};
  };
  for (const std::string& q : s.planted.train_queries) s.train.push_back(example(q));
  for (const std::string& q : s.planted.test_queries) s.test.push_back(example(q));
  return s;
}

inline metrics::Partition PartitionOf(const planner::ContentPlan& plan) {
  metrics::Partition out;
  for (const planner::PlanBranch& b : plan.branches) out.push_back(b.papers);
  return out;
}

}  // namespace relworks::testing

#endif  // RELWORKS_TESTS_PLANNER_FIXTURES_H_
