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

// Tree-structured content planner. A plan is built one action at a time:
// either a remaining candidate paper is appended to the open branch, or the
// NEW_BRANCH sentinel closes it. Every legal action gets a scalar score from
// a one-hidden-layer tanh network over similarity features and the next
// action is drawn from the softmax of those scores.

#ifndef RELWORKS_PLANNER_H_
#define RELWORKS_PLANNER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relworks/corpus.h"
#include "relworks/encode.h"
#include "relworks/io.h"
#include "relworks/plan.h"
#include "relworks/reasons.h"

namespace relworks::planner {

inline constexpr size_t kFeatureCount = 6;
using FeatureVector = std::array<double, kFeatureCount>;

struct PlannerConfig {
  size_t hidden_dim = 16;
  size_t max_branches = 8;
  size_t max_branch_size = 8;  // scale of the open-branch size feature
  size_t max_steps = 0;        // 0: twice the candidate count
  double learning_rate = 0.05;
  double momentum = 0.9;
  size_t epochs = 50;
  size_t batch_size = 4;       // training plans per update
  double init_scale = 0.5;
  uint64_t seed = 13;

  size_t StepLimit(size_t candidates) const {
    return max_steps == 0 ? 2 * candidates : max_steps;
  }
  Json ToJson() const;
  static PlannerConfig FromJson(const Json& j);
  bool operator==(const PlannerConfig&) const = default;
};

struct Candidate {
  std::string id;
  encode::SparseVector vector;
  reasons::Reason reason;  // classify(x, c)
};

// Everything the planner needs about one citing paper and its candidates.
// Pairwise dot products are cached so feature evaluation is O(|open|).
class PlanningProblem {
 public:
  PlanningProblem(std::string source_id, encode::SparseVector x,
                  std::vector<Candidate> candidates,
                  reasons::Taxonomy taxonomy = reasons::Taxonomy::Default());

  const std::string& source_id() const { return source_id_; }
  const encode::SparseVector& x() const { return x_; }
  const std::vector<Candidate>& candidates() const { return candidates_; }
  size_t size() const { return candidates_.size(); }
  const reasons::Taxonomy& taxonomy() const { return taxonomy_; }
  // -1 if absent.
  int IndexOf(std::string_view id) const;

  double CosX(size_t c) const { return cos_x_[c]; }
  double Gram(size_t a, size_t b) const { return gram_[a * size() + b]; }
  double Cos(size_t a, size_t b) const { return cos_[a * size() + b]; }

 private:
  std::string source_id_;
  encode::SparseVector x_;
  std::vector<Candidate> candidates_;
  reasons::Taxonomy taxonomy_;
  std::vector<double> cos_x_;
  std::vector<double> gram_;
  std::vector<double> cos_;
};

// Candidates are looked up in the index (kUnknownCandidate if missing) and
// classified against the citing abstract. With `force_neutral` every
// pairwise reason is the taxonomy's neutral label.
PlanningProblem BuildProblem(const std::string& source_id,
                             std::string_view x_abstract,
                             const encode::SparseVector& x_vector,
                             std::span<const std::string> candidate_ids,
                             const encode::PaperIndex& index,
                             const corpus::Corpus& corpus,
                             const reasons::ReasonClassifier& classifier,
                             bool force_neutral = false);

struct Action {
  bool new_branch = false;
  size_t candidate = 0;  // index into the problem's candidates

  static Action NewBranch() { return {true, 0}; }
  static Action Paper(size_t c) { return {false, c}; }
  bool operator==(const Action&) const = default;
};

class PlannerState {
 public:
  PlannerState(const PlanningProblem& problem, const PlannerConfig& config);

  // State with the given closed branches and open branch already placed.
  static PlannerState Arrange(const PlanningProblem& problem,
                              const PlannerConfig& config,
                              const std::vector<std::vector<size_t>>& closed,
                              const std::vector<size_t>& open);

  const PlanningProblem& problem() const { return *problem_; }
  const std::vector<std::vector<size_t>>& closed() const { return closed_; }
  const std::vector<size_t>& open() const { return open_; }
  bool IsRemaining(size_t c) const { return !placed_[c]; }
  size_t remaining() const { return remaining_; }
  size_t steps() const { return steps_; }
  size_t step_limit() const { return step_limit_; }
  bool Done() const { return remaining_ == 0 || steps_ >= step_limit_; }

  bool NewBranchLegal() const;
  // Remaining papers in candidate order, then NEW_BRANCH when legal.
  std::vector<Action> LegalActions() const;
  // Throws kUnknownCandidate for a placed or out-of-range paper.
  FeatureVector Features(const Action& action) const;
  // Throws kUnknownCandidate / kNoLegalAction for illegal actions.
  void Apply(const Action& action);

  // Running aggregate of the open branch's pairwise reasons.
  const std::optional<reasons::Reason>& open_reason() const {
    return open_reason_;
  }

 private:
  void RecomputeOpen();

  const PlanningProblem* problem_;
  size_t max_branches_;
  size_t max_branch_size_;
  size_t step_limit_;
  std::vector<std::vector<size_t>> closed_;
  std::vector<size_t> open_;
  std::vector<bool> placed_;
  size_t remaining_;
  size_t steps_ = 0;
  std::optional<reasons::Reason> open_reason_;
  // Sum over open papers o of Gram(o, c), per candidate c.
  std::vector<double> open_dot_;
  double open_gram_sum_ = 0.0;
};

struct PlannerModel {
  static constexpr int kFormatVersion = 1;

  PlannerConfig config;
  FeatureVector mean{};
  FeatureVector stdev = {1, 1, 1, 1, 1, 1};
  std::vector<double> w1;  // hidden x kFeatureCount, row-major
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  // Gaussian weights from config.seed, identity normalization.
  static PlannerModel Initialize(const PlannerConfig& config);
  // All weights zero: every legal action scores the same.
  static PlannerModel Zero(const PlannerConfig& config);
  // Hand-set scorer: first kFeatureCount hidden units copy the features,
  // output weights favour similarity to the open branch.
  static PlannerModel Reference(const PlannerConfig& config = {});

  size_t hidden() const { return b1.size(); }
  FeatureVector Normalize(const FeatureVector& f) const;
  double Score(const FeatureVector& f) const;

  // Flat view [w1, b1, w2, b2].
  size_t ParameterCount() const;
  std::vector<double> Parameters() const;
  void SetParameters(std::span<const double> params);

  Json ToJson() const;
  static PlannerModel FromJson(const Json& j);
  void Save(const std::filesystem::path& path) const;
  static PlannerModel Load(const std::filesystem::path& path);

  bool operator==(const PlannerModel&) const = default;
};

struct Distribution {
  std::vector<Action> actions;
  std::vector<double> scores;
  std::vector<double> probs;
};

// Softmax of model scores over the legal actions. Throws kNoLegalAction.
Distribution SelectDistribution(const PlannerState& state,
                                const PlannerModel& model);

// Cross-entropy of `target` at `state`. When `grad` is non-empty it must
// have ParameterCount() entries; the gradient is added to it.
double StepLoss(const PlannerState& state, const Action& target,
                const PlannerModel& model, std::span<double> grad = {});

enum class DecodeMode { kGreedy, kSample };

struct DecodeOptions {
  DecodeMode mode = DecodeMode::kGreedy;
  uint64_t seed = 13;
  std::optional<size_t> max_steps;  // overrides the model config
};

struct DecodeResult {
  ContentPlan plan;
  std::vector<std::string> unplaced;
  std::vector<Action> actions;
};

// Throws kNoCandidates.
DecodeResult DecodePlan(const PlanningProblem& problem,
                        const PlannerModel& model,
                        const DecodeOptions& options = {});

// Branch reason from the problem's pairwise reasons.
reasons::Reason BranchReason(const PlanningProblem& problem,
                             std::span<const size_t> papers);

struct TrainingExample {
  PlanningProblem problem;
  ContentPlan gold;
};

// Papers of each branch in order, NEW_BRANCH between branches.
// Throws kUnknownCandidate.
std::vector<Action> GoldActions(const PlanningProblem& problem,
                                const ContentPlan& gold);

struct TrainResult {
  PlannerModel model;
  // Mean per-step cross-entropy over the training set, before training and
  // after each epoch (epochs + 1 entries).
  std::vector<double> loss_history;
};

// Initialization with the feature normalization fitted on the teacher-forced
// training states.
PlannerModel InitialModel(std::span<const TrainingExample> examples,
                          const PlannerConfig& config);

// Throws kEmptyTrainingSet, kNonFiniteLoss.
TrainResult TrainPlanner(std::span<const TrainingExample> examples,
                         const PlannerConfig& config);

struct InsertResult {
  ContentPlan plan;
  size_t affected = 0;
  bool created_branch = false;
  std::vector<double> option_scores;  // per existing branch, then new branch
};

// `problem` must contain every paper of `plan` plus `new_paper`.
// Throws kDuplicatePaper, kUnknownCandidate.
InsertResult InsertPaper(const ContentPlan& plan, const std::string& new_paper,
                         const PlanningProblem& problem,
                         const PlannerModel& model);

// Removes `paper` and drops its branch if it becomes empty. Reasons of the
// touched branch are re-aggregated when `problem` is given.
ContentPlan RemovePaper(const ContentPlan& plan, const std::string& paper,
                        const PlanningProblem* problem = nullptr);

// Spherical k-means over candidate vectors with farthest-first seeding.
std::vector<std::vector<std::string>> KMeansClusters(
    const PlanningProblem& problem, size_t k, size_t max_iterations = 100);

}  // namespace relworks::planner

#endif  // RELWORKS_PLANNER_H_
