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

#include "relworks/planner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "relworks/error.h"

namespace relworks::planner {
namespace {

double Clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

std::string ActionName(const PlanningProblem& problem, const Action& a) {
  if (a.new_branch) return "NEW_BRANCH";
  if (a.candidate < problem.size()) return problem.candidates()[a.candidate].id;
  return "#" + std::to_string(a.candidate);
}

// Cross-entropy of `target` among `features` (one row per legal action).
double CrossEntropy(std::span<const FeatureVector> features, size_t target,
                    const PlannerModel& model, std::span<double> grad) {
  const size_t h = model.hidden();
  const size_t n = features.size();
  std::vector<FeatureVector> z(n);
  std::vector<double> hidden(n * h);
  std::vector<double> scores(n);
  for (size_t a = 0; a < n; ++a) {
    z[a] = model.Normalize(features[a]);
    double s = model.b2;
    for (size_t j = 0; j < h; ++j) {
      double pre = model.b1[j];
      for (size_t i = 0; i < kFeatureCount; ++i) {
        pre += model.w1[j * kFeatureCount + i] * z[a][i];
      }
      hidden[a * h + j] = std::tanh(pre);
      s += model.w2[j] * hidden[a * h + j];
    }
    scores[a] = s;
  }
  double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - mx);
  double log_z = mx + std::log(sum);
  double loss = log_z - scores[target];
  if (grad.empty()) return loss;

  const size_t w1_off = 0;
  const size_t b1_off = h * kFeatureCount;
  const size_t w2_off = b1_off + h;
  const size_t b2_off = w2_off + h;
  for (size_t a = 0; a < n; ++a) {
    double g = std::exp(scores[a] - log_z) - (a == target ? 1.0 : 0.0);
    grad[b2_off] += g;
    for (size_t j = 0; j < h; ++j) {
      double hv = hidden[a * h + j];
      grad[w2_off + j] += g * hv;
      double dpre = g * model.w2[j] * (1.0 - hv * hv);
      grad[b1_off + j] += dpre;
      for (size_t i = 0; i < kFeatureCount; ++i) {
        grad[w1_off + j * kFeatureCount + i] += dpre * z[a][i];
      }
    }
  }
  return loss;
}

struct CachedStep {
  std::vector<FeatureVector> features;
  size_t target = 0;
};

std::vector<std::vector<CachedStep>> TeacherForce(
    std::span<const TrainingExample> examples, const PlannerConfig& config) {
  std::vector<std::vector<CachedStep>> out;
  out.reserve(examples.size());
  for (const TrainingExample& ex : examples) {
    std::vector<Action> gold = GoldActions(ex.problem, ex.gold);
    PlannerConfig unbounded = config;
    unbounded.max_steps = gold.size() + 1;
    PlannerState state(ex.problem, unbounded);
    std::vector<CachedStep> steps;
    for (const Action& target : gold) {
      std::vector<Action> legal = state.LegalActions();
      auto it = std::find(legal.begin(), legal.end(), target);
      if (it == legal.end()) {
        throw Error(ErrorCode::kInvalidPlan,
                    ex.problem.source_id() + ": gold action " +
                        ActionName(ex.problem, target) +
                        " is illegal (too many branches?)");
      }
      CachedStep step;
      step.target = static_cast<size_t>(it - legal.begin());
      for (const Action& a : legal) step.features.push_back(state.Features(a));
      steps.push_back(std::move(step));
      state.Apply(target);
    }
    out.push_back(std::move(steps));
  }
  return out;
}

double MeanLoss(const std::vector<std::vector<CachedStep>>& data,
                const PlannerModel& model) {
  double total = 0.0;
  size_t count = 0;
  for (const auto& steps : data) {
    for (const CachedStep& s : steps) {
      total += CrossEntropy(s.features, s.target, model, {});
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

}  // namespace

Json PlannerConfig::ToJson() const {
  return Json{{"hidden_dim", hidden_dim},       {"max_branches", max_branches},
              {"max_branch_size", max_branch_size}, {"max_steps", max_steps},
              {"learning_rate", learning_rate}, {"momentum", momentum},
              {"epochs", epochs},               {"batch_size", batch_size},
              {"init_scale", init_scale},       {"seed", seed}};
}

PlannerConfig PlannerConfig::FromJson(const Json& j) {
  PlannerConfig c;
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.max_branches = j.value("max_branches", c.max_branches);
  c.max_branch_size = j.value("max_branch_size", c.max_branch_size);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.momentum = j.value("momentum", c.momentum);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.init_scale = j.value("init_scale", c.init_scale);
  c.seed = j.value("seed", c.seed);
  if (c.max_branches < 1 || c.max_branch_size < 1 || c.batch_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "planner config sizes must be >= 1");
  }
  return c;
}

PlanningProblem::PlanningProblem(std::string source_id, encode::SparseVector x,
                                 std::vector<Candidate> candidates,
                                 reasons::Taxonomy taxonomy)
    : source_id_(std::move(source_id)),
      x_(std::move(x)),
      candidates_(std::move(candidates)),
      taxonomy_(std::move(taxonomy)) {
  const size_t n = candidates_.size();
  std::unordered_set<std::string> seen;
  for (const Candidate& c : candidates_) {
    if (!seen.insert(c.id).second) {
      throw Error(ErrorCode::kDuplicatePaper, "candidate " + c.id + " repeated");
    }
    taxonomy_.Validate(c.reason.label);
  }
  cos_x_.resize(n);
  gram_.assign(n * n, 0.0);
  cos_.assign(n * n, 0.0);
  for (size_t a = 0; a < n; ++a) {
    cos_x_[a] = encode::Cosine(x_, candidates_[a].vector);
    for (size_t b = a; b < n; ++b) {
      double d = encode::Dot(candidates_[a].vector, candidates_[b].vector);
      double c = encode::Cosine(candidates_[a].vector, candidates_[b].vector);
      gram_[a * n + b] = gram_[b * n + a] = d;
      cos_[a * n + b] = cos_[b * n + a] = c;
    }
  }
}

int PlanningProblem::IndexOf(std::string_view id) const {
  for (size_t i = 0; i < candidates_.size(); ++i) {
    if (candidates_[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

PlanningProblem BuildProblem(const std::string& source_id,
                             std::string_view x_abstract,
                             const encode::SparseVector& x_vector,
                             std::span<const std::string> candidate_ids,
                             const encode::PaperIndex& index,
                             const corpus::Corpus& corpus,
                             const reasons::ReasonClassifier& classifier,
                             bool force_neutral) {
  std::vector<Candidate> candidates;
  candidates.reserve(candidate_ids.size());
  for (const std::string& id : candidate_ids) {
    const encode::IndexEntry* entry = index.Find(id);
    const corpus::PaperRecord* record = corpus.Find(id);
    if (entry == nullptr || record == nullptr) {
      throw Error(ErrorCode::kUnknownCandidate, id + " is not indexed");
    }
    reasons::Reason reason =
        force_neutral ? classifier.taxonomy().neutral()
                      : classifier.Classify(x_abstract, record->abstract_text).reason;
    candidates.push_back({id, entry->vector, std::move(reason)});
  }
  return PlanningProblem(source_id, x_vector, std::move(candidates),
                         classifier.taxonomy());
}

PlannerState::PlannerState(const PlanningProblem& problem,
                           const PlannerConfig& config)
    : problem_(&problem),
      max_branches_(config.max_branches),
      max_branch_size_(config.max_branch_size),
      step_limit_(config.StepLimit(problem.size())),
      placed_(problem.size(), false),
      remaining_(problem.size()),
      open_dot_(problem.size(), 0.0) {}

PlannerState PlannerState::Arrange(
    const PlanningProblem& problem, const PlannerConfig& config,
    const std::vector<std::vector<size_t>>& closed,
    const std::vector<size_t>& open) {
  PlannerState state(problem, config);
  auto place = [&](size_t c) {
    if (c >= problem.size() || state.placed_[c]) {
      throw Error(ErrorCode::kUnknownCandidate,
                  "cannot arrange candidate #" + std::to_string(c));
    }
    state.placed_[c] = true;
    --state.remaining_;
  };
  for (const auto& branch : closed) {
    for (size_t c : branch) place(c);
    state.closed_.push_back(branch);
  }
  for (size_t c : open) place(c);
  state.open_ = open;
  state.RecomputeOpen();
  return state;
}

void PlannerState::RecomputeOpen() {
  const PlanningProblem& p = *problem_;
  std::fill(open_dot_.begin(), open_dot_.end(), 0.0);
  open_gram_sum_ = 0.0;
  for (size_t o : open_) {
    for (size_t c = 0; c < p.size(); ++c) open_dot_[c] += p.Gram(o, c);
    for (size_t o2 : open_) open_gram_sum_ += p.Gram(o, o2);
  }
  if (open_.empty()) {
    open_reason_.reset();
  } else {
    open_reason_ = BranchReason(p, open_);
  }
}

bool PlannerState::NewBranchLegal() const {
  return !open_.empty() && closed_.size() + 1 < max_branches_;
}

std::vector<Action> PlannerState::LegalActions() const {
  std::vector<Action> out;
  out.reserve(remaining_ + 1);
  for (size_t c = 0; c < placed_.size(); ++c) {
    if (!placed_[c]) out.push_back(Action::Paper(c));
  }
  if (NewBranchLegal()) out.push_back(Action::NewBranch());
  return out;
}

FeatureVector PlannerState::Features(const Action& action) const {
  const PlanningProblem& p = *problem_;
  const double n = static_cast<double>(std::max<size_t>(p.size(), 1));
  const double remaining = static_cast<double>(remaining_) / n;
  const double size =
      static_cast<double>(open_.size()) / static_cast<double>(max_branch_size_);
  if (action.new_branch) {
    double cohesion = 0.0;
    if (open_.size() >= 2) {
      double total = 0.0;
      size_t pairs = 0;
      for (size_t i = 0; i < open_.size(); ++i) {
        for (size_t j = i + 1; j < open_.size(); ++j) {
          total += p.Cos(open_[i], open_[j]);
          ++pairs;
        }
      }
      cohesion = total / static_cast<double>(pairs);
    }
    double branches = static_cast<double>(closed_.size() + 1) /
                      static_cast<double>(max_branches_);
    return {0.0, cohesion, size, 1.0, branches, remaining};
  }
  const size_t c = action.candidate;
  if (c >= p.size() || placed_[c]) {
    throw Error(ErrorCode::kUnknownCandidate, ActionName(p, action));
  }
  double centroid = 0.0;
  double max_cos = 0.0;
  double reason_match = 0.0;
  if (!open_.empty()) {
    double denom = std::sqrt(open_gram_sum_) * std::sqrt(p.Gram(c, c));
    centroid = denom > 0.0 ? Clamp01(open_dot_[c] / denom) : 0.0;
    for (size_t o : open_) max_cos = std::max(max_cos, p.Cos(o, c));
    reason_match = p.candidates()[c].reason == *open_reason_ ? 1.0 : 0.0;
  }
  return {p.CosX(c), centroid, max_cos, size, reason_match, remaining};
}

void PlannerState::Apply(const Action& action) {
  if (steps_ >= step_limit_) {
    throw Error(ErrorCode::kNoLegalAction, "step limit reached");
  }
  if (action.new_branch) {
    if (!NewBranchLegal()) {
      throw Error(ErrorCode::kNoLegalAction, "NEW_BRANCH is not legal here");
    }
    closed_.push_back(std::move(open_));
    open_.clear();
    RecomputeOpen();
    ++steps_;
    return;
  }
  const PlanningProblem& p = *problem_;
  const size_t c = action.candidate;
  if (c >= p.size() || placed_[c]) {
    throw Error(ErrorCode::kUnknownCandidate, ActionName(p, action));
  }
  open_gram_sum_ += 2.0 * open_dot_[c] + p.Gram(c, c);
  for (size_t k = 0; k < p.size(); ++k) open_dot_[k] += p.Gram(c, k);
  open_.push_back(c);
  placed_[c] = true;
  --remaining_;
  open_reason_ = BranchReason(p, open_);
  ++steps_;
}

PlannerModel PlannerModel::Zero(const PlannerConfig& config) {
  PlannerModel m;
  m.config = config;
  m.w1.assign(config.hidden_dim * kFeatureCount, 0.0);
  m.b1.assign(config.hidden_dim, 0.0);
  m.w2.assign(config.hidden_dim, 0.0);
  return m;
}

PlannerModel PlannerModel::Initialize(const PlannerConfig& config) {
  PlannerModel m = Zero(config);
  io::Rng rng(config.seed);
  const double s1 = config.init_scale / std::sqrt(static_cast<double>(kFeatureCount));
  const double s2 =
      config.init_scale / std::sqrt(static_cast<double>(std::max<size_t>(1, config.hidden_dim)));
  for (double& w : m.w1) w = s1 * rng.Normal();
  for (double& w : m.w2) w = s2 * rng.Normal();
  return m;
}

PlannerModel PlannerModel::Reference(const PlannerConfig& config) {
  PlannerConfig c = config;
  c.hidden_dim = std::max(c.hidden_dim, kFeatureCount);
  PlannerModel m = Zero(c);
  static constexpr double kOut[kFeatureCount] = {1.0, 2.0, 2.0, -1.0, 0.5, 0.0};
  for (size_t i = 0; i < kFeatureCount; ++i) {
    m.w1[i * kFeatureCount + i] = 1.0;
    m.w2[i] = kOut[i];
  }
  return m;
}

FeatureVector PlannerModel::Normalize(const FeatureVector& f) const {
  FeatureVector z;
  for (size_t i = 0; i < kFeatureCount; ++i) z[i] = (f[i] - mean[i]) / stdev[i];
  return z;
}

double PlannerModel::Score(const FeatureVector& f) const {
  FeatureVector z = Normalize(f);
  double s = b2;
  for (size_t j = 0; j < hidden(); ++j) {
    double pre = b1[j];
    for (size_t i = 0; i < kFeatureCount; ++i) {
      pre += w1[j * kFeatureCount + i] * z[i];
    }
    s += w2[j] * std::tanh(pre);
  }
  return s;
}

size_t PlannerModel::ParameterCount() const {
  return w1.size() + b1.size() + w2.size() + 1;
}

std::vector<double> PlannerModel::Parameters() const {
  std::vector<double> p;
  p.reserve(ParameterCount());
  p.insert(p.end(), w1.begin(), w1.end());
  p.insert(p.end(), b1.begin(), b1.end());
  p.insert(p.end(), w2.begin(), w2.end());
  p.push_back(b2);
  return p;
}

void PlannerModel::SetParameters(std::span<const double> params) {
  if (params.size() != ParameterCount()) {
    throw Error(ErrorCode::kInvalidArgument, "parameter count mismatch");
  }
  auto it = params.begin();
  std::copy(it, it + static_cast<long>(w1.size()), w1.begin());
  it += static_cast<long>(w1.size());
  std::copy(it, it + static_cast<long>(b1.size()), b1.begin());
  it += static_cast<long>(b1.size());
  std::copy(it, it + static_cast<long>(w2.size()), w2.begin());
  it += static_cast<long>(w2.size());
  b2 = *it;
}

Json PlannerModel::ToJson() const {
  return Json{{"format", "relworks.planner"},
              {"version", kFormatVersion},
              {"config", config.ToJson()},
              {"normalization", {{"mean", mean}, {"std", stdev}}},
              {"w1", w1},
              {"b1", b1},
              {"w2", w2},
              {"b2", b2}};
}

PlannerModel PlannerModel::FromJson(const Json& j) {
  if (j.value("format", "") != "relworks.planner" ||
      j.value("version", 0) != kFormatVersion) {
    throw Error(ErrorCode::kFormat, "not a relworks.planner v1 model");
  }
  try {
    PlannerModel m;
    m.config = PlannerConfig::FromJson(j.at("config"));
    m.mean = j.at("normalization").at("mean").get<FeatureVector>();
    m.stdev = j.at("normalization").at("std").get<FeatureVector>();
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<double>();
    const size_t h = m.b1.size();
    if (m.w1.size() != h * kFeatureCount || m.w2.size() != h) {
      throw Error(ErrorCode::kFormat, "planner weight shapes disagree");
    }
    for (double s : m.stdev) {
      if (!(s > 0.0)) throw Error(ErrorCode::kFormat, "non-positive std");
    }
    for (double v : m.Parameters()) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kFormat, "non-finite weight");
    }
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("planner model: ") + e.what());
  }
}

void PlannerModel::Save(const std::filesystem::path& path) const {
  io::WriteJsonAtomic(path, ToJson());
}

PlannerModel PlannerModel::Load(const std::filesystem::path& path) {
  return FromJson(io::ReadJson(path));
}

Distribution SelectDistribution(const PlannerState& state,
                                const PlannerModel& model) {
  if (state.remaining() == 0) {
    throw Error(ErrorCode::kNoLegalAction, "every candidate is placed");
  }
  Distribution d;
  d.actions = state.LegalActions();
  if (d.actions.empty()) throw Error(ErrorCode::kNoLegalAction, "no legal action");
  d.scores.reserve(d.actions.size());
  for (const Action& a : d.actions) d.scores.push_back(model.Score(state.Features(a)));
  d.probs = reasons::Softmax(d.scores);
  return d;
}

double StepLoss(const PlannerState& state, const Action& target,
                const PlannerModel& model, std::span<double> grad) {
  std::vector<Action> legal = state.LegalActions();
  auto it = std::find(legal.begin(), legal.end(), target);
  if (it == legal.end()) {
    throw Error(ErrorCode::kUnknownCandidate,
                ActionName(state.problem(), target) + " is not legal");
  }
  if (!grad.empty() && grad.size() != model.ParameterCount()) {
    throw Error(ErrorCode::kInvalidArgument, "gradient buffer size");
  }
  std::vector<FeatureVector> features;
  features.reserve(legal.size());
  for (const Action& a : legal) features.push_back(state.Features(a));
  return CrossEntropy(features, static_cast<size_t>(it - legal.begin()), model,
                      grad);
}

reasons::Reason BranchReason(const PlanningProblem& problem,
                             std::span<const size_t> papers) {
  std::vector<reasons::Reason> rs;
  rs.reserve(papers.size());
  for (size_t c : papers) rs.push_back(problem.candidates()[c].reason);
  return reasons::AggregateReasons(rs, problem.taxonomy());
}

DecodeResult DecodePlan(const PlanningProblem& problem,
                        const PlannerModel& model,
                        const DecodeOptions& options) {
  if (problem.size() == 0) throw Error(ErrorCode::kNoCandidates, problem.source_id());
  PlannerConfig config = model.config;
  if (options.max_steps) config.max_steps = *options.max_steps;
  PlannerState state(problem, config);
  io::Rng rng(options.seed);
  DecodeResult result;
  while (!state.Done()) {
    Distribution d = SelectDistribution(state, model);
    size_t pick = 0;
    if (options.mode == DecodeMode::kGreedy) {
      for (size_t i = 1; i < d.scores.size(); ++i) {
        if (d.scores[i] > d.scores[pick]) pick = i;
      }
    } else {
      double u = rng.Uniform();
      double acc = 0.0;
      pick = d.probs.size() - 1;
      for (size_t i = 0; i < d.probs.size(); ++i) {
        acc += d.probs[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    }
    state.Apply(d.actions[pick]);
    result.actions.push_back(d.actions[pick]);
  }
  std::vector<std::vector<size_t>> branches = state.closed();
  if (!state.open().empty()) branches.push_back(state.open());
  result.plan.source_paper_id = problem.source_id();
  for (const auto& b : branches) {
    PlanBranch branch;
    for (size_t c : b) branch.papers.push_back(problem.candidates()[c].id);
    branch.reason = BranchReason(problem, b);
    result.plan.branches.push_back(std::move(branch));
  }
  for (size_t c = 0; c < problem.size(); ++c) {
    if (state.IsRemaining(c)) result.unplaced.push_back(problem.candidates()[c].id);
  }
  return result;
}

std::vector<Action> GoldActions(const PlanningProblem& problem,
                                const ContentPlan& gold) {
  std::vector<Action> out;
  for (size_t b = 0; b < gold.branches.size(); ++b) {
    if (b > 0) out.push_back(Action::NewBranch());
    for (const std::string& id : gold.branches[b].papers) {
      int idx = problem.IndexOf(id);
      if (idx < 0) {
        throw Error(ErrorCode::kUnknownCandidate,
                    id + " is not a candidate of " + problem.source_id());
      }
      out.push_back(Action::Paper(static_cast<size_t>(idx)));
    }
  }
  return out;
}

PlannerModel InitialModel(std::span<const TrainingExample> examples,
                          const PlannerConfig& config) {
  if (examples.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no gold plans");
  auto data = TeacherForce(examples, config);
  PlannerModel model = PlannerModel::Initialize(config);
  FeatureVector sum{};
  FeatureVector sq{};
  size_t count = 0;
  for (const auto& steps : data) {
    for (const CachedStep& s : steps) {
      for (const FeatureVector& f : s.features) {
        for (size_t i = 0; i < kFeatureCount; ++i) {
          sum[i] += f[i];
          sq[i] += f[i] * f[i];
        }
        ++count;
      }
    }
  }
  if (count == 0) throw Error(ErrorCode::kEmptyTrainingSet, "gold plans have no steps");
  for (size_t i = 0; i < kFeatureCount; ++i) {
    double m = sum[i] / static_cast<double>(count);
    double var = std::max(0.0, sq[i] / static_cast<double>(count) - m * m);
    double sd = std::sqrt(var);
    model.mean[i] = m;
    model.stdev[i] = sd < 1e-6 ? 1.0 : sd;
  }
  return model;
}

TrainResult TrainPlanner(std::span<const TrainingExample> examples,
                         const PlannerConfig& config) {
  TrainResult result{InitialModel(examples, config), {}};
  PlannerModel& model = result.model;
  auto data = TeacherForce(examples, config);
  double loss = MeanLoss(data, model);
  if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFiniteLoss, "initial loss");
  result.loss_history.push_back(loss);

  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  io::Rng rng(config.seed ^ 0x5bd1e995ULL);
  std::vector<double> params = model.Parameters();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> grad(params.size());
  for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(order);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      std::fill(grad.begin(), grad.end(), 0.0);
      size_t steps = 0;
      size_t stop = std::min(order.size(), start + config.batch_size);
      for (size_t k = start; k < stop; ++k) {
        for (const CachedStep& s : data[order[k]]) {
          CrossEntropy(s.features, s.target, model, grad);
          ++steps;
        }
      }
      if (steps == 0) continue;
      for (size_t i = 0; i < params.size(); ++i) {
        velocity[i] = config.momentum * velocity[i] -
                      config.learning_rate * grad[i] / static_cast<double>(steps);
        params[i] += velocity[i];
      }
      model.SetParameters(params);
    }
    loss = MeanLoss(data, model);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "epoch " + std::to_string(epoch + 1));
    }
    result.loss_history.push_back(loss);
  }
  return result;
}

InsertResult InsertPaper(const ContentPlan& plan, const std::string& new_paper,
                         const PlanningProblem& problem,
                         const PlannerModel& model) {
  for (const PlanBranch& b : plan.branches) {
    if (std::find(b.papers.begin(), b.papers.end(), new_paper) != b.papers.end()) {
      throw Error(ErrorCode::kDuplicatePaper, new_paper + " is already planned");
    }
  }
  int idx = problem.IndexOf(new_paper);
  if (idx < 0) throw Error(ErrorCode::kUnknownCandidate, new_paper);
  const size_t c = static_cast<size_t>(idx);

  std::vector<std::vector<size_t>> branches;
  for (const PlanBranch& b : plan.branches) {
    std::vector<size_t> ids;
    for (const std::string& id : b.papers) {
      int i = problem.IndexOf(id);
      if (i < 0) throw Error(ErrorCode::kUnknownCandidate, id);
      ids.push_back(static_cast<size_t>(i));
    }
    branches.push_back(std::move(ids));
  }

  InsertResult result;
  for (size_t j = 0; j < branches.size(); ++j) {
    std::vector<std::vector<size_t>> closed;
    for (size_t k = 0; k < branches.size(); ++k) {
      if (k != j) closed.push_back(branches[k]);
    }
    PlannerState s = PlannerState::Arrange(problem, model.config, closed, branches[j]);
    result.option_scores.push_back(model.Score(s.Features(Action::Paper(c))));
  }
  if (branches.size() < model.config.max_branches) {
    PlannerState s = PlannerState::Arrange(problem, model.config, branches, {});
    result.option_scores.push_back(model.Score(s.Features(Action::Paper(c))));
  }
  if (result.option_scores.empty()) {
    throw Error(ErrorCode::kNoLegalAction, "no branch can take " + new_paper);
  }
  size_t best = 0;
  for (size_t i = 1; i < result.option_scores.size(); ++i) {
    if (result.option_scores[i] > result.option_scores[best]) best = i;
  }
  result.plan = plan;
  result.affected = best;
  if (best == branches.size()) {
    result.created_branch = true;
    result.plan.branches.push_back({{new_paper}, problem.candidates()[c].reason});
  } else {
    branches[best].push_back(c);
    PlanBranch& target = result.plan.branches[best];
    target.papers.push_back(new_paper);
    target.reason = BranchReason(problem, branches[best]);
  }
  return result;
}

ContentPlan RemovePaper(const ContentPlan& plan, const std::string& paper,
                        const PlanningProblem* problem) {
  ContentPlan out = plan;
  for (size_t b = 0; b < out.branches.size(); ++b) {
    auto& papers = out.branches[b].papers;
    auto it = std::find(papers.begin(), papers.end(), paper);
    if (it == papers.end()) continue;
    papers.erase(it);
    if (papers.empty()) {
      out.branches.erase(out.branches.begin() + static_cast<long>(b));
    } else if (problem != nullptr) {
      std::vector<size_t> ids;
      for (const std::string& id : papers) {
        int i = problem->IndexOf(id);
        if (i < 0) throw Error(ErrorCode::kUnknownCandidate, id);
        ids.push_back(static_cast<size_t>(i));
      }
      out.branches[b].reason = BranchReason(*problem, ids);
    }
    return out;
  }
  throw Error(ErrorCode::kUnknownPaper, paper + " is not in the plan");
}

std::vector<std::vector<std::string>> KMeansClusters(
    const PlanningProblem& problem, size_t k, size_t max_iterations) {
  const size_t n = problem.size();
  if (n == 0 || k == 0) return {};
  k = std::min(k, n);

  // Farthest-first seeding, starting from the candidate closest to x.
  std::vector<size_t> seeds;
  size_t first = 0;
  for (size_t c = 1; c < n; ++c) {
    if (problem.CosX(c) > problem.CosX(first)) first = c;
  }
  seeds.push_back(first);
  while (seeds.size() < k) {
    size_t pick = n;
    double best = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < n; ++c) {
      if (std::find(seeds.begin(), seeds.end(), c) != seeds.end()) continue;
      double closest = 0.0;
      for (size_t s : seeds) closest = std::max(closest, problem.Cos(s, c));
      if (closest < best) {
        best = closest;
        pick = c;
      }
    }
    seeds.push_back(pick);
  }

  std::vector<std::vector<size_t>> members(k);
  for (size_t j = 0; j < k; ++j) members[j] = {seeds[j]};
  std::vector<size_t> assign(n, k);
  for (size_t it = 0; it < max_iterations; ++it) {
    std::vector<double> self(k, 0.0);
    for (size_t j = 0; j < k; ++j) {
      for (size_t a : members[j]) {
        for (size_t b : members[j]) self[j] += problem.Cos(a, b);
      }
    }
    std::vector<size_t> next(n, 0);
    for (size_t c = 0; c < n; ++c) {
      double best = -1.0;
      for (size_t j = 0; j < k; ++j) {
        if (members[j].empty() || self[j] <= 0.0) continue;
        double s = 0.0;
        for (size_t m : members[j]) s += problem.Cos(m, c);
        double score = s / std::sqrt(self[j]);
        if (score > best) {
          best = score;
          next[c] = j;
        }
      }
    }
    if (next == assign) break;
    assign = next;
    for (auto& m : members) m.clear();
    for (size_t c = 0; c < n; ++c) members[assign[c]].push_back(c);
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& m : members) {
    if (m.empty()) continue;
    std::vector<std::string> ids;
    for (size_t c : m) ids.push_back(problem.candidates()[c].id);
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace relworks::planner
