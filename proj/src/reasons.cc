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

#include "relworks/reasons.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "relworks/encode.h"
#include "relworks/error.h"
#include "relworks/plan.h"
#include "relworks/text.h"

namespace relworks::reasons {
namespace {

std::vector<ReasonLabel> DefaultLabels() {
  std::vector<ReasonLabel> labels;
  labels.push_back({"CoCoGM",
                    "Comparison of goals or methods between the citing work "
                    "and the cited work.",
                    {"outperforms", "outperform", "better than",
                     "improves over", "improve upon", "superior to",
                     "compared with", "state of the art"}});
  labels.push_back({"CoCoXY",
                    "Two cited approaches are set against each other.",
                    {"in contrast", "whereas", "unlike", "on the other hand",
                     "differs from", "as opposed to"}});
  for (int i = 1; i <= 21; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "Reserved%02d", i);
    labels.push_back({name,
                      "Placeholder class for the remainder of the 26-way "
                      "scheme; no cue lexicon is shipped for it.",
                      {}});
  }
  labels.push_back({"PSim",
                    "The citing work and the cited work are alike.",
                    {"similar to", "similarly", "likewise", "like our",
                     "as in our", "in the same spirit", "closely related"}});
  labels.push_back({"Weak",
                    "The cited approach has a shortcoming.",
                    {"however", "limited", "limitation", "fails", "fail to",
                     "suffer", "suffers", "drawback", "cannot", "unable",
                     "lack", "lacks", "expensive"}});
  labels.push_back({"Neut", "The cited work is described without judgement.",
                    {}});
  return labels;
}

// Non-overlapping occurrences of `needle` as a contiguous token run.
int CountTokenRun(const std::vector<std::string>& hay,
                  const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return 0;
  int count = 0;
  size_t i = 0;
  while (i + needle.size() <= hay.size()) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<long>(i))) {
      ++count;
      i += needle.size();
    } else {
      ++i;
    }
  }
  return count;
}

std::set<std::string> ContentWords(std::string_view s) {
  static const std::unordered_set<std::string> kStop(
      encode::DefaultStopwords().begin(), encode::DefaultStopwords().end());
  std::set<std::string> out;
  for (std::string& t : text::WordTokens(s)) {
    if (t.size() >= 2 && kStop.count(t) == 0) out.insert(std::move(t));
  }
  return out;
}

double Jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  return static_cast<double>(inter) /
         static_cast<double>(a.size() + b.size() - inter);
}

ReasonScores FromRaw(const Taxonomy& taxonomy, const std::vector<double>& raw) {
  ReasonScores out;
  out.scores = Softmax(raw);
  size_t best = 0;
  for (size_t i = 1; i < raw.size(); ++i) {
    if (raw[i] > raw[best]) best = i;
  }
  out.reason = Reason{taxonomy.labels()[best].label};
  return out;
}

}  // namespace

const Taxonomy& Taxonomy::Default() {
  static const Taxonomy kDefault(DefaultLabels(), "Neut", "PSim");
  return kDefault;
}

Taxonomy::Taxonomy(std::vector<ReasonLabel> labels, std::string neutral,
                   std::string overlap_label)
    : labels_(std::move(labels)), overlap_label_(std::move(overlap_label)) {
  if (labels_.empty()) throw Error(ErrorCode::kFormat, "empty taxonomy");
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i].label, i).second) {
      throw Error(ErrorCode::kFormat, "duplicate label " + labels_[i].label);
    }
  }
  auto it = index_.find(neutral);
  if (it == index_.end()) {
    throw Error(ErrorCode::kFormat, "neutral label " + neutral + " not listed");
  }
  neutral_ = Reason{neutral};
  neutral_index_ = it->second;
  if (!overlap_label_.empty() && index_.count(overlap_label_) == 0) {
    throw Error(ErrorCode::kFormat,
                "overlap label " + overlap_label_ + " not listed");
  }
}

int Taxonomy::IndexOf(std::string_view label) const {
  auto it = index_.find(std::string(label));
  return it == index_.end() ? -1 : static_cast<int>(it->second);
}

Reason Taxonomy::Validate(std::string_view label) const {
  if (!Contains(label)) {
    throw Error(ErrorCode::kUnknownReason, std::string(label));
  }
  return Reason{std::string(label)};
}

Json Taxonomy::ToJson() const {
  Json labels = Json::array();
  for (const ReasonLabel& l : labels_) {
    labels.push_back(
        {{"label", l.label}, {"description", l.description}, {"cues", l.cues}});
  }
  return Json{{"version", kFormatVersion},
              {"neutral", neutral_.label},
              {"overlap_label", overlap_label_},
              {"labels", labels}};
}

Taxonomy Taxonomy::FromJson(const Json& j) {
  if (j.value("version", 0) != kFormatVersion) {
    throw Error(ErrorCode::kFormat, "unsupported taxonomy version");
  }
  std::vector<ReasonLabel> labels;
  for (const Json& l : j.at("labels")) {
    labels.push_back({l.at("label").get<std::string>(),
                      l.value("description", ""),
                      l.value("cues", std::vector<std::string>{})});
  }
  return Taxonomy(std::move(labels), j.at("neutral").get<std::string>(),
                  j.value("overlap_label", ""));
}

Taxonomy Taxonomy::Load(const std::filesystem::path& path) {
  return FromJson(io::ReadJson(path));
}

std::vector<double> Softmax(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

CueReasonClassifier::CueReasonClassifier(const Taxonomy& taxonomy)
    : CueReasonClassifier(taxonomy, Params()) {}

CueReasonClassifier::CueReasonClassifier(const Taxonomy& taxonomy,
                                         Params params)
    : taxonomy_(taxonomy), params_(params) {
  for (const ReasonLabel& l : taxonomy_.labels()) {
    std::vector<std::vector<std::string>> cues;
    for (const std::string& cue : l.cues) {
      auto toks = text::WordTokens(cue);
      if (!toks.empty()) cues.push_back(std::move(toks));
    }
    cue_tokens_.push_back(std::move(cues));
  }
}

std::vector<double> CueReasonClassifier::RawScores(std::string_view c_text,
                                                   double overlap) const {
  std::vector<std::string> tokens = text::WordTokens(c_text);
  std::vector<double> raw(taxonomy_.size(), 0.0);
  for (size_t i = 0; i < taxonomy_.size(); ++i) {
    int hits = 0;
    for (const auto& cue : cue_tokens_[i]) hits += CountTokenRun(tokens, cue);
    raw[i] = params_.cue_weight * std::min(hits, params_.cue_cap);
  }
  raw[taxonomy_.neutral_index()] += params_.neutral_prior;
  int overlap_idx = taxonomy_.IndexOf(taxonomy_.overlap_label());
  if (overlap_idx >= 0) {
    raw[static_cast<size_t>(overlap_idx)] += params_.overlap_weight * overlap;
  }
  return raw;
}

ReasonScores CueReasonClassifier::Classify(std::string_view x_abstract,
                                           std::string_view c_abstract) const {
  if (text::Trim(x_abstract).empty() || text::Trim(c_abstract).empty()) {
    throw Error(ErrorCode::kEmptyAbstract, "pairwise classification input");
  }
  double overlap = Jaccard(ContentWords(x_abstract), ContentWords(c_abstract));
  return FromRaw(taxonomy_, RawScores(c_abstract, overlap));
}

ReasonScores CueReasonClassifier::ClassifyText(std::string_view text) const {
  return FromRaw(taxonomy_, RawScores(text, 0.0));
}

std::unique_ptr<ReasonClassifier> MakeReasonClassifier(
    std::string_view spec, const Taxonomy& taxonomy) {
  if (spec == "cue") return std::make_unique<CueReasonClassifier>(taxonomy);
  constexpr std::string_view kExternal = "external:";
  if (text::StartsWith(spec, kExternal) && spec.size() > kExternal.size()) {
    return std::make_unique<ExternalReasonClassifier>(
        taxonomy, std::string(spec.substr(kExternal.size())));
  }
  throw Error(ErrorCode::kInvalidArgument,
              "reason model must be cue or external:<endpoint>, got " +
                  std::string(spec));
}

Reason AggregateReasons(std::span<const Reason> reasons,
                        const Taxonomy& taxonomy) {
  if (reasons.empty()) throw Error(ErrorCode::kEmptyList, "no reasons");
  std::vector<int> counts(taxonomy.size(), 0);
  for (const Reason& r : reasons) {
    int idx = taxonomy.IndexOf(r.label);
    if (idx < 0) throw Error(ErrorCode::kUnknownReason, r.label);
    ++counts[static_cast<size_t>(idx)];
  }
  int best = -1;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i == taxonomy.neutral_index() || counts[i] == 0) continue;
    if (best < 0 || counts[i] > counts[static_cast<size_t>(best)]) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) return taxonomy.neutral();
  return Reason{taxonomy.labels()[static_cast<size_t>(best)].label};
}

std::vector<Reason> ReasonSequence(const planner::ContentPlan& plan) {
  std::vector<Reason> out;
  out.reserve(plan.branches.size());
  for (const auto& b : plan.branches) out.push_back(b.reason);
  return out;
}

}  // namespace relworks::reasons
