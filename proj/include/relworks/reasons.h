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

// Citation-reason taxonomy, pairwise reason classification between a citing
// abstract and a cited abstract, and aggregation of per-paper reasons into a
// single branch reason.

#ifndef RELWORKS_REASONS_H_
#define RELWORKS_REASONS_H_

#include <chrono>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relworks/io.h"

namespace relworks::planner {
struct ContentPlan;
}  // namespace relworks::planner

namespace relworks::transport {
class JsonEndpoint;
}  // namespace relworks::transport

namespace relworks::reasons {

using Json = nlohmann::json;

struct Reason {
  std::string label;

  bool operator==(const Reason&) const = default;
};

struct ReasonLabel {
  std::string label;
  std::string description;
  // Lowercase phrases; matched on word boundaries.
  std::vector<std::string> cues;
};

// Ordered label set. The order is the tie-break order used by aggregation
// and argmax. Exactly one label is neutral.
class Taxonomy {
 public:
  static constexpr int kFormatVersion = 1;

  // CoCoGM, CoCoXY, Reserved01..Reserved21, PSim, Weak, Neut.
  static const Taxonomy& Default();

  Taxonomy(std::vector<ReasonLabel> labels, std::string neutral,
           std::string overlap_label);

  const std::vector<ReasonLabel>& labels() const { return labels_; }
  size_t size() const { return labels_.size(); }
  int IndexOf(std::string_view label) const;
  bool Contains(std::string_view label) const { return IndexOf(label) >= 0; }
  // Throws kUnknownReason.
  Reason Validate(std::string_view label) const;

  const Reason& neutral() const { return neutral_; }
  size_t neutral_index() const { return neutral_index_; }
  // Label boosted by abstract vocabulary overlap.
  const std::string& overlap_label() const { return overlap_label_; }

  Json ToJson() const;
  static Taxonomy FromJson(const Json& j);
  static Taxonomy Load(const std::filesystem::path& path);

 private:
  std::vector<ReasonLabel> labels_;
  std::unordered_map<std::string, size_t> index_;
  Reason neutral_;
  size_t neutral_index_ = 0;
  std::string overlap_label_;
};

struct ReasonScores {
  Reason reason;
  std::vector<double> scores;  // taxonomy order, sums to 1
};

class ReasonClassifier {
 public:
  virtual ~ReasonClassifier() = default;
  virtual std::string id() const = 0;
  virtual const Taxonomy& taxonomy() const = 0;
  // Throws kEmptyAbstract on empty input.
  virtual ReasonScores Classify(std::string_view x_abstract,
                                std::string_view c_abstract) const = 0;
};

// Lexicon baseline. Each label scores cue_weight * min(hits, cue_cap) for
// its cue phrases found in the cited abstract; the overlap label adds
// overlap_weight * Jaccard(content words of x, content words of c); the
// neutral label gets a constant prior so it wins when nothing fires. The
// score vector is the softmax of these raw scores.
class CueReasonClassifier : public ReasonClassifier {
 public:
  struct Params {
    double cue_weight = 2.0;
    int cue_cap = 2;
    double overlap_weight = 6.0;
    double neutral_prior = 1.5;
  };

  explicit CueReasonClassifier(const Taxonomy& taxonomy);
  CueReasonClassifier(const Taxonomy& taxonomy, Params params);

  std::string id() const override { return "cue"; }
  const Taxonomy& taxonomy() const override { return taxonomy_; }
  ReasonScores Classify(std::string_view x_abstract,
                        std::string_view c_abstract) const override;

  // Reason expressed by a piece of related-work prose, from cues alone.
  // Used to label gold segments and to check realized segments.
  ReasonScores ClassifyText(std::string_view text) const;

  // Raw (pre-softmax) scores, exposed for tests.
  std::vector<double> RawScores(std::string_view c_text, double overlap) const;

 private:
  Taxonomy taxonomy_;
  Params params_;
  std::vector<std::vector<std::vector<std::string>>> cue_tokens_;
};

// Sends {version:1, x, c, labels} to POST <endpoint>/classify (or one line
// to a "stdio:<command>" child) and expects {version:1, scores:[...]} in
// taxonomy order. Errors are kTimeout or kProtocolError.
class ExternalReasonClassifier : public ReasonClassifier {
 public:
  ExternalReasonClassifier(const Taxonomy& taxonomy, std::string endpoint,
                           std::chrono::milliseconds timeout =
                               std::chrono::seconds(30));

  std::string id() const override { return "external:" + endpoint_; }
  const Taxonomy& taxonomy() const override { return taxonomy_; }
  ReasonScores Classify(std::string_view x_abstract,
                        std::string_view c_abstract) const override;

 private:
  Taxonomy taxonomy_;
  std::string endpoint_;
  std::shared_ptr<transport::JsonEndpoint> transport_;
};

// "cue" or "external:<endpoint>".
std::unique_ptr<ReasonClassifier> MakeReasonClassifier(std::string_view spec,
                                                       const Taxonomy& taxonomy);

// Softmax with max subtraction.
std::vector<double> Softmax(std::span<const double> scores);

// Most frequent non-neutral label, ties broken by taxonomy order; neutral
// only when every input is neutral. Throws kEmptyList.
Reason AggregateReasons(std::span<const Reason> reasons,
                        const Taxonomy& taxonomy);

// Branch reasons in branch order.
std::vector<Reason> ReasonSequence(const planner::ContentPlan& plan);

}  // namespace relworks::reasons

#endif  // RELWORKS_REASONS_H_
