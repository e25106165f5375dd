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

// Evaluation metrics: LCS-based Rouge-L, edit-based SARI over n-gram sets,
// n-gram copy fraction, clustering purity and perplexity of citation-reason
// sequences under a smoothed bigram model, plus run-level reports.

#ifndef RELWORKS_METRICS_H_
#define RELWORKS_METRICS_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relworks/io.h"
#include "relworks/plan.h"
#include "relworks/reasons.h"

namespace relworks::metrics {

using Json = nlohmann::json;
using Tokens = std::vector<std::string>;

// Lowercase runs of letters and digits.
Tokens Tokenize(std::string_view text);

size_t LcsLength(std::span<const std::string> a, std::span<const std::string> b);

struct RougeScore {
  double p = 0.0;
  double r = 0.0;
  double f = 0.0;
};

// Throws kEmptyReference.
RougeScore RougeL(std::span<const std::string> candidate,
                  std::span<const std::string> reference);

struct SariBreakdown {
  double add = 0.0;   // F1 of added n-grams, averaged over n = 1..4
  double keep = 0.0;
  double del = 0.0;
  double score = 0.0; // mean of the three
};

// For each n: S, C and R are the n-gram sets of source, candidate and the
// union of references. ADD compares C\S with R\S, KEEP compares C∩S with
// R∩S, DELETE compares S\C with S\R. Precision is 1 when the system set is
// empty and recall is 1 when the gold set is empty. Throws kNoReferences.
SariBreakdown SariDetailed(std::span<const std::string> source,
                           std::span<const std::string> candidate,
                           std::span<const Tokens> references);
double Sari(std::span<const std::string> source,
            std::span<const std::string> candidate,
            std::span<const Tokens> references);

// Share of distinct output n-grams found in any input; 0 when the output is
// shorter than n. Throws kInvalidArgument for n == 0.
double CopyFraction(std::span<const std::string> output,
                    std::span<const Tokens> inputs, size_t n);

using Partition = std::vector<std::vector<std::string>>;

// (1/N) sum over predicted clusters of the largest overlap with a gold
// cluster. Throws kItemSetMismatch, kEmptySet.
double Purity(const Partition& predicted, const Partition& gold);

// Bigram model over reason labels with a start context and, optionally, an
// end outcome.
class ReasonLM {
 public:
  struct Options {
    bool end_marker = true;
    bool smoothing = true;  // add-one
  };

  ReasonLM(std::vector<std::string> vocabulary, Options options);
  explicit ReasonLM(std::vector<std::string> vocabulary)
      : ReasonLM(std::move(vocabulary), Options()) {}

  // Throws kUnknownReason.
  void Fit(std::span<const std::vector<reasons::Reason>> sequences);

  // Outcomes are the vocabulary plus the end marker when enabled.
  size_t outcome_count() const;
  // `prev` empty means sentence start; `next` empty means end marker.
  double Prob(std::string_view prev, std::string_view next) const;
  // exp of the mean negative log-probability per predicted token.
  // Throws kEmptySet.
  double Perplexity(std::span<const std::vector<reasons::Reason>> sequences) const;

 private:
  size_t Context(std::string_view prev) const;
  size_t Outcome(std::string_view next) const;

  std::vector<std::string> vocabulary_;
  Options options_;
  std::vector<std::vector<double>> counts_;  // context x outcome
  std::vector<double> totals_;
};

struct KPerplexity {
  double forward = 0.0;  // system under a model of human sequences
  double reverse = 0.0;  // human under a model of system sequences
  double mean = 0.0;
};

// Throws kEmptySet.
KPerplexity ComputeKPerplexity(
    std::span<const std::vector<reasons::Reason>> system,
    std::span<const std::vector<reasons::Reason>> human,
    const std::vector<std::string>& vocabulary,
    ReasonLM::Options options = {});

struct RunOutput {
  std::string paper_id;
  std::string text;
  planner::ContentPlan plan;
  std::vector<std::string> segment_texts;  // one per plan branch
  std::string source_text;                 // SARI source
  std::vector<std::string> input_texts;    // copy-fraction inputs
};

struct GoldItem {
  std::string paper_id;
  std::string text;
  planner::ContentPlan plan;
};

struct ExampleMetrics {
  std::string paper_id;
  RougeScore rouge_l;
  double sari = 0.0;
  std::array<double, 4> copy_fraction{};
  std::optional<double> purity;
  size_t purity_items = 0;
  double reason_correspondence = 0.0;
};

struct MetricReport {
  std::string setting;
  std::string run;
  std::vector<ExampleMetrics> examples;
  size_t unmatched_outputs = 0;
  RougeScore rouge_l;
  double sari = 0.0;
  std::array<double, 4> copy_fraction{};
  double purity = 0.0;
  double reason_correspondence = 0.0;
  KPerplexity k_perplexity;

  Json ToJson() const;
  // Plain-text tables: headline metrics and the n = 1..4 copy fractions.
  std::string ToTable() const;
};

struct EvalConfig {
  std::string setting = "standard";
  std::string run = "run";
};

// Examples are matched by paper id (kAlignmentError when none match).
// Purity uses the items shared by the predicted and gold plans. Reason
// correspondence is the share of segments whose cue-lexicon reason equals
// the planned branch reason.
MetricReport EvaluateRun(std::span<const RunOutput> outputs,
                         std::span<const GoldItem> golds,
                         const reasons::CueReasonClassifier& classifier,
                         const EvalConfig& config);

// Structural check of a report against the relworks.report v1 layout;
// returns human-readable problems (empty when valid).
std::vector<std::string> ValidateReport(const Json& report);

}  // namespace relworks::metrics

#endif  // RELWORKS_METRICS_H_
