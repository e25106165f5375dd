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

// Shared pipeline operations behind the command line and the HTTP service:
// workspace file names, planning for the standard and full settings,
// realization, single-paper updates and conversion of run outputs into
// evaluation inputs.

#ifndef RELWORKS_PIPELINE_H_
#define RELWORKS_PIPELINE_H_

#include <climits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relworks/corpus.h"
#include "relworks/encode.h"
#include "relworks/metrics.h"
#include "relworks/planner.h"
#include "relworks/realize.h"
#include "relworks/reasons.h"
#include "relworks/segment.h"

namespace relworks::pipeline {

using Json = nlohmann::json;

inline constexpr std::string_view kCorpusFile = "corpus.jsonl";
inline constexpr std::string_view kDatasetFile = "dataset.jsonl";
inline constexpr std::string_view kSplitsFile = "splits.json";
inline constexpr std::string_view kSkipReportFile = "skip_report.json";
inline constexpr std::string_view kIndexFile = "index.tfidf";
inline constexpr std::string_view kGoldPlansFile = "gold_plans.jsonl";
inline constexpr std::string_view kModelFile = "planner.model.json";

enum class Setting { kStandard, kFull, kUpdate };

// Throws kInvalidArgument.
Setting ParseSetting(std::string_view name);
std::string_view SettingName(Setting s);

// A citing paper known to the corpus or supplied as raw text.
struct Query {
  std::string id;
  int year = INT_MAX;
  std::string title;
  std::string abstract_text;
};

Query QueryFor(const corpus::PaperRecord& record);

struct PlanOptions {
  Setting setting = Setting::kStandard;
  size_t n = 10;  // retrieval depth in the full setting
  planner::DecodeOptions decode;
  bool no_reason = false;  // every pairwise reason forced to neutral
};

struct PlanOutcome {
  std::string paper_id;
  std::vector<std::string> candidates;
  planner::DecodeResult result;
};

struct UpdateOutcome {
  planner::ContentPlan plan_before;
  planner::InsertResult insert;
  realize::RealizedDocument document;
};

// Immutable snapshot of everything a request needs.
class Engine {
 public:
  // A null classifier selects the cue lexicon.
  Engine(corpus::Corpus corpus, encode::PaperIndex index,
         planner::PlannerModel model, reasons::Taxonomy taxonomy,
         std::shared_ptr<const reasons::ReasonClassifier> classifier = nullptr);

  const corpus::Corpus& corpus() const { return corpus_; }
  const encode::PaperIndex& index() const { return index_; }
  const planner::PlannerModel& model() const { return model_; }
  const reasons::Taxonomy& taxonomy() const { return taxonomy_; }
  const reasons::ReasonClassifier& classifier() const { return *classifier_; }
  const reasons::CueReasonClassifier& cue() const { return cue_; }
  const realize::TemplateRealizer& fallback() const { return fallback_; }

  // Resolved citations of the paper's related work (its cited_ids when the
  // text is absent). Throws kUnknownPaper.
  std::vector<std::string> GoldCited(std::string_view paper_id) const;

  encode::SparseVector Embed(const Query& query) const;

  // Candidates: `candidates` or the gold cited set (standard), top-n
  // retrieval (full). Throws kInvalidArgument, kNoCandidates.
  PlanOutcome Plan(const Query& query,
                   const std::optional<std::vector<std::string>>& candidates,
                   const PlanOptions& options) const;

  planner::PlanningProblem Problem(const Query& query,
                                   std::span<const std::string> candidates,
                                   bool no_reason) const;

  realize::RealizedDocument Realize(std::string_view x_abstract,
                                    const planner::ContentPlan& plan,
                                    const realize::Realizer& realizer,
                                    size_t max_words = 40) const;

  // Segments an existing section (annotation optional) into the plan it
  // realizes.
  segment::GoldDerivation Segment(std::string_view paper_id,
                                  std::string_view text,
                                  const std::optional<segment::SegmentStarts>&
                                      annotation) const;

  // Inserts `paper` into the plan realized by `existing` and re-realizes
  // the affected segment only.
  UpdateOutcome InsertAndUpdate(const Query& query,
                                const segment::SegmentedRelatedWork& existing,
                                const planner::ContentPlan& plan_before,
                                const std::string& paper,
                                const realize::Realizer& realizer,
                                bool no_reason, size_t max_words = 40) const;

 private:
  corpus::Corpus corpus_;
  encode::PaperIndex index_;
  planner::PlannerModel model_;
  reasons::Taxonomy taxonomy_;
  reasons::CueReasonClassifier cue_;
  std::shared_ptr<const reasons::ReasonClassifier> classifier_;
  realize::TemplateRealizer fallback_;
};

// Abstract of x followed by the abstracts of every planned paper.
std::vector<std::string> CopyInputs(const corpus::Corpus& corpus,
                                    std::string_view x_abstract,
                                    const planner::ContentPlan& plan);

// One row of a realize/update output file.
Json OutputRow(const std::string& paper_id, Setting setting,
               const planner::ContentPlan& plan,
               const realize::RealizedDocument& document,
               const std::string& source_text,
               const std::vector<std::string>& input_texts);
metrics::RunOutput RunOutputFromRow(const Json& row);

// Gold items from derived plans and the corpus sections.
std::vector<metrics::GoldItem> GoldItems(
    const corpus::Corpus& corpus,
    const std::vector<segment::GoldDerivation>& golds);

}  // namespace relworks::pipeline

#endif  // RELWORKS_PIPELINE_H_
