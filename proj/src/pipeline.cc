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

#include "relworks/pipeline.h"

#include <algorithm>

#include "relworks/error.h"

namespace relworks::pipeline {

Setting ParseSetting(std::string_view name) {
  if (name == "standard") return Setting::kStandard;
  if (name == "full") return Setting::kFull;
  if (name == "update") return Setting::kUpdate;
  throw Error(ErrorCode::kInvalidArgument,
              "setting must be standard, full or update: " + std::string(name));
}

std::string_view SettingName(Setting s) {
  switch (s) {
    case Setting::kStandard:
      return "standard";
    case Setting::kFull:
      return "full";
    case Setting::kUpdate:
      return "update";
  }
  return "standard";
}

Query QueryFor(const corpus::PaperRecord& record) {
  return Query{record.id, record.year, record.title, record.abstract_text};
}

Engine::Engine(corpus::Corpus corpus, encode::PaperIndex index,
               planner::PlannerModel model, reasons::Taxonomy taxonomy,
               std::shared_ptr<const reasons::ReasonClassifier> classifier)
    : corpus_(std::move(corpus)),
      index_(std::move(index)),
      model_(std::move(model)),
      taxonomy_(std::move(taxonomy)),
      cue_(taxonomy_),
      classifier_(std::move(classifier)),
      fallback_(taxonomy_) {
  if (!classifier_) {
    classifier_ = std::make_shared<reasons::CueReasonClassifier>(taxonomy_);
  }
}

std::vector<std::string> Engine::GoldCited(std::string_view paper_id) const {
  const corpus::PaperRecord& r = corpus_.Get(paper_id);
  std::vector<std::string> out;
  if (r.related_work) {
    auto mentions = corpus::ExtractCitations(*r.related_work, corpus_);
    for (std::string& id : corpus::ResolvedIds(mentions)) {
      if (id != r.id) out.push_back(std::move(id));
    }
  } else if (r.cited_ids) {
    out = *r.cited_ids;
  }
  return out;
}

encode::SparseVector Engine::Embed(const Query& query) const {
  corpus::PaperRecord r;
  r.title = query.title;
  r.abstract_text = query.abstract_text;
  return index_.vectorizer().Embed(encode::EncoderText(r));
}

planner::PlanningProblem Engine::Problem(const Query& query,
                                         std::span<const std::string> candidates,
                                         bool no_reason) const {
  return planner::BuildProblem(query.id, query.abstract_text, Embed(query),
                               candidates, index_, corpus_, *classifier_,
                               no_reason);
}

PlanOutcome Engine::Plan(
    const Query& query,
    const std::optional<std::vector<std::string>>& candidates,
    const PlanOptions& options) const {
  if (query.abstract_text.empty()) {
    throw Error(ErrorCode::kEmptyAbstract, "query has no abstract");
  }
  PlanOutcome out;
  out.paper_id = query.id;
  switch (options.setting) {
    case Setting::kStandard:
      if (candidates) {
        out.candidates = *candidates;
      } else if (!query.id.empty() && corpus_.Find(query.id)) {
        out.candidates = GoldCited(query.id);
      } else {
        throw Error(ErrorCode::kInvalidArgument,
                    "standard setting needs a known paper or candidates");
      }
      break;
    case Setting::kFull: {
      if (options.n == 0) {
        throw Error(ErrorCode::kInvalidArgument, "full setting needs n > 0");
      }
      for (const auto& s :
           index_.RetrieveFor(query.id, Embed(query), query.year, options.n)) {
        out.candidates.push_back(s.id);
      }
      break;
    }
    case Setting::kUpdate:
      throw Error(ErrorCode::kInvalidArgument,
                  "planning runs in the standard or full setting");
  }
  if (out.candidates.empty()) {
    throw Error(ErrorCode::kNoCandidates, "no candidate papers for " + query.id);
  }
  planner::PlanningProblem problem =
      Problem(query, out.candidates, options.no_reason);
  out.result = planner::DecodePlan(problem, model_, options.decode);
  return out;
}

realize::RealizedDocument Engine::Realize(std::string_view x_abstract,
                                          const planner::ContentPlan& plan,
                                          const realize::Realizer& realizer,
                                          size_t max_words) const {
  planner::ValidatePlan(plan, taxonomy_);
  return realize::RealizeDocument(x_abstract, plan, corpus_, realizer,
                                  fallback_, {max_words});
}

segment::GoldDerivation Engine::Segment(
    std::string_view paper_id, std::string_view text,
    const std::optional<segment::SegmentStarts>& annotation) const {
  return segment::DeriveGoldPlan(paper_id, text, corpus_, index_.vectorizer(),
                                 cue_, annotation);
}

UpdateOutcome Engine::InsertAndUpdate(
    const Query& query, const segment::SegmentedRelatedWork& existing,
    const planner::ContentPlan& plan_before, const std::string& paper,
    const realize::Realizer& realizer, bool no_reason, size_t max_words) const {
  UpdateOutcome out;
  out.plan_before = plan_before;
  std::vector<std::string> ids = plan_before.AllPapers();
  if (std::find(ids.begin(), ids.end(), paper) != ids.end()) {
    throw Error(ErrorCode::kDuplicatePaper, paper + " is already planned");
  }
  ids.push_back(paper);
  planner::PlanningProblem problem = Problem(query, ids, no_reason);
  out.insert = planner::InsertPaper(plan_before, paper, problem, model_);
  out.document = realize::UpdateDocument(existing, out.insert.plan,
                                         out.insert.affected,
                                         query.abstract_text, corpus_, realizer,
                                         fallback_, {max_words});
  return out;
}

std::vector<std::string> CopyInputs(const corpus::Corpus& corpus,
                                    std::string_view x_abstract,
                                    const planner::ContentPlan& plan) {
  std::vector<std::string> inputs{std::string(x_abstract)};
  for (const std::string& id : plan.AllPapers()) {
    inputs.push_back(corpus.Get(id).abstract_text);
  }
  return inputs;
}

Json OutputRow(const std::string& paper_id, Setting setting,
               const planner::ContentPlan& plan,
               const realize::RealizedDocument& document,
               const std::string& source_text,
               const std::vector<std::string>& input_texts) {
  Json doc = document.ToJson();
  return Json{{"paper_id", paper_id},
              {"setting", SettingName(setting)},
              {"plan", planner::PlanToJson(plan)},
              {"text", doc.at("text")},
              {"segments", doc.at("segments")},
              {"source_text", source_text},
              {"input_texts", input_texts}};
}

metrics::RunOutput RunOutputFromRow(const Json& row) {
  try {
    metrics::RunOutput out;
    out.paper_id = row.at("paper_id").get<std::string>();
    out.text = row.at("text").get<std::string>();
    out.plan = planner::PlanFromJson(row.at("plan"));
    std::vector<std::string> by_branch(out.plan.branches.size());
    for (const Json& s : row.at("segments")) {
      int b = s.value("branch", -1);
      if (b >= 0 && static_cast<size_t>(b) < by_branch.size()) {
        by_branch[static_cast<size_t>(b)] = s.at("text").get<std::string>();
      }
    }
    out.segment_texts = std::move(by_branch);
    out.source_text = row.at("source_text").get<std::string>();
    out.input_texts = row.at("input_texts").get<std::vector<std::string>>();
    return out;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("output row: ") + e.what());
  }
}

std::vector<metrics::GoldItem> GoldItems(
    const corpus::Corpus& corpus,
    const std::vector<segment::GoldDerivation>& golds) {
  std::vector<metrics::GoldItem> items;
  for (const segment::GoldDerivation& g : golds) {
    const corpus::PaperRecord& r = corpus.Get(g.plan.source_paper_id);
    items.push_back({r.id, r.related_work.value_or(""), g.plan});
  }
  return items;
}

}  // namespace relworks::pipeline
