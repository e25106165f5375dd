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

// Segment-by-segment surface realization of a content plan. The built-in
// realizer fills per-reason templates with a central sentence of each cited
// abstract; an external realizer can be reached over HTTP or a child
// process speaking line-delimited JSON.

#ifndef RELWORKS_REALIZE_H_
#define RELWORKS_REALIZE_H_

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "relworks/corpus.h"
#include "relworks/io.h"
#include "relworks/plan.h"
#include "relworks/reasons.h"
#include "relworks/segment.h"

namespace relworks::transport {
class JsonEndpoint;
}  // namespace relworks::transport

namespace relworks::realize {

using Json = nlohmann::json;

inline constexpr std::string_view kSeparator = "<|sep|>";
inline constexpr int kProtocolVersion = 1;

struct CitedPaper {
  std::string id;
  corpus::CitationKey key;
  std::string title;
  std::string abstract_text;
};

struct RealizationRequest {
  std::string x_abstract;
  std::vector<CitedPaper> branch;
  reasons::Reason reason;
  std::string previous;  // empty for the first segment
  size_t max_words = 40;
};

// "<reason:PSim>"
std::string ReasonToken(const reasons::Reason& reason);
// x, each cited abstract, reason token and previous segment, joined with
// " <|sep|> ". Separator occurrences inside the fields are removed.
std::string BuildPrompt(const RealizationRequest& request);
// {version, x, cited:[{key,title,abstract}], reason, previous, prompt}
Json RequestToJson(const RealizationRequest& request);

// Sentence of `abstract_text` with the highest cosine between its term
// frequency vector and the mean of all sentence vectors; earliest wins
// ties. Returned raw (untrimmed).
std::string CentralSentence(std::string_view abstract_text);
// Central sentence with citations and separators removed, cut to
// `max_words`, trailing punctuation dropped and a leading "We" stripped.
std::string Gist(std::string_view abstract_text, size_t max_words);

class Realizer {
 public:
  virtual ~Realizer() = default;
  virtual std::string id() const = 0;
  virtual std::string Realize(const RealizationRequest& request) const = 0;
};

// Throws kEmptyBranch, kUnknownReason.
class TemplateRealizer : public Realizer {
 public:
  explicit TemplateRealizer(reasons::Taxonomy taxonomy);
  std::string id() const override { return "template"; }
  std::string Realize(const RealizationRequest& request) const override;

 private:
  reasons::Taxonomy taxonomy_;
};

// POST <base>/realize or "stdio:<command>". Reply {text[, version]}.
// Throws kTimeout, kProtocolError.
class ExternalRealizer : public Realizer {
 public:
  ExternalRealizer(std::string endpoint,
                   std::chrono::milliseconds timeout = std::chrono::seconds(30));
  std::string id() const override { return "external:" + endpoint_; }
  std::string Realize(const RealizationRequest& request) const override;

 private:
  std::string endpoint_;
  std::shared_ptr<transport::JsonEndpoint> transport_;
};

// "template" or "external:<endpoint>".
std::unique_ptr<Realizer> MakeRealizer(std::string_view spec,
                                       const reasons::Taxonomy& taxonomy,
                                       std::chrono::milliseconds timeout =
                                           std::chrono::seconds(30));

enum class Provenance { kTemplate, kExternal, kFallback, kExisting };
std::string_view ProvenanceName(Provenance p);

struct RealizedSegment {
  int branch = -1;  // -1 for carried-over unaligned text
  std::string text;
  Provenance provenance = Provenance::kTemplate;
  std::string warning;  // why a fallback happened
};

struct RealizedDocument {
  std::vector<RealizedSegment> segments;

  // Segments joined with single spaces.
  std::string Text() const;
  Json ToJson() const;
};

// Builds the request for one plan branch. Throws kUnknownPaper.
RealizationRequest MakeRequest(const corpus::Corpus& corpus,
                               std::string_view x_abstract,
                               const planner::PlanBranch& branch,
                               std::string previous, size_t max_words = 40);

struct RealizeOptions {
  size_t max_words = 40;
};

// Segments in branch order, each conditioned on the previous one. Failures
// of a non-template realizer fall back to `fallback` for that segment.
RealizedDocument RealizeDocument(std::string_view x_abstract,
                                 const planner::ContentPlan& plan,
                                 const corpus::Corpus& corpus,
                                 const Realizer& realizer,
                                 const TemplateRealizer& fallback,
                                 const RealizeOptions& options = {});

// Re-realizes only branch `affected` of `plan` (the plan after insertion)
// using the text preceding that segment in `existing`. A branch index equal
// to the number of aligned segments appends a new segment. Every other
// segment, including leading unaligned text, is copied byte for byte.
// Throws kAlignmentError.
RealizedDocument UpdateDocument(const segment::SegmentedRelatedWork& existing,
                                const planner::ContentPlan& plan,
                                size_t affected, std::string_view x_abstract,
                                const corpus::Corpus& corpus,
                                const Realizer& realizer,
                                const TemplateRealizer& fallback,
                                const RealizeOptions& options = {});

// Wraps realized text into a segmentation aligned to `plan`.
segment::SegmentedRelatedWork ToSegmented(const RealizedDocument& doc,
                                          const planner::ContentPlan& plan);

}  // namespace relworks::realize

#endif  // RELWORKS_REALIZE_H_
