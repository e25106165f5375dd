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

// Sentence splitting, same/different-segment boundary classification and
// derivation of gold content plans from related-work sections.

#ifndef RELWORKS_SEGMENT_H_
#define RELWORKS_SEGMENT_H_

#include <array>
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

namespace relworks::segment {

using Json = nlohmann::json;

// Splits after '.', '!' or '?' when followed by whitespace and an
// uppercase letter, digit, quote or '('. No split inside parentheses,
// after single-letter initials or after abbreviations such as "et al.",
// "e.g.", "i.e.", "Fig.". Sentences are trimmed; removing whitespace from
// their concatenation gives the input without whitespace.
std::vector<std::string> SplitSentences(std::string_view text);

struct SegmenterWeights {
  double bias = -1.0;
  double overlap = -4.0;       // Jaccard of citation keys in s1 and s2
  double cosine = -3.0;        // tf-idf cosine of the two sentences
  double cue = 3.0;            // s2 opens with a discourse cue
  double new_citation = 2.0;   // s2 cites a key absent from s1
  std::vector<std::string> cues = {"however", "in contrast", "similarly",
                                   "recently"};

  Json ToJson() const;
  static SegmenterWeights FromJson(const Json& j);
};

struct BoundaryFeatures {
  double overlap = 0.0;
  double cosine = 0.0;
  double cue = 0.0;
  double new_citation = 0.0;

  std::array<double, 4> AsArray() const {
    return {overlap, cosine, cue, new_citation};
  }
};

BoundaryFeatures ComputeBoundaryFeatures(std::string_view s1,
                                         std::string_view s2,
                                         const SegmenterWeights& weights,
                                         const encode::Vectorizer& vectorizer);

struct BoundaryPrediction {
  bool different = false;
  double p_different = 0.0;
};

// P(DIFFERENT) = sigmoid(bias + w . features); DIFFERENT iff >= 0.5.
BoundaryPrediction ScoreBoundary(const BoundaryFeatures& features,
                                 const SegmenterWeights& weights);
BoundaryPrediction PredictBoundary(std::string_view s1, std::string_view s2,
                                   const SegmenterWeights& weights,
                                   const encode::Vectorizer& vectorizer);

struct LabeledBoundary {
  BoundaryFeatures features;
  bool different = false;
};

// Logistic-regression refit by batch gradient descent, starting from
// `initial`. Cues are copied from `initial`.
SegmenterWeights FitSegmenterWeights(std::span<const LabeledBoundary> samples,
                                     const SegmenterWeights& initial,
                                     int iterations = 500,
                                     double learning_rate = 0.5,
                                     double l2 = 1e-3);

struct Segment {
  std::string text;
  size_t sentence_begin = 0;  // [begin, end) sentence indices
  size_t sentence_end = 0;
  std::vector<std::string> cited;
  reasons::Reason reason;
  // Plan branch realized by this segment; -1 for leading segments without
  // resolvable citations.
  int branch = -1;
};

struct SegmentedRelatedWork {
  std::string source_paper_id;
  std::vector<Segment> segments;

  // Index of the first segment aligned to a branch.
  size_t FirstAligned() const;
};

struct GoldDerivation {
  SegmentedRelatedWork segmented;
  planner::ContentPlan plan;
  size_t merged_segments = 0;   // merged backward into their predecessor
  size_t leading_unaligned = 0; // kept as text, absent from the plan
  bool from_annotation = false;
};

// Sentence indices that start a new segment (index 0 is implied).
using SegmentStarts = std::vector<size_t>;

// Reads `<dir>/<paper_id>.json`: either {"paper_id", "segment_starts":[..]}
// or a bare array. nullopt if the file does not exist.
std::optional<SegmentStarts> LoadAnnotation(const std::filesystem::path& dir,
                                            std::string_view paper_id);

// Each cited paper belongs to the segment of its first mention.
// Segments that introduce no new resolved paper merge into the previous
// segment; leading ones stay unaligned. Segment reasons come from the cue
// lexicon applied to the segment prose. Throws kNoCitations.
GoldDerivation DeriveGoldPlan(std::string_view paper_id,
                              std::string_view related_work,
                              const corpus::Corpus& corpus,
                              const encode::Vectorizer& vectorizer,
                              const reasons::CueReasonClassifier& classifier,
                              const std::optional<SegmentStarts>& annotation,
                              const SegmenterWeights& weights = {});

Json SegmentedToJson(const SegmentedRelatedWork& doc);
SegmentedRelatedWork SegmentedFromJson(const Json& j);

// {"paper_id", "plan", "segmentation", "metadata"}
Json GoldDerivationToJson(const GoldDerivation& gold);
GoldDerivation GoldDerivationFromJson(const Json& j);

}  // namespace relworks::segment

#endif  // RELWORKS_SEGMENT_H_
