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

// Paper records, author-year citation keys, citation extraction from
// related-work prose and construction of the (abstract, cited set, gold
// related work) dataset with its year-based splits.

#ifndef RELWORKS_CORPUS_H_
#define RELWORKS_CORPUS_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relworks/io.h"

namespace relworks::corpus {

using Json = nlohmann::json;

struct PaperRecord {
  std::string id;
  std::string title;
  std::vector<std::string> authors;  // surnames, citation order
  int year = 0;
  // Disambiguation letter ("a" in "2016a"); only set when the raw data
  // carries it.
  std::string year_suffix;
  std::string abstract_text;
  std::optional<std::string> related_work;
  std::optional<std::vector<std::string>> cited_ids;

  bool operator==(const PaperRecord&) const = default;
};

// Accepts {id, title, authors, year, abstract, related_work?, cited_ids?,
// year_suffix?}. `year` may be an integer or a string such as "2016" or
// "2016a". Text fields are whitespace-collapsed.
PaperRecord ParseRecord(const Json& raw);
Json SerializeRecord(const PaperRecord& record);

struct NormalizedKey {
  std::string surname;  // first author, ASCII-lowercased
  int year = 0;
  std::string suffix;

  auto operator<=>(const NormalizedKey&) const = default;
};

class CitationKey {
 public:
  CitationKey() = default;
  CitationKey(std::string surface, NormalizedKey normalized)
      : surface_(std::move(surface)), normalized_(std::move(normalized)) {}

  const std::string& surface() const { return surface_; }
  const NormalizedKey& normalized() const { return normalized_; }

  // Keys are equal iff their normalized forms are.
  bool operator==(const CitationKey& other) const {
    return normalized_ == other.normalized_;
  }

 private:
  std::string surface_;
  NormalizedKey normalized_;
};

// "Lin, 2004" / "Ravi and Larochelle, 2017" / "Vinyals et al., 2016".
CitationKey MakeCitationKey(std::span<const std::string> authors, int year,
                            std::string_view suffix = "");

CitationKey CitationKeyFor(const PaperRecord& record);

// Immutable, read-only after construction; safe to share across threads.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<PaperRecord> records);

  const std::vector<PaperRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }

  const PaperRecord* Find(std::string_view id) const;
  // Throws kUnknownPaper.
  const PaperRecord& Get(std::string_view id) const;

  // A key without suffix matches every paper with that (surname, year); a
  // suffixed key only matches papers carrying the same suffix. Resolves iff
  // exactly one paper matches.
  std::optional<std::string> Resolve(const NormalizedKey& key) const;

 private:
  std::vector<PaperRecord> records_;
  std::unordered_map<std::string, size_t> by_id_;
  std::map<std::pair<std::string, int>, std::vector<size_t>> by_key_;
};

struct CitationMention {
  CitationKey key;
  std::optional<std::string> paper_id;
  size_t begin = 0;  // byte span of the mention in the scanned text
  size_t end = 0;
};

// Finds "(A, 2004)", "(A and B, 2017)", "(A et al., 2016)" including
// ";"-separated groups, and inline "A et al. (2016)" / "A and B (2017)" /
// "A (2004)". Mentions come back in document order with non-overlapping
// spans; unresolved or ambiguous keys get no paper id.
std::vector<CitationMention> ExtractCitations(std::string_view text,
                                              const Corpus& corpus);

// Same scanner without resolution.
std::vector<CitationMention> ScanCitations(std::string_view text);

// De-duplicated resolved ids in first-mention order.
std::vector<std::string> ResolvedIds(std::span<const CitationMention> mentions);

struct ParallelExample {
  std::string paper_id;
  int year = 0;
  std::string x;  // abstract of the citing paper
  std::vector<std::string> cited;
  std::string gold_related_work;

  bool operator==(const ParallelExample&) const = default;
};

Json SerializeExample(const ParallelExample& example);
ParallelExample ParseExample(const Json& raw);

struct DatasetBuild {
  std::vector<ParallelExample> examples;
  std::vector<std::string> skipped_ids;
};

// One example per record whose related work resolves at least one citation
// (self-citations excluded).
DatasetBuild BuildParallelDataset(const Corpus& corpus);

struct SplitConfig {
  int train_year_max = 2019;
  size_t min_citations = 15;
  double validation_ratio = 0.48;
  uint64_t seed = 13;
};

struct DatasetSplit {
  std::vector<ParallelExample> train;
  std::vector<ParallelExample> validation;
  std::vector<ParallelExample> test;
  // Later-year examples dropped by the min_citations filter.
  std::vector<std::string> filtered_out;
  SplitConfig config;
};

// Throws kEmptyEvaluationSplit when no later-year example has enough
// citations.
DatasetSplit SplitDataset(const std::vector<ParallelExample>& examples,
                          const SplitConfig& config);

// {"version":1, "config":{...}, "train":[ids], "validation":[...], ...}
Json SerializeSplitIds(const DatasetSplit& split);

// Reads every *.jsonl file in `dir` (sorted by file name).
std::vector<PaperRecord> ReadRecordsFromDirectory(
    const std::filesystem::path& dir);
std::vector<PaperRecord> ReadRecordsFile(const std::filesystem::path& path);

}  // namespace relworks::corpus

#endif  // RELWORKS_CORPUS_H_
