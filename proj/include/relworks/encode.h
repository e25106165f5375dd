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

// TF-IDF paper encoder, sparse cosine similarity and top-n retrieval.
//
// Weighting is raw term frequency times smoothed idf:
//   idf(t) = ln((1 + N) / (1 + df(t))) + 1
// so every vocabulary term has idf >= 1.

#ifndef RELWORKS_ENCODE_H_
#define RELWORKS_ENCODE_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "relworks/corpus.h"
#include "relworks/io.h"

namespace relworks::encode {

using Json = nlohmann::json;

class SparseVector {
 public:
  using Entry = std::pair<int, double>;

  SparseVector() = default;

  // Entries must have strictly increasing indices and finite weights.
  explicit SparseVector(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  double norm() const { return norm_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

  SparseVector Scaled(double factor) const;

  bool operator==(const SparseVector& other) const {
    return entries_ == other.entries_;
  }

 private:
  std::vector<Entry> entries_;
  double norm_ = 0.0;
};

double Dot(const SparseVector& a, const SparseVector& b);

// dot(a, b) / (|a| |b|), clamped to [0, 1]; 0 when either side is empty.
double Cosine(const SparseVector& a, const SparseVector& b);

// Element-wise mean; empty input gives an empty vector.
SparseVector Centroid(std::span<const SparseVector* const> vectors);

const std::vector<std::string>& DefaultStopwords();

class Vectorizer {
 public:
  struct Options {
    std::vector<std::string> stopwords = DefaultStopwords();
    size_t min_token_length = 2;
  };

  Vectorizer() = default;

  // Throws kEmptyCorpus if no document yields a token.
  static Vectorizer Fit(std::span<const std::string> documents);
  static Vectorizer Fit(std::span<const std::string> documents,
                        Options options);

  // Lowercase, split on non-alphanumerics, drop short tokens and stopwords.
  std::vector<std::string> Tokenize(std::string_view text) const;

  // tf(t) * idf(t) over in-vocabulary terms.
  SparseVector Embed(std::string_view text) const;

  size_t vocabulary_size() const { return terms_.size(); }
  size_t doc_count() const { return doc_count_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  // -1 if absent.
  int IndexOf(std::string_view term) const;
  double Idf(std::string_view term) const;

  Json ToJson() const;
  static Vectorizer FromJson(const Json& j);

 private:
  Options options_;
  std::unordered_set<std::string> stopword_set_;
  std::vector<std::string> terms_;  // column -> term, sorted
  std::unordered_map<std::string, int> vocabulary_;
  std::vector<double> idf_;
  size_t doc_count_ = 0;
};

struct IndexEntry {
  std::string id;
  int year = 0;
  SparseVector vector;
};

struct ScoredId {
  std::string id;
  double score = 0.0;
};

// The n highest cosine scores, score descending then id ascending.
std::vector<ScoredId> RetrieveTopNScored(const SparseVector& query,
                                         std::span<const IndexEntry> index,
                                         size_t n);
std::vector<std::string> RetrieveTopN(const SparseVector& query,
                                      std::span<const IndexEntry> index,
                                      size_t n);

struct RetrievalPreset {
  std::string_view name;
  size_t n;
};
// Candidate-pool sizes of the two full-corpus configurations.
inline constexpr RetrievalPreset kRetrievalPresets[] = {{"full-10", 10},
                                                        {"full-22", 22}};

// Title followed by abstract.
std::string EncoderText(const corpus::PaperRecord& record);

// Vectorizer fitted on the corpus plus one embedded vector per paper.
// Immutable after Build/Load.
class PaperIndex {
 public:
  static constexpr int kFormatVersion = 1;

  PaperIndex() = default;
  static PaperIndex Build(const corpus::Corpus& corpus);

  const Vectorizer& vectorizer() const { return vectorizer_; }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  const IndexEntry* Find(std::string_view id) const;

  // Full-corpus candidate retrieval for a citing paper: excludes the paper
  // itself and anything published after it.
  std::vector<ScoredId> RetrieveFor(std::string_view paper_id,
                                    const SparseVector& query, int query_year,
                                    size_t n) const;

  Json ToJson() const;
  static PaperIndex FromJson(const Json& j);
  void Save(const std::filesystem::path& path) const;
  static PaperIndex Load(const std::filesystem::path& path);

 private:
  Vectorizer vectorizer_;
  std::vector<IndexEntry> entries_;
  std::unordered_map<std::string, size_t> by_id_;
};

}  // namespace relworks::encode

#endif  // RELWORKS_ENCODE_H_
