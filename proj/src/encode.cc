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

#include "relworks/encode.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "relworks/error.h"
#include "relworks/text.h"

namespace relworks::encode {

SparseVector::SparseVector(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  double sq = 0.0;
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && entries_[i].first <= entries_[i - 1].first) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sparse indices must be strictly increasing");
    }
    if (!std::isfinite(entries_[i].second)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite sparse weight");
    }
    sq += entries_[i].second * entries_[i].second;
  }
  norm_ = std::sqrt(sq);
}

SparseVector SparseVector::Scaled(double factor) const {
  std::vector<Entry> out = entries_;
  for (auto& e : out) e.second *= factor;
  return SparseVector(std::move(out));
}

double Dot(const SparseVector& a, const SparseVector& b) {
  const auto& x = a.entries();
  const auto& y = b.entries();
  size_t i = 0;
  size_t j = 0;
  double dot = 0.0;
  while (i < x.size() && j < y.size()) {
    if (x[i].first == y[j].first) {
      dot += x[i].second * y[j].second;
      ++i;
      ++j;
    } else if (x[i].first < y[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return dot;
}

double Cosine(const SparseVector& a, const SparseVector& b) {
  if (a.empty() || b.empty() || a.norm() == 0.0 || b.norm() == 0.0) return 0.0;
  return std::clamp(Dot(a, b) / (a.norm() * b.norm()), 0.0, 1.0);
}

SparseVector Centroid(std::span<const SparseVector* const> vectors) {
  if (vectors.empty()) return SparseVector();
  std::map<int, double> acc;
  for (const SparseVector* v : vectors) {
    for (const auto& [idx, w] : v->entries()) acc[idx] += w;
  }
  double inv = 1.0 / static_cast<double>(vectors.size());
  std::vector<SparseVector::Entry> out;
  out.reserve(acc.size());
  for (const auto& [idx, w] : acc) out.emplace_back(idx, w * inv);
  return SparseVector(std::move(out));
}

const std::vector<std::string>& DefaultStopwords() {
  static const std::vector<std::string> kStopwords = {
      "a",     "about", "above", "after", "all",   "also",   "an",
      "and",   "any",   "are",   "as",    "at",    "be",     "been",
      "being", "both",  "but",   "by",    "can",   "could",  "do",
      "does",  "each",  "for",   "from",  "had",   "has",    "have",
      "he",    "her",   "his",   "how",   "if",    "in",     "into",
      "is",    "it",    "its",   "may",   "more",  "most",   "much",
      "no",    "not",   "of",    "on",    "one",   "or",     "other",
      "our",   "out",   "over",  "she",   "so",    "some",   "such",
      "than",  "that",  "the",   "their", "them",  "then",   "there",
      "these", "they",  "this",  "those", "through", "to",   "under",
      "up",    "us",    "use",   "used",  "using", "very",   "was",
      "we",    "were",  "what",  "when",  "where", "which",  "while",
      "who",   "will",  "with",  "would", "you",   "your"};
  return kStopwords;
}

Vectorizer Vectorizer::Fit(std::span<const std::string> documents) {
  return Fit(documents, Options());
}

Vectorizer Vectorizer::Fit(std::span<const std::string> documents,
                           Options options) {
  Vectorizer v;
  v.options_ = std::move(options);
  v.stopword_set_.insert(v.options_.stopwords.begin(),
                         v.options_.stopwords.end());
  std::map<std::string, size_t> df;
  size_t non_empty = 0;
  for (const std::string& doc : documents) {
    std::vector<std::string> tokens = v.Tokenize(doc);
    if (!tokens.empty()) ++non_empty;
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (const std::string& t : tokens) ++df[t];
  }
  if (non_empty == 0) {
    throw Error(ErrorCode::kEmptyCorpus, "no document contains a usable token");
  }
  v.doc_count_ = documents.size();
  const double n = static_cast<double>(v.doc_count_);
  for (const auto& [term, count] : df) {
    v.vocabulary_.emplace(term, static_cast<int>(v.terms_.size()));
    v.terms_.push_back(term);
    v.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) +
                     1.0);
  }
  return v;
}

std::vector<std::string> Vectorizer::Tokenize(std::string_view text) const {
  std::vector<std::string> out;
  for (std::string& tok : text::WordTokens(text)) {
    if (tok.size() < options_.min_token_length) continue;
    if (stopword_set_.count(tok) > 0) continue;
    out.push_back(std::move(tok));
  }
  return out;
}

SparseVector Vectorizer::Embed(std::string_view text) const {
  std::map<int, double> tf;
  for (const std::string& tok : Tokenize(text)) {
    auto it = vocabulary_.find(tok);
    if (it != vocabulary_.end()) tf[it->second] += 1.0;
  }
  std::vector<SparseVector::Entry> entries;
  entries.reserve(tf.size());
  for (const auto& [idx, count] : tf) {
    entries.emplace_back(idx, count * idf_[static_cast<size_t>(idx)]);
  }
  return SparseVector(std::move(entries));
}

int Vectorizer::IndexOf(std::string_view term) const {
  auto it = vocabulary_.find(std::string(term));
  return it == vocabulary_.end() ? -1 : it->second;
}

double Vectorizer::Idf(std::string_view term) const {
  int idx = IndexOf(term);
  return idx < 0 ? 0.0 : idf_[static_cast<size_t>(idx)];
}

Json Vectorizer::ToJson() const {
  return Json{{"terms", terms_},
              {"idf", idf_},
              {"doc_count", doc_count_},
              {"stopwords", options_.stopwords},
              {"min_token_length", options_.min_token_length}};
}

Vectorizer Vectorizer::FromJson(const Json& j) {
  Vectorizer v;
  v.options_.stopwords = j.at("stopwords").get<std::vector<std::string>>();
  v.options_.min_token_length = j.at("min_token_length").get<size_t>();
  v.stopword_set_.insert(v.options_.stopwords.begin(),
                         v.options_.stopwords.end());
  v.terms_ = j.at("terms").get<std::vector<std::string>>();
  v.idf_ = j.at("idf").get<std::vector<double>>();
  v.doc_count_ = j.at("doc_count").get<size_t>();
  if (v.terms_.size() != v.idf_.size()) {
    throw Error(ErrorCode::kFormat, "vectorizer terms/idf length mismatch");
  }
  for (size_t i = 0; i < v.terms_.size(); ++i) {
    if (v.idf_[i] <= 0.0) throw Error(ErrorCode::kFormat, "idf must be > 0");
    v.vocabulary_.emplace(v.terms_[i], static_cast<int>(i));
  }
  return v;
}

std::vector<ScoredId> RetrieveTopNScored(const SparseVector& query,
                                         std::span<const IndexEntry> index,
                                         size_t n) {
  std::vector<ScoredId> scored;
  scored.reserve(index.size());
  for (const IndexEntry& e : index) {
    scored.push_back(ScoredId{e.id, Cosine(query, e.vector)});
  }
  auto better = [](const ScoredId& a, const ScoredId& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  };
  size_t k = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<long>(k),
                    scored.end(), better);
  scored.resize(k);
  return scored;
}

std::vector<std::string> RetrieveTopN(const SparseVector& query,
                                      std::span<const IndexEntry> index,
                                      size_t n) {
  std::vector<std::string> ids;
  for (ScoredId& s : RetrieveTopNScored(query, index, n)) {
    ids.push_back(std::move(s.id));
  }
  return ids;
}

std::string EncoderText(const corpus::PaperRecord& record) {
  return record.title + " " + record.abstract_text;
}

PaperIndex PaperIndex::Build(const corpus::Corpus& corpus) {
  std::vector<std::string> docs;
  docs.reserve(corpus.size());
  for (const auto& r : corpus.records()) docs.push_back(EncoderText(r));
  PaperIndex index;
  index.vectorizer_ = Vectorizer::Fit(docs);
  for (size_t i = 0; i < corpus.size(); ++i) {
    const auto& r = corpus.records()[i];
    index.by_id_.emplace(r.id, index.entries_.size());
    index.entries_.push_back(
        IndexEntry{r.id, r.year, index.vectorizer_.Embed(docs[i])});
  }
  return index;
}

const IndexEntry* PaperIndex::Find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

std::vector<ScoredId> PaperIndex::RetrieveFor(std::string_view paper_id,
                                              const SparseVector& query,
                                              int query_year, size_t n) const {
  std::vector<IndexEntry> eligible;
  for (const IndexEntry& e : entries_) {
    if (e.id == paper_id || e.year > query_year) continue;
    eligible.push_back(e);
  }
  return RetrieveTopNScored(query, eligible, n);
}

Json PaperIndex::ToJson() const {
  Json docs = Json::array();
  for (const IndexEntry& e : entries_) {
    Json entries = Json::array();
    for (const auto& [idx, w] : e.vector.entries()) entries.push_back({idx, w});
    docs.push_back({{"id", e.id}, {"year", e.year}, {"entries", entries}});
  }
  return Json{{"format", "relworks.tfidf"},
              {"version", kFormatVersion},
              {"vectorizer", vectorizer_.ToJson()},
              {"documents", docs}};
}

PaperIndex PaperIndex::FromJson(const Json& j) {
  if (j.value("format", "") != "relworks.tfidf") {
    throw Error(ErrorCode::kFormat, "not a relworks.tfidf index");
  }
  if (j.value("version", 0) != kFormatVersion) {
    throw Error(ErrorCode::kFormat, "unsupported index version");
  }
  PaperIndex index;
  index.vectorizer_ = Vectorizer::FromJson(j.at("vectorizer"));
  for (const Json& d : j.at("documents")) {
    std::vector<SparseVector::Entry> entries;
    for (const Json& e : d.at("entries")) {
      entries.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
    }
    std::string id = d.at("id").get<std::string>();
    index.by_id_.emplace(id, index.entries_.size());
    index.entries_.push_back(IndexEntry{std::move(id), d.at("year").get<int>(),
                                        SparseVector(std::move(entries))});
  }
  return index;
}

void PaperIndex::Save(const std::filesystem::path& path) const {
  io::WriteFileAtomic(path, ToJson().dump() + "\n");
}

PaperIndex PaperIndex::Load(const std::filesystem::path& path) {
  return FromJson(io::ReadJson(path));
}

}  // namespace relworks::encode
