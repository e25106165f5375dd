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

#include "relworks/corpus.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "relworks/error.h"
#include "relworks/text.h"

namespace relworks::corpus {
namespace {

namespace fs = std::filesystem;

bool IsDigit(char c) { return c >= '0' && c <= '9'; }
bool IsUpper(unsigned char c) { return (c >= 'A' && c <= 'Z') || c >= 0x80; }
bool IsLowerAsciiLetter(char c) { return c >= 'a' && c <= 'z'; }

const Json& RequireField(const Json& raw, const char* name) {
  if (!raw.is_object() || !raw.contains(name) || raw.at(name).is_null()) {
    throw Error(ErrorCode::kMissingField, name);
  }
  return raw.at(name);
}

std::string RequireText(const Json& raw, const char* name) {
  const Json& v = RequireField(raw, name);
  if (!v.is_string()) {
    throw Error(ErrorCode::kFormat, std::string(name) + " must be a string");
  }
  std::string s = text::CollapseWhitespace(v.get<std::string>());
  if (s.empty()) throw Error(ErrorCode::kMissingField, name);
  return s;
}

// "2016" or "2016a" -> (2016, "a").
std::pair<int, std::string> ParseYear(const Json& v) {
  std::string s;
  if (v.is_number_integer()) {
    s = std::to_string(v.get<int64_t>());
  } else if (v.is_string()) {
    s = std::string(text::Trim(v.get<std::string>()));
  } else {
    throw Error(ErrorCode::kBadYear, "year has non-numeric type");
  }
  std::string suffix;
  if (!s.empty() && IsLowerAsciiLetter(s.back()) && s.size() > 1) {
    suffix = s.substr(s.size() - 1);
    s.pop_back();
  }
  if (s.empty() || s.size() > 6 || !std::all_of(s.begin(), s.end(), IsDigit)) {
    throw Error(ErrorCode::kBadYear, "'" + s + suffix + "'");
  }
  int year = std::stoi(s);
  if (year <= 1900) {
    throw Error(ErrorCode::kBadYear, std::to_string(year) + " <= 1900");
  }
  return {year, suffix};
}

// ---------------------------------------------------------------------------
// Citation scanner.

struct AuthorPart {
  size_t begin = 0;
  size_t end = 0;
  std::string surname;
};

// A capitalized surname starting exactly at `pos` on a word boundary.
size_t NameEnd(std::string_view t, size_t pos) {
  if (pos >= t.size()) return std::string_view::npos;
  if (!IsUpper(static_cast<unsigned char>(t[pos]))) return std::string_view::npos;
  if (pos > 0) {
    unsigned char prev = static_cast<unsigned char>(t[pos - 1]);
    if (text::IsWordByte(prev) || prev == '-' || prev == '\'') {
      return std::string_view::npos;
    }
  }
  size_t e = pos;
  while (e < t.size()) {
    unsigned char c = static_cast<unsigned char>(t[e]);
    if (text::IsWordByte(c) || c == '-' || c == '\'') {
      ++e;
    } else {
      break;
    }
  }
  while (e > pos && (t[e - 1] == '-' || t[e - 1] == '\'')) --e;
  if (e - pos < 2) return std::string_view::npos;
  // Reject all-digit tails such as "A1"; a surname needs letters.
  bool has_lower = false;
  for (size_t i = pos + 1; i < e; ++i) {
    unsigned char c = static_cast<unsigned char>(t[i]);
    if ((c >= 'a' && c <= 'z') || c >= 0x80) has_lower = true;
  }
  if (!has_lower) return std::string_view::npos;
  return e;
}

size_t SkipSpaces(std::string_view t, size_t pos) {
  while (pos < t.size() && text::IsSpace(static_cast<unsigned char>(t[pos]))) {
    ++pos;
  }
  return pos;
}

bool WordAt(std::string_view t, size_t pos, std::string_view word) {
  if (t.substr(pos, word.size()) != word) return false;
  size_t after = pos + word.size();
  return after >= t.size() ||
         !text::IsWordByte(static_cast<unsigned char>(t[after]));
}

// Name | Name et al[.] | Name and Name | Name & Name
std::optional<AuthorPart> ParseAuthorPart(std::string_view t, size_t pos) {
  size_t e1 = NameEnd(t, pos);
  if (e1 == std::string_view::npos) return std::nullopt;
  AuthorPart part;
  part.begin = pos;
  part.end = e1;
  part.surname = std::string(t.substr(pos, e1 - pos));
  size_t q = SkipSpaces(t, e1);
  if (q > e1 && WordAt(t, q, "et")) {
    size_t r = SkipSpaces(t, q + 2);
    if (r > q + 2 && WordAt(t, r, "al")) {
      part.end = r + 2;
      if (part.end < t.size() && t[part.end] == '.') ++part.end;
      return part;
    }
  }
  if (q > e1 && (WordAt(t, q, "and") || t.substr(q, 1) == "&")) {
    size_t conj_len = t[q] == '&' ? 1 : 3;
    size_t r = SkipSpaces(t, q + conj_len);
    if (r > q + conj_len) {
      size_t e2 = NameEnd(t, r);
      if (e2 != std::string_view::npos) {
        part.end = e2;
        return part;
      }
    }
  }
  return part;
}

// Parses "YYYY" or "YYYYa" occupying exactly [b, e).
std::optional<std::pair<int, std::string>> YearToken(std::string_view t,
                                                     size_t b, size_t e) {
  if (e < b + 4 || e > b + 5) return std::nullopt;
  for (size_t i = b; i < b + 4; ++i) {
    if (!IsDigit(t[i])) return std::nullopt;
  }
  std::string suffix;
  if (e == b + 5) {
    if (!IsLowerAsciiLetter(t[b + 4])) return std::nullopt;
    suffix = std::string(1, t[b + 4]);
  }
  int year = std::stoi(std::string(t.substr(b, 4)));
  if (year <= 1900) return std::nullopt;
  return std::make_pair(year, suffix);
}

CitationMention MakeMention(std::string_view t, size_t begin, size_t end,
                            const std::string& surname, int year,
                            const std::string& suffix) {
  CitationMention m;
  m.begin = begin;
  m.end = end;
  m.key = CitationKey(std::string(t.substr(begin, end - begin)),
                      NormalizedKey{text::ToLower(surname), year, suffix});
  return m;
}

// One ";"-separated item of a parenthetical group: "..., Name..., YYYY".
std::optional<CitationMention> ParseGroupItem(std::string_view t, size_t b,
                                              size_t e) {
  while (e > b && text::IsSpace(static_cast<unsigned char>(t[e - 1]))) --e;
  // Year at the end.
  size_t ye = e;
  size_t width = (ye > b && IsLowerAsciiLetter(t[ye - 1])) ? 5 : 4;
  if (ye < b + width) return std::nullopt;
  size_t yb = ye - width;
  if (yb > b && IsDigit(t[yb - 1])) return std::nullopt;
  auto year = YearToken(t, yb, ye);
  if (!year) return std::nullopt;
  size_t comma = yb;
  while (comma > b && text::IsSpace(static_cast<unsigned char>(t[comma - 1]))) {
    --comma;
  }
  if (comma == b || t[comma - 1] != ',') return std::nullopt;
  size_t author_end = comma - 1;
  while (author_end > b &&
         text::IsSpace(static_cast<unsigned char>(t[author_end - 1]))) {
    --author_end;
  }
  for (size_t s = b; s < author_end; ++s) {
    auto part = ParseAuthorPart(t, s);
    if (part && part->end == author_end) {
      return MakeMention(t, s, ye, part->surname, year->first, year->second);
    }
  }
  return std::nullopt;
}

// Inline form: the text just before a "(YYYY)" group ends with an author part.
std::optional<CitationMention> ParseInline(std::string_view t, size_t open,
                                           size_t close) {
  size_t yb = SkipSpaces(t, open + 1);
  size_t ye = close;
  while (ye > yb && text::IsSpace(static_cast<unsigned char>(t[ye - 1]))) --ye;
  auto year = YearToken(t, yb, ye);
  if (!year) return std::nullopt;
  size_t pe = open;
  while (pe > 0 && text::IsSpace(static_cast<unsigned char>(t[pe - 1]))) --pe;
  constexpr size_t kWindow = 96;
  size_t lo = pe > kWindow ? pe - kWindow : 0;
  for (size_t s = lo; s < pe; ++s) {
    auto part = ParseAuthorPart(t, s);
    if (part && part->end == pe) {
      return MakeMention(t, s, close + 1, part->surname, year->first,
                         year->second);
    }
  }
  return std::nullopt;
}

}  // namespace

PaperRecord ParseRecord(const Json& raw) {
  PaperRecord r;
  const Json& id = RequireField(raw, "id");
  if (!id.is_string() || id.get<std::string>().empty()) {
    throw Error(ErrorCode::kMissingField, "id");
  }
  r.id = id.get<std::string>();
  r.title = RequireText(raw, "title");
  const Json& authors = RequireField(raw, "authors");
  if (!authors.is_array()) {
    throw Error(ErrorCode::kFormat, "authors must be a list");
  }
  for (const Json& a : authors) {
    if (!a.is_string()) throw Error(ErrorCode::kFormat, "author not a string");
    std::string name = text::CollapseWhitespace(a.get<std::string>());
    if (!name.empty()) r.authors.push_back(std::move(name));
  }
  if (r.authors.empty()) throw Error(ErrorCode::kMissingField, "authors");
  auto [year, suffix] = ParseYear(RequireField(raw, "year"));
  r.year = year;
  r.year_suffix = suffix;
  if (raw.contains("year_suffix") && raw.at("year_suffix").is_string()) {
    std::string s = raw.at("year_suffix").get<std::string>();
    if (!s.empty()) r.year_suffix = s;
  }
  r.abstract_text = RequireText(raw, "abstract");
  if (raw.contains("related_work") && raw.at("related_work").is_string()) {
    std::string rw =
        text::CollapseWhitespace(raw.at("related_work").get<std::string>());
    if (!rw.empty()) r.related_work = std::move(rw);
  }
  if (raw.contains("cited_ids") && raw.at("cited_ids").is_array()) {
    r.cited_ids = raw.at("cited_ids").get<std::vector<std::string>>();
  }
  return r;
}

Json SerializeRecord(const PaperRecord& r) {
  Json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["authors"] = r.authors;
  j["year"] = r.year;
  if (!r.year_suffix.empty()) j["year_suffix"] = r.year_suffix;
  j["abstract"] = r.abstract_text;
  if (r.related_work) j["related_work"] = *r.related_work;
  if (r.cited_ids) j["cited_ids"] = *r.cited_ids;
  return j;
}

CitationKey MakeCitationKey(std::span<const std::string> authors, int year,
                            std::string_view suffix) {
  if (authors.empty()) throw Error(ErrorCode::kEmptyAuthors, "no authors");
  std::string names;
  if (authors.size() == 1) {
    names = authors[0];
  } else if (authors.size() == 2) {
    names = authors[0] + " and " + authors[1];
  } else {
    names = authors[0] + " et al.";
  }
  std::string surface =
      names + ", " + std::to_string(year) + std::string(suffix);
  return CitationKey(std::move(surface),
                     NormalizedKey{text::ToLower(authors[0]), year,
                                   std::string(suffix)});
}

CitationKey CitationKeyFor(const PaperRecord& record) {
  return MakeCitationKey(record.authors, record.year, record.year_suffix);
}

Corpus::Corpus(std::vector<PaperRecord> records)
    : records_(std::move(records)) {
  for (size_t i = 0; i < records_.size(); ++i) {
    const PaperRecord& r = records_[i];
    if (!by_id_.emplace(r.id, i).second) {
      throw Error(ErrorCode::kDuplicateId, r.id);
    }
    if (r.authors.empty()) throw Error(ErrorCode::kEmptyAuthors, r.id);
    by_key_[{text::ToLower(r.authors[0]), r.year}].push_back(i);
  }
}

const PaperRecord* Corpus::Find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

const PaperRecord& Corpus::Get(std::string_view id) const {
  const PaperRecord* r = Find(id);
  if (r == nullptr) throw Error(ErrorCode::kUnknownPaper, std::string(id));
  return *r;
}

std::optional<std::string> Corpus::Resolve(const NormalizedKey& key) const {
  auto it = by_key_.find({key.surname, key.year});
  if (it == by_key_.end()) return std::nullopt;
  std::optional<std::string> found;
  int matches = 0;
  for (size_t idx : it->second) {
    const PaperRecord& r = records_[idx];
    if (!key.suffix.empty() && r.year_suffix != key.suffix) continue;
    ++matches;
    found = r.id;
  }
  if (matches != 1) return std::nullopt;
  return found;
}

std::vector<CitationMention> ScanCitations(std::string_view t) {
  std::vector<CitationMention> found;
  size_t i = 0;
  while (i < t.size()) {
    if (t[i] != '(') {
      ++i;
      continue;
    }
    size_t j = i + 1;
    while (j < t.size() && t[j] != ')' && t[j] != '(') ++j;
    if (j >= t.size()) break;
    if (t[j] == '(') {
      i = j;  // innermost group wins
      continue;
    }
    // Group (i, j).
    if (auto m = ParseInline(t, i, j)) {
      found.push_back(std::move(*m));
    } else {
      size_t b = i + 1;
      for (size_t k = i + 1; k <= j; ++k) {
        if (k == j || t[k] == ';') {
          if (auto item = ParseGroupItem(t, b, k)) {
            found.push_back(std::move(*item));
          }
          b = k + 1;
        }
      }
    }
    i = j + 1;
  }
  std::sort(found.begin(), found.end(),
            [](const CitationMention& a, const CitationMention& b) {
              return a.begin < b.begin;
            });
  std::vector<CitationMention> out;
  for (auto& m : found) {
    if (!out.empty() && m.begin < out.back().end) continue;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<CitationMention> ExtractCitations(std::string_view text,
                                              const Corpus& corpus) {
  std::vector<CitationMention> mentions = ScanCitations(text);
  for (CitationMention& m : mentions) {
    m.paper_id = corpus.Resolve(m.key.normalized());
  }
  return mentions;
}

std::vector<std::string> ResolvedIds(std::span<const CitationMention> mentions) {
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  for (const CitationMention& m : mentions) {
    if (m.paper_id && seen.insert(*m.paper_id).second) ids.push_back(*m.paper_id);
  }
  return ids;
}

Json SerializeExample(const ParallelExample& e) {
  return Json{{"paper_id", e.paper_id},
              {"year", e.year},
              {"x", e.x},
              {"cited", e.cited},
              {"gold_related_work", e.gold_related_work}};
}

ParallelExample ParseExample(const Json& raw) {
  ParallelExample e;
  e.paper_id = RequireField(raw, "paper_id").get<std::string>();
  e.year = RequireField(raw, "year").get<int>();
  e.x = RequireField(raw, "x").get<std::string>();
  e.cited = RequireField(raw, "cited").get<std::vector<std::string>>();
  e.gold_related_work = RequireField(raw, "gold_related_work").get<std::string>();
  return e;
}

DatasetBuild BuildParallelDataset(const Corpus& corpus) {
  DatasetBuild build;
  for (const PaperRecord& r : corpus.records()) {
    if (!r.related_work || r.related_work->empty()) {
      build.skipped_ids.push_back(r.id);
      continue;
    }
    auto mentions = ExtractCitations(*r.related_work, corpus);
    std::vector<std::string> cited;
    for (std::string& id : ResolvedIds(mentions)) {
      if (id != r.id) cited.push_back(std::move(id));
    }
    if (cited.empty()) {
      build.skipped_ids.push_back(r.id);
      continue;
    }
    build.examples.push_back(
        ParallelExample{r.id, r.year, r.abstract_text, std::move(cited),
                        *r.related_work});
  }
  return build;
}

DatasetSplit SplitDataset(const std::vector<ParallelExample>& examples,
                          const SplitConfig& config) {
  DatasetSplit split;
  split.config = config;
  std::vector<ParallelExample> later;
  for (const ParallelExample& e : examples) {
    if (e.year <= config.train_year_max) {
      split.train.push_back(e);
    } else if (e.cited.size() >= config.min_citations) {
      later.push_back(e);
    } else {
      split.filtered_out.push_back(e.paper_id);
    }
  }
  if (later.empty()) {
    throw Error(ErrorCode::kEmptyEvaluationSplit,
                "no example after " + std::to_string(config.train_year_max) +
                    " cites at least " +
                    std::to_string(config.min_citations) + " papers");
  }
  std::sort(later.begin(), later.end(),
            [](const ParallelExample& a, const ParallelExample& b) {
              return a.paper_id < b.paper_id;
            });
  io::Rng rng(config.seed);
  rng.Shuffle(later);
  double ratio = std::clamp(config.validation_ratio, 0.0, 1.0);
  size_t n_val =
      static_cast<size_t>(std::floor(ratio * static_cast<double>(later.size())));
  split.validation.assign(later.begin(), later.begin() + n_val);
  split.test.assign(later.begin() + n_val, later.end());
  return split;
}

Json SerializeSplitIds(const DatasetSplit& split) {
  auto ids = [](const std::vector<ParallelExample>& xs) {
    Json arr = Json::array();
    for (const auto& e : xs) arr.push_back(e.paper_id);
    return arr;
  };
  return Json{{"version", 1},
              {"config",
               {{"train_year_max", split.config.train_year_max},
                {"min_citations", split.config.min_citations},
                {"validation_ratio", split.config.validation_ratio},
                {"seed", split.config.seed}}},
              {"train", ids(split.train)},
              {"validation", ids(split.validation)},
              {"test", ids(split.test)},
              {"filtered_out", split.filtered_out}};
}

std::vector<PaperRecord> ReadRecordsFile(const fs::path& path) {
  std::vector<PaperRecord> out;
  for (const Json& row : io::ReadJsonLines(path)) out.push_back(ParseRecord(row));
  return out;
}

std::vector<PaperRecord> ReadRecordsFromDirectory(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<PaperRecord> out;
  for (const fs::path& f : files) {
    auto part = ReadRecordsFile(f);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

}  // namespace relworks::corpus
