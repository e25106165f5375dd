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

#include "relworks/segment.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "relworks/error.h"
#include "relworks/text.h"

namespace relworks::segment {
namespace {

bool IsUpper(char c) { return c >= 'A' && c <= 'Z'; }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }

const std::unordered_set<std::string>& Abbreviations() {
  static const std::unordered_set<std::string> kAbbrev = {
      "al",   "e.g", "i.e",  "eg",   "ie",    "fig", "figs", "eq",
      "eqs",  "sec", "secs", "cf",   "vs",    "approx", "dr", "mr",
      "ms",   "prof", "no",  "resp", "ref",   "refs", "tab", "ch"};
  return kAbbrev;
}

// Lowercased word (letters and inner dots) that ends right before `dot`.
std::string WordBefore(std::string_view s, size_t dot) {
  size_t b = dot;
  while (b > 0 && (text::IsWordByte(static_cast<unsigned char>(s[b - 1])) ||
                   s[b - 1] == '.')) {
    --b;
  }
  return text::ToLower(s.substr(b, dot - b));
}

// Lowercased run of letters that starts after the whitespace following `dot`.
std::string WordAfter(std::string_view s, size_t dot) {
  size_t b = dot + 1;
  while (b < s.size() && text::IsSpace(static_cast<unsigned char>(s[b]))) ++b;
  size_t e = b;
  while (e < s.size() && text::IsWordByte(static_cast<unsigned char>(s[e]))) ++e;
  return text::ToLower(s.substr(b, e - b));
}

// Words that open a sentence but never follow an initial in a name.
bool OpensSentence(const std::string& word) {
  static const std::unordered_set<std::string> kOpeners = {
      "we",   "the",  "this", "these", "those", "our",     "it",   "its",
      "they", "their", "in",  "on",    "for",   "however", "such", "there",
      "here", "both", "an",   "as",    "to",    "while",   "thus", "then"};
  return kOpeners.count(word) > 0;
}

bool ProtectedPeriod(std::string_view s, size_t dot) {
  std::string word = WordBefore(s, dot);
  if (word.empty()) return false;
  if (word.size() == 1 && IsUpper(s[dot - 1])) {  // initial
    return !OpensSentence(WordAfter(s, dot));
  }
  while (!word.empty() && word.front() == '.') word.erase(word.begin());
  if (Abbreviations().count(word) > 0) return true;
  // Dotted acronyms such as "U.S" before the final period.
  if (word.size() >= 3 && word[1] == '.') return true;
  return false;
}

std::set<corpus::NormalizedKey> KeysOf(std::string_view sentence) {
  std::set<corpus::NormalizedKey> keys;
  for (const auto& m : corpus::ScanCitations(sentence)) {
    keys.insert(m.key.normalized());
  }
  return keys;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

bool OpensWith(const std::vector<std::string>& tokens,
               const std::vector<std::string>& cue) {
  if (cue.empty() || cue.size() > tokens.size()) return false;
  return std::equal(cue.begin(), cue.end(), tokens.begin());
}

}  // namespace

std::vector<std::string> SplitSentences(std::string_view input) {
  std::vector<std::string> out;
  std::string_view s = text::Trim(input);
  size_t start = 0;
  int depth = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[') {
      ++depth;
      continue;
    }
    if (c == ')' || c == ']') {
      if (depth > 0) --depth;
      continue;
    }
    if (depth > 0 || (c != '.' && c != '!' && c != '?')) continue;
    size_t end = i + 1;
    while (end < s.size() && (s[end] == '"' || s[end] == '\'' || s[end] == ')')) {
      ++end;
    }
    size_t next = end;
    while (next < s.size() && text::IsSpace(static_cast<unsigned char>(s[next]))) {
      ++next;
    }
    if (next == end || next >= s.size()) continue;
    char n = s[next];
    if (!(IsUpper(n) || IsDigit(n) || n == '"' || n == '\'' || n == '(' ||
          static_cast<unsigned char>(n) >= 0x80)) {
      continue;
    }
    if (c == '.' && ProtectedPeriod(s, i)) continue;
    std::string_view sentence = text::Trim(s.substr(start, end - start));
    if (!sentence.empty()) out.emplace_back(sentence);
    start = next;
    i = next - 1;
  }
  std::string_view tail = text::Trim(s.substr(std::min(start, s.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

Json SegmenterWeights::ToJson() const {
  return Json{{"bias", bias},       {"overlap", overlap},
              {"cosine", cosine},   {"cue", cue},
              {"new_citation", new_citation}, {"cues", cues}};
}

SegmenterWeights SegmenterWeights::FromJson(const Json& j) {
  SegmenterWeights w;
  w.bias = j.value("bias", w.bias);
  w.overlap = j.value("overlap", w.overlap);
  w.cosine = j.value("cosine", w.cosine);
  w.cue = j.value("cue", w.cue);
  w.new_citation = j.value("new_citation", w.new_citation);
  w.cues = j.value("cues", w.cues);
  return w;
}

BoundaryFeatures ComputeBoundaryFeatures(std::string_view s1,
                                         std::string_view s2,
                                         const SegmenterWeights& weights,
                                         const encode::Vectorizer& vectorizer) {
  BoundaryFeatures f;
  auto k1 = KeysOf(s1);
  auto k2 = KeysOf(s2);
  size_t inter = 0;
  for (const auto& k : k2) inter += k1.count(k);
  size_t uni = k1.size() + k2.size() - inter;
  f.overlap = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  f.new_citation = inter < k2.size() ? 1.0 : 0.0;
  f.cosine = encode::Cosine(vectorizer.Embed(s1), vectorizer.Embed(s2));
  auto tokens = text::WordTokens(s2);
  for (const std::string& cue : weights.cues) {
    if (OpensWith(tokens, text::WordTokens(cue))) {
      f.cue = 1.0;
      break;
    }
  }
  return f;
}

BoundaryPrediction ScoreBoundary(const BoundaryFeatures& f,
                                 const SegmenterWeights& w) {
  double z = w.bias + w.overlap * f.overlap + w.cosine * f.cosine +
             w.cue * f.cue + w.new_citation * f.new_citation;
  BoundaryPrediction p;
  p.p_different = Sigmoid(z);
  p.different = p.p_different >= 0.5;
  return p;
}

BoundaryPrediction PredictBoundary(std::string_view s1, std::string_view s2,
                                   const SegmenterWeights& weights,
                                   const encode::Vectorizer& vectorizer) {
  return ScoreBoundary(ComputeBoundaryFeatures(s1, s2, weights, vectorizer),
                       weights);
}

SegmenterWeights FitSegmenterWeights(std::span<const LabeledBoundary> samples,
                                     const SegmenterWeights& initial,
                                     int iterations, double learning_rate,
                                     double l2) {
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "no labeled boundaries");
  }
  std::array<double, 5> w = {initial.bias, initial.overlap, initial.cosine,
                             initial.cue, initial.new_citation};
  const double n = static_cast<double>(samples.size());
  for (int it = 0; it < iterations; ++it) {
    std::array<double, 5> grad{};
    for (const LabeledBoundary& s : samples) {
      auto x = s.features.AsArray();
      double z = w[0];
      for (size_t k = 0; k < 4; ++k) z += w[k + 1] * x[k];
      double err = Sigmoid(z) - (s.different ? 1.0 : 0.0);
      grad[0] += err;
      for (size_t k = 0; k < 4; ++k) grad[k + 1] += err * x[k];
    }
    for (size_t k = 0; k < 5; ++k) {
      double reg = k == 0 ? 0.0 : l2 * w[k];
      w[k] -= learning_rate * (grad[k] / n + reg);
    }
  }
  SegmenterWeights out = initial;
  out.bias = w[0];
  out.overlap = w[1];
  out.cosine = w[2];
  out.cue = w[3];
  out.new_citation = w[4];
  return out;
}

size_t SegmentedRelatedWork::FirstAligned() const {
  for (size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].branch >= 0) return i;
  }
  return segments.size();
}

std::optional<SegmentStarts> LoadAnnotation(const std::filesystem::path& dir,
                                            std::string_view paper_id) {
  std::filesystem::path path = dir / (std::string(paper_id) + ".json");
  if (!std::filesystem::exists(path)) return std::nullopt;
  Json j = io::ReadJson(path);
  try {
    if (j.is_array()) return j.get<SegmentStarts>();
    return j.at("segment_starts").get<SegmentStarts>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

GoldDerivation DeriveGoldPlan(std::string_view paper_id,
                              std::string_view related_work,
                              const corpus::Corpus& corpus,
                              const encode::Vectorizer& vectorizer,
                              const reasons::CueReasonClassifier& classifier,
                              const std::optional<SegmentStarts>& annotation,
                              const SegmenterWeights& weights) {
  std::vector<std::string> sentences = SplitSentences(related_work);
  if (sentences.empty()) {
    throw Error(ErrorCode::kNoCitations, std::string(paper_id) + ": empty text");
  }

  std::vector<bool> starts(sentences.size(), false);
  starts[0] = true;
  if (annotation) {
    for (size_t idx : *annotation) {
      if (idx < starts.size()) starts[idx] = true;
    }
  } else {
    for (size_t i = 1; i < sentences.size(); ++i) {
      starts[i] =
          PredictBoundary(sentences[i - 1], sentences[i], weights, vectorizer)
              .different;
    }
  }

  GoldDerivation gold;
  gold.from_annotation = annotation.has_value();
  gold.segmented.source_paper_id = std::string(paper_id);
  gold.plan.source_paper_id = std::string(paper_id);
  std::unordered_set<std::string> placed;
  auto& segs = gold.segmented.segments;

  size_t begin = 0;
  while (begin < sentences.size()) {
    size_t end = begin + 1;
    while (end < sentences.size() && !starts[end]) ++end;
    std::vector<std::string> parts(sentences.begin() + static_cast<long>(begin),
                                   sentences.begin() + static_cast<long>(end));
    std::string segment_text = text::Join(parts, " ");

    std::vector<std::string> fresh;
    auto mentions = corpus::ExtractCitations(segment_text, corpus);
    for (const std::string& id : corpus::ResolvedIds(mentions)) {
      if (id == paper_id || placed.count(id) > 0) continue;
      fresh.push_back(id);
    }

    if (!fresh.empty()) {
      Segment seg;
      seg.text = std::move(segment_text);
      seg.sentence_begin = begin;
      seg.sentence_end = end;
      seg.cited = fresh;
      seg.branch = static_cast<int>(gold.plan.branches.size());
      placed.insert(fresh.begin(), fresh.end());
      gold.plan.branches.push_back({std::move(fresh), {}});
      segs.push_back(std::move(seg));
    } else if (!segs.empty() && segs.back().branch >= 0) {
      Segment& prev = segs.back();
      prev.text += " " + segment_text;
      prev.sentence_end = end;
      ++gold.merged_segments;
    } else {
      Segment seg;
      seg.text = std::move(segment_text);
      seg.sentence_begin = begin;
      seg.sentence_end = end;
      seg.reason = classifier.taxonomy().neutral();
      segs.push_back(std::move(seg));
      ++gold.leading_unaligned;
    }
    begin = end;
  }

  if (gold.plan.branches.empty()) {
    throw Error(ErrorCode::kNoCitations,
                std::string(paper_id) + ": no resolvable citation");
  }
  for (Segment& seg : segs) {
    if (seg.branch < 0) continue;
    seg.reason = classifier.ClassifyText(seg.text).reason;
    gold.plan.branches[static_cast<size_t>(seg.branch)].reason = seg.reason;
  }
  return gold;
}

Json SegmentedToJson(const SegmentedRelatedWork& doc) {
  Json segments = Json::array();
  for (const Segment& s : doc.segments) {
    segments.push_back({{"text", s.text},
                        {"sentence_begin", s.sentence_begin},
                        {"sentence_end", s.sentence_end},
                        {"cited", s.cited},
                        {"reason", s.reason.label},
                        {"branch", s.branch}});
  }
  return Json{{"source_paper_id", doc.source_paper_id}, {"segments", segments}};
}

SegmentedRelatedWork SegmentedFromJson(const Json& j) {
  try {
    SegmentedRelatedWork doc;
    doc.source_paper_id = j.value("source_paper_id", "");
    for (const Json& s : j.at("segments")) {
      Segment seg;
      seg.text = s.at("text").get<std::string>();
      seg.sentence_begin = s.value("sentence_begin", size_t{0});
      seg.sentence_end = s.value("sentence_end", size_t{0});
      seg.cited = s.value("cited", std::vector<std::string>{});
      seg.reason.label = s.value("reason", "");
      seg.branch = s.value("branch", -1);
      doc.segments.push_back(std::move(seg));
    }
    return doc;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("segmentation: ") + e.what());
  }
}

Json GoldDerivationToJson(const GoldDerivation& gold) {
  return Json{
      {"paper_id", gold.plan.source_paper_id},
      {"plan", planner::PlanToJson(gold.plan)},
      {"segmentation", SegmentedToJson(gold.segmented)},
      {"metadata",
       {{"merged_segments", gold.merged_segments},
        {"leading_unaligned", gold.leading_unaligned},
        {"boundaries", gold.from_annotation ? "annotation" : "predicted"},
        {"uncited_segment_rule", "merge-backward"}}}};
}

GoldDerivation GoldDerivationFromJson(const Json& j) {
  try {
    GoldDerivation gold;
    gold.plan = planner::PlanFromJson(j.at("plan"));
    gold.segmented = SegmentedFromJson(j.at("segmentation"));
    const Json& meta = j.at("metadata");
    gold.merged_segments = meta.value("merged_segments", size_t{0});
    gold.leading_unaligned = meta.value("leading_unaligned", size_t{0});
    gold.from_annotation = meta.value("boundaries", "") == "annotation";
    return gold;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("gold plan: ") + e.what());
  }
}

}  // namespace relworks::segment
