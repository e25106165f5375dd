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

#include "relworks/realize.h"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_set>

#include "relworks/encode.h"
#include "relworks/error.h"
#include "relworks/text.h"
#include "relworks/transport.h"

namespace relworks::realize {
namespace {

bool IsUpper(char c) { return c >= 'A' && c <= 'Z'; }

std::string Capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

// Lowercases a leading capital unless the first word looks like an acronym.
std::string Decapitalize(std::string s) {
  if (s.size() >= 2 && IsUpper(s[0]) && !IsUpper(s[1]) && s[1] != '.') {
    s[0] = text::ToLowerAscii(s[0]);
  } else if (s.size() == 1 && IsUpper(s[0])) {
    s[0] = text::ToLowerAscii(s[0]);
  }
  return s;
}

// Removes "(...)" groups left without any letter or digit.
std::string DropEmptyParens(std::string s) {
  for (size_t open = s.find('('); open != std::string::npos;
       open = s.find('(', open)) {
    size_t close = s.find(')', open);
    if (close == std::string::npos) break;
    bool has_word = false;
    for (size_t i = open + 1; i < close; ++i) {
      if (text::IsWordByte(static_cast<unsigned char>(s[i]))) has_word = true;
    }
    if (has_word) {
      ++open;
    } else {
      s.erase(open, close - open + 1);
    }
  }
  return s;
}

std::string StripCitations(std::string_view sentence) {
  std::string s(sentence);
  auto mentions = corpus::ScanCitations(s);
  for (auto it = mentions.rbegin(); it != mentions.rend(); ++it) {
    s.erase(it->begin, it->end - it->begin);
  }
  s = text::RemoveAll(s, kSeparator);
  s = DropEmptyParens(std::move(s));
  return text::CollapseWhitespace(s);
}

std::string StripLeadIn(std::string s) {
  static constexpr std::string_view kLeadIns[] = {
      "in this paper, we ", "in this paper we ", "in this work, we ",
      "in this work we ",   "here, we ",         "here we ",
      "we "};
  std::string lower = text::ToLower(s);
  for (std::string_view lead : kLeadIns) {
    if (text::StartsWith(lower, lead)) return s.substr(lead.size());
  }
  return s;
}

bool IsContrastLabel(std::string_view label) {
  return label == "CoCoXY" || label == "CoCoGM";
}

std::string Clause(const CitedPaper& paper, size_t max_words) {
  std::string gist = Gist(paper.abstract_text, max_words);
  std::string cite = "(" + paper.key.surface() + ")";
  return gist.empty() ? cite : cite + " " + gist;
}

}  // namespace

std::string ReasonToken(const reasons::Reason& reason) {
  return "<reason:" + reason.label + ">";
}

std::string BuildPrompt(const RealizationRequest& request) {
  auto scrub = [](std::string_view s) {
    return text::CollapseWhitespace(text::RemoveAll(s, kSeparator));
  };
  std::vector<std::string> fields;
  fields.push_back(scrub(request.x_abstract));
  for (const CitedPaper& p : request.branch) fields.push_back(scrub(p.abstract_text));
  fields.push_back(scrub(ReasonToken(request.reason)));
  fields.push_back(scrub(request.previous));
  return text::Join(fields, " " + std::string(kSeparator) + " ");
}

Json RequestToJson(const RealizationRequest& request) {
  Json cited = Json::array();
  for (const CitedPaper& p : request.branch) {
    cited.push_back({{"key", p.key.surface()},
                     {"title", p.title},
                     {"abstract", p.abstract_text}});
  }
  return Json{{"version", kProtocolVersion},
              {"x", request.x_abstract},
              {"cited", cited},
              {"reason", request.reason.label},
              {"previous", request.previous},
              {"prompt", BuildPrompt(request)}};
}

std::string CentralSentence(std::string_view abstract_text) {
  std::vector<std::string> sentences = segment::SplitSentences(abstract_text);
  if (sentences.empty()) return std::string(text::Trim(abstract_text));
  static const std::unordered_set<std::string> kStop(
      encode::DefaultStopwords().begin(), encode::DefaultStopwords().end());

  std::vector<std::map<std::string, double>> counts(sentences.size());
  std::map<std::string, int> columns;
  for (size_t i = 0; i < sentences.size(); ++i) {
    for (std::string& t : text::WordTokens(sentences[i])) {
      if (t.size() < 2 || kStop.count(t) > 0) continue;
      counts[i][t] += 1.0;
      columns.emplace(t, 0);
    }
  }
  int next = 0;
  for (auto& [term, col] : columns) col = next++;
  std::vector<encode::SparseVector> vectors;
  for (const auto& c : counts) {
    std::vector<encode::SparseVector::Entry> entries;
    for (const auto& [term, tf] : c) entries.emplace_back(columns[term], tf);
    vectors.emplace_back(std::move(entries));
  }
  std::vector<const encode::SparseVector*> ptrs;
  for (const auto& v : vectors) ptrs.push_back(&v);
  encode::SparseVector centroid = encode::Centroid(ptrs);
  size_t best = 0;
  double best_score = -1.0;
  for (size_t i = 0; i < vectors.size(); ++i) {
    double s = encode::Cosine(vectors[i], centroid);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return sentences[best];
}

std::string Gist(std::string_view abstract_text, size_t max_words) {
  std::string s = StripLeadIn(StripCitations(CentralSentence(abstract_text)));
  std::istringstream in(s);
  std::vector<std::string> words;
  std::string w;
  while (in >> w && words.size() < max_words) words.push_back(w);
  s = text::Join(words, " ");
  while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';' ||
                        s.back() == ':' || s.back() == '!' || s.back() == '?' ||
                        s.back() == ' ')) {
    s.pop_back();
  }
  return Decapitalize(std::move(s));
}

TemplateRealizer::TemplateRealizer(reasons::Taxonomy taxonomy)
    : taxonomy_(std::move(taxonomy)) {}

std::string TemplateRealizer::Realize(const RealizationRequest& request) const {
  if (request.branch.empty()) throw Error(ErrorCode::kEmptyBranch, "no papers");
  taxonomy_.Validate(request.reason.label);
  std::vector<std::string> clauses;
  for (const CitedPaper& p : request.branch) {
    clauses.push_back(Clause(p, request.max_words));
  }
  const std::string& label = request.reason.label;
  std::string out;
  if (label == taxonomy_.overlap_label()) {
    out = "Similar to our work, " + text::Join(clauses, "; ") + ".";
  } else if (IsContrastLabel(label)) {
    out = "In contrast, " + clauses[0];
    if (clauses.size() > 1) {
      std::vector<std::string> rest(clauses.begin() + 1, clauses.end());
      out += ", whereas " + text::Join(rest, "; ");
    }
    out += ".";
  } else if (label == "Weak") {
    out = Capitalize(text::Join(clauses, "; ")) +
          (clauses.size() > 1 ? "; however, these approaches are limited."
                              : "; however, this approach is limited.");
  } else {
    out = Capitalize(text::Join(clauses, "; ")) + ".";
  }
  if (!text::Trim(request.previous).empty()) {
    std::string connective =
        label == taxonomy_.overlap_label() ? "Relatedly, " : "Furthermore, ";
    out = connective + Decapitalize(std::move(out));
  }
  return out;
}

ExternalRealizer::ExternalRealizer(std::string endpoint,
                                   std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)),
      transport_(transport::MakeEndpoint(endpoint_, "/realize", timeout)) {}

std::string ExternalRealizer::Realize(const RealizationRequest& request) const {
  if (request.branch.empty()) throw Error(ErrorCode::kEmptyBranch, "no papers");
  Json reply = transport_->Call(RequestToJson(request));
  if (reply.contains("version") && reply["version"] != kProtocolVersion) {
    throw Error(ErrorCode::kProtocolError,
                "realizer answered version " + reply["version"].dump());
  }
  if (!reply.contains("text") || !reply["text"].is_string()) {
    throw Error(ErrorCode::kProtocolError, "realizer reply has no text");
  }
  return reply["text"].get<std::string>();
}

std::unique_ptr<Realizer> MakeRealizer(std::string_view spec,
                                       const reasons::Taxonomy& taxonomy,
                                       std::chrono::milliseconds timeout) {
  if (spec == "template") return std::make_unique<TemplateRealizer>(taxonomy);
  constexpr std::string_view kExternal = "external:";
  if (text::StartsWith(spec, kExternal) && spec.size() > kExternal.size()) {
    return std::make_unique<ExternalRealizer>(
        std::string(spec.substr(kExternal.size())), timeout);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "realizer must be template or external:<endpoint>, got " +
                  std::string(spec));
}

std::string_view ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kTemplate: return "template";
    case Provenance::kExternal: return "external";
    case Provenance::kFallback: return "fallback";
    case Provenance::kExisting: return "existing";
  }
  return "unknown";
}

std::string RealizedDocument::Text() const {
  std::string out;
  for (const RealizedSegment& s : segments) {
    if (s.text.empty()) continue;
    if (!out.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

Json RealizedDocument::ToJson() const {
  Json segs = Json::array();
  for (const RealizedSegment& s : segments) {
    Json j{{"branch", s.branch},
           {"text", s.text},
           {"provenance", ProvenanceName(s.provenance)}};
    if (s.provenance == Provenance::kFallback) {
      j["status"] = 502;
      j["warning"] = s.warning;
    }
    segs.push_back(std::move(j));
  }
  return Json{{"version", kProtocolVersion}, {"text", Text()}, {"segments", segs}};
}

RealizationRequest MakeRequest(const corpus::Corpus& corpus,
                               std::string_view x_abstract,
                               const planner::PlanBranch& branch,
                               std::string previous, size_t max_words) {
  RealizationRequest req;
  req.x_abstract = std::string(x_abstract);
  req.reason = branch.reason;
  req.previous = std::move(previous);
  req.max_words = max_words;
  for (const std::string& id : branch.papers) {
    const corpus::PaperRecord& r = corpus.Get(id);
    req.branch.push_back({r.id, corpus::CitationKeyFor(r), r.title, r.abstract_text});
  }
  return req;
}

namespace {

RealizedSegment RealizeOne(const RealizationRequest& req, int branch,
                           const Realizer& realizer,
                           const TemplateRealizer& fallback) {
  RealizedSegment seg;
  seg.branch = branch;
  if (dynamic_cast<const TemplateRealizer*>(&realizer) != nullptr) {
    seg.text = realizer.Realize(req);
    seg.provenance = Provenance::kTemplate;
    return seg;
  }
  try {
    seg.text = realizer.Realize(req);
    seg.provenance = Provenance::kExternal;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTimeout && e.code() != ErrorCode::kProtocolError) {
      throw;
    }
    seg.text = fallback.Realize(req);
    seg.provenance = Provenance::kFallback;
    seg.warning = e.what();
  }
  return seg;
}

}  // namespace

RealizedDocument RealizeDocument(std::string_view x_abstract,
                                 const planner::ContentPlan& plan,
                                 const corpus::Corpus& corpus,
                                 const Realizer& realizer,
                                 const TemplateRealizer& fallback,
                                 const RealizeOptions& options) {
  if (plan.branches.empty()) throw Error(ErrorCode::kInvalidPlan, "empty plan");
  RealizedDocument doc;
  std::string previous;
  for (size_t i = 0; i < plan.branches.size(); ++i) {
    RealizationRequest req = MakeRequest(corpus, x_abstract, plan.branches[i],
                                         previous, options.max_words);
    doc.segments.push_back(
        RealizeOne(req, static_cast<int>(i), realizer, fallback));
    previous = doc.segments.back().text;
  }
  return doc;
}

RealizedDocument UpdateDocument(const segment::SegmentedRelatedWork& existing,
                                const planner::ContentPlan& plan,
                                size_t affected, std::string_view x_abstract,
                                const corpus::Corpus& corpus,
                                const Realizer& realizer,
                                const TemplateRealizer& fallback,
                                const RealizeOptions& options) {
  std::vector<size_t> aligned;
  for (size_t i = 0; i < existing.segments.size(); ++i) {
    int b = existing.segments[i].branch;
    if (b < 0) {
      if (!aligned.empty()) {
        throw Error(ErrorCode::kAlignmentError,
                    "unaligned segment " + std::to_string(i) + " after branch text");
      }
      continue;
    }
    if (static_cast<size_t>(b) != aligned.size()) {
      throw Error(ErrorCode::kAlignmentError,
                  "segment " + std::to_string(i) + " is aligned to branch " +
                      std::to_string(b));
    }
    aligned.push_back(i);
  }
  const size_t m = aligned.size();
  const size_t n = plan.branches.size();
  bool appends = affected == m;
  if (affected > m || (appends && n != m + 1) || (!appends && n != m)) {
    throw Error(ErrorCode::kAlignmentError,
                std::to_string(m) + " aligned segments, " + std::to_string(n) +
                    " branches, affected branch " + std::to_string(affected));
  }

  RealizedDocument doc;
  for (const segment::Segment& s : existing.segments) {
    doc.segments.push_back({s.branch, s.text, Provenance::kExisting, ""});
  }
  size_t pos = appends ? existing.segments.size() : aligned[affected];
  std::string previous = pos > 0 ? existing.segments[pos - 1].text : "";
  RealizationRequest req = MakeRequest(corpus, x_abstract, plan.branches[affected],
                                       previous, options.max_words);
  RealizedSegment seg =
      RealizeOne(req, static_cast<int>(affected), realizer, fallback);
  if (appends) {
    doc.segments.push_back(std::move(seg));
  } else {
    doc.segments[pos] = std::move(seg);
  }
  return doc;
}

segment::SegmentedRelatedWork ToSegmented(const RealizedDocument& doc,
                                          const planner::ContentPlan& plan) {
  segment::SegmentedRelatedWork out;
  out.source_paper_id = plan.source_paper_id;
  for (const RealizedSegment& s : doc.segments) {
    segment::Segment seg;
    seg.text = s.text;
    seg.branch = s.branch;
    if (s.branch >= 0 && static_cast<size_t>(s.branch) < plan.branches.size()) {
      seg.cited = plan.branches[static_cast<size_t>(s.branch)].papers;
      seg.reason = plan.branches[static_cast<size_t>(s.branch)].reason;
    }
    out.segments.push_back(std::move(seg));
  }
  return out;
}

}  // namespace relworks::realize
