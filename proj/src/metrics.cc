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

#include "relworks/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "relworks/error.h"
#include "relworks/text.h"

namespace relworks::metrics {
namespace {

using NgramSet = std::set<std::vector<std::string>>;

NgramSet Ngrams(std::span<const std::string> tokens, size_t n) {
  NgramSet out;
  if (n == 0 || tokens.size() < n) return out;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    out.emplace(tokens.begin() + static_cast<long>(i),
                tokens.begin() + static_cast<long>(i + n));
  }
  return out;
}

size_t Intersection(const NgramSet& a, const NgramSet& b) {
  size_t k = 0;
  for (const auto& g : a) k += b.count(g);
  return k;
}

NgramSet Minus(const NgramSet& a, const NgramSet& b) {
  NgramSet out;
  for (const auto& g : a) {
    if (b.count(g) == 0) out.insert(g);
  }
  return out;
}

NgramSet Both(const NgramSet& a, const NgramSet& b) {
  NgramSet out;
  for (const auto& g : a) {
    if (b.count(g) > 0) out.insert(g);
  }
  return out;
}

double SetF1(const NgramSet& system, const NgramSet& gold) {
  size_t hit = Intersection(system, gold);
  double p = system.empty() ? 1.0
                            : static_cast<double>(hit) / static_cast<double>(system.size());
  double r = gold.empty() ? 1.0
                          : static_cast<double>(hit) / static_cast<double>(gold.size());
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::vector<std::vector<std::string>> PartitionOf(const planner::ContentPlan& plan) {
  std::vector<std::vector<std::string>> out;
  for (const auto& b : plan.branches) out.push_back(b.papers);
  return out;
}

// Both partitions restricted to their shared items.
std::pair<Partition, Partition> Restrict(const Partition& a, const Partition& b) {
  std::set<std::string> ia, ib;
  for (const auto& c : a) ia.insert(c.begin(), c.end());
  for (const auto& c : b) ib.insert(c.begin(), c.end());
  auto keep = [&](const Partition& p) {
    Partition out;
    for (const auto& c : p) {
      std::vector<std::string> k;
      for (const auto& id : c) {
        if (ia.count(id) > 0 && ib.count(id) > 0) k.push_back(id);
      }
      if (!k.empty()) out.push_back(std::move(k));
    }
    return out;
  };
  return {keep(a), keep(b)};
}

bool Finite(const Json& j) { return j.is_number() && std::isfinite(j.get<double>()); }

}  // namespace

Tokens Tokenize(std::string_view s) { return text::WordTokens(s); }

size_t LcsLength(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore RougeL(std::span<const std::string> candidate,
                  std::span<const std::string> reference) {
  if (reference.empty()) throw Error(ErrorCode::kEmptyReference, "rouge-l");
  RougeScore s;
  if (candidate.empty()) return s;
  double l = static_cast<double>(LcsLength(candidate, reference));
  s.p = l / static_cast<double>(candidate.size());
  s.r = l / static_cast<double>(reference.size());
  s.f = s.p + s.r == 0.0 ? 0.0 : 2.0 * s.p * s.r / (s.p + s.r);
  return s;
}

SariBreakdown SariDetailed(std::span<const std::string> source,
                           std::span<const std::string> candidate,
                           std::span<const Tokens> references) {
  if (references.empty()) throw Error(ErrorCode::kNoReferences, "sari");
  SariBreakdown out;
  constexpr size_t kMaxN = 4;
  for (size_t n = 1; n <= kMaxN; ++n) {
    NgramSet s = Ngrams(source, n);
    NgramSet c = Ngrams(candidate, n);
    NgramSet r;
    for (const Tokens& ref : references) {
      NgramSet g = Ngrams(ref, n);
      r.insert(g.begin(), g.end());
    }
    out.add += SetF1(Minus(c, s), Minus(r, s));
    out.keep += SetF1(Both(c, s), Both(r, s));
    out.del += SetF1(Minus(s, c), Minus(s, r));
  }
  out.add /= kMaxN;
  out.keep /= kMaxN;
  out.del /= kMaxN;
  out.score = (out.add + out.keep + out.del) / 3.0;
  return out;
}

double Sari(std::span<const std::string> source,
            std::span<const std::string> candidate,
            std::span<const Tokens> references) {
  return SariDetailed(source, candidate, references).score;
}

double CopyFraction(std::span<const std::string> output,
                    std::span<const Tokens> inputs, size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "copy fraction needs n >= 1");
  NgramSet out = Ngrams(output, n);
  if (out.empty()) return 0.0;
  NgramSet in;
  for (const Tokens& t : inputs) {
    NgramSet g = Ngrams(t, n);
    in.insert(g.begin(), g.end());
  }
  return static_cast<double>(Intersection(out, in)) / static_cast<double>(out.size());
}

double Purity(const Partition& predicted, const Partition& gold) {
  std::unordered_map<std::string, size_t> gold_of;
  for (size_t g = 0; g < gold.size(); ++g) {
    for (const std::string& id : gold[g]) {
      if (!gold_of.emplace(id, g).second) {
        throw Error(ErrorCode::kItemSetMismatch, id + " twice in gold");
      }
    }
  }
  std::set<std::string> seen;
  size_t total = 0;
  size_t matched = 0;
  for (const auto& cluster : predicted) {
    std::vector<size_t> overlap(gold.size(), 0);
    for (const std::string& id : cluster) {
      if (!seen.insert(id).second) {
        throw Error(ErrorCode::kItemSetMismatch, id + " twice in prediction");
      }
      auto it = gold_of.find(id);
      if (it == gold_of.end()) {
        throw Error(ErrorCode::kItemSetMismatch, id + " missing from gold");
      }
      ++overlap[it->second];
      ++total;
    }
    if (!overlap.empty()) matched += *std::max_element(overlap.begin(), overlap.end());
  }
  if (seen.size() != gold_of.size()) {
    throw Error(ErrorCode::kItemSetMismatch, "gold has items not predicted");
  }
  if (total == 0) throw Error(ErrorCode::kEmptySet, "purity of nothing");
  return static_cast<double>(matched) / static_cast<double>(total);
}

ReasonLM::ReasonLM(std::vector<std::string> vocabulary, Options options)
    : vocabulary_(std::move(vocabulary)), options_(options) {
  if (vocabulary_.empty()) throw Error(ErrorCode::kEmptySet, "empty vocabulary");
  counts_.assign(vocabulary_.size() + 1, std::vector<double>(outcome_count(), 0.0));
  totals_.assign(vocabulary_.size() + 1, 0.0);
}

size_t ReasonLM::outcome_count() const {
  return vocabulary_.size() + (options_.end_marker ? 1 : 0);
}

size_t ReasonLM::Context(std::string_view prev) const {
  if (prev.empty()) return vocabulary_.size();
  auto it = std::find(vocabulary_.begin(), vocabulary_.end(), prev);
  if (it == vocabulary_.end()) throw Error(ErrorCode::kUnknownReason, std::string(prev));
  return static_cast<size_t>(it - vocabulary_.begin());
}

size_t ReasonLM::Outcome(std::string_view next) const {
  if (next.empty()) {
    if (!options_.end_marker) {
      throw Error(ErrorCode::kInvalidArgument, "end marker disabled");
    }
    return vocabulary_.size();
  }
  auto it = std::find(vocabulary_.begin(), vocabulary_.end(), next);
  if (it == vocabulary_.end()) throw Error(ErrorCode::kUnknownReason, std::string(next));
  return static_cast<size_t>(it - vocabulary_.begin());
}

void ReasonLM::Fit(std::span<const std::vector<reasons::Reason>> sequences) {
  for (const auto& seq : sequences) {
    std::string prev;
    for (const reasons::Reason& r : seq) {
      size_t ctx = Context(prev);
      counts_[ctx][Outcome(r.label)] += 1.0;
      totals_[ctx] += 1.0;
      prev = r.label;
    }
    if (options_.end_marker) {
      size_t ctx = Context(prev);
      counts_[ctx][Outcome("")] += 1.0;
      totals_[ctx] += 1.0;
    }
  }
}

double ReasonLM::Prob(std::string_view prev, std::string_view next) const {
  size_t ctx = Context(prev);
  size_t out = Outcome(next);
  if (options_.smoothing) {
    return (counts_[ctx][out] + 1.0) /
           (totals_[ctx] + static_cast<double>(outcome_count()));
  }
  return totals_[ctx] == 0.0 ? 0.0 : counts_[ctx][out] / totals_[ctx];
}

double ReasonLM::Perplexity(
    std::span<const std::vector<reasons::Reason>> sequences) const {
  if (sequences.empty()) throw Error(ErrorCode::kEmptySet, "no sequences");
  double nll = 0.0;
  size_t tokens = 0;
  for (const auto& seq : sequences) {
    std::string prev;
    for (const reasons::Reason& r : seq) {
      nll -= std::log(Prob(prev, r.label));
      ++tokens;
      prev = r.label;
    }
    if (options_.end_marker) {
      nll -= std::log(Prob(prev, ""));
      ++tokens;
    }
  }
  if (tokens == 0) throw Error(ErrorCode::kEmptySet, "no tokens to score");
  return std::exp(nll / static_cast<double>(tokens));
}

KPerplexity ComputeKPerplexity(
    std::span<const std::vector<reasons::Reason>> system,
    std::span<const std::vector<reasons::Reason>> human,
    const std::vector<std::string>& vocabulary, ReasonLM::Options options) {
  if (system.empty() || human.empty()) {
    throw Error(ErrorCode::kEmptySet, "k-perplexity needs both sequence sets");
  }
  ReasonLM human_lm(vocabulary, options);
  human_lm.Fit(human);
  ReasonLM system_lm(vocabulary, options);
  system_lm.Fit(system);
  KPerplexity k;
  k.forward = human_lm.Perplexity(system);
  k.reverse = system_lm.Perplexity(human);
  k.mean = 0.5 * (k.forward + k.reverse);
  return k;
}

MetricReport EvaluateRun(std::span<const RunOutput> outputs,
                         std::span<const GoldItem> golds,
                         const reasons::CueReasonClassifier& classifier,
                         const EvalConfig& config) {
  std::unordered_map<std::string, const GoldItem*> gold_by_id;
  for (const GoldItem& g : golds) gold_by_id.emplace(g.paper_id, &g);

  MetricReport report;
  report.setting = config.setting;
  report.run = config.run;
  std::vector<std::vector<reasons::Reason>> system_seqs, human_seqs;
  size_t purity_hits = 0;
  size_t purity_items = 0;
  size_t segments = 0;
  size_t corresponding = 0;

  for (const RunOutput& out : outputs) {
    auto it = gold_by_id.find(out.paper_id);
    if (it == gold_by_id.end()) {
      ++report.unmatched_outputs;
      continue;
    }
    const GoldItem& gold = *it->second;
    ExampleMetrics m;
    m.paper_id = out.paper_id;
    Tokens cand = Tokenize(out.text);
    std::vector<Tokens> refs = {Tokenize(gold.text)};
    m.rouge_l = RougeL(cand, refs[0]);
    m.sari = Sari(Tokenize(out.source_text), cand, refs);
    std::vector<Tokens> inputs;
    for (const std::string& t : out.input_texts) inputs.push_back(Tokenize(t));
    for (size_t n = 1; n <= 4; ++n) m.copy_fraction[n - 1] = CopyFraction(cand, inputs, n);

    auto [pred, gp] = Restrict(PartitionOf(out.plan), PartitionOf(gold.plan));
    if (!pred.empty()) {
      double p = Purity(pred, gp);
      size_t items = 0;
      for (const auto& c : pred) items += c.size();
      m.purity = p;
      m.purity_items = items;
      purity_items += items;
      purity_hits += static_cast<size_t>(std::llround(p * static_cast<double>(items)));
    }

    size_t n_seg = std::min(out.segment_texts.size(), out.plan.branches.size());
    size_t ok = 0;
    for (size_t i = 0; i < n_seg; ++i) {
      if (classifier.ClassifyText(out.segment_texts[i]).reason ==
          out.plan.branches[i].reason) {
        ++ok;
      }
    }
    m.reason_correspondence =
        n_seg == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(n_seg);
    segments += n_seg;
    corresponding += ok;

    system_seqs.push_back(reasons::ReasonSequence(out.plan));
    human_seqs.push_back(reasons::ReasonSequence(gold.plan));
    report.examples.push_back(std::move(m));
  }
  if (report.examples.empty()) {
    throw Error(ErrorCode::kAlignmentError, "no output matches a gold paper id");
  }

  const double n = static_cast<double>(report.examples.size());
  for (const ExampleMetrics& m : report.examples) {
    report.rouge_l.p += m.rouge_l.p / n;
    report.rouge_l.r += m.rouge_l.r / n;
    report.rouge_l.f += m.rouge_l.f / n;
    report.sari += m.sari / n;
    for (size_t k = 0; k < 4; ++k) report.copy_fraction[k] += m.copy_fraction[k] / n;
  }
  report.purity = purity_items == 0 ? 0.0
                                    : static_cast<double>(purity_hits) /
                                          static_cast<double>(purity_items);
  report.reason_correspondence =
      segments == 0 ? 0.0
                    : static_cast<double>(corresponding) / static_cast<double>(segments);
  std::vector<std::string> vocab;
  for (const auto& l : classifier.taxonomy().labels()) vocab.push_back(l.label);
  report.k_perplexity = ComputeKPerplexity(system_seqs, human_seqs, vocab);
  return report;
}

Json MetricReport::ToJson() const {
  auto rouge = [](const RougeScore& r) { return Json{{"p", r.p}, {"r", r.r}, {"f", r.f}}; };
  Json ex = Json::array();
  for (const ExampleMetrics& m : examples) {
    ex.push_back({{"paper_id", m.paper_id},
                  {"rougeL", rouge(m.rouge_l)},
                  {"sari", m.sari},
                  {"copy_fraction", m.copy_fraction},
                  {"purity", m.purity ? Json(*m.purity) : Json(nullptr)},
                  {"purity_items", m.purity_items},
                  {"reason_correspondence", m.reason_correspondence}});
  }
  return Json{{"format", "relworks.report"},
              {"version", 1},
              {"setting", setting},
              {"run", run},
              {"examples", ex},
              {"aggregate",
               {{"count", examples.size()},
                {"unmatched_outputs", unmatched_outputs},
                {"rougeL", rouge(rouge_l)},
                {"sari", sari},
                {"copy_fraction", copy_fraction},
                {"purity", purity},
                {"reason_correspondence", reason_correspondence},
                {"k_perplexity",
                 {{"forward", k_perplexity.forward},
                  {"reverse", k_perplexity.reverse},
                  {"mean", k_perplexity.mean}}}}}};
}

std::string MetricReport::ToTable() const {
  char line[512];
  std::string out;
  std::snprintf(line, sizeof(line), "setting: %s  run: %s  examples: %zu\n",
                setting.c_str(), run.c_str(), examples.size());
  out += line;
  std::snprintf(line, sizeof(line), "%-10s %-10s %-10s %-8s %-8s %-10s %-10s %-8s %-10s\n",
                "RougeL-P", "RougeL-R", "RougeL-F", "SARI", "Purity", "kPerp-fwd",
                "kPerp-rev", "kPerp", "ReasonCorr");
  out += line;
  std::snprintf(line, sizeof(line),
                "%-10.4f %-10.4f %-10.4f %-8.4f %-8.4f %-10.4f %-10.4f %-8.4f %-10.4f\n",
                rouge_l.p, rouge_l.r, rouge_l.f, sari, purity, k_perplexity.forward,
                k_perplexity.reverse, k_perplexity.mean, reason_correspondence);
  out += line;
  out += "\nFraction of n-grams copied\n";
  std::snprintf(line, sizeof(line), "%-8s %-8s %-8s %-8s\n", "n=1", "n=2", "n=3", "n=4");
  out += line;
  std::snprintf(line, sizeof(line), "%-8.4f %-8.4f %-8.4f %-8.4f\n", copy_fraction[0],
                copy_fraction[1], copy_fraction[2], copy_fraction[3]);
  out += line;
  return out;
}

std::vector<std::string> ValidateReport(const Json& r) {
  std::vector<std::string> problems;
  auto need = [&](const Json& obj, const char* key, const std::string& where) -> const Json* {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(where + "." + key + " missing");
      return nullptr;
    }
    return &obj.at(key);
  };
  auto fraction = [&](const Json* v, const std::string& where) {
    if (v == nullptr) return;
    if (!Finite(*v) || v->get<double>() < 0.0 || v->get<double>() > 1.0) {
      problems.push_back(where + " must be a number in [0,1]");
    }
  };
  auto rouge = [&](const Json* v, const std::string& where) {
    if (v == nullptr) return;
    for (const char* k : {"p", "r", "f"}) fraction(need(*v, k, where), where + "." + k);
  };
  auto copy = [&](const Json* v, const std::string& where) {
    if (v == nullptr) return;
    if (!v->is_array() || v->size() != 4) {
      problems.push_back(where + " must list n = 1..4");
      return;
    }
    for (size_t i = 0; i < 4; ++i) fraction(&(*v)[i], where + "[" + std::to_string(i) + "]");
  };

  if (!r.is_object()) return {"report is not an object"};
  if (r.value("format", "") != "relworks.report") problems.push_back("format != relworks.report");
  if (r.value("version", 0) != 1) problems.push_back("version != 1");
  const Json* setting = need(r, "setting", "report");
  if (setting && (!setting->is_string() ||
                  (*setting != "standard" && *setting != "full" && *setting != "update"))) {
    problems.push_back("setting must be standard, full or update");
  }
  const Json* run = need(r, "run", "report");
  if (run && !run->is_string()) problems.push_back("run must be a string");
  const Json* ex = need(r, "examples", "report");
  if (ex && !ex->is_array()) problems.push_back("examples must be a list");
  if (ex && ex->is_array()) {
    for (size_t i = 0; i < ex->size(); ++i) {
      const Json& e = (*ex)[i];
      std::string w = "examples[" + std::to_string(i) + "]";
      const Json* id = need(e, "paper_id", w);
      if (id && !id->is_string()) problems.push_back(w + ".paper_id must be a string");
      rouge(need(e, "rougeL", w), w + ".rougeL");
      fraction(need(e, "sari", w), w + ".sari");
      copy(need(e, "copy_fraction", w), w + ".copy_fraction");
      const Json* p = need(e, "purity", w);
      if (p && !p->is_null()) fraction(p, w + ".purity");
      fraction(need(e, "reason_correspondence", w), w + ".reason_correspondence");
    }
  }
  const Json* agg = need(r, "aggregate", "report");
  if (agg) {
    const Json* count = need(*agg, "count", "aggregate");
    if (count && !count->is_number_unsigned()) problems.push_back("aggregate.count must be a count");
    rouge(need(*agg, "rougeL", "aggregate"), "aggregate.rougeL");
    fraction(need(*agg, "sari", "aggregate"), "aggregate.sari");
    copy(need(*agg, "copy_fraction", "aggregate"), "aggregate.copy_fraction");
    fraction(need(*agg, "purity", "aggregate"), "aggregate.purity");
    fraction(need(*agg, "reason_correspondence", "aggregate"),
             "aggregate.reason_correspondence");
    const Json* k = need(*agg, "k_perplexity", "aggregate");
    if (k) {
      for (const char* key : {"forward", "reverse", "mean"}) {
        const Json* v = need(*k, key, "aggregate.k_perplexity");
        if (v && (!Finite(*v) || v->get<double>() < 1.0)) {
          problems.push_back(std::string("aggregate.k_perplexity.") + key +
                             " must be finite and >= 1");
        }
      }
    }
  }
  return problems;
}

}  // namespace relworks::metrics
