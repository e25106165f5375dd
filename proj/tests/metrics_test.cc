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

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "metric_oracles.h"
#include "relworks/metrics.h"
#include "test_util.h"

namespace relworks::metrics {
namespace {

using testing::ErrorOf;

Tokens T(std::string_view s) { return Tokenize(s); }

Tokens RandomTokens(io::Rng& rng, size_t max_len, size_t alphabet) {
  Tokens out(rng.Below(max_len + 1));
  for (std::string& t : out) t = std::string(1, static_cast<char>('a' + rng.Below(alphabet)));
  return out;
}

TEST_CASE("Tokenize lowercases and drops punctuation") {
  CHECK(T("The (Lin, 2004) model.") == Tokens{"the", "lin", "2004", "model"});
}

TEST_CASE("RougeL examples") {
  RougeScore s = RougeL(T("a b c d"), T("a c d e"));
  CHECK(LcsLength(T("a b c d"), T("a c d e")) == 3);
  CHECK(s.p == doctest::Approx(0.75));
  CHECK(s.r == doctest::Approx(0.75));
  CHECK(s.f == doctest::Approx(0.75));
  CHECK(RougeL(T("x y z"), T("x y z")).f == 1.0);
  CHECK(RougeL(T("x y"), T("p q")).f == 0.0);
  CHECK(RougeL(Tokens{}, T("p q")).f == 0.0);
  CHECK(ErrorOf([&] { RougeL(T("a"), Tokens{}); }) == ErrorCode::kEmptyReference);
}

TEST_CASE("RougeL agrees with brute-force LCS and is symmetric") {
  io::Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    Tokens a = RandomTokens(rng, 10, 4);
    Tokens b = RandomTokens(rng, 10, 4);
    CHECK(LcsLength(a, b) == testing::BruteLcs(a, b));
    if (a.empty() || b.empty()) continue;
    RougeScore ab = RougeL(a, b);
    RougeScore ba = RougeL(b, a);
    CHECK(ab.p == doctest::Approx(ba.r));
    CHECK(ab.r == doctest::Approx(ba.p));
    CHECK(ab.f >= 0.0);
    CHECK(ab.f <= 1.0);
    CHECK((ab.f == 1.0) == (a == b));
  }
}

TEST_CASE("SARI fixtures") {
  std::vector<Tokens> self{T("a b c")};
  CHECK(Sari(T("a b c"), T("a b c"), self) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<Tokens> ref{T("a c")};
  double no_edit = Sari(T("a b"), T("a b"), ref);
  double edit = Sari(T("a b"), T("a c"), ref);
  CHECK(no_edit < edit);
  // Hand evaluation: every operation is exact for "a c"; for "a b" the
  // averages over n are ADD 1/2, KEEP 2/3 and DELETE 1/2.
  CHECK(edit == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(no_edit == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
  SariBreakdown d = SariDetailed(T("a b"), T("a b"), ref);
  CHECK(d.add == doctest::Approx(0.5));
  CHECK(d.keep == doctest::Approx(2.0 / 3.0));
  CHECK(d.del == doctest::Approx(0.5));
  std::vector<Tokens> none;
  CHECK(ErrorOf([&] { Sari(T("a"), T("a"), none); }) == ErrorCode::kNoReferences);
}

TEST_CASE("SARI agrees with the set oracle") {
  io::Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    Tokens s = RandomTokens(rng, 8, 5);
    Tokens c = RandomTokens(rng, 8, 5);
    std::vector<Tokens> refs(1 + rng.Below(3));
    for (Tokens& r : refs) r = RandomTokens(rng, 8, 5);
    double got = Sari(s, c, refs);
    CHECK(std::abs(got - testing::OracleSari(s, c, refs)) < 1e-9);
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("CopyFraction examples") {
  std::vector<Tokens> inputs{T("we prune the attention graph"), T("other text")};
  for (size_t n = 1; n <= 4; ++n) {
    CHECK(CopyFraction(T("prune the attention graph"), inputs, n) == 1.0);
    CHECK(CopyFraction(T("zebra okapi tapir lemur"), inputs, n) == 0.0);
  }
  CHECK(CopyFraction(T("we prune"), inputs, 3) == 0.0);
  CHECK(CopyFraction(T("prune text"), inputs, 1) == 1.0);
  CHECK(CopyFraction(T("prune text"), inputs, 2) == 0.0);
  CHECK(ErrorOf([&] { CopyFraction(T("a"), inputs, 0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("Purity examples") {
  CHECK(Purity({{"A", "B"}, {"C", "D"}}, {{"A", "B", "C"}, {"D"}}) ==
        doctest::Approx(0.75));
  CHECK(Purity({{"A"}, {"B"}, {"C"}, {"D"}}, {{"A", "B", "C", "D"}}) == 1.0);
  CHECK(Purity({{"A", "B"}, {"C"}}, {{"C"}, {"B", "A"}}) == 1.0);
  CHECK(ErrorOf([&] { Purity({{"A"}}, {{"B"}}); }) == ErrorCode::kItemSetMismatch);
  CHECK(ErrorOf([&] { Purity({}, {}); }) == ErrorCode::kEmptySet);
}

Partition RandomPartition(io::Rng& rng, const std::vector<std::string>& items, size_t max_k) {
  size_t k = 1 + rng.Below(max_k);
  Partition p(k);
  for (const std::string& id : items) p[rng.Below(k)].push_back(id);
  std::erase_if(p, [](const auto& c) { return c.empty(); });
  return p;
}

TEST_CASE("Purity agrees with the formula and is 1 on refinements") {
  io::Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> items;
    size_t n = 1 + rng.Below(12);
    for (size_t i = 0; i < n; ++i) items.push_back("i" + std::to_string(i));
    Partition gold = RandomPartition(rng, items, 4);
    Partition pred = RandomPartition(rng, items, 5);
    CHECK(Purity(pred, gold) == testing::OraclePurity(pred, gold));
    Partition refined;
    for (const auto& g : gold) {
      Partition split = RandomPartition(rng, g, 3);
      refined.insert(refined.end(), split.begin(), split.end());
    }
    CHECK(Purity(refined, gold) == 1.0);
  }
}

std::vector<std::vector<reasons::Reason>> Seqs(
    std::initializer_list<std::initializer_list<const char*>> seqs) {
  std::vector<std::vector<reasons::Reason>> out;
  for (auto s : seqs) {
    std::vector<reasons::Reason> seq;
    for (const char* l : s) seq.push_back({l});
    out.push_back(seq);
  }
  return out;
}

TEST_CASE("ReasonLM conditionals are normalized") {
  std::vector<std::string> vocab{"A", "B", "C"};
  for (bool end : {true, false}) {
    ReasonLM lm(vocab, {end, true});
    lm.Fit(Seqs({{"A", "B"}, {"C"}, {"B", "B", "A"}}));
    CHECK(lm.outcome_count() == (end ? 4u : 3u));
    for (std::string_view prev : {"", "A", "B", "C"}) {
      double sum = 0;
      for (std::string_view next : {"A", "B", "C"}) sum += lm.Prob(prev, next);
      if (end) sum += lm.Prob(prev, "");
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
  ReasonLM lm(vocab);
  CHECK(ErrorOf([&] { lm.Fit(Seqs({{"Z"}})); }) == ErrorCode::kUnknownReason);
}

TEST_CASE("k-perplexity matches a hand computation") {
  std::vector<std::string> vocab{"A", "B"};
  auto human = Seqs({{"A", "B"}, {"A"}, {"B", "B"}});
  auto system = Seqs({{"A"}, {"A", "A"}, {"B"}});
  KPerplexity k = ComputeKPerplexity(system, human, vocab);
  // Add-one bigrams with outcomes {A, B, end}. Human model: start (3,2,1)/6,
  // after A (1,2,2)/5, after B (1,2,3)/6. System model: start (3,2,1)/6,
  // after A (2,1,3)/6, after B (1,1,2)/4.
  double forward_log = std::log(3.0 / 6) + std::log(2.0 / 5) +                    // A
                       std::log(3.0 / 6) + std::log(1.0 / 5) + std::log(2.0 / 5) +  // A A
                       std::log(2.0 / 6) + std::log(3.0 / 6);                       // B
  double reverse_log = std::log(3.0 / 6) + std::log(1.0 / 6) + std::log(2.0 / 4) +  // A B
                       std::log(3.0 / 6) + std::log(3.0 / 6) +                      // A
                       std::log(2.0 / 6) + std::log(1.0 / 4) + std::log(2.0 / 4);   // B B
  double forward = std::exp(-forward_log / 7);
  double reverse = std::exp(-reverse_log / 8);
  CHECK(k.forward == doctest::Approx(forward).epsilon(1e-12));
  CHECK(k.reverse == doctest::Approx(reverse).epsilon(1e-12));
  CHECK(k.mean == doctest::Approx((forward + reverse) / 2).epsilon(1e-12));
}

TEST_CASE("k-perplexity symmetry, bounds and uniform limit") {
  const auto& labels = reasons::Taxonomy::Default().labels();
  std::vector<std::string> vocab;
  for (const auto& l : labels) vocab.push_back(l.label);
  auto seqs = Seqs({{"PSim", "Neut"}, {"CoCoXY"}, {"Weak", "Weak", "Neut"}});
  KPerplexity same = ComputeKPerplexity(seqs, seqs, vocab);
  CHECK(std::abs(same.forward - same.reverse) < 1e-9);
  CHECK(same.forward > 1.0);

  for (bool end : {false, true}) {
    ReasonLM empty(vocab, {end, true});
    empty.Fit({});
    double ppl = empty.Perplexity(seqs);
    CHECK(std::abs(ppl - static_cast<double>(vocab.size() + (end ? 1 : 0))) < 1e-9);
  }

  auto fixed = Seqs({{"PSim", "Neut"}});
  KPerplexity exact = ComputeKPerplexity(fixed, fixed, vocab, {true, false});
  CHECK(exact.forward == doctest::Approx(1.0).epsilon(1e-12));
  KPerplexity smoothed = ComputeKPerplexity(fixed, fixed, vocab, {true, true});
  CHECK(smoothed.forward > 1.0);

  io::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<reasons::Reason>> a(1 + rng.Below(4)), b(1 + rng.Below(4));
    for (auto* set : {&a, &b}) {
      for (auto& s : *set) {
        s.resize(1 + rng.Below(4));
        for (auto& r : s) r.label = vocab[rng.Below(vocab.size())];
      }
    }
    KPerplexity k = ComputeKPerplexity(a, b, vocab);
    CHECK(k.forward >= 1.0);
    CHECK(k.reverse >= 1.0);
    CHECK(std::isfinite(k.mean));
  }
  std::vector<std::vector<reasons::Reason>> none;
  CHECK(ErrorOf([&] { ComputeKPerplexity(none, seqs, vocab); }) == ErrorCode::kEmptySet);
}

std::vector<GoldItem> MiniGolds() {
  planner::ContentPlan p1{"g1", {{{"a", "b"}, {"PSim"}}, {{"c"}, {"Neut"}}}};
  planner::ContentPlan p2{"g2", {{{"d"}, {"CoCoXY"}}}};
  return {{"g1", "Similar to our work, (Ames, 2010) prunes graphs. (Cole, 2012) folds proteins.", p1},
          {"g2", "In contrast, (Dunn, 2013) studies letters.", p2}};
}

TEST_CASE("EvaluateRun on outputs identical to the golds") {
  std::vector<GoldItem> golds = MiniGolds();
  std::vector<RunOutput> outputs;
  for (const GoldItem& g : golds) {
    RunOutput o;
    o.paper_id = g.paper_id;
    o.text = g.text;
    o.plan = g.plan;
    o.source_text = g.text;
    o.input_texts = {g.text};
    for (size_t b = 0; b < g.plan.branches.size(); ++b) o.segment_texts.push_back(g.text);
    outputs.push_back(o);
  }
  reasons::CueReasonClassifier cue(reasons::Taxonomy::Default());
  MetricReport r = EvaluateRun(outputs, golds, cue, {"standard", "identity"});
  CHECK(r.rouge_l.f == 1.0);
  CHECK(r.purity == 1.0);
  CHECK(r.sari == doctest::Approx(1.0));
  for (double c : r.copy_fraction) CHECK(c == 1.0);
  CHECK(r.examples.size() == 2);
  CHECK(r.unmatched_outputs == 0);
  Json j = r.ToJson();
  CHECK(ValidateReport(j).empty());
  std::string table = r.ToTable();
  for (const char* col : {"n=1", "n=2", "n=3", "n=4"}) {
    CHECK(table.find(col) != std::string::npos);
  }
  Json broken = j;
  broken["aggregate"]["copy_fraction"] = {0.5, 0.4};
  CHECK_FALSE(ValidateReport(broken).empty());
  broken = j;
  broken["examples"][0]["sari"] = 1.5;
  CHECK_FALSE(ValidateReport(broken).empty());

  outputs[0].paper_id = "zz1";
  outputs[1].paper_id = "zz2";
  CHECK(ErrorOf([&] { EvaluateRun(outputs, golds, cue, {}); }) == ErrorCode::kAlignmentError);
}

}  // namespace
}  // namespace relworks::metrics
