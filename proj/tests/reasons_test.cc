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

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "relworks/plan.h"
#include "relworks/reasons.h"
#include "relworks/synthetic.h"
#include "test_util.h"

namespace relworks::reasons {
namespace {

using testing::ErrorOf;

std::vector<Reason> R(std::initializer_list<const char*> labels) {
  std::vector<Reason> out;
  for (const char* l : labels) out.push_back({l});
  return out;
}

TEST_CASE("default taxonomy layout") {
  const Taxonomy& t = Taxonomy::Default();
  CHECK(t.size() == 26);
  CHECK(t.neutral().label == "Neut");
  CHECK(t.overlap_label() == "PSim");
  CHECK(t.IndexOf("CoCoGM") < t.IndexOf("CoCoXY"));
  CHECK(t.IndexOf("CoCoXY") < t.IndexOf("PSim"));
  CHECK(t.IndexOf("PSim") < t.IndexOf("Weak"));
  CHECK(t.IndexOf("Weak") < t.IndexOf("Neut"));
  CHECK(t.IndexOf("Nope") == -1);
  CHECK(ErrorOf([&] { t.Validate("Nope"); }) == ErrorCode::kUnknownReason);
  CHECK(Taxonomy::FromJson(t.ToJson()).ToJson() == t.ToJson());
}

TEST_CASE("bundled taxonomy file equals the default") {
  Taxonomy loaded = Taxonomy::Load(testing::SourceDir() / "data" / "taxonomy.json");
  CHECK(loaded.ToJson() == Taxonomy::Default().ToJson());
}

TEST_CASE("Classify reference cases") {
  CueReasonClassifier cue(Taxonomy::Default());
  std::string a = "We prune attention graphs to speed up long document encoders.";
  CHECK(cue.Classify(a, a).reason.label == "PSim");
  CHECK(cue.Classify("Protein lattice folding energies.",
                     "A corpus of medieval trade letters is released.")
            .reason.label == "Neut");
  CHECK(cue.Classify("Protein lattice folding energies.",
                     "Our parser outperforms prior systems on three treebanks.")
            .reason.label == "CoCoGM");
  CHECK(cue.Classify("Protein lattice folding energies.",
                     "The approach fails on rare words and lacks robustness.")
            .reason.label == "Weak");
  CHECK(ErrorOf([&] { cue.Classify("", "text"); }) == ErrorCode::kEmptyAbstract);
  CHECK(ErrorOf([&] { cue.Classify("text", "  "); }) == ErrorCode::kEmptyAbstract);
}

TEST_CASE("score vectors sum to one and agree with the label") {
  synthetic::MiniCorpus mini = synthetic::BuildMiniCorpus();
  CueReasonClassifier cue(Taxonomy::Default());
  for (const auto& x : mini.records) {
    for (const auto& c : mini.records) {
      ReasonScores s = cue.Classify(x.abstract_text, c.abstract_text);
      REQUIRE(s.scores.size() == 26);
      double sum = std::accumulate(s.scores.begin(), s.scores.end(), 0.0);
      CHECK(std::abs(sum - 1.0) < 1e-9);
      size_t arg = std::max_element(s.scores.begin(), s.scores.end()) - s.scores.begin();
      CHECK(cue.taxonomy().labels()[arg].label == s.reason.label);
    }
  }
}

TEST_CASE("Classify accuracy on synthetic cue pairs") {
  synthetic::MiniCorpus mini = synthetic::BuildMiniCorpus();
  CueReasonClassifier cue(Taxonomy::Default());
  auto pairs = synthetic::BuildReasonPairs(mini, 50, 13);
  REQUIRE(pairs.size() == 50);
  size_t correct = 0;
  for (const auto& p : pairs) correct += cue.Classify(p.x, p.c).reason.label == p.label;
  CHECK(static_cast<double>(correct) / pairs.size() >= 0.8);
}

TEST_CASE("ClassifyText reads cues from prose") {
  CueReasonClassifier cue(Taxonomy::Default());
  CHECK(cue.ClassifyText("In contrast, (Lin, 2004) scores sentences.").reason.label ==
        "CoCoXY");
  CHECK(cue.ClassifyText("Similar to our work, (Lin, 2004) scores sentences.")
            .reason.label == "PSim");
  CHECK(cue.ClassifyText("(Lin, 2004) scores sentences.").reason.label == "Neut");
}

TEST_CASE("Softmax is stable") {
  std::vector<double> big{1000.0, 1000.0};
  auto p = Softmax(big);
  CHECK(p[0] == doctest::Approx(0.5));
  std::vector<double> s{1.0, 0.0};
  p = Softmax(s);
  CHECK(p[0] == doctest::Approx(0.7310585786).epsilon(1e-9));
}

TEST_CASE("AggregateReasons examples") {
  const Taxonomy& t = Taxonomy::Default();
  CHECK(AggregateReasons(R({"PSim", "PSim", "Neut"}), t).label == "PSim");
  CHECK(AggregateReasons(R({"Neut", "Neut"}), t).label == "Neut");
  CHECK(AggregateReasons(R({"Weak", "CoCoXY"}), t).label == "CoCoXY");
  CHECK(AggregateReasons(R({"Weak", "Weak", "CoCoXY"}), t).label == "Weak");
  std::vector<Reason> none;
  CHECK(ErrorOf([&] { AggregateReasons(none, t); }) == ErrorCode::kEmptyList);
  CHECK(ErrorOf([&] { AggregateReasons(R({"Bogus"}), t); }) == ErrorCode::kUnknownReason);
}

TEST_CASE("AggregateReasons properties") {
  const Taxonomy& t = Taxonomy::Default();
  io::Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Reason> rs;
    size_t n = 1 + rng.Below(7);
    for (size_t i = 0; i < n; ++i) {
      // Bias towards the neutral label so all-neutral lists occur.
      size_t idx = rng.Below(3) == 0 ? rng.Below(t.size()) : t.neutral_index();
      rs.push_back({t.labels()[idx].label});
    }
    Reason agg = AggregateReasons(rs, t);
    std::vector<Reason> shuffled = rs;
    rng.Shuffle(shuffled);
    CHECK(AggregateReasons(shuffled, t) == agg);
    bool any_non_neutral = std::any_of(rs.begin(), rs.end(), [&](const Reason& r) {
      return r.label != t.neutral().label;
    });
    CHECK((agg.label == t.neutral().label) == !any_non_neutral);
    std::vector<Reason> single{rs[0]};
    CHECK(AggregateReasons(single, t) == rs[0]);
  }
}

TEST_CASE("ReasonSequence lists branch reasons in order") {
  planner::ContentPlan plan;
  plan.branches = {{{"a"}, {"Neut"}}, {{"b", "c"}, {"PSim"}}, {{"d"}, {"Weak"}},
                   {{"e"}, {"CoCoXY"}}};
  CHECK(ReasonSequence(plan) == R({"Neut", "PSim", "Weak", "CoCoXY"}));
  planner::ContentPlan one;
  one.branches = {{{"a"}, {"CoCoGM"}}};
  CHECK(ReasonSequence(one).size() == 1);
  synthetic::MiniCorpus mini = synthetic::BuildMiniCorpus();
  const synthetic::AnswerKey& p18 = mini.answers[3];
  CHECK(p18.paper_id == "p18");
  CHECK(ReasonSequence(p18.plan) == R({"PSim", "CoCoXY", "Weak", "Neut"}));
}

TEST_CASE("MakeReasonClassifier") {
  CHECK(MakeReasonClassifier("cue", Taxonomy::Default())->id() == "cue");
  CHECK(ErrorOf([&] { MakeReasonClassifier("magic", Taxonomy::Default()); }) ==
        ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace relworks::reasons
