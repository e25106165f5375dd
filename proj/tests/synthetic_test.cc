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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "relworks/corpus.h"
#include "relworks/io.h"
#include "relworks/synthetic.h"
#include "relworks/text.h"
#include "test_util.h"

namespace relworks::synthetic {
namespace {

using Json = nlohmann::json;

std::set<std::string> Cited(const std::string& text, const corpus::Corpus& c) {
  auto ids = corpus::ResolvedIds(corpus::ExtractCitations(text, c));
  return {ids.begin(), ids.end()};
}

TEST_CASE("bundled answer key and update cases equal the generators") {
  MiniCorpus mini = BuildMiniCorpus();
  Json key = io::ReadJson(testing::SourceDir() / "data" / "answer_key.json");
  CHECK(key["version"] == 1);
  REQUIRE(key["papers"].size() == mini.answers.size());
  for (size_t i = 0; i < mini.answers.size(); ++i) {
    const AnswerKey& a = mini.answers[i];
    const Json& row = key["papers"][i];
    CHECK(row["paper_id"] == a.paper_id);
    CHECK(planner::PlanFromJson(row["plan"]) == a.plan);
    CHECK(row["segment_starts"].get<segment::SegmentStarts>() == a.segment_starts);
    CHECK(row["leading_unaligned"] == a.leading_unaligned);
    CHECK(row["merged_segments"] == a.merged_segments);
  }

  std::vector<UpdateCase> cases = BuildUpdateCases();
  auto rows = io::ReadJsonLines(testing::SourceDir() / "data" / "update_cases.jsonl");
  REQUIRE(rows.size() == cases.size());
  for (size_t i = 0; i < cases.size(); ++i) {
    CHECK(rows[i]["paper_id"] == cases[i].paper_id);
    CHECK(rows[i]["inserted"] == cases[i].inserted);
    CHECK(rows[i]["existing_text"] == cases[i].existing_text);
    CHECK(rows[i]["existing_starts"].get<segment::SegmentStarts>() ==
          cases[i].existing_starts);
  }
}

TEST_CASE("mini-corpus shape") {
  MiniCorpus mini = BuildMiniCorpus();
  CHECK(mini.records.size() == 20);
  CHECK(mini.answers.size() == 6);
  corpus::Corpus c(mini.records);
  for (const corpus::PaperRecord& r : mini.records) {
    CHECK(r.year >= 2018);
    CHECK(r.year <= 2020);
  }
  for (const AnswerKey& a : mini.answers) {
    CAPTURE(a.paper_id);
    const corpus::PaperRecord& r = c.Get(a.paper_id);
    REQUIRE(r.related_work.has_value());
    std::vector<std::string> planned = a.plan.AllPapers();
    CHECK(Cited(*r.related_work, c) == std::set<std::string>(planned.begin(), planned.end()));
    for (const std::string& id : planned) CHECK(c.Get(id).year <= r.year);
    REQUIRE_FALSE(a.segment_starts.empty());
    CHECK(a.segment_starts.front() == 0);
    CHECK(std::is_sorted(a.segment_starts.begin(), a.segment_starts.end()));
    CHECK(a.segment_starts.size() ==
          a.plan.branches.size() + a.leading_unaligned + a.merged_segments);
    CHECK(RenderSection(a.paper_id).text == *r.related_work);
    CHECK(RenderSection(a.paper_id).answer.plan == a.plan);
  }
  CHECK(BuildMiniCorpus().records == mini.records);
}

TEST_CASE("update cases omit exactly the inserted paper") {
  MiniCorpus mini = BuildMiniCorpus();
  corpus::Corpus c(mini.records);
  std::vector<UpdateCase> cases = BuildUpdateCases(20);
  CHECK(cases.size() == 20);
  CHECK(BuildUpdateCases(3).size() == 3);
  std::set<std::pair<std::string, std::string>> seen;
  for (const UpdateCase& u : cases) {
    CAPTURE(u.paper_id);
    CAPTURE(u.inserted);
    CHECK(seen.insert({u.paper_id, u.inserted}).second);
    std::set<std::string> before = Cited(u.existing_text, c);
    std::set<std::string> after = Cited(u.gold_text, c);
    CHECK(before.count(u.inserted) == 0);
    CHECK(after.count(u.inserted) == 1);
    before.insert(u.inserted);
    CHECK(before == after);
    CHECK(u.gold_text == *c.Get(u.paper_id).related_work);
    std::vector<std::string> gold = u.gold_plan.AllPapers();
    CHECK(std::count(gold.begin(), gold.end(), u.inserted) == 1);
    size_t sentences = segment::SplitSentences(u.existing_text).size();
    CHECK(u.existing_starts.back() < sentences);
  }
}

TEST_CASE("planted clusters have disjoint topic vocabularies") {
  PlantedClusters p = BuildPlantedClusters(13);
  CHECK(p.cluster_count == 3);
  CHECK(p.cluster_of.size() == 18);
  CHECK(p.train_queries.size() == 24);
  CHECK(p.test_queries.size() == 4);
  corpus::Corpus c(p.records);
  std::map<size_t, std::set<std::string>> words;
  std::map<std::string, size_t> df;
  for (const auto& [id, k] : p.cluster_of) {
    std::set<std::string> distinct;
    for (const std::string& t : text::WordTokens(c.Get(id).abstract_text)) distinct.insert(t);
    for (const std::string& t : distinct) {
      words[k].insert(t);
      ++df[t];
    }
  }
  // Words used in one cluster only cover most of every cluster's text.
  for (const auto& [k, ws] : words) {
    size_t own = 0;
    for (const std::string& t : ws) {
      bool elsewhere = false;
      for (const auto& [k2, ws2] : words) elsewhere |= k2 != k && ws2.count(t);
      own += !elsewhere;
    }
    CHECK(own >= 5);
  }
  for (const std::string& q : p.test_queries) CHECK(p.cited.at(q).size() == 18);
  for (const std::string& q : p.train_queries) {
    CHECK_FALSE(p.cited.at(q).empty());
    for (const std::string& id : p.cited.at(q)) CHECK(p.cluster_of.count(id) == 1);
  }
  PlantedClusters again = BuildPlantedClusters(13);
  CHECK(again.records == p.records);
  CHECK(again.cited == p.cited);
  CHECK(BuildPlantedClusters(14).records != p.records);
}

TEST_CASE("labeled pair generators are balanced and reproducible") {
  MiniCorpus mini = BuildMiniCorpus();
  auto boundary = BuildBoundaryPairs(mini, 100, 3);
  CHECK(boundary.size() == 100);
  long different = std::count_if(boundary.begin(), boundary.end(),
                                 [](const BoundaryPair& b) { return b.different; });
  CHECK(different == 50);
  auto again = BuildBoundaryPairs(mini, 100, 3);
  for (size_t i = 0; i < boundary.size(); ++i) CHECK(again[i].s1 == boundary[i].s1);

  auto reasons = BuildReasonPairs(mini, 100, 3);
  CHECK(reasons.size() == 100);
  std::map<std::string, int> labels;
  for (const ReasonPair& r : reasons) ++labels[r.label];
  CHECK(labels.size() == 5);
  for (const auto& [label, n] : labels) {
    CAPTURE(label);
    CHECK(n >= 10);
  }
}

}  // namespace
}  // namespace relworks::synthetic
