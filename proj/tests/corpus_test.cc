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
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "relworks/corpus.h"
#include "relworks/io.h"
#include "relworks/text.h"
#include "test_util.h"

namespace relworks::corpus {
namespace {

using testing::ErrorOf;
using testing::Paper;

Json RawRecord() {
  return Json{{"id", "p1"},
              {"authors", {"Lin"}},
              {"year", 2004},
              {"title", "ROUGE"},
              {"abstract", "A package for automatic evaluation of summaries."}};
}

TEST_CASE("ParseRecord maps fields and normalizes the key") {
  PaperRecord r = ParseRecord(RawRecord());
  CHECK(r.id == "p1");
  CHECK(r.year == 2004);
  NormalizedKey k = CitationKeyFor(r).normalized();
  CHECK(k.surname == "lin");
  CHECK(k.year == 2004);
  CHECK(k.suffix.empty());
}

TEST_CASE("ParseRecord rejects malformed records") {
  Json empty_abstract = RawRecord();
  empty_abstract["abstract"] = "";
  CHECK(ErrorOf([&] { ParseRecord(empty_abstract); }) == ErrorCode::kMissingField);

  Json no_abstract = RawRecord();
  no_abstract.erase("abstract");
  CHECK(ErrorOf([&] { ParseRecord(no_abstract); }) == ErrorCode::kMissingField);

  Json bad_year = RawRecord();
  bad_year["year"] = "20O4";
  CHECK(ErrorOf([&] { ParseRecord(bad_year); }) == ErrorCode::kBadYear);

  Json no_authors = RawRecord();
  no_authors["authors"] = Json::array();
  CHECK(ErrorOf([&] { ParseRecord(no_authors); }) == ErrorCode::kMissingField);
}

TEST_CASE("ParseRecord accepts string years with a suffix") {
  Json raw = RawRecord();
  raw["year"] = "2016a";
  PaperRecord r = ParseRecord(raw);
  CHECK(r.year == 2016);
  CHECK(r.year_suffix == "a");
  CHECK(CitationKeyFor(r).surface() == "Lin, 2016a");
}

TEST_CASE("SerializeRecord round-trips random records") {
  io::Rng rng(7);
  auto word = [&] {
    std::string w;
    size_t len = 1 + rng.Below(8);
    for (size_t i = 0; i < len; ++i) w += static_cast<char>('a' + rng.Below(26));
    return w;
  };
  for (int trial = 0; trial < 200; ++trial) {
    PaperRecord r;
    r.id = "id" + std::to_string(trial);
    r.title = word() + " " + word();
    size_t authors = 1 + rng.Below(4);
    for (size_t i = 0; i < authors; ++i) r.authors.push_back(word());
    r.year = 1950 + static_cast<int>(rng.Below(75));
    if (rng.Below(3) == 0) r.year_suffix = "b";
    r.abstract_text = word() + " " + word() + ".";
    if (rng.Below(2) == 0) r.related_work = word() + " (" + word() + ", 2001).";
    if (rng.Below(2) == 0) r.cited_ids = std::vector<std::string>{word(), word()};
    PaperRecord back = ParseRecord(SerializeRecord(r));
    CHECK(back == r);
    CHECK(ParseRecord(SerializeRecord(back)) == back);
  }
}

TEST_CASE("MakeCitationKey surface forms") {
  std::vector<std::string> four{"Vinyals", "Blundell", "Lillicrap", "Wierstra"};
  CHECK(MakeCitationKey(four, 2016).surface() == "Vinyals et al., 2016");
  std::vector<std::string> one{"Lin"};
  CHECK(MakeCitationKey(one, 2004).surface() == "Lin, 2004");
  std::vector<std::string> two{"Ravi", "Larochelle"};
  CHECK(MakeCitationKey(two, 2017).surface() == "Ravi and Larochelle, 2017");
  std::vector<std::string> none;
  CHECK(ErrorOf([&] { MakeCitationKey(none, 2010); }) == ErrorCode::kEmptyAuthors);
}

TEST_CASE("normalized key is the lowercased first surname and the year") {
  io::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> authors;
    size_t count = 1 + rng.Below(5);
    for (size_t i = 0; i < count; ++i) {
      std::string s(1, static_cast<char>('A' + rng.Below(26)));
      size_t len = rng.Below(9);
      for (size_t j = 0; j < len; ++j) {
        s += static_cast<char>((rng.Below(2) ? 'a' : 'A') + rng.Below(26));
      }
      authors.push_back(s);
    }
    int year = 1900 + static_cast<int>(rng.Below(130));
    CitationKey a = MakeCitationKey(authors, year);
    CitationKey b = MakeCitationKey(authors, year);
    CHECK(a.surface() == b.surface());
    CHECK(a.normalized().surname == text::ToLower(authors[0]));
    CHECK(a.normalized().year == year);
  }
}

TEST_CASE("Corpus rejects duplicate ids") {
  std::vector<PaperRecord> records{Paper("a", {"X"}, 2000, "Text."),
                                   Paper("a", {"Y"}, 2001, "Text.")};
  CHECK(ErrorOf([&] { Corpus c(records); }) == ErrorCode::kDuplicateId);
}

TEST_CASE("ExtractCitations resolves exact keys") {
  Corpus c({Paper("p1", {"Lin"}, 2004, "Recall-oriented evaluation.")});
  std::string text = "as in (Lin, 2004) we";
  auto mentions = ExtractCitations(text, c);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].key.surface() == "Lin, 2004");
  CHECK(mentions[0].paper_id == std::optional<std::string>("p1"));
  CHECK(text.substr(mentions[0].begin, mentions[0].end - mentions[0].begin) ==
        "Lin, 2004");
}

TEST_CASE("ExtractCitations leaves ambiguous keys unresolved") {
  Corpus c({Paper("s1", {"Smith", "Jones", "Wu"}, 2019, "First."),
            Paper("s2", {"Smith"}, 2019, "Second.")});
  auto mentions = ExtractCitations("(Smith et al., 2019)", c);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].key.surface() == "Smith et al., 2019");
  CHECK_FALSE(mentions[0].paper_id.has_value());
}

TEST_CASE("suffixed keys disambiguate same-year papers") {
  PaperRecord a = Paper("a", {"Kim"}, 2016, "One.");
  a.year_suffix = "a";
  PaperRecord b = Paper("b", {"Kim"}, 2016, "Two.");
  b.year_suffix = "b";
  Corpus c({a, b});
  auto mentions = ExtractCitations("(Kim, 2016b; Kim, 2016)", c);
  REQUIRE(mentions.size() == 2);
  CHECK(mentions[0].paper_id == std::optional<std::string>("b"));
  CHECK_FALSE(mentions[1].paper_id.has_value());
}

// Twenty sentences written for this test with every mention labeled by
// hand: five distinct keys, four of which exist in the corpus.
struct LabeledMention {
  std::string surface_text;
  std::string id;  // empty when the key must not resolve
};
struct LabeledSentence {
  std::string text;
  std::vector<LabeledMention> mentions;
};

const std::vector<LabeledSentence>& HandLabeled() {
  static const std::vector<LabeledSentence> kSentences = {
      {"Graph pruning was first studied by Okafor and Lind (2015).",
       {{"Okafor and Lind (2015)", "ok15"}}},
      {"Later systems replaced the pruning step with learned gates (Brandt et al., 2019).",
       {{"Brandt et al., 2019", "br19"}}},
      {"Recall-based scoring remains common (Lin, 2004; Okafor and Lind, 2015).",
       {{"Lin, 2004", "lin04"}, {"Okafor and Lind, 2015", "ok15"}}},
      {"Small (1973) argued that citation counts are not a measure of quality.",
       {{"Small (1973)", ""}}},
      {"The gating idea was refined by Marquez (2021) for streaming input.",
       {{"Marquez (2021)", "mq21"}}},
      {"Neither approach handles long inputs well.", {}},
      {"Unlike Lin (2004), we score sentences rather than whole summaries.",
       {{"Lin (2004)", "lin04"}}},
      {"Co-citation analysis (Small, 1973) motivates our grouping step.",
       {{"Small, 1973", ""}}},
      {"Brandt et al. (2019) report gains on three benchmarks.",
       {{"Brandt et al. (2019)", "br19"}}},
      {"Streaming variants (Marquez, 2021; Brandt et al., 2019) trade accuracy for latency.",
       {{"Marquez, 2021", "mq21"}, {"Brandt et al., 2019", "br19"}}},
      {"We follow the evaluation protocol of Okafor and Lind (2015) closely.",
       {{"Okafor and Lind (2015)", "ok15"}}},
      {"Both Lin (2004) and Marquez (2021) rely on reference texts.",
       {{"Lin (2004)", "lin04"}, {"Marquez (2021)", "mq21"}}},
      {"In 2015 the field shifted toward neural models.", {}},
      {"A survey of early work appears in (Small, 1973).", {{"Small, 1973", ""}}},
      {"The pruning threshold of (Okafor and Lind, 2015) is set on held-out data.",
       {{"Okafor and Lind, 2015", "ok15"}}},
      {"Gated models (Brandt et al., 2019) are expensive to train.",
       {{"Brandt et al., 2019", "br19"}}},
      {"Our scorer is cheaper than that of Marquez (2021).",
       {{"Marquez (2021)", "mq21"}}},
      {"Prior studies (Lin, 2004; Small, 1973; Marquez, 2021) disagree on this point.",
       {{"Lin, 2004", "lin04"}, {"Small, 1973", ""}, {"Marquez, 2021", "mq21"}}},
      {"Results in Figure 2 (page 4) are omitted.", {}},
      {"Finally, Brandt et al. (2019) and Okafor and Lind (2015) release code.",
       {{"Brandt et al. (2019)", "br19"}, {"Okafor and Lind (2015)", "ok15"}}},
  };
  return kSentences;
}

Corpus HandLabeledCorpus() {
  return Corpus({Paper("ok15", {"Okafor", "Lind"}, 2015, "Graph pruning."),
                 Paper("br19", {"Brandt", "Hale", "Ito"}, 2019, "Learned gates."),
                 Paper("lin04", {"Lin"}, 2004, "Recall-oriented scoring."),
                 Paper("mq21", {"Marquez"}, 2021, "Streaming gates."),
                 Paper("br18", {"Brandt"}, 2018, "An unrelated Brandt paper.")});
}

TEST_CASE("ExtractCitations agrees with hand-labeled spans") {
  Corpus c = HandLabeledCorpus();
  std::set<std::string> keys;
  std::set<std::string> resolved_keys;
  for (const LabeledSentence& s : HandLabeled()) {
    CAPTURE(s.text);
    auto mentions = ExtractCitations(s.text, c);
    REQUIRE(mentions.size() == s.mentions.size());
    size_t from = 0;
    for (size_t i = 0; i < mentions.size(); ++i) {
      const LabeledMention& want = s.mentions[i];
      size_t begin = s.text.find(want.surface_text, from);
      REQUIRE(begin != std::string::npos);
      CHECK(mentions[i].begin == begin);
      CHECK(mentions[i].end == begin + want.surface_text.size());
      from = mentions[i].end;
      if (want.id.empty()) {
        CHECK_FALSE(mentions[i].paper_id.has_value());
      } else {
        CHECK(mentions[i].paper_id == std::optional<std::string>(want.id));
        resolved_keys.insert(mentions[i].key.surface());
      }
      std::string norm = mentions[i].key.normalized().surname + "/" +
                         std::to_string(mentions[i].key.normalized().year);
      keys.insert(norm);
    }
  }
  CHECK(keys.size() == 5);
  std::set<std::string> resolved_norm;
  for (const LabeledSentence& s : HandLabeled()) {
    for (const LabeledMention& m : s.mentions) {
      if (!m.id.empty()) resolved_norm.insert(m.id);
    }
  }
  CHECK(resolved_norm.size() == 4);
}

TEST_CASE("ExtractCitations spans are ordered and disjoint") {
  Corpus c = HandLabeledCorpus();
  std::string paragraph;
  for (const LabeledSentence& s : HandLabeled()) paragraph += s.text + " ";
  auto mentions = ExtractCitations(paragraph, c);
  size_t total = 0;
  for (const LabeledSentence& s : HandLabeled()) total += s.mentions.size();
  CHECK(mentions.size() == total);
  for (size_t i = 1; i < mentions.size(); ++i) {
    CHECK(mentions[i - 1].begin < mentions[i - 1].end);
    CHECK(mentions[i - 1].end <= mentions[i].begin);
  }
  std::vector<std::string> ids = ResolvedIds(mentions);
  CHECK(ids == std::vector<std::string>{"ok15", "br19", "lin04", "mq21"});
}

TEST_CASE("BuildParallelDataset on a three-paper corpus") {
  Corpus c({Paper("a", {"Ames"}, 2010, "First abstract."),
            Paper("b", {"Bell", "Cole"}, 2011, "Second abstract."),
            Paper("c", {"Dunn"}, 2012, "Third abstract.",
                  "Early work (Ames, 2010) and Bell and Cole (2011) are related.")});
  DatasetBuild built = BuildParallelDataset(c);
  REQUIRE(built.examples.size() == 1);
  CHECK(built.examples[0].paper_id == "c");
  CHECK(built.examples[0].cited == std::vector<std::string>{"a", "b"});
  CHECK(built.examples[0].x == "Third abstract.");
  CHECK(built.skipped_ids == std::vector<std::string>{"a", "b"});
}

TEST_CASE("BuildParallelDataset skips sections without resolvable citations") {
  Corpus c({Paper("a", {"Ames"}, 2010, "One.", "Nothing cited here."),
            Paper("b", {"Bell"}, 2011, "Two.", "Only (Zed, 1999) is cited."),
            Paper("c", {"Cole"}, 2012, "Three.", "Self citation (Cole, 2012).")});
  DatasetBuild built = BuildParallelDataset(c);
  CHECK(built.examples.empty());
  CHECK(built.skipped_ids.size() == c.size());
}

TEST_CASE("BuildParallelDataset on the mini-corpus matches the answer key") {
  synthetic::MiniCorpus mini = synthetic::BuildMiniCorpus();
  Corpus c(mini.records);
  DatasetBuild built = BuildParallelDataset(c);
  REQUIRE(built.examples.size() == 6);
  REQUIRE(mini.answers.size() == 6);
  for (size_t i = 0; i < built.examples.size(); ++i) {
    CHECK(built.examples[i].paper_id == mini.answers[i].paper_id);
    CHECK(built.examples[i].cited == mini.answers[i].plan.AllPapers());
  }
  CHECK(built.skipped_ids.size() == 14);
}

TEST_CASE("ParallelExample serialization round-trips") {
  Corpus c(synthetic::BuildMiniCorpus().records);
  for (const ParallelExample& e : BuildParallelDataset(c).examples) {
    CHECK(ParseExample(SerializeExample(e)) == e);
  }
}

TEST_CASE("SplitDataset rejects a corpus without evaluation years") {
  std::vector<ParallelExample> examples(3);
  for (size_t i = 0; i < examples.size(); ++i) {
    examples[i].paper_id = "e" + std::to_string(i);
    examples[i].year = 2018;
    examples[i].cited = {"a", "b"};
  }
  SplitConfig config;
  config.min_citations = 1;
  CHECK(ErrorOf([&] { SplitDataset(examples, config); }) ==
        ErrorCode::kEmptyEvaluationSplit);
}

TEST_CASE("SplitDataset on the mini-corpus") {
  Corpus c(synthetic::BuildMiniCorpus().records);
  auto examples = BuildParallelDataset(c).examples;
  SplitConfig config;
  config.min_citations = 2;
  DatasetSplit split = SplitDataset(examples, config);
  CHECK(split.train.size() == 2);
  CHECK(split.validation.size() == 1);
  CHECK(split.test.size() == 2);
  CHECK(split.filtered_out == std::vector<std::string>{"p20"});
}

TEST_CASE("SplitDataset is a reproducible partition") {
  io::Rng rng(5);
  std::vector<ParallelExample> examples;
  for (int i = 0; i < 60; ++i) {
    ParallelExample e;
    e.paper_id = "e" + std::to_string(i);
    e.year = 2017 + static_cast<int>(rng.Below(5));
    e.cited.resize(rng.Below(25), "x");
    examples.push_back(e);
  }
  SplitConfig config;
  DatasetSplit a = SplitDataset(examples, config);
  DatasetSplit b = SplitDataset(examples, config);
  CHECK(SerializeSplitIds(a).dump() == SerializeSplitIds(b).dump());

  std::multiset<std::string> seen;
  for (const auto* part : {&a.train, &a.validation, &a.test}) {
    for (const ParallelExample& e : *part) seen.insert(e.paper_id);
  }
  for (const std::string& id : a.filtered_out) seen.insert(id);
  CHECK(seen.size() == examples.size());
  CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == seen.size());
  for (const ParallelExample& e : a.train) CHECK(e.year <= config.train_year_max);
  for (const auto* part : {&a.validation, &a.test}) {
    for (const ParallelExample& e : *part) {
      CHECK(e.year > config.train_year_max);
      CHECK(e.cited.size() >= config.min_citations);
    }
  }
}

TEST_CASE("bundled mini-corpus file equals the generator output") {
  auto records = ReadRecordsFromDirectory(testing::SourceDir() / "data" / "mini_corpus");
  CHECK(records == synthetic::BuildMiniCorpus().records);
}

TEST_CASE("io helpers") {
  CHECK(io::Sha256Hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  io::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.Next() == b.Next());
  io::Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    double x = u.Uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.Below(7) < 7);
  }

  testing::TempDir dir;
  auto path = dir.path() / "rows.jsonl";
  io::WriteJsonLinesAtomic(path, {Json{{"a", 1}}, Json{{"b", 2}}});
  auto rows = io::ReadJsonLines(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1]["b"] == 2);
  io::WriteFileAtomic(path, "{\"a\":1}\n\n{broken\n");
  try {
    io::ReadJsonLines(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFormat);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("text helpers") {
  CHECK(text::CollapseWhitespace("  a \n\t b  ") == "a b");
  CHECK(text::WordTokens("It's (Lin, 2004)!") ==
        std::vector<std::string>{"it", "s", "lin", "2004"});
  CHECK(text::CountOccurrences("aXaXa", "a") == 3);
  CHECK(text::RemoveAll("a<|sep|>b", "<|sep|>") == "ab");
}

}  // namespace
}  // namespace relworks::corpus
