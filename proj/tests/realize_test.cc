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

#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "relworks/realize.h"
#include "relworks/segment.h"
#include "relworks/synthetic.h"
#include "relworks/text.h"
#include "relworks/transport.h"
#include "test_util.h"

namespace relworks::realize {
namespace {

using namespace std::chrono_literals;
using testing::ErrorOf;

// HTTP peer on a free local port answering /realize with the prompt and
// /classify with all mass on PSim.
class EchoServer {
 public:
  EchoServer() {
    server_.Post("/realize", [](const httplib::Request& req, httplib::Response& res) {
      Json body = Json::parse(req.body);
      res.set_content(Json{{"version", 1}, {"text", body.value("prompt", "")}}.dump(),
                      "application/json");
    });
    server_.Post("/classify", [](const httplib::Request& req, httplib::Response& res) {
      Json body = Json::parse(req.body);
      Json scores = Json::array();
      for (const auto& l : body["labels"]) scores.push_back(l == "PSim" ? 1.0 : 0.0);
      res.set_content(Json{{"version", 1}, {"scores", scores}}.dump(), "application/json");
    });
    server_.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("[1, 2]", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~EchoServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string Stub(const std::string& mode) {
  return std::string("stdio:") + RELWORKS_STUB_PATH + " " + mode;
}

// A port nothing listens on: bind, read the port, close.
std::string DeadUrl() {
  httplib::Server s;
  int port = s.bind_to_any_port("127.0.0.1");
  return "http://127.0.0.1:" + std::to_string(port);
}

struct Mini {
  synthetic::MiniCorpus mini = synthetic::BuildMiniCorpus();
  corpus::Corpus corpus{mini.records};
  reasons::Taxonomy taxonomy = reasons::Taxonomy::Default();
  TemplateRealizer realizer{taxonomy};
};

TEST_CASE("template realization of a PSim branch") {
  Mini m;
  corpus::PaperRecord lin = testing::Paper(
      "p_lin", {"Lin"}, 2004,
      "We introduce ROUGE, a package for automatic evaluation of summaries. "
      "It counts overlapping units between summaries. Several measures are included.");
  corpus::Corpus c({lin});
  RealizationRequest req = MakeRequest(c, "Our abstract.", {{"p_lin"}, {"PSim"}}, "");
  std::string out = m.realizer.Realize(req);
  CHECK(out == "Similar to our work, (Lin, 2004) " + Gist(lin.abstract_text, 40) + ".");
  CHECK(m.realizer.Realize(req) == out);

  req.previous = "Earlier text.";
  std::string chained = m.realizer.Realize(req);
  CHECK(chained == "Relatedly, similar to our work, (Lin, 2004) " +
                       Gist(lin.abstract_text, 40) + ".");
  RealizationRequest neutral = MakeRequest(c, "x", {{"p_lin"}, {"Neut"}}, "Before.");
  CHECK(text::StartsWith(m.realizer.Realize(neutral), "Furthermore, "));

  RealizationRequest empty = req;
  empty.branch.clear();
  CHECK(ErrorOf([&] { m.realizer.Realize(empty); }) == ErrorCode::kEmptyBranch);
  RealizationRequest bad = req;
  bad.reason = {"Bogus"};
  CHECK(ErrorOf([&] { m.realizer.Realize(bad); }) == ErrorCode::kUnknownReason);
  CHECK(ErrorOf([&] { MakeRequest(c, "x", {{"nobody"}, {"Neut"}}, ""); }) ==
        ErrorCode::kUnknownPaper);
}

// Sentence whose term-frequency vector is closest to the mean vector.
std::string OracleCentral(std::string_view abstract_text) {
  auto sentences = segment::SplitSentences(abstract_text);
  std::unordered_set<std::string> stop(encode::DefaultStopwords().begin(),
                                       encode::DefaultStopwords().end());
  std::vector<std::map<std::string, double>> tf(sentences.size());
  std::map<std::string, double> mean;
  for (size_t i = 0; i < sentences.size(); ++i) {
    for (const std::string& t : text::WordTokens(sentences[i])) {
      if (t.size() >= 2 && !stop.count(t)) tf[i][t] += 1;
    }
    for (const auto& [t, v] : tf[i]) mean[t] += v / sentences.size();
  }
  auto cosine = [](const std::map<std::string, double>& a,
                   const std::map<std::string, double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [t, v] : a) {
      na += v * v;
      auto it = b.find(t);
      if (it != b.end()) dot += v * it->second;
    }
    for (const auto& [t, v] : b) nb += v * v;
    return na == 0 || nb == 0 ? 0.0 : dot / std::sqrt(na * nb);
  };
  size_t best = 0;
  double best_score = -1;
  for (size_t i = 0; i < sentences.size(); ++i) {
    double s = cosine(tf[i], mean);
    if (s > best_score + 1e-12) {
      best_score = s;
      best = i;
    }
  }
  return sentences[best];
}

TEST_CASE("central sentence is the brute-force argmax") {
  Mini m;
  for (const corpus::PaperRecord& r : m.mini.records) {
    CAPTURE(r.id);
    CHECK(CentralSentence(r.abstract_text) == OracleCentral(r.abstract_text));
  }
  std::string g = Gist("We prune graphs (Lin, 2004) for speed. Nothing else.", 40);
  CHECK(g.find("Lin") == std::string::npos);
  CHECK(g.find("We ") != 0);
  CHECK(Gist("One two three four five six.", 3) == "one two three");
}

TEST_CASE("prompt layout and separator scrubbing") {
  RealizationRequest req;
  req.x_abstract = "X text <|sep|> here.";
  req.branch = {{"a", {}, "T1", "First abstract."}, {"b", {}, "T2", "Second <|sep|> one."}};
  req.reason = {"PSim"};
  req.previous = "Prev.";
  std::string prompt = BuildPrompt(req);
  CHECK(prompt == "X text here. <|sep|> First abstract. <|sep|> Second one. <|sep|> "
                  "<reason:PSim> <|sep|> Prev.");
  CHECK(text::CountOccurrences(prompt, kSeparator) == req.branch.size() + 2);
  Json j = RequestToJson(req);
  CHECK(j["version"] == 1);
  CHECK(j["cited"].size() == 2);
  CHECK(j["reason"] == "PSim");
  CHECK(j["prompt"] == prompt);
}

TEST_CASE("template output never contains the separator") {
  corpus::Corpus c({testing::Paper("s", {"Sep"}, 2001,
                                   "Tokens <|sep|> leak into <|sep|> abstracts sometimes.")});
  TemplateRealizer t(reasons::Taxonomy::Default());
  for (const char* label : {"PSim", "Neut", "CoCoXY", "Weak"}) {
    std::string out = t.Realize(MakeRequest(c, "x", {{"s"}, {label}}, "prev"));
    CHECK(out.find("<|sep|>") == std::string::npos);
  }
}

TEST_CASE("realized documents cite exactly the planned papers") {
  Mini m;
  for (const synthetic::AnswerKey& key : m.mini.answers) {
    CAPTURE(key.paper_id);
    const corpus::PaperRecord& x = m.corpus.Get(key.paper_id);
    RealizedDocument doc = RealizeDocument(x.abstract_text, key.plan, m.corpus, m.realizer, m.realizer);
    REQUIRE(doc.segments.size() == key.plan.branches.size());
    for (size_t b = 0; b < doc.segments.size(); ++b) {
      auto ids = corpus::ResolvedIds(corpus::ExtractCitations(doc.segments[b].text, m.corpus));
      std::set<std::string> got(ids.begin(), ids.end());
      std::set<std::string> want(key.plan.branches[b].papers.begin(),
                                 key.plan.branches[b].papers.end());
      CHECK(got == want);
      CHECK(doc.segments[b].branch == static_cast<int>(b));
      CHECK(doc.segments[b].provenance == Provenance::kTemplate);
    }
    auto all = corpus::ResolvedIds(corpus::ExtractCitations(doc.Text(), m.corpus));
    std::vector<std::string> planned = key.plan.AllPapers();
    CHECK(std::set<std::string>(all.begin(), all.end()) ==
          std::set<std::string>(planned.begin(), planned.end()));
    RealizedDocument again =
        RealizeDocument(x.abstract_text, key.plan, m.corpus, m.realizer, m.realizer);
    CHECK(again.ToJson() == doc.ToJson());
  }
}

TEST_CASE("external realizer over HTTP echoes the prompt") {
  EchoServer server;
  Mini m;
  ExternalRealizer ext(server.url(), 5s);
  const synthetic::AnswerKey& key = m.mini.answers[0];
  const corpus::PaperRecord& x = m.corpus.Get(key.paper_id);
  RealizedDocument doc = RealizeDocument(x.abstract_text, key.plan, m.corpus, ext, m.realizer);
  for (size_t b = 0; b < doc.segments.size(); ++b) {
    CHECK(doc.segments[b].provenance == Provenance::kExternal);
    CHECK(text::CountOccurrences(doc.segments[b].text, kSeparator) ==
          key.plan.branches[b].papers.size() + 2);
  }
  // Each segment is conditioned on the one before it.
  RealizationRequest second =
      MakeRequest(m.corpus, x.abstract_text, key.plan.branches[1], doc.segments[0].text);
  CHECK(doc.segments[1].text == BuildPrompt(second));
  auto made = MakeRealizer("external:" + server.url(), m.taxonomy, 5s);
  CHECK(made->id() == "external:" + server.url());
  CHECK(MakeRealizer("template", m.taxonomy)->id() == "template");
  CHECK(ErrorOf([&] { MakeRealizer("neural", m.taxonomy); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("external realizer over stdio echoes the prompt") {
  Mini m;
  ExternalRealizer ext(Stub("echo"), 5s);
  RealizationRequest req = MakeRequest(m.corpus, "x", {{"p01", "p02", "p03"}, {"Neut"}}, "");
  std::string out = ext.Realize(req);
  CHECK(out == BuildPrompt(req));
  CHECK(text::CountOccurrences(out, kSeparator) == 5);
  CHECK(ext.Realize(req) == out);
}

TEST_CASE("transport failures") {
  Json ping{{"version", 1}};
  transport::HttpEndpoint dead(DeadUrl(), "/realize", 500ms);
  CHECK(ErrorOf([&] { dead.Call(ping); }) == ErrorCode::kTimeout);
  EchoServer server;
  transport::HttpEndpoint broken(server.url(), "/broken", 2s);
  CHECK(ErrorOf([&] { broken.Call(ping); }) == ErrorCode::kProtocolError);
  transport::HttpEndpoint missing(server.url(), "/nothing-here", 2s);
  CHECK(ErrorOf([&] { missing.Call(ping); }).has_value());

  transport::StdioEndpoint garbage(std::string(RELWORKS_STUB_PATH) + " garbage", 2s);
  CHECK(ErrorOf([&] { garbage.Call(ping); }) == ErrorCode::kProtocolError);
  transport::StdioEndpoint silent(std::string(RELWORKS_STUB_PATH) + " silent", 300ms);
  CHECK(ErrorOf([&] { silent.Call(ping); }) == ErrorCode::kTimeout);
  transport::StdioEndpoint gone("exit 0", 500ms);
  CHECK(ErrorOf([&] { gone.Call(ping); }) == ErrorCode::kTimeout);
  CHECK(ErrorOf([&] { transport::MakeEndpoint("ftp://x", "/p", 1s); }) ==
        ErrorCode::kInvalidArgument);

  Mini m;
  RealizationRequest req = MakeRequest(m.corpus, "x", {{"p01"}, {"Neut"}}, "");
  ExternalRealizer wrong_version(Stub("version"), 2s);
  CHECK(ErrorOf([&] { wrong_version.Realize(req); }) == ErrorCode::kProtocolError);
}

TEST_CASE("unreachable realizer falls back per segment") {
  Mini m;
  ExternalRealizer ext(DeadUrl(), 500ms);
  const synthetic::AnswerKey& key = m.mini.answers[2];
  const corpus::PaperRecord& x = m.corpus.Get(key.paper_id);
  RealizedDocument doc = RealizeDocument(x.abstract_text, key.plan, m.corpus, ext, m.realizer);
  RealizedDocument local =
      RealizeDocument(x.abstract_text, key.plan, m.corpus, m.realizer, m.realizer);
  REQUIRE(doc.segments.size() == local.segments.size());
  Json j = doc.ToJson();
  for (size_t b = 0; b < doc.segments.size(); ++b) {
    CHECK(doc.segments[b].provenance == Provenance::kFallback);
    CHECK(doc.segments[b].text == local.segments[b].text);
    CHECK_FALSE(doc.segments[b].warning.empty());
    CHECK(j["segments"][b]["status"] == 502);
    CHECK(j["segments"][b]["provenance"] == "fallback");
  }
  CHECK(j["version"] == 1);
  CHECK(local.ToJson()["segments"][0].contains("status") == false);
}

TEST_CASE("external reason classifier speaks both transports") {
  EchoServer server;
  const reasons::Taxonomy& t = reasons::Taxonomy::Default();
  reasons::ExternalReasonClassifier http(t, server.url(), 5s);
  reasons::ReasonScores s = http.Classify("x abstract", "c abstract");
  CHECK(s.reason.label == "PSim");
  CHECK(s.scores.size() == t.size());
  reasons::ExternalReasonClassifier stdio(t, Stub("echo"), 5s);
  CHECK(stdio.Classify("x abstract", "c abstract").reason.label == "PSim");
  reasons::ExternalReasonClassifier bad(t, Stub("garbage"), 2s);
  CHECK(ErrorOf([&] { bad.Classify("x", "c"); }) == ErrorCode::kProtocolError);
  CHECK(ErrorOf([&] { stdio.Classify("", "c"); }) == ErrorCode::kEmptyAbstract);
}

segment::GoldDerivation Existing(const Mini& m, const synthetic::AnswerKey& key) {
  const corpus::PaperRecord& r = m.corpus.Get(key.paper_id);
  encode::Vectorizer v = encode::PaperIndex::Build(m.corpus).vectorizer();
  reasons::CueReasonClassifier cue(m.taxonomy);
  return segment::DeriveGoldPlan(r.id, *r.related_work, m.corpus, v, cue, key.segment_starts);
}

TEST_CASE("updating one branch leaves the others byte-identical") {
  Mini m;
  const synthetic::AnswerKey& key = m.mini.answers[4];  // p19, three branches
  REQUIRE(key.paper_id == "p19");
  REQUIRE(key.plan.branches.size() == 3);
  segment::GoldDerivation g = Existing(m, key);
  const corpus::PaperRecord& x = m.corpus.Get(key.paper_id);

  planner::ContentPlan inserted = g.plan;
  inserted.branches[1].papers.push_back("p04");
  RealizedDocument doc = UpdateDocument(g.segmented, inserted, 1, x.abstract_text, m.corpus,
                                        m.realizer, m.realizer);
  REQUIRE(doc.segments.size() == 3);
  CHECK(doc.segments[0].text == g.segmented.segments[0].text);
  CHECK(doc.segments[2].text == g.segmented.segments[2].text);
  CHECK(io::Sha256Hex(doc.segments[0].text) == io::Sha256Hex(g.segmented.segments[0].text));
  CHECK(doc.segments[0].provenance == Provenance::kExisting);
  CHECK(doc.segments[1].provenance == Provenance::kTemplate);
  auto ids = corpus::ResolvedIds(corpus::ExtractCitations(doc.segments[1].text, m.corpus));
  CHECK(std::set<std::string>(ids.begin(), ids.end()) ==
        std::set<std::string>{"p02", "p03", "p04"});
  // Conditioned on the untouched text before it.
  CHECK(text::StartsWith(doc.segments[1].text, "Furthermore, "));

  planner::ContentPlan appended = g.plan;
  appended.branches.push_back({{"p04"}, {"Neut"}});
  RealizedDocument grown = UpdateDocument(g.segmented, appended, 3, x.abstract_text,
                                          m.corpus, m.realizer, m.realizer);
  REQUIRE(grown.segments.size() == 4);
  for (size_t b = 0; b < 3; ++b) CHECK(grown.segments[b].text == g.segmented.segments[b].text);
  CHECK(grown.segments[3].branch == 3);

  CHECK(ErrorOf([&] {
          UpdateDocument(g.segmented, appended, 7, x.abstract_text, m.corpus, m.realizer,
                         m.realizer);
        }) == ErrorCode::kAlignmentError);
  segment::SegmentedRelatedWork round = ToSegmented(grown, appended);
  CHECK(round.segments.size() == 4);
}

TEST_CASE("updates keep leading narrative text") {
  Mini m;
  const synthetic::AnswerKey& key = m.mini.answers[0];  // p15 opens without citations
  REQUIRE(key.leading_unaligned == 1);
  segment::GoldDerivation g = Existing(m, key);
  const corpus::PaperRecord& x = m.corpus.Get(key.paper_id);
  planner::ContentPlan inserted = g.plan;
  inserted.branches[0].papers.push_back("p06");
  RealizedDocument doc = UpdateDocument(g.segmented, inserted, 0, x.abstract_text, m.corpus,
                                        m.realizer, m.realizer);
  REQUIRE(doc.segments.size() == g.segmented.segments.size());
  CHECK(doc.segments[0].branch == -1);
  CHECK(doc.segments[0].text == g.segmented.segments[0].text);
  for (size_t s = 2; s < doc.segments.size(); ++s) {
    CHECK(doc.segments[s].text == g.segmented.segments[s].text);
  }
}

}  // namespace
}  // namespace relworks::realize
