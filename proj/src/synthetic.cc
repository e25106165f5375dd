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

#include "relworks/synthetic.h"

#include <algorithm>
#include <set>

#include "relworks/error.h"
#include "relworks/io.h"
#include "relworks/text.h"

namespace relworks::synthetic {
namespace {

using corpus::PaperRecord;

struct PaperSpec {
  std::string id;
  std::vector<std::string> authors;
  int year;
  std::string title;
  std::string abstract_text;
};

// "{c}" is replaced by the inline citation of the clause's paper and "{p}"
// by its parenthetical citation.
struct Clause {
  std::string paper;
  std::string text;
};

// Rendered as opener + clauses + tail + ".". Without clauses the sentence is
// plain narrative; with clauses it disappears once all of them are omitted.
struct Sentence {
  Sentence(std::string opener_text, std::vector<Clause> clause_list,
           std::string last = " and ", std::string tail_text = "")
      : opener(std::move(opener_text)),
        clauses(std::move(clause_list)),
        last_sep(std::move(last)),
        tail(std::move(tail_text)) {}

  std::string opener;
  std::vector<Clause> clauses;
  std::string last_sep;
  std::string tail;
};

// An empty reason marks a segment without citations.
struct SegmentSpec {
  std::string reason;
  std::vector<Sentence> sentences;
};

struct SectionSpec {
  std::string citing;
  std::vector<SegmentSpec> segments;
};

const std::vector<PaperSpec>& Papers() {
  static const std::vector<PaperSpec> kPapers = {
      {"p01", {"Okonkwo", "Reyes", "Malik"}, 2018,
       "Graph Walks for Citation Recommendation",
       "Citation recommendation suggests prior papers for a draft manuscript. "
       "We build a heterogeneous graph of papers, authors and venues and "
       "rank candidates with personalized random walks. Walk restarts are "
       "biased toward recently published papers. Experiments on two "
       "bibliographic collections show higher recall of cited papers."},
      {"p02", {"Lindqvist", "Obi"}, 2018,
       "Neural Ranking of Candidate Citations",
       "We present a neural ranker that scores candidate citations from the "
       "text surrounding a citation placeholder. The ranker encodes the local "
       "context with a recurrent network and matches it to candidate "
       "abstracts. A large training set is mined automatically from "
       "open-access articles. The model retrieves the correct paper in the "
       "top ten for most contexts."},
      {"p03", {"Moreau"}, 2019, "Context-Aware Citation Embeddings",
       "Citation embeddings map papers and citing contexts into one vector "
       "space. We train the embeddings jointly on citation links and the "
       "words around each link. Nearest neighbours in the space provide "
       "citation suggestions for new text. The embeddings also cluster "
       "papers by research area."},
      {"p04", {"Tanaka", "Brooks"}, 2018,
       "Sentence Extraction for Scientific Summaries",
       "We study extractive summarization of long scientific articles. "
       "Sentences are scored with features of position, section and lexical "
       "centrality. An integer program selects a subset of sentences under a "
       "length budget. Human judges prefer the extracts for coverage of the "
       "main findings."},
      {"p05", {"Haddad", "Sorensen", "Lee"}, 2019,
       "Citation-Based Summaries of Research Papers",
       "Citing sentences written by other authors describe the key "
       "contribution of a paper. We collect these citing sentences and "
       "cluster them into facets of the cited work. A summary is formed by "
       "choosing one representative sentence per facet. The summaries cover "
       "contributions that abstracts often omit."},
      {"p06", {"Kowalski"}, 2019,
       "Discourse Graphs for Multi-Document Summarization",
       "Multi-document summarization must merge information from related "
       "articles. We link sentences across documents with discourse "
       "relations and build a joint graph. A ranking over the graph selects "
       "salient and non-redundant sentences. The graph improves coherence of "
       "multi-document summaries of news and science."},
      {"p07", {"Ferreira", "Nakamura"}, 2018,
       "Annotating the Function of Citations",
       "Authors cite earlier work for many different purposes. We define an "
       "annotation scheme for citation function with fine-grained classes "
       "and label a corpus of computational linguistics papers. Agreement "
       "between annotators is measured for every class. The corpus supports "
       "automatic classification of citation purpose."},
      {"p08", {"Osei", "Brennan", "Varga"}, 2018,
       "Predicting Citation Intent with Structural Scaffolds",
       "Citation intent classification labels why a paper is cited. We add "
       "auxiliary scaffold tasks that predict section titles and citation "
       "worthiness. The scaffolds share an encoder with the main intent "
       "classifier. Multi-task training yields consistent gains on two "
       "intent datasets."},
      {"p09", {"Castillo"}, 2019, "Argumentative Zoning of Scientific Abstracts",
       "Argumentative zoning assigns a rhetorical role to each sentence of a "
       "scientific text. We label abstracts with roles such as background, "
       "aim, method and result. A sequence tagger with conditional random "
       "fields predicts the roles. The tagged zones help readers locate the "
       "aims of a study."},
      {"p10", {"Iyer", "Dubois"}, 2018,
       "Extracting Keyphrases from Scholarly Documents",
       "Keyphrases summarize the topics of a scholarly document in a few "
       "words. We extract candidate noun phrases and rank them with a "
       "supervised model over frequency and position features. The ranking "
       "is trained on author-assigned keyphrases. Extracted keyphrases "
       "support indexing and search in digital libraries."},
      {"p11", {"Petrov", "Sato"}, 2019,
       "Building Knowledge Graphs of Scientific Entities",
       "Scientific entities such as tasks, methods and datasets are linked "
       "by relations in research papers. We jointly extract entities and "
       "relations with a span-based neural model. The extracted triples are "
       "merged into a knowledge graph over many papers. The graph supports "
       "queries about which methods are applied to which tasks."},
      {"p12", {"Mensah"}, 2019, "Generating Paper Abstracts from Knowledge Graphs",
       "Writing an abstract requires organizing the contributions of a "
       "study. We generate abstracts from a knowledge graph of the paper "
       "with a graph attention encoder. A copy mechanism reproduces entity "
       "names from the graph. Generated abstracts are rated as informative "
       "by domain readers."},
      {"p13", {"Larsen", "Aydin", "Quinn"}, 2018,
       "Content Selection and Planning for Data-to-Text Generation",
       "Data-to-text systems decide what to say before deciding how to say "
       "it. We introduce a neural model that first selects records and "
       "orders them into a plan. A second network realizes the plan as "
       "fluent text. Explicit plans make the generated documents easier to "
       "control."},
      {"p14", {"Abebe", "Novak"}, 2019,
       "Hierarchical Decoding for Long Document Generation",
       "Long documents are hard to generate in a single pass. We decode a "
       "document paragraph by paragraph, conditioning each paragraph on the "
       "previous one. A global topic vector keeps the paragraphs consistent. "
       "The approach produces longer and more structured outputs."},
      {"p15", {"Gallagher", "Wen"}, 2019,
       "Drafting Related Work Sections from Cited Abstracts",
       "We draft related work sections from the abstracts of the papers a "
       "manuscript cites. Cited papers are grouped by topic and each group "
       "is described in one paragraph. Pairwise citation reasons guide the "
       "wording of every paragraph. Drafts are evaluated against sections "
       "written by the authors."},
      {"p16", {"Ibarra", "Kim", "Yusuf"}, 2019,
       "Citation Function Features for Planning Scientific Text",
       "Planning scientific text requires knowing why each source is cited. "
       "We derive citation function features from annotated corpora and feed "
       "them to a content planner. The planner orders cited papers into "
       "paragraphs before any text is written. Citation function features "
       "make the plans easier to interpret."},
      {"p17", {"Zhou", "Marsh"}, 2020,
       "Summarizing Scientific Articles with Rhetorical Structure",
       "Scientific summaries should reflect the rhetorical structure of an "
       "article. We combine sentence extraction with predicted citation "
       "functions and keyphrases. Content is planned before the summary is "
       "realized. The summaries follow the order of background, method and "
       "result."},
      {"p18", {"Adeyemi", "Fischer", "Romano"}, 2020,
       "Planning Related Work Sections with Citation Reasons",
       "Related work sections group prior papers and explain why each group "
       "is cited. We plan the section as a tree of branches over cited "
       "papers, each branch paired with a citation reason. A template "
       "realizer turns every branch into one paragraph. Plans and paragraphs "
       "are learned from published sections."},
      {"p19", {"Bianchi", "Olsen"}, 2020,
       "Citation-Aware Content Planning for Scientific Summaries",
       "Content planning decides which cited papers to discuss together. We "
       "learn a planner over citation graphs, entity graphs and discourse "
       "graphs of the cited work. The planner uses citation recommendation "
       "scores to rank candidate papers. Generated summaries cover more of "
       "the cited contributions."},
      {"p20", {"Whitfield"}, 2020, "Notes on Keyphrase Indexing",
       "Keyphrases are an old tool for indexing scholarly records. We revisit "
       "supervised keyphrase ranking for small digital library collections. "
       "Ranked keyphrases are shown to library users as search facets."},
  };
  return kPapers;
}

const std::vector<SectionSpec>& Sections() {
  static const std::vector<SectionSpec> kSections = {
      {"p15",
       {{"",
         {{"Drafting the related work section is a demanding part of "
           "scientific writing",
           {}}}},
        {"Neut",
         {{"Recently, citation recommendation has been studied with ",
           {{"p01", "graph walks over bibliographic networks {p}"},
            {"p02", "neural rankers of citation contexts {p}"},
            {"p03", "joint embeddings of papers and contexts {p}"}}},
          {"",
           {{"p02",
             "{c} mine their training data automatically from open-access "
             "articles"}}}}},
        {"PSim",
         {{"Similarly, ",
           {{"p05", "{c} collect citing sentences to summarize a cited paper"},
            {"p04", "{c} likewise score sentences for scientific summaries"}},
           ", and "}}},
        {"Weak",
         {{"However, ",
           {{"p13",
             "the content planner of {c} is trained on data records rather "
             "than papers and its plans are limited to short texts"}}}}}}},
      {"p16",
       {{"CoCoXY",
         {{"In contrast, ",
           {{"p07", "{c} define citation functions through manual annotation"},
            {"p08", "{c} predict citation intent with structural scaffolds"}},
           ", whereas "}}},
        {"", {{"Both lines of work treat each citation in isolation", {}}}},
        {"Neut",
         {{"Recently, ",
           {{"p09", "rhetorical roles have been tagged in abstracts {p}"},
            {"p10", "keyphrases have been ranked in scholarly documents {p}"},
            {"p11", "entities have been linked into knowledge graphs {p}"}}}}}}},
      {"p17",
       {{"CoCoGM",
         {{"Recently, ",
           {{"p04",
             "the sentence extractor of {c} outperforms position baselines"},
            {"p10", "the ranker of {c} improves over frequency heuristics"}},
           ", and "}}},
        {"PSim",
         {{"Similarly, ",
           {{"p07", "{c} annotate the function of each citation"},
            {"p13", "{c} likewise plan content before realizing it"}},
           ", and "},
          {"", {{"p13", "{c} realize each plan with a second network"}}}}}}},
      {"p18",
       {{"",
         {{"Related work generation combines content selection with text "
           "generation",
           {}}}},
        {"PSim",
         {{"Similarly, ",
           {{"p15", "{c} group cited papers by topic before drafting"},
            {"p13", "{c} likewise select content before realization"}},
           ", and "}}},
        {"CoCoXY",
         {{"In contrast, ",
           {{"p06",
             "{c} links sentences across documents with discourse relations"},
            {"p14", "{c} decode long documents paragraph by paragraph"}},
           ", whereas "},
          {"", {{"p06", "{c} targets news and science articles"}}}}},
        {"Weak",
         {{"However, ",
           {{"p12", "the abstract generator of {c} is limited to a single paper"},
            {"p05", "the citation summaries of {c} lack an explicit plan"}},
           ", and "}}},
        {"Neut",
         {{"Recently, ",
           {{"p01", "graph walks {p}"}, {"p08", "structural scaffolds {p}"}},
           ", ",
           " and co-citation counts (Small, 1973) have been applied to "
           "citation data"}}}}},
      {"p19",
       {{"Neut",
         {{"Recently, ",
           {{"p16", "citation function features have been used for planning {p}"},
            {"p09", "argumentative zones have been predicted for abstracts {p}"}},
           ", and "}}},
        {"CoCoGM",
         {{"Recently, ",
           {{"p02", "the neural ranker of {c} outperforms graph baselines"},
            {"p03", "the embeddings of {c} improve upon word overlap retrieval"}},
           ", and "}}},
        {"PSim",
         {{"Similarly, ",
           {{"p11", "{c} build knowledge graphs of scientific entities"},
            {"p06", "{c} likewise builds discourse graphs over documents"}},
           ", and "},
          {"", {{"p11", "{c} merge extracted triples across many papers"}}}}}}},
      {"p20",
       {{"Neut",
         {{"Recently, ",
           {{"p10", "keyphrases have been ranked with supervised models {p}"}}},
          {"", {{"p10", "{c} train on author-assigned keyphrases"}}}}}}},
  };
  return kSections;
}

const PaperSpec& PaperById(const std::string& id) {
  for (const PaperSpec& p : Papers()) {
    if (p.id == id) return p;
  }
  throw Error(ErrorCode::kUnknownPaper, id);
}

const SectionSpec& SectionById(const std::string& id) {
  for (const SectionSpec& s : Sections()) {
    if (s.citing == id) return s;
  }
  throw Error(ErrorCode::kUnknownPaper, "no section for " + id);
}

std::string AuthorNames(const std::vector<std::string>& authors) {
  if (authors.size() == 1) return authors[0];
  if (authors.size() == 2) return authors[0] + " and " + authors[1];
  return authors[0] + " et al.";
}

std::string InlineCitation(const PaperSpec& p) {
  return AuthorNames(p.authors) + " (" + std::to_string(p.year) + ")";
}

std::string ParenCitation(const PaperSpec& p) {
  return "(" + AuthorNames(p.authors) + ", " + std::to_string(p.year) + ")";
}

std::string ReplaceAll(std::string s, std::string_view from,
                       std::string_view to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string RenderClause(const Clause& c) {
  const PaperSpec& p = PaperById(c.paper);
  return ReplaceAll(ReplaceAll(c.text, "{c}", InlineCitation(p)), "{p}",
                    ParenCitation(p));
}

// nullopt when every clause is omitted.
std::optional<std::string> RenderSentence(const Sentence& s,
                                          const std::string& omitted) {
  if (s.clauses.empty()) return s.opener + s.tail + ".";
  std::vector<std::string> parts;
  for (const Clause& c : s.clauses) {
    if (c.paper != omitted) parts.push_back(RenderClause(c));
  }
  if (parts.empty()) return std::nullopt;
  std::string joined = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) {
    joined += (i + 1 == parts.size() ? s.last_sep : std::string(", "));
    joined += parts[i];
  }
  return s.opener + joined + s.tail + ".";
}

std::string Decapitalize(std::string s) {
  if (s.size() >= 2 && s[0] >= 'A' && s[0] <= 'Z' &&
      !(s[1] >= 'A' && s[1] <= 'Z')) {
    s[0] = static_cast<char>(s[0] - 'A' + 'a');
  }
  return s;
}

// Inserts " <citation>" before the final period.
std::string WithCitation(std::string sentence, const std::string& citation) {
  if (!sentence.empty() && sentence.back() == '.') sentence.pop_back();
  return sentence + " " + citation + ".";
}

std::vector<std::string> AbstractSentences(const PaperRecord& r) {
  return segment::SplitSentences(r.abstract_text);
}

}  // namespace

RenderedSection RenderSection(const std::string& citing,
                              const std::string& omitted) {
  const SectionSpec& spec = SectionById(citing);
  RenderedSection out;
  out.answer.paper_id = citing;
  out.answer.plan.source_paper_id = citing;
  std::vector<std::string> sentences;
  const auto& taxonomy = reasons::Taxonomy::Default();
  for (const SegmentSpec& seg : spec.segments) {
    std::vector<std::string> rendered;
    std::vector<std::string> papers;
    for (const Sentence& s : seg.sentences) {
      auto text = RenderSentence(s, omitted);
      if (!text) continue;
      rendered.push_back(*text);
      for (const Clause& c : s.clauses) {
        if (c.paper != omitted &&
            std::find(papers.begin(), papers.end(), c.paper) == papers.end()) {
          papers.push_back(c.paper);
        }
      }
    }
    if (rendered.empty()) continue;
    if (!seg.reason.empty() && papers.empty()) continue;
    out.answer.segment_starts.push_back(sentences.size());
    sentences.insert(sentences.end(), rendered.begin(), rendered.end());
    if (seg.reason.empty()) {
      if (out.answer.plan.branches.empty()) {
        ++out.answer.leading_unaligned;
      } else {
        ++out.answer.merged_segments;
      }
      continue;
    }
    out.answer.plan.branches.push_back(
        planner::PlanBranch{papers, taxonomy.Validate(seg.reason)});
  }
  out.text = text::Join(sentences, " ");
  return out;
}

MiniCorpus BuildMiniCorpus() {
  MiniCorpus mini;
  for (const PaperSpec& p : Papers()) {
    PaperRecord r;
    r.id = p.id;
    r.title = p.title;
    r.authors = p.authors;
    r.year = p.year;
    r.abstract_text = p.abstract_text;
    for (const SectionSpec& s : Sections()) {
      if (s.citing != p.id) continue;
      RenderedSection rendered = RenderSection(p.id);
      r.related_work = rendered.text;
      r.cited_ids = rendered.answer.plan.AllPapers();
      mini.answers.push_back(std::move(rendered.answer));
    }
    mini.records.push_back(std::move(r));
  }
  return mini;
}

std::vector<UpdateCase> BuildUpdateCases(size_t limit) {
  std::vector<UpdateCase> cases;
  for (const SectionSpec& s : Sections()) {
    RenderedSection full = RenderSection(s.citing);
    for (const std::string& paper : full.answer.plan.AllPapers()) {
      if (cases.size() >= limit) return cases;
      RenderedSection partial = RenderSection(s.citing, paper);
      if (partial.answer.plan.branches.empty()) continue;
      cases.push_back(UpdateCase{s.citing, paper, partial.text,
                                 partial.answer.segment_starts, full.text,
                                 full.answer.plan});
    }
  }
  return cases;
}

PlantedClusters BuildPlantedClusters(uint64_t seed, size_t clusters,
                                     size_t per_cluster, size_t train_queries,
                                     size_t test_queries) {
  static const std::vector<std::vector<std::string>> kVocab = {
      {"telescope", "galaxy", "redshift", "nebula", "quasar", "photometry",
       "spectra", "stellar", "cosmic", "orbit", "exoplanet", "supernova"},
      {"protein", "enzyme", "genome", "ribosome", "peptide", "mutation",
       "cellular", "membrane", "antibody", "chromosome", "metabolic",
       "transcription"},
      {"portfolio", "dividend", "equity", "liquidity", "volatility", "hedge",
       "bond", "inflation", "currency", "credit", "auction", "tariff"}};
  static const std::vector<std::string> kFiller = {
      "model", "method", "results", "analysis", "data", "study",
      "approach", "framework", "evaluation", "measure", "system", "task"};
  if (clusters == 0 || per_cluster == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty planted cluster layout");
  }
  std::vector<std::vector<std::string>> vocab;
  for (size_t k = 0; k < clusters; ++k) {
    if (k < kVocab.size()) {
      vocab.push_back(kVocab[k]);
      continue;
    }
    std::vector<std::string> words;
    for (size_t w = 0; w < 12; ++w) {
      words.push_back("topic" + std::string(1, static_cast<char>('a' + k % 26)) +
                      std::to_string(k) + "term" + std::to_string(w));
    }
    vocab.push_back(std::move(words));
  }

  io::Rng rng(seed);
  auto sentences = [](const std::vector<std::string>& words) {
    std::string out;
    for (size_t i = 0; i < words.size(); ++i) {
      std::string w = words[i];
      if (i % 8 == 0) {
        if (!out.empty()) out += ". ";
        w[0] = static_cast<char>(w[0] - 'a' + 'A');
      } else {
        out += " ";
      }
      out += w;
    }
    return out + ".";
  };
  auto surname = [](size_t n) {
    std::string s = "Q";
    do {
      s += static_cast<char>('a' + n % 26);
      n /= 26;
    } while (n > 0);
    return s + "son";
  };

  PlantedClusters out;
  out.cluster_count = clusters;
  std::vector<std::vector<std::string>> members(clusters);
  size_t serial = 0;
  for (size_t k = 0; k < clusters; ++k) {
    for (size_t i = 0; i < per_cluster; ++i) {
      std::vector<std::string> focus = vocab[k];
      rng.Shuffle(focus);
      focus.resize(6);
      std::vector<std::string> words;
      for (size_t t = 0; t < 16; ++t) {
        words.push_back(rng.Uniform() < 0.7 ? focus[rng.Below(6)]
                                            : vocab[k][rng.Below(12)]);
      }
      for (size_t t = 0; t < 6; ++t) {
        words.push_back(kFiller[rng.Below(kFiller.size())]);
      }
      rng.Shuffle(words);
      PaperRecord r;
      r.id = "k" + std::to_string(k) + "_" + std::to_string(i);
      r.title = focus[0] + " " + focus[1] + " " + focus[2];
      r.title[0] = static_cast<char>(r.title[0] - 'a' + 'A');
      r.authors = {surname(serial++)};
      r.year = 2018;
      r.abstract_text = sentences(words);
      out.cluster_of[r.id] = k;
      members[k].push_back(r.id);
      out.records.push_back(std::move(r));
    }
  }

  auto make_query = [&](const std::string& id,
                        std::vector<std::string> cited) {
    std::vector<double> weight(clusters);
    double total = 0.0;
    for (double& w : weight) {
      w = 0.2 + 0.8 * rng.Uniform();
      total += w;
    }
    std::vector<std::string> words;
    for (size_t t = 0; t < 30; ++t) {
      double u = rng.Uniform() * total;
      size_t k = 0;
      while (k + 1 < clusters && u >= weight[k]) u -= weight[k++];
      words.push_back(vocab[k][rng.Below(12)]);
    }
    for (size_t t = 0; t < 6; ++t) {
      words.push_back(kFiller[rng.Below(kFiller.size())]);
    }
    rng.Shuffle(words);
    PaperRecord r;
    r.id = id;
    r.title = "Survey " + id;
    r.authors = {surname(serial++)};
    r.year = 2019;
    r.abstract_text = sentences(words);
    r.cited_ids = cited;
    out.cited[id] = std::move(cited);
    out.records.push_back(std::move(r));
  };

  for (size_t q = 0; q < train_queries; ++q) {
    std::vector<size_t> order(clusters);
    for (size_t k = 0; k < clusters; ++k) order[k] = k;
    rng.Shuffle(order);
    size_t used = clusters == 1 ? 1 : 2 + rng.Below(clusters - 1);
    std::vector<std::string> cited;
    for (size_t u = 0; u < used; ++u) {
      std::vector<std::string> pool = members[order[u]];
      rng.Shuffle(pool);
      size_t take = per_cluster == 1 ? 1 : 2 + rng.Below(per_cluster - 1);
      cited.insert(cited.end(), pool.begin(), pool.begin() + take);
    }
    rng.Shuffle(cited);
    std::string id = "train" + std::to_string(q);
    out.train_queries.push_back(id);
    make_query(id, std::move(cited));
  }
  for (size_t q = 0; q < test_queries; ++q) {
    std::vector<std::string> cited;
    for (const auto& m : members) cited.insert(cited.end(), m.begin(), m.end());
    rng.Shuffle(cited);
    std::string id = "test" + std::to_string(q);
    out.test_queries.push_back(id);
    make_query(id, std::move(cited));
  }
  return out;
}

planner::ContentPlan ClusterGoldPlan(
    const planner::PlanningProblem& problem,
    const std::map<std::string, size_t>& cluster_of) {
  std::map<size_t, std::vector<size_t>> groups;
  for (size_t c = 0; c < problem.size(); ++c) {
    auto it = cluster_of.find(problem.candidates()[c].id);
    if (it == cluster_of.end()) {
      throw Error(ErrorCode::kUnknownCandidate, problem.candidates()[c].id);
    }
    groups[it->second].push_back(c);
  }
  std::vector<std::vector<size_t>> branches;
  for (auto& [k, members] : groups) {
    std::stable_sort(members.begin(), members.end(), [&](size_t a, size_t b) {
      return problem.CosX(a) > problem.CosX(b);
    });
    branches.push_back(members);
  }
  std::stable_sort(branches.begin(), branches.end(),
                   [&](const auto& a, const auto& b) {
                     return problem.CosX(a[0]) > problem.CosX(b[0]);
                   });
  planner::ContentPlan plan;
  plan.source_paper_id = problem.source_id();
  for (const auto& members : branches) {
    planner::PlanBranch branch;
    for (size_t c : members) branch.papers.push_back(problem.candidates()[c].id);
    branch.reason = planner::BranchReason(problem, members);
    plan.branches.push_back(std::move(branch));
  }
  return plan;
}

std::vector<BoundaryPair> BuildBoundaryPairs(const MiniCorpus& mini,
                                             size_t count, uint64_t seed) {
  static const std::vector<std::string> kOpeners = {
      "However, ", "In contrast, ", "Similarly, ", "Recently, "};
  io::Rng rng(seed);
  const auto& records = mini.records;
  if (records.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need two papers");
  }
  auto cite = [](const PaperRecord& r) {
    return "(" + AuthorNames(r.authors) + ", " + std::to_string(r.year) + ")";
  };
  std::vector<BoundaryPair> pairs;
  for (size_t i = 0; i < count; ++i) {
    const PaperRecord& p = records[rng.Below(records.size())];
    auto ps = AbstractSentences(p);
    size_t a = rng.Below(ps.size());
    BoundaryPair pair;
    pair.s1 = WithCitation(ps[a], cite(p));
    if (i % 2 == 0) {
      size_t b = (a + 1 + rng.Below(ps.size() - 1)) % ps.size();
      double u = rng.Uniform();
      if (u < 0.6) {
        pair.s2 = WithCitation(ps[b], cite(p));
      } else if (u < 0.8) {
        pair.s2 = ps[b];
      } else {
        pair.s2 = "However, " + Decapitalize(WithCitation(ps[b], cite(p)));
      }
      pair.different = false;
    } else {
      size_t qi = rng.Below(records.size() - 1);
      const PaperRecord& q =
          records[qi >= static_cast<size_t>(&p - records.data()) ? qi + 1 : qi];
      auto qs = AbstractSentences(q);
      std::string s2 = WithCitation(qs[rng.Below(qs.size())], cite(q));
      if (rng.Uniform() < 0.6) {
        s2 = kOpeners[rng.Below(kOpeners.size())] + Decapitalize(s2);
      }
      pair.s2 = std::move(s2);
      pair.different = true;
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<ReasonPair> BuildReasonPairs(const MiniCorpus& mini, size_t count,
                                         uint64_t seed) {
  static const std::vector<std::pair<std::string, std::vector<std::string>>>
      kCueSentences = {
          {"CoCoGM",
           {"The method outperforms earlier ranking baselines.",
            "Its results are better than those of previous systems.",
            "The model improves over a strong retrieval baseline."}},
          {"CoCoXY",
           {"Unlike graph methods, the model reads the full text.",
            "In contrast to rule systems, all parameters are learned.",
            "Training is end to end, whereas earlier designs are staged."}},
          {"Weak",
           {"However, the approach is limited to short inputs.",
            "The system fails to handle long documents.",
            "A drawback is that annotation is expensive."}},
          {"PSim",
           {"Similarly, related papers are grouped before writing.",
            "The setup is closely related to earlier planning work.",
            "Likewise, every paper is represented by its abstract."}},
      };
  static const std::vector<std::string> kLabels = {"CoCoGM", "CoCoXY", "Weak",
                                                   "PSim", "Neut"};
  io::Rng rng(seed);
  std::vector<const PaperRecord*> citing;
  for (const PaperRecord& r : mini.records) {
    if (r.related_work) citing.push_back(&r);
  }
  if (citing.empty() || mini.records.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "mini corpus too small");
  }
  std::vector<ReasonPair> pairs;
  for (size_t i = 0; i < count; ++i) {
    const std::string& label = kLabels[i % kLabels.size()];
    const PaperRecord& x = *citing[rng.Below(citing.size())];
    const PaperRecord* c = &mini.records[rng.Below(mini.records.size())];
    while (c == &x) c = &mini.records[rng.Below(mini.records.size())];
    ReasonPair pair{x.abstract_text, c->abstract_text, label};
    bool overlap_case = label == "PSim" && (i / kLabels.size()) % 2 == 1;
    if (overlap_case) {
      // Reordered citing abstract with one sentence dropped.
      auto xs = AbstractSentences(x);
      rng.Shuffle(xs);
      if (xs.size() > 2) xs.pop_back();
      pair.c = text::Join(xs, " ");
    } else if (label != "Neut") {
      auto it = std::find_if(kCueSentences.begin(), kCueSentences.end(),
                             [&](const auto& e) { return e.first == label; });
      auto cs = AbstractSentences(*c);
      const auto& options = it->second;
      cs.insert(cs.begin() + static_cast<std::ptrdiff_t>(rng.Below(cs.size() + 1)),
                options[rng.Below(options.size())]);
      pair.c = text::Join(cs, " ");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace relworks::synthetic
