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

#include "relworks/cli.h"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "relworks/corpus.h"
#include "relworks/encode.h"
#include "relworks/error.h"
#include "relworks/io.h"
#include "relworks/metrics.h"
#include "relworks/pipeline.h"
#include "relworks/planner.h"
#include "relworks/realize.h"
#include "relworks/reasons.h"
#include "relworks/segment.h"
#include "relworks/service.h"

namespace relworks::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

constexpr uint64_t kDefaultSeed = 13;
constexpr const char* kDefaultAddress = "127.0.0.1:8080";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by several subcommands.
struct Common {
  std::string work = ".";
  std::optional<uint64_t> seed;
  std::string reason_model = "cue";
  std::string taxonomy;
  bool no_reason = false;
  int timeout_ms = 30000;
};

struct SeedChoice {
  uint64_t value = kDefaultSeed;
  std::string source = "default";
};

SeedChoice ResolveSeed(const std::optional<uint64_t>& flag) {
  if (flag) return {*flag, "flag"};
  if (const char* env = std::getenv("RELWORKS_SEED"); env && *env) {
    try {
      size_t used = 0;
      uint64_t v = std::stoull(env, &used);
      if (used == std::string_view(env).size()) return {v, "RELWORKS_SEED"};
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::kInvalidArgument,
                std::string("RELWORKS_SEED is not an integer: ") + env);
  }
  return {};
}

// Input/output bookkeeping for one run. Files are recorded by name relative
// to their role so manifests do not depend on where a workspace lives.
class Manifest {
 public:
  Manifest(std::string command, Json config)
      : command_(std::move(command)), config_(std::move(config)) {}

  void Seed(const std::string& name, const SeedChoice& seed) {
    seeds_[name] = {{"value", seed.value}, {"source", seed.source}};
  }
  void Input(const fs::path& path) { inputs_.push_back(Entry(path)); }
  void InputDirectory(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      Json j = Entry(f);
      j["file"] = dir.filename().string() + "/" + f.filename().string();
      inputs_.push_back(std::move(j));
    }
  }
  void Output(const fs::path& path) { outputs_.push_back(Entry(path)); }
  void Result(const std::string& key, Json value) {
    results_[key] = std::move(value);
  }

  void Write(const fs::path& path) const {
    Json j{{"format", "relworks.manifest"},
           {"version", 1},
           {"command", command_},
           {"config", config_},
           {"seeds", seeds_},
           {"inputs", inputs_},
           {"outputs", outputs_}};
    if (!results_.empty()) j["results"] = results_;
    io::WriteJsonAtomic(path, j);
  }

 private:
  static Json Entry(const fs::path& path) {
    return Json{{"file", path.filename().string()},
                {"sha256", io::Sha256Hex(io::ReadFile(path))}};
  }

  std::string command_;
  Json config_;
  Json seeds_ = Json::object();
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
  Json results_ = Json::object();
};

fs::path ManifestPath(const fs::path& output) {
  return output.parent_path() / (output.filename().string() + ".manifest.json");
}

reasons::Taxonomy LoadTaxonomy(const Common& c, Manifest* m) {
  if (c.taxonomy.empty()) return reasons::Taxonomy::Default();
  if (m) m->Input(c.taxonomy);
  return reasons::Taxonomy::Load(c.taxonomy);
}

corpus::Corpus LoadCorpus(const fs::path& work, Manifest& m) {
  fs::path p = work / pipeline::kCorpusFile;
  m.Input(p);
  return corpus::Corpus(corpus::ReadRecordsFile(p));
}

encode::PaperIndex LoadIndex(const fs::path& work, Manifest& m) {
  fs::path p = work / pipeline::kIndexFile;
  m.Input(p);
  return encode::PaperIndex::Load(p);
}

std::vector<segment::GoldDerivation> LoadGold(const fs::path& work,
                                              Manifest& m) {
  fs::path p = work / pipeline::kGoldPlansFile;
  m.Input(p);
  std::vector<segment::GoldDerivation> out;
  for (const Json& row : io::ReadJsonLines(p)) {
    out.push_back(segment::GoldDerivationFromJson(row));
  }
  return out;
}

std::vector<std::string> SplitIds(const fs::path& work, const std::string& split,
                                  Manifest& m) {
  fs::path p = work / pipeline::kSplitsFile;
  m.Input(p);
  Json j = io::ReadJson(p);
  if (split == "all") {
    std::vector<std::string> ids;
    for (const char* s : {"train", "validation", "test"}) {
      for (const Json& id : j.at(s)) ids.push_back(id.get<std::string>());
    }
    return ids;
  }
  if (!j.contains(split) || split == "config" || split == "version") {
    throw UsageError("unknown split: " + split);
  }
  return j.at(split).get<std::vector<std::string>>();
}

std::shared_ptr<const reasons::ReasonClassifier> MakeClassifier(
    const Common& c, const reasons::Taxonomy& taxonomy) {
  return reasons::MakeReasonClassifier(c.reason_model, taxonomy);
}

planner::PlannerModel LoadModel(const std::string& path, Manifest& m) {
  m.Input(path);
  return planner::PlannerModel::Load(path);
}

std::string ModelPath(const Common& c, const std::string& flag) {
  return flag.empty() ? (fs::path(c.work) / pipeline::kModelFile).string() : flag;
}

Json CommonJson(const Common& c) {
  return Json{{"reason_model", c.reason_model},
              {"taxonomy", c.taxonomy.empty()
                               ? std::string("default")
                               : fs::path(c.taxonomy).filename().string()},
              {"no_reason", c.no_reason}};
}

void AddWork(CLI::App* sub, Common& c) {
  sub->add_option("--work", c.work, "Workspace directory")
      ->capture_default_str();
}

void AddReasonFlags(CLI::App* sub, Common& c) {
  sub->add_option("--reason-model", c.reason_model,
                  "Reason classifier: cue or external:<endpoint>")
      ->capture_default_str();
  sub->add_option("--taxonomy", c.taxonomy, "Taxonomy file (default built in)");
  sub->add_flag("--no-reason", c.no_reason,
                "Force every citation reason to the neutral label");
}

std::chrono::milliseconds Timeout(const Common& c) {
  if (c.timeout_ms <= 0) throw UsageError("--timeout-ms must be positive");
  return std::chrono::milliseconds(c.timeout_ms);
}

// ---------------------------------------------------------------- commands

struct IngestArgs {
  std::string input;
  int train_year_max = 2019;
  size_t min_citations = 15;
  double validation_ratio = 0.48;
};

int RunIngest(const Common& c, const IngestArgs& a, std::ostream& out) {
  SeedChoice seed = ResolveSeed(c.seed);
  corpus::SplitConfig cfg{a.train_year_max, a.min_citations,
                          a.validation_ratio, seed.value};
  Manifest m("ingest", Json{{"train_year_max", cfg.train_year_max},
                            {"min_citations", cfg.min_citations},
                            {"validation_ratio", cfg.validation_ratio}});
  m.Seed("split", seed);
  m.InputDirectory(a.input);
  corpus::Corpus corpus(corpus::ReadRecordsFromDirectory(a.input));
  if (corpus.size() == 0) throw Error(ErrorCode::kEmptyCorpus, a.input);
  corpus::DatasetBuild build = corpus::BuildParallelDataset(corpus);
  corpus::DatasetSplit split = corpus::SplitDataset(build.examples, cfg);

  fs::path work(c.work);
  fs::create_directories(work);
  std::vector<Json> records;
  for (const auto& r : corpus.records()) records.push_back(corpus::SerializeRecord(r));
  std::vector<Json> examples;
  for (const auto& e : build.examples) examples.push_back(corpus::SerializeExample(e));
  io::WriteJsonLinesAtomic(work / pipeline::kCorpusFile, records);
  io::WriteJsonLinesAtomic(work / pipeline::kDatasetFile, examples);
  io::WriteJsonAtomic(work / pipeline::kSplitsFile, corpus::SerializeSplitIds(split));
  io::WriteJsonAtomic(work / pipeline::kSkipReportFile,
                      Json{{"version", 1},
                           {"without_citations", build.skipped_ids},
                           {"below_min_citations", split.filtered_out}});
  for (auto f : {pipeline::kCorpusFile, pipeline::kDatasetFile,
                 pipeline::kSplitsFile, pipeline::kSkipReportFile}) {
    m.Output(work / f);
  }
  m.Write(work / "ingest.manifest.json");
  out << "ingested " << corpus.size() << " papers, " << build.examples.size()
      << " examples (train " << split.train.size() << ", validation "
      << split.validation.size() << ", test " << split.test.size()
      << ", filtered " << split.filtered_out.size() << ")\n";
  return kExitOk;
}

int RunIndex(const Common& c, std::ostream& out) {
  Manifest m("index", Json::object());
  fs::path work(c.work);
  corpus::Corpus corpus = LoadCorpus(work, m);
  encode::PaperIndex index = encode::PaperIndex::Build(corpus);
  index.Save(work / pipeline::kIndexFile);
  m.Output(work / pipeline::kIndexFile);
  m.Write(work / "index.manifest.json");
  out << "indexed " << index.entries().size() << " papers, vocabulary "
      << index.vectorizer().vocabulary_size() << "\n";
  return kExitOk;
}

int RunDerivePlans(const Common& c, const std::string& annotations,
                   std::ostream& out) {
  Manifest m("derive-plans",
             Json{{"annotations", annotations.empty()
                                      ? std::string()
                                      : fs::path(annotations).filename().string()},
                  {"segmenter", segment::SegmenterWeights().ToJson()}});
  fs::path work(c.work);
  reasons::Taxonomy taxonomy = LoadTaxonomy(c, &m);
  corpus::Corpus corpus = LoadCorpus(work, m);
  encode::PaperIndex index = LoadIndex(work, m);
  if (!annotations.empty()) m.InputDirectory(annotations);
  fs::path dataset = work / pipeline::kDatasetFile;
  m.Input(dataset);
  reasons::CueReasonClassifier cue(taxonomy);
  std::vector<Json> rows;
  size_t annotated = 0;
  for (const Json& raw : io::ReadJsonLines(dataset)) {
    corpus::ParallelExample e = corpus::ParseExample(raw);
    std::optional<segment::SegmentStarts> ann;
    if (!annotations.empty()) ann = segment::LoadAnnotation(annotations, e.paper_id);
    if (ann) ++annotated;
    segment::GoldDerivation g = segment::DeriveGoldPlan(
        e.paper_id, e.gold_related_work, corpus, index.vectorizer(), cue, ann);
    rows.push_back(segment::GoldDerivationToJson(g));
  }
  io::WriteJsonLinesAtomic(work / pipeline::kGoldPlansFile, rows);
  m.Output(work / pipeline::kGoldPlansFile);
  m.Write(work / "derive-plans.manifest.json");
  out << "derived " << rows.size() << " gold plans (" << annotated
      << " from annotations)\n";
  return kExitOk;
}

struct TrainArgs {
  std::string out;
  std::string split = "train";
  planner::PlannerConfig config;
};

int RunTrain(const Common& c, TrainArgs a, std::ostream& out) {
  SeedChoice seed = ResolveSeed(c.seed);
  a.config.seed = seed.value;
  Json cfg = a.config.ToJson();
  cfg["split"] = a.split;
  cfg.update(CommonJson(c));
  Manifest m("train-planner", cfg);
  m.Seed("planner", seed);
  fs::path work(c.work);
  reasons::Taxonomy taxonomy = LoadTaxonomy(c, &m);
  auto classifier = MakeClassifier(c, taxonomy);
  pipeline::Engine engine(LoadCorpus(work, m), LoadIndex(work, m),
                          planner::PlannerModel::Zero(a.config), taxonomy,
                          classifier);
  std::vector<segment::GoldDerivation> golds = LoadGold(work, m);
  std::vector<std::string> ids = SplitIds(work, a.split, m);
  std::vector<planner::TrainingExample> examples;
  for (const std::string& id : ids) {
    auto it = std::find_if(golds.begin(), golds.end(), [&](const auto& g) {
      return g.plan.source_paper_id == id;
    });
    if (it == golds.end()) continue;
    const corpus::PaperRecord& r = engine.corpus().Get(id);
    std::vector<std::string> cands = it->plan.AllPapers();
    examples.push_back(
        {engine.Problem(pipeline::QueryFor(r), cands, c.no_reason), it->plan});
  }
  planner::TrainResult result = planner::TrainPlanner(examples, a.config);
  fs::path model_path = a.out.empty() ? work / pipeline::kModelFile : fs::path(a.out);
  result.model.Save(model_path);
  m.Output(model_path);
  m.Result("examples", examples.size());
  m.Result("loss_history", result.loss_history);
  m.Write(ManifestPath(model_path));
  out << "trained on " << examples.size() << " plans, loss "
      << result.loss_history.front() << " -> " << result.loss_history.back()
      << "\n";
  return kExitOk;
}

planner::DecodeMode ParseMode(const std::string& mode) {
  if (mode == "greedy") return planner::DecodeMode::kGreedy;
  if (mode == "sample") return planner::DecodeMode::kSample;
  throw UsageError("--mode must be greedy or sample");
}

pipeline::Setting ParseSettingFlag(const std::string& s) {
  try {
    return pipeline::ParseSetting(s);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

struct PlanArgs {
  std::string setting = "standard";
  std::optional<size_t> n;
  std::string mode = "greedy";
  std::string paper;
  std::string split = "test";
  std::string out;
  std::string model;
};

Json PlanRow(const pipeline::PlanOutcome& o, pipeline::Setting setting) {
  return Json{{"version", 1},
              {"paper_id", o.paper_id},
              {"setting", pipeline::SettingName(setting)},
              {"candidates", o.candidates},
              {"plan", planner::PlanToJson(o.result.plan)},
              {"unplaced", o.result.unplaced}};
}

int RunPlan(const Common& c, const PlanArgs& a, std::ostream& out) {
  pipeline::PlanOptions options;
  options.setting = ParseSettingFlag(a.setting);
  if (options.setting == pipeline::Setting::kUpdate) {
    throw UsageError("plan --setting must be standard or full");
  }
  if (options.setting == pipeline::Setting::kFull && !a.n) {
    throw UsageError("plan --setting full requires --n");
  }
  if (a.n) options.n = *a.n;
  options.decode.mode = ParseMode(a.mode);
  SeedChoice seed = ResolveSeed(c.seed);
  options.decode.seed = seed.value;
  options.no_reason = c.no_reason;
  Json cfg{{"setting", a.setting}, {"n", options.n}, {"mode", a.mode},
           {"paper", a.paper}, {"split", a.split}};
  cfg.update(CommonJson(c));
  Manifest m("plan", cfg);
  m.Seed("decode", seed);
  fs::path work(c.work);
  reasons::Taxonomy taxonomy = LoadTaxonomy(c, &m);
  auto classifier = MakeClassifier(c, taxonomy);
  planner::PlannerModel model = LoadModel(ModelPath(c, a.model), m);
  pipeline::Engine engine(LoadCorpus(work, m), LoadIndex(work, m),
                          std::move(model), taxonomy, classifier);
  if (!a.paper.empty()) {
    const corpus::PaperRecord& r = engine.corpus().Get(a.paper);
    pipeline::PlanOutcome o =
        engine.Plan(pipeline::QueryFor(r), std::nullopt, options);
    out << PlanRow(o, options.setting).dump(2) << "\n";
    m.Write(work / "plan.manifest.json");
    return kExitOk;
  }
  std::vector<Json> rows;
  for (const std::string& id : SplitIds(work, a.split, m)) {
    const corpus::PaperRecord& r = engine.corpus().Get(id);
    rows.push_back(PlanRow(
        engine.Plan(pipeline::QueryFor(r), std::nullopt, options),
        options.setting));
  }
  fs::path path = a.out.empty()
                      ? work / ("plans_" + a.setting + ".jsonl")
                      : fs::path(a.out);
  io::WriteJsonLinesAtomic(path, rows);
  m.Output(path);
  m.Write(ManifestPath(path));
  out << "planned " << rows.size() << " papers -> " << path.string() << "\n";
  return kExitOk;
}

struct RealizeArgs {
  std::string plans;
  std::string realizer = "template";
  size_t max_words = 40;
  std::string out;
};

fs::path DefaultOutput(const fs::path& work, const std::string& prefix,
                       const fs::path& input) {
  std::string stem = input.stem().string();
  if (stem.rfind("plans_", 0) == 0) stem = stem.substr(6);
  return work / (prefix + stem + ".jsonl");
}

int RunRealize(const Common& c, const RealizeArgs& a, std::ostream& out) {
  Json cfg{{"realizer", a.realizer}, {"max_words", a.max_words}};
  cfg.update(CommonJson(c));
  Manifest m("realize", cfg);
  fs::path work(c.work);
  reasons::Taxonomy taxonomy = LoadTaxonomy(c, &m);
  corpus::Corpus corpus = LoadCorpus(work, m);
  m.Input(a.plans);
  pipeline::Engine engine(std::move(corpus), encode::PaperIndex(),
                          planner::PlannerModel::Zero({}), taxonomy);
  auto realizer = realize::MakeRealizer(a.realizer, taxonomy, Timeout(c));
  std::vector<Json> rows;
  size_t fallbacks = 0;
  for (const Json& row : io::ReadJsonLines(a.plans)) {
    planner::ContentPlan plan = planner::PlanFromJson(row.at("plan"));
    std::string id = row.at("paper_id").get<std::string>();
    pipeline::Setting setting =
        pipeline::ParseSetting(row.value("setting", "standard"));
    const std::string& x = engine.corpus().Get(id).abstract_text;
    realize::RealizedDocument doc =
        engine.Realize(x, plan, *realizer, a.max_words);
    for (const auto& s : doc.segments) {
      fallbacks += s.provenance == realize::Provenance::kFallback;
    }
    rows.push_back(pipeline::OutputRow(
        id, setting, plan, doc, x,
        pipeline::CopyInputs(engine.corpus(), x, plan)));
  }
  fs::path path = a.out.empty() ? DefaultOutput(work, "outputs_", a.plans)
                                : fs::path(a.out);
  io::WriteJsonLinesAtomic(path, rows);
  m.Output(path);
  m.Result("fallback_segments", fallbacks);
  m.Write(ManifestPath(path));
  out << "realized " << rows.size() << " documents (" << fallbacks
      << " fallback segments) -> " << path.string() << "\n";
  return kExitOk;
}

struct UpdateArgs {
  std::string cases;
  std::string realizer = "template";
  std::string model;
  size_t max_words = 40;
  bool full_regen = false;
  std::string out;
};

int RunUpdate(const Common& c, const UpdateArgs& a, std::ostream& out) {
  Json cfg{{"realizer", a.realizer},
           {"max_words", a.max_words},
           {"regeneration", a.full_regen ? "document" : "segment"}};
  cfg.update(CommonJson(c));
  Manifest m("update", cfg);
  fs::path work(c.work);
  reasons::Taxonomy taxonomy = LoadTaxonomy(c, &m);
  auto classifier = MakeClassifier(c, taxonomy);
  planner::PlannerModel model = LoadModel(ModelPath(c, a.model), m);
  pipeline::Engine engine(LoadCorpus(work, m), LoadIndex(work, m),
                          std::move(model), taxonomy, classifier);
  m.Input(a.cases);
  auto realizer = realize::MakeRealizer(a.realizer, taxonomy, Timeout(c));
  std::vector<Json> rows;
  for (const Json& raw : io::ReadJsonLines(a.cases)) {
    std::string id = raw.at("paper_id").get<std::string>();
    std::string inserted = raw.at("inserted").get<std::string>();
    std::string existing = raw.at("existing_text").get<std::string>();
    std::optional<segment::SegmentStarts> starts;
    if (raw.contains("existing_starts")) {
      starts = raw.at("existing_starts").get<segment::SegmentStarts>();
    }
    const corpus::PaperRecord& r = engine.corpus().Get(id);
    segment::GoldDerivation g = engine.Segment(id, existing, starts);
    pipeline::UpdateOutcome u =
        engine.InsertAndUpdate(pipeline::QueryFor(r), g.segmented, g.plan,
                               inserted, *realizer, c.no_reason, a.max_words);
    realize::RealizedDocument doc =
        a.full_regen ? engine.Realize(r.abstract_text, u.insert.plan, *realizer,
                                      a.max_words)
                     : u.document;
    Json row = pipeline::OutputRow(
        id, pipeline::Setting::kUpdate, u.insert.plan, doc, existing,
        pipeline::CopyInputs(engine.corpus(), r.abstract_text, u.insert.plan));
    row["inserted"] = inserted;
    row["affected"] = u.insert.affected;
    row["created_branch"] = u.insert.created_branch;
    row["regeneration"] = a.full_regen ? "document" : "segment";
    rows.push_back(std::move(row));
  }
  fs::path path = a.out.empty()
                      ? work / (a.full_regen ? "updates_document.jsonl"
                                             : "updates_segment.jsonl")
                      : fs::path(a.out);
  io::WriteJsonLinesAtomic(path, rows);
  m.Output(path);
  m.Write(ManifestPath(path));
  out << "updated " << rows.size() << " documents -> " << path.string() << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string outputs;
  std::string setting = "standard";
  std::string run;
  std::string out;
  std::string table;
};

int RunEvaluate(const Common& c, const EvaluateArgs& a, std::ostream& out) {
  ParseSettingFlag(a.setting);
  std::string run = a.run.empty() ? fs::path(a.outputs).stem().string() : a.run;
  Manifest m("evaluate", Json{{"setting", a.setting}, {"run", run}});
  fs::path work(c.work);
  reasons::Taxonomy taxonomy = LoadTaxonomy(c, &m);
  corpus::Corpus corpus = LoadCorpus(work, m);
  std::vector<segment::GoldDerivation> gold = LoadGold(work, m);
  m.Input(a.outputs);
  std::vector<metrics::RunOutput> outputs;
  for (const Json& row : io::ReadJsonLines(a.outputs)) {
    outputs.push_back(pipeline::RunOutputFromRow(row));
  }
  reasons::CueReasonClassifier cue(taxonomy);
  metrics::MetricReport report = metrics::EvaluateRun(
      outputs, pipeline::GoldItems(corpus, gold), cue, {a.setting, run});
  Json j = report.ToJson();
  std::vector<std::string> problems = metrics::ValidateReport(j);
  if (!problems.empty()) {
    throw Error(ErrorCode::kFormat, "report failed validation: " + problems[0]);
  }
  fs::path path = a.out.empty() ? work / ("report_" + run + ".json") : fs::path(a.out);
  fs::path table = a.table.empty() ? fs::path(path).replace_extension(".txt")
                                   : fs::path(a.table);
  io::WriteJsonAtomic(path, j);
  io::WriteFileAtomic(table, report.ToTable());
  m.Output(path);
  m.Output(table);
  m.Write(ManifestPath(path));
  out << report.ToTable();
  return kExitOk;
}

struct ServeArgs {
  std::string addr;
  std::string realizer = "template";
  std::string static_dir;
  std::string model;
};

service::Service* g_service = nullptr;

extern "C" void StopOnSignal(int) {
  if (g_service) g_service->Stop();
}

int RunServe(const Common& c, const ServeArgs& a, std::ostream& out) {
  std::string addr = a.addr;
  if (addr.empty()) {
    const char* env = std::getenv("RELWORKS_ADDR");
    addr = env && *env ? env : kDefaultAddress;
  }
  auto [host, port] = service::ParseAddress(addr);
  Json cfg{{"addr", addr}, {"realizer", a.realizer}, {"static", a.static_dir}};
  cfg.update(CommonJson(c));
  Manifest m("serve", cfg);
  fs::path work(c.work);
  reasons::Taxonomy taxonomy = LoadTaxonomy(c, &m);
  auto classifier = MakeClassifier(c, taxonomy);
  planner::PlannerModel model = LoadModel(ModelPath(c, a.model), m);
  auto engine = std::make_shared<const pipeline::Engine>(
      LoadCorpus(work, m), LoadIndex(work, m), std::move(model), taxonomy,
      classifier);
  service::Service svc(engine, {a.realizer, Timeout(c), a.static_dir});
  int bound = svc.Bind(host, port);
  if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + addr);
  m.Result("port", bound);
  m.Write(work / "serve.manifest.json");
  out << "listening on " << host << ":" << bound << std::endl;
  g_service = &svc;
  auto old_int = std::signal(SIGINT, StopOnSignal);
  auto old_term = std::signal(SIGTERM, StopOnSignal);
  bool ok = svc.Run();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  g_service = nullptr;
  return ok ? kExitOk : kExitDomainError;
}

}  // namespace

int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Related-work generation toolkit", "relworks"};
  app.require_subcommand(1);
  Common common;
  IngestArgs ingest;
  std::string annotations;
  TrainArgs train;
  PlanArgs plan;
  RealizeArgs realize_args;
  UpdateArgs update;
  EvaluateArgs evaluate;
  ServeArgs serve;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed,
                    "Seed (default: RELWORKS_SEED, then 13)");
  };
  auto add_timeout = [&](CLI::App* sub) {
    sub->add_option("--timeout-ms", common.timeout_ms,
                    "Timeout for external endpoints")
        ->capture_default_str();
  };

  CLI::App* s_ingest = app.add_subcommand("ingest", "Read JSON-lines records");
  s_ingest->add_option("--input", ingest.input, "Directory of *.jsonl files")
      ->required()
      ->check(CLI::ExistingDirectory);
  AddWork(s_ingest, common);
  add_seed(s_ingest);
  s_ingest->add_option("--train-year-max", ingest.train_year_max)
      ->capture_default_str();
  s_ingest->add_option("--min-citations", ingest.min_citations)
      ->capture_default_str();
  s_ingest->add_option("--validation-ratio", ingest.validation_ratio)
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  CLI::App* s_index = app.add_subcommand("index", "Build the tf-idf index");
  AddWork(s_index, common);

  CLI::App* s_derive =
      app.add_subcommand("derive-plans", "Derive gold plans from sections");
  AddWork(s_derive, common);
  s_derive->add_option("--annotations", annotations,
                       "Directory of <paper_id>.json segment annotations")
      ->check(CLI::ExistingDirectory);
  s_derive->add_option("--taxonomy", common.taxonomy, "Taxonomy file");

  CLI::App* s_train = app.add_subcommand("train-planner", "Train the planner");
  AddWork(s_train, common);
  AddReasonFlags(s_train, common);
  add_seed(s_train);
  s_train->add_option("--out", train.out, "Model path");
  s_train->add_option("--split", train.split)->capture_default_str();
  s_train->add_option("--epochs", train.config.epochs)->capture_default_str();
  s_train->add_option("--hidden", train.config.hidden_dim)->capture_default_str();
  s_train->add_option("--learning-rate", train.config.learning_rate)
      ->capture_default_str();
  s_train->add_option("--momentum", train.config.momentum)->capture_default_str();
  s_train->add_option("--batch-size", train.config.batch_size)
      ->capture_default_str();
  s_train->add_option("--max-branches", train.config.max_branches)
      ->capture_default_str();

  CLI::App* s_plan = app.add_subcommand("plan", "Decode content plans");
  AddWork(s_plan, common);
  AddReasonFlags(s_plan, common);
  add_seed(s_plan);
  s_plan->add_option("--setting", plan.setting, "standard or full")
      ->capture_default_str();
  s_plan->add_option("--n", plan.n, "Retrieval depth (full setting)");
  s_plan->add_option("--mode", plan.mode, "greedy or sample")
      ->capture_default_str();
  s_plan->add_option("--paper", plan.paper, "Plan one paper to standard output");
  s_plan->add_option("--split", plan.split)->capture_default_str();
  s_plan->add_option("--out", plan.out, "Output path");
  s_plan->add_option("--model", plan.model, "Planner model path");

  CLI::App* s_realize = app.add_subcommand("realize", "Realize plans");
  AddWork(s_realize, common);
  add_timeout(s_realize);
  s_realize->add_option("--taxonomy", common.taxonomy, "Taxonomy file");
  s_realize->add_option("--plans", realize_args.plans, "Plans file")
      ->required()
      ->check(CLI::ExistingFile);
  s_realize->add_option("--realizer", realize_args.realizer,
                        "template or external:<endpoint>")
      ->capture_default_str();
  s_realize->add_option("--max-words", realize_args.max_words)
      ->capture_default_str();
  s_realize->add_option("--out", realize_args.out, "Output path");

  CLI::App* s_update =
      app.add_subcommand("update", "Insert papers into existing sections");
  AddWork(s_update, common);
  AddReasonFlags(s_update, common);
  add_timeout(s_update);
  s_update->add_option("--cases", update.cases,
                       "JSON lines {paper_id, inserted, existing_text}")
      ->required()
      ->check(CLI::ExistingFile);
  s_update->add_option("--realizer", update.realizer)->capture_default_str();
  s_update->add_option("--model", update.model, "Planner model path");
  s_update->add_option("--max-words", update.max_words)->capture_default_str();
  s_update->add_flag("--full-regen", update.full_regen,
                     "Regenerate the whole document instead of one segment");
  s_update->add_option("--out", update.out, "Output path");

  CLI::App* s_eval = app.add_subcommand("evaluate", "Score a run");
  AddWork(s_eval, common);
  s_eval->add_option("--taxonomy", common.taxonomy, "Taxonomy file");
  s_eval->add_option("--outputs", evaluate.outputs, "Realized outputs")
      ->required()
      ->check(CLI::ExistingFile);
  s_eval->add_option("--setting", evaluate.setting, "standard, full or update")
      ->capture_default_str();
  s_eval->add_option("--run", evaluate.run, "Run name");
  s_eval->add_option("--out", evaluate.out, "Report path");
  s_eval->add_option("--table", evaluate.table, "Table path");

  CLI::App* s_serve = app.add_subcommand("serve", "Run the HTTP service");
  AddWork(s_serve, common);
  AddReasonFlags(s_serve, common);
  add_timeout(s_serve);
  s_serve->add_option("--addr", serve.addr,
                      std::string("host:port (default: RELWORKS_ADDR, then ") +
                          kDefaultAddress + ")");
  s_serve->add_option("--realizer", serve.realizer)->capture_default_str();
  s_serve->add_option("--static", serve.static_dir, "Static files for /")
      ->check(CLI::ExistingDirectory);
  s_serve->add_option("--model", serve.model, "Planner model path");

  std::vector<std::string> argv_store{"relworks"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "relworks: " << e.what() << "\n";
    CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands()[0];
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (s_ingest->parsed()) return RunIngest(common, ingest, out);
    if (s_index->parsed()) return RunIndex(common, out);
    if (s_derive->parsed()) return RunDerivePlans(common, annotations, out);
    if (s_train->parsed()) return RunTrain(common, train, out);
    if (s_plan->parsed()) return RunPlan(common, plan, out);
    if (s_realize->parsed()) return RunRealize(common, realize_args, out);
    if (s_update->parsed()) return RunUpdate(common, update, out);
    if (s_eval->parsed()) return RunEvaluate(common, evaluate, out);
    if (s_serve->parsed()) return RunServe(common, serve, out);
  } catch (const UsageError& e) {
    err << "relworks: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "relworks: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const Json::exception& e) {
    err << "relworks: malformed JSON: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "relworks: " << e.what() << "\n";
    return kExitDomainError;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace relworks::cli
