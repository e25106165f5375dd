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

#include "relworks/service.h"

#include <climits>

#include "httplib.h"
#include "relworks/error.h"
#include "relworks/text.h"

namespace relworks::service {
namespace {

Json ErrorBody(std::string_view code, std::string_view message) {
  return Json{{"version", kApiVersion},
              {"error", {{"code", code}, {"message", message}}}};
}

HttpResponse Fail(int status, std::string_view code, std::string_view message) {
  return HttpResponse{status, ErrorBody(code, message)};
}

planner::DecodeMode ParseMode(std::string_view mode) {
  if (mode == "greedy") return planner::DecodeMode::kGreedy;
  if (mode == "sample") return planner::DecodeMode::kSample;
  throw Error(ErrorCode::kInvalidArgument, "mode must be greedy or sample");
}

// Citing abstract from "x", "paper_id" or the plan's source paper.
std::string Abstract(const pipeline::Engine& engine, const Json& body,
                     const planner::ContentPlan* plan) {
  if (body.contains("x")) {
    if (!body.at("x").is_string() || body.at("x").get<std::string>().empty()) {
      throw Error(ErrorCode::kInvalidArgument, "x must be a non-empty string");
    }
    return body.at("x").get<std::string>();
  }
  if (body.contains("paper_id")) {
    return engine.corpus().Get(body.at("paper_id").get<std::string>()).abstract_text;
  }
  if (plan && !plan->source_paper_id.empty()) {
    if (const auto* r = engine.corpus().Find(plan->source_paper_id)) {
      return r->abstract_text;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "request needs x or paper_id");
}

pipeline::Query QueryOf(const pipeline::Engine& engine, const Json& body) {
  if (body.contains("paper_id")) {
    return pipeline::QueryFor(
        engine.corpus().Get(body.at("paper_id").get<std::string>()));
  }
  pipeline::Query q;
  q.abstract_text = Abstract(engine, body, nullptr);
  q.title = body.value("title", "");
  q.year = body.value("year", INT_MAX);
  return q;
}

// A plan naming papers outside the corpus is invalid rather than missing.
planner::ContentPlan ValidPlan(const pipeline::Engine& engine, const Json& body) {
  if (!body.contains("plan")) {
    throw Error(ErrorCode::kInvalidPlan, "request has no plan");
  }
  planner::ContentPlan plan = planner::PlanFromJson(body.at("plan"));
  planner::ValidatePlan(plan, engine.taxonomy());
  for (const std::string& id : plan.AllPapers()) {
    if (!engine.corpus().Find(id)) {
      throw Error(ErrorCode::kInvalidPlan, "plan cites unknown paper " + id);
    }
  }
  return plan;
}

Json DocumentBody(const realize::RealizedDocument& doc,
                  const planner::ContentPlan& plan) {
  Json out = doc.ToJson();
  out["plan"] = planner::PlanToJson(plan);
  return out;
}

}  // namespace

std::pair<std::string, int> ParseAddress(std::string_view address) {
  size_t colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "address must be host:port: " + std::string(address));
  }
  std::string port_text(address.substr(colon + 1));
  int port = -1;
  try {
    size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) port = -1;
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "bad port: " + port_text);
  }
  return {std::string(address.substr(0, colon)), port};
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownPaper:
    case ErrorCode::kUnknownCandidate:
      return 404;
    case ErrorCode::kFormat:
    case ErrorCode::kMissingField:
      return 400;
    case ErrorCode::kTimeout:
    case ErrorCode::kProtocolError:
      return 502;
    case ErrorCode::kIo:
      return 500;
    default:
      return 422;
  }
}

Service::Service(std::shared_ptr<const pipeline::Engine> engine,
                 ServiceOptions options)
    : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  Swap(std::move(engine));
  if (!options_.static_dir.empty() &&
      !server_->set_mount_point("/", options_.static_dir)) {
    throw Error(ErrorCode::kIo, "cannot mount " + options_.static_dir);
  }
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = Handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server_->Get(".*", handler);
  server_->Post(".*", handler);
}

Service::~Service() { Stop(); }

void Service::Swap(std::shared_ptr<const pipeline::Engine> engine) {
  if (!engine) throw Error(ErrorCode::kInvalidArgument, "null snapshot");
  std::shared_ptr<const realize::Realizer> realizer = realize::MakeRealizer(
      options_.realizer, engine->taxonomy(), options_.timeout);
  std::lock_guard<std::mutex> lock(mu_);
  current_ = Snapshot{std::move(engine), std::move(realizer)};
}

std::shared_ptr<const pipeline::Engine> Service::snapshot() const {
  return Current().engine;
}

Service::Snapshot Service::Current() const {
  std::lock_guard<std::mutex> lock(mu_);
  return current_;
}

HttpResponse Service::Handle(std::string_view method, std::string_view path,
                             std::string_view body) const {
  Snapshot s = Current();
  try {
    if (method == "GET") {
      if (path == "/health") return Health(s);
      if (text::StartsWith(path, "/papers/") && path.size() > 8) {
        return Paper(s, path.substr(8));
      }
      if (path == "/plan" || path == "/realize" || path == "/update") {
        return Fail(405, "MethodNotAllowed", "use POST");
      }
      return Fail(404, "NotFound", std::string(path));
    }
    if (method != "POST") return Fail(405, "MethodNotAllowed", std::string(method));
    if (path != "/plan" && path != "/realize" && path != "/update") {
      return Fail(404, "NotFound", std::string(path));
    }
    Json request = Json::parse(body.begin(), body.end(), nullptr, false);
    if (request.is_discarded() || !request.is_object()) {
      return Fail(400, "BadRequest", "body must be a JSON object");
    }
    if (!request.contains("version") || request.at("version") != kApiVersion) {
      return Fail(400, "BadRequest", "unsupported or missing version");
    }
    if (path == "/plan") return Plan(s, request);
    if (path == "/realize") return Realize(s, request);
    return Update(s, request);
  } catch (const Error& e) {
    return Fail(StatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  } catch (const Json::exception& e) {
    return Fail(400, "BadRequest", e.what());
  } catch (const std::exception& e) {
    return Fail(500, "Internal", e.what());
  }
}

HttpResponse Service::Health(const Snapshot& s) const {
  return HttpResponse{200, Json{{"version", kApiVersion},
                                {"status", "ok"},
                                {"papers", s.engine->corpus().size()},
                                {"realizer", s.realizer->id()},
                                {"reason_model", s.engine->classifier().id()}}};
}

HttpResponse Service::Paper(const Snapshot& s, std::string_view id) const {
  const corpus::PaperRecord& r = s.engine->corpus().Get(id);
  return HttpResponse{200, Json{{"version", kApiVersion},
                                {"paper", corpus::SerializeRecord(r)},
                                {"key", corpus::CitationKeyFor(r).surface()}}};
}

HttpResponse Service::Plan(const Snapshot& s, const Json& body) const {
  const pipeline::Engine& engine = *s.engine;
  pipeline::PlanOptions options;
  options.setting = pipeline::ParseSetting(body.value("setting", "standard"));
  if (options.setting == pipeline::Setting::kUpdate) {
    throw Error(ErrorCode::kInvalidArgument, "plan setting must be standard or full");
  }
  options.n = body.value("n", size_t{10});
  options.decode.mode = ParseMode(body.value("mode", "greedy"));
  options.decode.seed = body.value("seed", uint64_t{13});
  options.no_reason = body.value("no_reason", false);
  pipeline::Query query = QueryOf(engine, body);
  std::optional<std::vector<std::string>> candidates;
  if (body.contains("candidates")) {
    candidates = body.at("candidates").get<std::vector<std::string>>();
  }
  pipeline::PlanOutcome out = engine.Plan(query, candidates, options);
  return HttpResponse{
      200, Json{{"version", kApiVersion},
                {"paper_id", out.paper_id},
                {"setting", pipeline::SettingName(options.setting)},
                {"candidates", out.candidates},
                {"plan", planner::PlanToJson(out.result.plan)},
                {"unplaced", out.result.unplaced}}};
}

HttpResponse Service::Realize(const Snapshot& s, const Json& body) const {
  std::string mode = body.value("mode", "full");
  if (mode == "update") return Update(s, body);
  if (mode != "full") {
    throw Error(ErrorCode::kInvalidArgument, "mode must be full or update");
  }
  const pipeline::Engine& engine = *s.engine;
  planner::ContentPlan plan = ValidPlan(engine, body);
  std::string x = Abstract(engine, body, &plan);
  realize::RealizedDocument doc = engine.Realize(
      x, plan, *s.realizer, body.value("max_words", size_t{40}));
  return HttpResponse{200, DocumentBody(doc, plan)};
}

HttpResponse Service::Update(const Snapshot& s, const Json& body) const {
  const pipeline::Engine& engine = *s.engine;
  size_t max_words = body.value("max_words", size_t{40});
  segment::SegmentedRelatedWork existing;
  std::optional<planner::ContentPlan> derived;
  if (body.contains("existing")) {
    existing = segment::SegmentedFromJson(body.at("existing"));
  } else if (body.contains("existing_text")) {
    std::string id = body.value("paper_id", "");
    std::optional<segment::SegmentStarts> starts;
    if (body.contains("existing_starts")) {
      starts = body.at("existing_starts").get<segment::SegmentStarts>();
    }
    segment::GoldDerivation g = engine.Segment(
        id, body.at("existing_text").get<std::string>(), starts);
    existing = std::move(g.segmented);
    derived = std::move(g.plan);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "update needs existing or existing_text");
  }

  if (body.contains("insert")) {
    std::string paper = body.at("insert").get<std::string>();
    if (body.contains("plan")) {
      derived = ValidPlan(engine, body);
    } else if (!derived) {
      throw Error(ErrorCode::kInvalidPlan, "update needs a plan");
    }
    const planner::ContentPlan& before = *derived;
    pipeline::Query query = QueryOf(engine, body);
    if (query.id.empty()) query.id = before.source_paper_id;
    pipeline::UpdateOutcome out = engine.InsertAndUpdate(
        query, existing, before, paper, *s.realizer,
        body.value("no_reason", false), max_words);
    Json j = DocumentBody(out.document, out.insert.plan);
    j["affected"] = out.insert.affected;
    j["created_branch"] = out.insert.created_branch;
    return HttpResponse{200, std::move(j)};
  }

  planner::ContentPlan plan = ValidPlan(engine, body);
  if (!body.contains("branch") || !body.at("branch").is_number_unsigned()) {
    throw Error(ErrorCode::kInvalidArgument, "update needs branch or insert");
  }
  size_t branch = body.at("branch").get<size_t>();
  std::string x = Abstract(engine, body, &plan);
  realize::RealizedDocument doc =
      realize::UpdateDocument(existing, plan, branch, x, engine.corpus(),
                              *s.realizer, engine.fallback(), {max_words});
  Json j = DocumentBody(doc, plan);
  j["affected"] = branch;
  j["created_branch"] = false;
  return HttpResponse{200, std::move(j)};
}

int Service::Bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool Service::Run() { return server_->listen_after_bind(); }

void Service::Stop() {
  if (server_) server_->stop();
}

}  // namespace relworks::service
