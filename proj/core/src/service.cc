// Copyright 2026 The Authors.
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

#include "cfstream/service.h"

#include <algorithm>
#include <string>
#include <utility>

#include "cfstream/ingest.h"
#include "cfstream/json_io.h"
#include "httplib.h"

namespace cfstream {

using nlohmann::json;

namespace {

constexpr std::string_view kPrefix = "/v1/";

ServiceResponse ErrorResponse(const Error& error) {
  return {HttpStatusFor(error.code()), ErrorToJson(error)};
}

ServiceResponse ErrorResponse(int status, std::string_view code,
                              const std::string& message) {
  return {status, {{"code", std::string(code)}, {"message", message}}};
}

std::vector<std::string_view> SplitPath(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    const std::size_t slash = path.find('/');
    std::string_view head = path.substr(0, slash);
    if (!head.empty()) parts.push_back(head);
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return parts;
}

std::vector<int> IntArray(const json& v, const char* key) {
  if (!v.is_array()) {
    throw Error(ErrorCode::kMalformedSpec,
                std::string("'") + key + "' must be an array of integers");
  }
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) {
      throw Error(ErrorCode::kMalformedSpec,
                  std::string("'") + key + "' must be an array of integers");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

double NumberField(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("'") + key + "' must be a number");
  }
  return v.get<double>();
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasibleConstraints:
    case ErrorCode::kInfeasibleStream:
      return 422;
    case ErrorCode::kMalformedSpec:
    case ErrorCode::kSchemaMismatch:
    case ErrorCode::kParseError:
    case ErrorCode::kUnknownLabel:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kCurvatureOutOfRange:
      return 400;
    default:
      return 500;
  }
}

ServiceCore::ServiceCore(std::string schema_name,
                         std::shared_ptr<const Schema> schema,
                         std::optional<CategoryDictionary> dictionary)
    : schema_name_(std::move(schema_name)),
      schema_(schema),
      sim_(std::move(schema)),
      dictionary_(dictionary ? std::move(*dictionary)
                             : CategoryDictionary(schema_->categorical_count())),
      label_histogram_(static_cast<std::size_t>(schema_->label_count()), 0) {}

std::size_t ServiceCore::session_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

std::uint64_t ServiceCore::items_seen() const {
  std::lock_guard<std::mutex> lock(mu_);
  return next_item_;
}

ServiceResponse ServiceCore::Handle(std::string_view method,
                                    std::string_view path,
                                    std::string_view body) {
  std::lock_guard<std::mutex> lock(mu_);
  if (path.substr(0, kPrefix.size()) != kPrefix) {
    return ErrorResponse(404, "NotFound", "unknown path");
  }
  const std::vector<std::string_view> parts =
      SplitPath(path.substr(kPrefix.size()));
  json doc;
  if (method == "POST" || method == "PATCH") {
    doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) {
      return ErrorResponse(400, "ParseError", "request body is not JSON");
    }
  }
  try {
    if (parts.size() == 1 && parts[0] == "healthz" && method == "GET") {
      return {200, {{"status", "ok"},
                    {"sessions", sessions_.size()},
                    {"items", next_item_}}};
    }
    if (parts.size() == 1 && parts[0] == "items" && method == "POST") {
      return PushItems(doc);
    }
    if (parts.size() == 1 && parts[0] == "sessions" && method == "POST") {
      return CreateSession(doc);
    }
    if (parts.size() >= 2 && parts[0] == "sessions") {
      Entry* entry = Find(parts[1]);
      if (entry == nullptr) {
        return ErrorResponse(404, "NotFound",
                             "unknown session '" + std::string(parts[1]) +
                                 "'");
      }
      if (parts.size() == 2 && method == "PATCH") {
        return PatchSession(*entry, doc);
      }
      if (parts.size() == 3 && method == "GET") {
        if (parts[2] == "explanation") return GetExplanation(*entry);
        if (parts[2] == "stats") return GetStats(*entry);
      }
    }
    return ErrorResponse(404, "NotFound",
                         std::string(method) + " " + std::string(path));
  } catch (const Error& e) {
    return ErrorResponse(e);
  } catch (const json::exception& e) {
    return ErrorResponse(400, "ParseError", e.what());
  }
}

ServiceCore::Entry* ServiceCore::Find(std::string_view id) {
  for (Entry& e : sessions_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::string ServiceCore::Register(std::unique_ptr<QuerySession> session) {
  std::string id = "s" + std::to_string(next_session_++);
  sessions_.push_back({id, std::move(session)});
  return id;
}

ConstraintSpec ServiceCore::ParseConstraints(const json& doc,
                                             const ConstraintSpec* base) const {
  ConstraintSpec spec;
  if (base != nullptr) spec = *base;
  if (doc.contains("k")) {
    if (!doc["k"].is_number_integer()) {
      throw Error(ErrorCode::kMalformedSpec, "'k' must be an integer");
    }
    spec.k = doc["k"].get<int>();
  } else if (base == nullptr) {
    throw Error(ErrorCode::kMalformedSpec, "missing field 'k'");
  }
  const bool has_alpha = doc.contains("alpha");
  const bool has_beta = doc.contains("beta");
  if (doc.contains("autoBounds") && !doc["autoBounds"].is_null() &&
      doc["autoBounds"] != false) {
    if (has_alpha || has_beta) {
      throw Error(ErrorCode::kMalformedSpec,
                  "autoBounds excludes alpha and beta");
    }
    double lower = 0.9;
    double upper = 1.1;
    const json& ab = doc["autoBounds"];
    if (ab.is_object()) {
      if (ab.contains("lower")) lower = NumberField(ab, "lower");
      if (ab.contains("upper")) upper = NumberField(ab, "upper");
    } else if (ab.is_number()) {
      // A single slack s means multipliers 1 - s and 1 + s.
      lower = 1.0 - ab.get<double>();
      upper = 1.0 + ab.get<double>();
    } else if (ab != true) {
      throw Error(ErrorCode::kMalformedSpec,
                  "autoBounds must be true, a slack or {lower, upper}");
    }
    std::vector<double> histogram(label_histogram_.begin(),
                                  label_histogram_.end());
    std::uint64_t seen = 0;
    for (std::uint64_t c : label_histogram_) seen += c;
    if (seen == 0) std::fill(histogram.begin(), histogram.end(), 1.0);
    return InferBounds(histogram, spec.k, lower, upper);
  }
  if (has_alpha != has_beta && base == nullptr) {
    throw Error(ErrorCode::kMalformedSpec,
                "alpha and beta must be given together");
  }
  if (has_alpha) spec.lower = IntArray(doc["alpha"], "alpha");
  if (has_beta) spec.upper = IntArray(doc["beta"], "beta");
  if (base == nullptr && !has_alpha) {
    // No bounds at all: labels are unconstrained up to k.
    spec.lower.assign(static_cast<std::size_t>(schema_->label_count()), 0);
    spec.upper.assign(static_cast<std::size_t>(schema_->label_count()),
                      spec.k);
  }
  ValidateConstraints(spec, *schema_);
  return spec;
}

UtilityConfig ServiceCore::ParseUtility(const json& doc,
                                        UtilityConfig base) const {
  if (doc.contains("utilityMode")) {
    if (!doc["utilityMode"].is_string()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "'utilityMode' must be a string");
    }
    base.mode = ParseUtilityMode(doc["utilityMode"].get<std::string>());
  }
  if (doc.contains("lambdas")) {
    const json& l = doc["lambdas"];
    if (l.is_array()) {
      if (l.size() != 3) {
        throw Error(ErrorCode::kInvalidArgument,
                    "'lambdas' must have three entries");
      }
      for (const json& v : l) {
        if (!v.is_number()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "'lambdas' entries must be numbers");
        }
      }
      base.lambda1 = l[0].get<double>();
      base.lambda2 = l[1].get<double>();
      base.lambda3 = l[2].get<double>();
    } else if (l.is_object()) {
      if (l.contains("lambda1")) base.lambda1 = NumberField(l, "lambda1");
      if (l.contains("lambda2")) base.lambda2 = NumberField(l, "lambda2");
      if (l.contains("lambda3")) base.lambda3 = NumberField(l, "lambda3");
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "'lambdas' must be an array or an object");
    }
  }
  ValidateUtilityConfig(base);
  return base;
}

void ServiceCore::ResolveSwapThreshold(const json& doc, const Item& query,
                                       UtilityConfig& config,
                                       std::optional<double>& curvature) const {
  if (doc.contains("swapLambda") && doc["swapLambda"].is_number()) {
    config.swap_threshold = doc["swapLambda"].get<double>();
    ValidateUtilityConfig(config);
    return;
  }
  if (doc.contains("swapLambda") && doc["swapLambda"] != "auto") {
    throw Error(ErrorCode::kInvalidArgument,
                "'swapLambda' must be a number or \"auto\"");
  }
  if (recent_.size() < 2) {
    config.swap_threshold = 1.0;
    return;
  }
  const std::vector<Item> sample(recent_.begin(), recent_.end());
  const SwapThresholdChoice choice = AutoSwapThreshold(
      sample, query, sim_, schema_->label_count(), config);
  config.swap_threshold = choice.lambda;
  curvature = choice.curvature;
}

ServiceResponse ServiceCore::CreateSession(const json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "body must be a JSON object");
  }
  if (doc.contains("schemaRef") && doc["schemaRef"] != schema_name_) {
    throw Error(ErrorCode::kSchemaMismatch,
                "unknown schemaRef; this service serves '" + schema_name_ +
                    "'");
  }
  if (!doc.contains("query")) {
    throw Error(ErrorCode::kInvalidArgument, "missing field 'query'");
  }
  Item query = ItemFromJson(doc["query"], *schema_, dictionary_, kQueryItemId);
  query.id = kQueryItemId;
  const ConstraintSpec spec = ParseConstraints(doc, nullptr);
  UtilityConfig config = ParseUtility(doc, UtilityConfig());
  std::optional<double> curvature;
  ResolveSwapThreshold(doc, query, config, curvature);
  auto session = std::make_unique<QuerySession>(sim_, std::move(query), spec,
                                                config);
  if (curvature) session->set_curvature(*curvature);
  const std::string id = Register(std::move(session));
  return {201,
          {{"sessionId", id},
           {"spec", SpecToJson(spec)},
           {"swapLambda", *config.swap_threshold}}};
}

ServiceResponse ServiceCore::PushItems(const json& doc) {
  std::vector<const json*> docs;
  if (doc.is_array()) {
    for (const json& d : doc) docs.push_back(&d);
  } else {
    docs.push_back(&doc);
  }
  json outcomes = json::array();
  std::uint64_t accepted = 0;
  bool all_ok = true;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    json outcome = {{"index", i}};
    try {
      json item_doc = *docs[i];
      if (item_doc.is_object()) item_doc.erase("id");
      Item item = ItemFromJson(item_doc, *schema_, dictionary_, next_item_);
      ++next_item_;
      ++label_histogram_[LabelIndex(item.label)];
      for (Entry& e : sessions_) e.session->ProcessItem(item);
      recent_.push_back(std::move(item));
      if (recent_.size() > kWarmupItems) recent_.pop_front();
      ++accepted;
      outcome["ok"] = true;
      outcome["id"] = next_item_ - 1;
    } catch (const Error& e) {
      all_ok = false;
      outcome["ok"] = false;
      outcome["error"] = ErrorToJson(e);
    }
    outcomes.push_back(std::move(outcome));
  }
  return {all_ok ? 200 : 400,
          {{"accepted", accepted}, {"outcomes", std::move(outcomes)}}};
}

ServiceResponse ServiceCore::GetExplanation(Entry& entry) {
  const QuerySession& s = *entry.session;
  json out = ExplanationToJson(s.Snapshot(), s.query(), sim_, dictionary_);
  out["sessionId"] = entry.id;
  out["query"] = ItemToJson(s.query(), *schema_, dictionary_);
  out["spec"] = SpecToJson(s.spec());
  out["utilityMode"] = std::string(UtilityModeName(s.config().mode));
  out["lambdas"] = {s.config().lambda1, s.config().lambda2,
                    s.config().lambda3};
  out["swapLambda"] = s.swap_threshold();
  return {200, std::move(out)};
}

ServiceResponse ServiceCore::GetStats(Entry& entry) {
  json out = StatsToJson(entry.session->stats());
  out["sessionId"] = entry.id;
  out["size"] = entry.session->size();
  return {200, std::move(out)};
}

ServiceResponse ServiceCore::PatchSession(Entry& entry, const json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "body must be a JSON object");
  }
  const bool rescore = doc.contains("lambdas") || doc.contains("utilityMode");
  const bool fork = doc.contains("k") || doc.contains("alpha") ||
                    doc.contains("beta") || doc.contains("autoBounds");
  if (!rescore && !fork) {
    throw Error(ErrorCode::kInvalidArgument,
                "PATCH needs lambdas, utilityMode, k, alpha/beta or "
                "autoBounds");
  }
  const UtilityConfig config = ParseUtility(doc, entry.session->config());
  if (!fork) {
    entry.session->Reconfigure(config);
    return {200, {{"sessionId", entry.id}, {"forked", false}}};
  }
  const ConstraintSpec spec =
      ParseConstraints(doc, &entry.session->spec());
  auto next = std::make_unique<QuerySession>(entry.session->Fork(spec));
  if (rescore) next->Reconfigure(config);
  const std::string parent = entry.id;
  const std::string id = Register(std::move(next));
  return {201,
          {{"sessionId", id},
           {"parent", parent},
           {"forked", true},
           {"spec", SpecToJson(spec)}}};
}

struct HttpService::Impl {
  ServiceCore* core;
  httplib::Server server;
};

HttpService::HttpService(ServiceCore* core) : impl_(new Impl{core, {}}) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ServiceResponse r = impl_->core->Handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->server.Get(R"(/v1/.*)", handler);
  impl_->server.Post(R"(/v1/.*)", handler);
  impl_->server.Patch(R"(/v1/.*)", handler);
}

HttpService::~HttpService() { Stop(); }

int HttpService::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpService::Serve() { return impl_->server.listen_after_bind(); }

void HttpService::Stop() {
  if (impl_) impl_->server.stop();
}

bool HttpService::running() const { return impl_->server.is_running(); }

}  // namespace cfstream
