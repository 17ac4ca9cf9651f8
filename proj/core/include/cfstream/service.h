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

// In-memory live explanation service.
//
//   POST  /v1/sessions                   create a query session
//   POST  /v1/items                      push one item or an array of items
//   GET   /v1/sessions/{id}/explanation  snapshot of the current set
//   PATCH /v1/sessions/{id}              re-score or fork
//   GET   /v1/sessions/{id}/stats        run statistics
//   GET   /v1/healthz                    liveness
//
// Sessions start at the current stream position; nothing is replayed and
// nothing survives a restart. Changing k or bounds creates a successor
// session (fork) that keeps the current members it can, the original
// session stays untouched. Changing lambda1..3 or the utility mode re-scores
// the current members; stored weights are not recomputed.

#ifndef CFSTREAM_SERVICE_H_
#define CFSTREAM_SERVICE_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfstream/domain.h"
#include "cfstream/error.h"
#include "cfstream/session.h"
#include "cfstream/similarity.h"

namespace cfstream {

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

// HTTP status for an error code: 400 for malformed input, 422 for
// infeasible constraints or streams, 500 otherwise.
int HttpStatusFor(ErrorCode code);

class ServiceCore {
 public:
  // Every session and pushed item uses `schema`, registered as
  // `schema_name` (the value clients pass as schemaRef). Without a
  // dictionary categorical symbols are interned as they arrive.
  ServiceCore(std::string schema_name, std::shared_ptr<const Schema> schema,
              std::optional<CategoryDictionary> dictionary = std::nullopt);

  // Thread-safe.
  ServiceResponse Handle(std::string_view method, std::string_view path,
                         std::string_view body);

  std::size_t session_count() const;
  std::uint64_t items_seen() const;

 private:
  struct Entry {
    std::string id;
    std::unique_ptr<QuerySession> session;
  };

  ServiceResponse CreateSession(const nlohmann::json& doc);
  ServiceResponse PushItems(const nlohmann::json& doc);
  ServiceResponse GetExplanation(Entry& entry);
  ServiceResponse GetStats(Entry& entry);
  ServiceResponse PatchSession(Entry& entry, const nlohmann::json& doc);

  Entry* Find(std::string_view id);
  std::string Register(std::unique_ptr<QuerySession> session);
  ConstraintSpec ParseConstraints(const nlohmann::json& doc,
                                  const ConstraintSpec* base) const;
  UtilityConfig ParseUtility(const nlohmann::json& doc,
                             UtilityConfig base) const;
  void ResolveSwapThreshold(const nlohmann::json& doc, const Item& query,
                            UtilityConfig& config,
                            std::optional<double>& curvature) const;

  mutable std::mutex mu_;
  std::string schema_name_;
  std::shared_ptr<const Schema> schema_;
  SimilarityMeasure sim_;
  CategoryDictionary dictionary_;
  std::vector<Entry> sessions_;  // registration order
  std::uint64_t next_session_ = 1;
  std::uint64_t next_item_ = 0;
  std::vector<std::uint64_t> label_histogram_;
  std::deque<Item> recent_;  // warm-up sample for automatic lambda
};

// Serves a ServiceCore over HTTP. The core must outlive the server.
class HttpService {
 public:
  explicit HttpService(ServiceCore* core);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds; port 0 picks a free port. Returns the bound port or -1.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  bool Serve();
  void Stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cfstream

#endif  // CFSTREAM_SERVICE_H_
