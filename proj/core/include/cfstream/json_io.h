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

// JSON representations.
//
// Schema:  {"features": [{"name", "kind": "continuous"|"categorical",
//                         "min", "max"}],
//           "label": {"name", "count"}}
// Item:    {"id"?, "label", "features": {name: number | symbol}}
// Spec:    {"k", "alpha": [...], "beta": [...]}

#ifndef CFSTREAM_JSON_IO_H_
#define CFSTREAM_JSON_IO_H_

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "cfstream/domain.h"
#include "cfstream/error.h"
#include "cfstream/session.h"
#include "cfstream/similarity.h"

namespace cfstream {

nlohmann::json SchemaToJson(const Schema& schema);
// Throws kMalformedSpec (via Schema) or kParseError on a bad document.
Schema SchemaFromJson(const nlohmann::json& doc);
Schema LoadSchemaFile(const std::string& path);
void SaveSchemaFile(const Schema& schema, const std::string& path);

nlohmann::json ItemToJson(const Item& item, const Schema& schema,
                          const CategoryDictionary& dictionary);
// Throws kSchemaMismatch for missing/unknown features or wrong value types
// and kUnknownLabel for labels outside [1, L]. The document's "id", when
// present, overrides `id`.
Item ItemFromJson(const nlohmann::json& doc, const Schema& schema,
                  CategoryDictionary& dictionary, ItemId id);

nlohmann::json SpecToJson(const ConstraintSpec& spec);
ConstraintSpec SpecFromJson(const nlohmann::json& doc);

nlohmann::json BreakdownToJson(const UtilityBreakdown& breakdown);

// Members carry features, label, weight, sim to query, coverage and the
// transport components against the query.
nlohmann::json ExplanationToJson(const Explanation& explanation,
                                 const Item& query,
                                 const SimilarityMeasure& sim,
                                 const CategoryDictionary& dictionary);

// Per-item timings and the violation trace are included only when
// `with_series` is set.
nlohmann::json StatsToJson(const RunStats& stats, bool with_series = false);

// {"code": "...", "message": "..."}
nlohmann::json ErrorToJson(const Error& error);

}  // namespace cfstream

#endif  // CFSTREAM_JSON_IO_H_
