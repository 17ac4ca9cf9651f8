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

#include "cfstream/json_io.h"

#include <cstdint>
#include <fstream>
#include <utility>

#include "cfstream/error.h"

namespace cfstream {

using nlohmann::json;

namespace {

const json& Field(const json& doc, const char* key, ErrorCode code) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(code, std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

int AsInt(const json& v, const char* what, ErrorCode code) {
  if (!v.is_number_integer()) {
    throw Error(code, std::string(what) + " must be an integer");
  }
  return v.get<int>();
}

std::vector<int> AsIntArray(const json& v, const char* what) {
  if (!v.is_array()) {
    throw Error(ErrorCode::kMalformedSpec,
                std::string(what) + " must be an array of integers");
  }
  std::vector<int> out;
  for (const json& e : v) out.push_back(AsInt(e, what, ErrorCode::kMalformedSpec));
  return out;
}

}  // namespace

json SchemaToJson(const Schema& schema) {
  json features = json::array();
  for (const FeatureSpec& f : schema.features()) {
    json entry = {{"name", f.name}};
    if (f.kind == FeatureKind::kContinuous) {
      entry["kind"] = "continuous";
      entry["min"] = f.min;
      entry["max"] = f.max;
    } else {
      entry["kind"] = "categorical";
    }
    features.push_back(std::move(entry));
  }
  return {{"features", std::move(features)},
          {"label",
           {{"name", schema.label_name()}, {"count", schema.label_count()}}}};
}

Schema SchemaFromJson(const json& doc) {
  const json& features = Field(doc, "features", ErrorCode::kParseError);
  if (!features.is_array()) {
    throw Error(ErrorCode::kParseError, "'features' must be an array");
  }
  std::vector<FeatureSpec> specs;
  for (const json& f : features) {
    FeatureSpec spec;
    const json& name = Field(f, "name", ErrorCode::kParseError);
    const json& kind = Field(f, "kind", ErrorCode::kParseError);
    if (!name.is_string() || !kind.is_string()) {
      throw Error(ErrorCode::kParseError,
                  "feature name and kind must be strings");
    }
    spec.name = name.get<std::string>();
    const std::string k = kind.get<std::string>();
    if (k == "continuous") {
      spec.kind = FeatureKind::kContinuous;
      const json& lo = Field(f, "min", ErrorCode::kParseError);
      const json& hi = Field(f, "max", ErrorCode::kParseError);
      if (!lo.is_number() || !hi.is_number()) {
        throw Error(ErrorCode::kParseError,
                    "feature '" + spec.name + "' needs numeric min/max");
      }
      spec.min = lo.get<double>();
      spec.max = hi.get<double>();
    } else if (k == "categorical") {
      spec.kind = FeatureKind::kCategorical;
    } else {
      throw Error(ErrorCode::kParseError, "unknown feature kind '" + k + "'");
    }
    specs.push_back(std::move(spec));
  }
  const json& label = Field(doc, "label", ErrorCode::kParseError);
  const json& label_name = Field(label, "name", ErrorCode::kParseError);
  if (!label_name.is_string()) {
    throw Error(ErrorCode::kParseError, "label name must be a string");
  }
  int count = AsInt(Field(label, "count", ErrorCode::kParseError),
                    "label count", ErrorCode::kParseError);
  return Schema(std::move(specs), label_name.get<std::string>(), count);
}

Schema LoadSchemaFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kParseError, "'" + path + "' is not valid JSON");
  }
  return SchemaFromJson(doc);
}

void SaveSchemaFile(const Schema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  out << SchemaToJson(schema).dump(2) << '\n';
}

json ItemToJson(const Item& item, const Schema& schema,
                const CategoryDictionary& dictionary) {
  json features = json::object();
  for (std::size_t f = 0; f < schema.features().size(); ++f) {
    const FeatureSpec& spec = schema.features()[f];
    const std::size_t slot = schema.slot(f);
    if (spec.kind == FeatureKind::kContinuous) {
      features[spec.name] = item.continuous.at(slot);
    } else {
      features[spec.name] = dictionary.Name(slot, item.categorical.at(slot));
    }
  }
  json out = {{"label", item.label}, {"features", std::move(features)}};
  if (item.id != kQueryItemId) out["id"] = item.id;
  return out;
}

Item ItemFromJson(const json& doc, const Schema& schema,
                  CategoryDictionary& dictionary, ItemId id) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kSchemaMismatch, "an item must be a JSON object");
  }
  Item item;
  item.id = id;
  if (doc.contains("id")) {
    const json& id_doc = doc["id"];
    if (!id_doc.is_number_unsigned() &&
        !(id_doc.is_number_integer() && id_doc.get<std::int64_t>() >= 0)) {
      throw Error(ErrorCode::kSchemaMismatch, "item id must be unsigned");
    }
    item.id = id_doc.get<ItemId>();
  }
  item.label = AsInt(Field(doc, "label", ErrorCode::kSchemaMismatch), "label",
                     ErrorCode::kSchemaMismatch);
  const json& features = Field(doc, "features", ErrorCode::kSchemaMismatch);
  if (!features.is_object()) {
    throw Error(ErrorCode::kSchemaMismatch, "'features' must be an object");
  }
  item.continuous.assign(schema.continuous_count(), 0.0);
  item.categorical.assign(schema.categorical_count(), 0);
  for (auto it = features.begin(); it != features.end(); ++it) {
    if (!schema.FindFeature(it.key())) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "unknown feature '" + it.key() + "'");
    }
  }
  for (std::size_t f = 0; f < schema.features().size(); ++f) {
    const FeatureSpec& spec = schema.features()[f];
    const std::size_t slot = schema.slot(f);
    if (!features.contains(spec.name)) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "missing feature '" + spec.name + "'");
    }
    const json& v = features[spec.name];
    if (spec.kind == FeatureKind::kContinuous) {
      if (!v.is_number()) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "feature '" + spec.name + "' must be a number");
      }
      item.continuous[slot] = v.get<double>();
    } else {
      if (!v.is_string()) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "feature '" + spec.name + "' must be a string");
      }
      item.categorical[slot] = dictionary.Intern(slot, v.get<std::string>());
    }
  }
  ValidateItem(item, schema);
  return item;
}

json SpecToJson(const ConstraintSpec& spec) {
  return {{"k", spec.k}, {"alpha", spec.lower}, {"beta", spec.upper}};
}

ConstraintSpec SpecFromJson(const json& doc) {
  ConstraintSpec spec;
  spec.k = AsInt(Field(doc, "k", ErrorCode::kMalformedSpec), "k",
                 ErrorCode::kMalformedSpec);
  spec.lower = AsIntArray(Field(doc, "alpha", ErrorCode::kMalformedSpec),
                          "alpha");
  spec.upper = AsIntArray(Field(doc, "beta", ErrorCode::kMalformedSpec),
                          "beta");
  return spec;
}

json BreakdownToJson(const UtilityBreakdown& b) {
  return {{"f1", b.f1}, {"f2", b.f2}, {"f3", b.f3}, {"total", b.total}};
}

json ExplanationToJson(const Explanation& explanation, const Item& query,
                       const SimilarityMeasure& sim,
                       const CategoryDictionary& dictionary) {
  json members = json::array();
  for (const ExplanationMember& m : explanation.members) {
    json entry = ItemToJson(m.item, sim.schema(), dictionary);
    TransportComponents t = sim.Transport(m.item, query);
    entry["weight"] = m.weight;
    entry["simToQuery"] = m.sim_to_query;
    entry["coverage"] = m.coverage;
    entry["transport"] = {{"continuous", t.continuous},
                          {"categorical", t.categorical}};
    members.push_back(std::move(entry));
  }
  return {{"members", std::move(members)},
          {"utility", explanation.utility},
          {"breakdown", BreakdownToJson(explanation.breakdown)},
          {"labelCounts", explanation.label_counts},
          {"feasible", explanation.feasible}};
}

json StatsToJson(const RunStats& stats, bool with_series) {
  json out = {{"items", stats.items},
              {"accepted", stats.accepted},
              {"swaps", stats.swaps},
              {"rejects", stats.rejects},
              {"utilityCalls", stats.utility_calls},
              {"totalNanos", stats.total_nanos},
              {"streamUpperViolations", stats.stream_upper},
              {"finalViolations", stats.final_violations},
              {"swapThreshold", stats.swap_threshold}};
  out["curvature"] =
      stats.curvature ? json(*stats.curvature) : json(nullptr);
  if (with_series) {
    out["perItemNanos"] = stats.per_item_nanos;
    out["violationTrace"] = stats.violation_trace;
  }
  return out;
}

json ErrorToJson(const Error& error) {
  return {{"code", std::string(ErrorCodeName(error.code()))},
          {"message", error.what()}};
}

}  // namespace cfstream
