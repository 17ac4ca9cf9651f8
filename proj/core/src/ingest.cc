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

#include "cfstream/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <system_error>
#include <unordered_map>
#include <utility>

#include "cfstream/error.h"

namespace cfstream {
namespace {

bool IsBlankRecord(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

std::optional<double> TryParseNumber(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<long> TryParseInt(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

double ParseNumber(std::string_view text) {
  std::optional<double> v = TryParseNumber(text);
  if (!v) {
    throw Error(ErrorCode::kParseError,
                "not a finite number: '" + std::string(text) + "'");
  }
  return *v;
}

std::string FormatNumber(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw Error(ErrorCode::kInternalInconsistency, "number formatting failed");
  }
  return std::string(buf, ptr);
}

CsvItemSource::CsvItemSource(const std::string& path,
                             std::shared_ptr<const Schema> schema,
                             CategoryDictionary* dictionary)
    : file_(std::make_unique<std::ifstream>(path, std::ios::binary)),
      in_(file_.get()),
      reader_(*file_),
      schema_(std::move(schema)),
      dictionary_(dictionary) {
  if (!*file_) {
    throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  }
  ReadHeader();
}

CsvItemSource::CsvItemSource(std::istream& in,
                             std::shared_ptr<const Schema> schema,
                             CategoryDictionary* dictionary)
    : in_(&in), reader_(in), schema_(std::move(schema)),
      dictionary_(dictionary) {
  ReadHeader();
}

void CsvItemSource::ReadHeader() {
  if (!reader_.ReadRow(header_)) {
    throw Error(ErrorCode::kSchemaMismatch, "CSV input has no header");
  }
  const std::size_t features = schema_->features().size();
  std::vector<bool> seen(features, false);
  bool label_seen = false;
  for (const std::string& name : header_) {
    if (name == schema_->label_name()) {
      if (label_seen) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "label column '" + name + "' appears twice");
      }
      label_seen = true;
      column_feature_.push_back(-1);
      continue;
    }
    std::optional<std::size_t> f = schema_->FindFeature(name);
    if (!f) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "CSV column '" + name + "' is not in the schema");
    }
    if (seen[*f]) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "CSV column '" + name + "' appears twice");
    }
    seen[*f] = true;
    column_feature_.push_back(static_cast<int>(*f));
  }
  if (!label_seen) {
    throw Error(ErrorCode::kSchemaMismatch,
                "CSV header lacks the label column '" +
                    schema_->label_name() + "'");
  }
  for (std::size_t f = 0; f < features; ++f) {
    if (!seen[f]) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "CSV header lacks feature '" + schema_->features()[f].name +
                      "'");
    }
  }
}

std::optional<Item> CsvItemSource::Next() {
  do {
    if (!reader_.ReadRow(fields_)) return std::nullopt;
  } while (IsBlankRecord(fields_));
  const std::uint64_t row = next_id_ + 1;
  auto fail = [&](std::size_t column, const std::string& what) {
    throw Error(ErrorCode::kParseError,
                "row " + std::to_string(row) + ", column " +
                    std::to_string(column + 1) + " ('" + header_[column] +
                    "'): " + what);
  };
  if (fields_.size() != header_.size()) {
    throw Error(ErrorCode::kParseError,
                "row " + std::to_string(row) + ": expected " +
                    std::to_string(header_.size()) + " fields, found " +
                    std::to_string(fields_.size()));
  }
  Item item;
  item.id = next_id_;
  item.continuous.assign(schema_->continuous_count(), 0.0);
  item.categorical.assign(schema_->categorical_count(), 0);
  for (std::size_t c = 0; c < fields_.size(); ++c) {
    const int f = column_feature_[c];
    if (f < 0) {
      std::optional<long> label = TryParseInt(fields_[c]);
      if (!label) fail(c, "label is not an integer");
      if (*label < 1 || *label > schema_->label_count()) {
        fail(c, "label " + std::to_string(*label) + " outside [1, " +
                    std::to_string(schema_->label_count()) + "]");
      }
      item.label = static_cast<Label>(*label);
      continue;
    }
    const std::size_t fi = static_cast<std::size_t>(f);
    const std::size_t slot = schema_->slot(fi);
    if (schema_->features()[fi].kind == FeatureKind::kContinuous) {
      std::optional<double> v = TryParseNumber(fields_[c]);
      if (!v) fail(c, "'" + fields_[c] + "' is not a finite number");
      item.continuous[slot] = *v;
    } else {
      item.categorical[slot] = dictionary_->Intern(slot, fields_[c]);
    }
  }
  ++next_id_;
  return item;
}

std::vector<Item> LoadCsvItems(const std::string& path,
                               std::shared_ptr<const Schema> schema,
                               CategoryDictionary* dictionary) {
  CsvItemSource source(path, std::move(schema), dictionary);
  std::vector<Item> out;
  while (std::optional<Item> item = source.Next()) {
    out.push_back(std::move(*item));
  }
  return out;
}

void WriteItemsCsv(std::ostream& out, const Schema& schema,
                   std::span<const Item> items,
                   const CategoryDictionary& dictionary) {
  std::vector<std::string> row;
  for (const FeatureSpec& f : schema.features()) row.push_back(f.name);
  row.push_back(schema.label_name());
  WriteCsvRow(out, row);
  for (const Item& item : items) {
    ValidateItem(item, schema);
    row.clear();
    for (std::size_t f = 0; f < schema.features().size(); ++f) {
      const std::size_t slot = schema.slot(f);
      if (schema.features()[f].kind == FeatureKind::kContinuous) {
        row.push_back(FormatNumber(item.continuous[slot]));
      } else {
        row.push_back(dictionary.Name(slot, item.categorical[slot]));
      }
    }
    row.push_back(std::to_string(item.label));
    WriteCsvRow(out, row);
  }
}

DatasetProfile ProfileItems(ItemSource& source, const Schema& schema) {
  DatasetProfile p;
  p.label_counts.assign(static_cast<std::size_t>(schema.label_count()), 0);
  p.continuous_min.assign(schema.continuous_count(),
                          std::numeric_limits<double>::infinity());
  p.continuous_max.assign(schema.continuous_count(),
                          -std::numeric_limits<double>::infinity());
  while (std::optional<Item> item = source.Next()) {
    ValidateItem(*item, schema);
    ++p.rows;
    ++p.label_counts[LabelIndex(item->label)];
    for (std::size_t i = 0; i < item->continuous.size(); ++i) {
      p.continuous_min[i] = std::min(p.continuous_min[i], item->continuous[i]);
      p.continuous_max[i] = std::max(p.continuous_max[i], item->continuous[i]);
    }
  }
  return p;
}

ConstraintSpec InferBounds(std::span<const double> histogram, int k,
                           double lower_slack, double upper_slack) {
  if (histogram.empty() || k < 1) {
    throw Error(ErrorCode::kMalformedSpec,
                "bound inference needs a non-empty histogram and k >= 1");
  }
  if (!(lower_slack >= 0.0) || !(upper_slack >= lower_slack)) {
    throw Error(ErrorCode::kMalformedSpec,
                "slack must satisfy 0 <= lower <= upper");
  }
  double total = 0.0;
  for (double h : histogram) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
      throw Error(ErrorCode::kMalformedSpec,
                  "histogram entries must be finite and >= 0");
    }
    total += h;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kMalformedSpec, "histogram is all zero");
  }
  ConstraintSpec spec;
  spec.k = k;
  for (double h : histogram) {
    const double share = h / total * k;
    // The epsilons absorb rounding in products that are integral on paper.
    spec.lower.push_back(
        static_cast<int>(std::floor(lower_slack * share + 1e-9)));
    spec.upper.push_back(
        static_cast<int>(std::ceil(upper_slack * share - 1e-9)));
  }
  ValidateConstraints(spec, static_cast<int>(histogram.size()));
  return spec;
}

Schema InferSchema(const std::string& path, const std::string& label_column,
                   std::optional<int> label_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.ReadRow(header)) {
    throw Error(ErrorCode::kParseError, "'" + path + "' has no header");
  }
  auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "no column named '" + label_column + "'");
  }
  const std::size_t label_col =
      static_cast<std::size_t>(label_it - header.begin());
  const std::size_t columns = header.size();
  std::vector<bool> numeric(columns, true);
  std::vector<double> lo(columns, std::numeric_limits<double>::infinity());
  std::vector<double> hi(columns, -std::numeric_limits<double>::infinity());
  long max_label = 0;
  std::vector<std::string> fields;
  std::uint64_t row = 0;
  while (reader.ReadRow(fields)) {
    if (IsBlankRecord(fields)) continue;
    ++row;
    if (fields.size() != columns) {
      throw Error(ErrorCode::kParseError,
                  "row " + std::to_string(row) + ": expected " +
                      std::to_string(columns) + " fields");
    }
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == label_col) {
        std::optional<long> l = TryParseInt(fields[c]);
        if (!l || *l < 1) {
          throw Error(ErrorCode::kParseError,
                      "row " + std::to_string(row) +
                          ": label must be an integer >= 1");
        }
        max_label = std::max(max_label, *l);
        continue;
      }
      if (!numeric[c]) continue;
      std::optional<double> v = TryParseNumber(fields[c]);
      if (!v) {
        numeric[c] = false;
        continue;
      }
      lo[c] = std::min(lo[c], *v);
      hi[c] = std::max(hi[c], *v);
    }
  }
  std::vector<FeatureSpec> features;
  for (std::size_t c = 0; c < columns; ++c) {
    if (c == label_col) continue;
    FeatureSpec f;
    f.name = header[c];
    if (numeric[c] && row > 0) {
      f.kind = FeatureKind::kContinuous;
      f.min = lo[c];
      f.max = hi[c];
    } else {
      f.kind = FeatureKind::kCategorical;
    }
    features.push_back(std::move(f));
  }
  const int labels = label_count.value_or(
      static_cast<int>(std::max<long>(max_label, 1)));
  return Schema(std::move(features), label_column, labels);
}

}  // namespace cfstream
