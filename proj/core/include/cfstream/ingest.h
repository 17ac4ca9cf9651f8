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

// Loading item streams from CSV, profiling passes and bound inference.
//
// Item CSV layout: a header naming every schema feature and the label
// column (any order, no other columns), then one item per record. Item ids
// are 0-based record ordinals. Continuous cells are decimal numbers;
// categorical cells are arbitrary symbols interned per feature; the label
// is an integer in [1, L]. Blank lines are skipped.

#ifndef CFSTREAM_INGEST_H_
#define CFSTREAM_INGEST_H_

#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cfstream/csv.h"
#include "cfstream/domain.h"

namespace cfstream {

class CsvItemSource : public ItemSource {
 public:
  // `dictionary` interns categorical symbols and must outlive the source.
  CsvItemSource(const std::string& path, std::shared_ptr<const Schema> schema,
                CategoryDictionary* dictionary);
  CsvItemSource(std::istream& in, std::shared_ptr<const Schema> schema,
                CategoryDictionary* dictionary);

  // Throws kParseError naming the data row (1-based) and column.
  std::optional<Item> Next() override;

  std::uint64_t rows() const { return next_id_; }

 private:
  void ReadHeader();

  std::unique_ptr<std::ifstream> file_;
  std::istream* in_;
  CsvReader reader_;
  std::shared_ptr<const Schema> schema_;
  CategoryDictionary* dictionary_;
  // For each CSV column: feature index, or -1 for the label.
  std::vector<int> column_feature_;
  std::vector<std::string> header_;
  std::vector<std::string> fields_;
  std::uint64_t next_id_ = 0;
};

std::vector<Item> LoadCsvItems(const std::string& path,
                               std::shared_ptr<const Schema> schema,
                               CategoryDictionary* dictionary);

// Header plus one record per item; numbers in shortest round-trip form.
void WriteItemsCsv(std::ostream& out, const Schema& schema,
                   std::span<const Item> items,
                   const CategoryDictionary& dictionary);

// Parses a decimal number, throwing kParseError on trailing garbage.
double ParseNumber(std::string_view text);
std::string FormatNumber(double value);

struct DatasetProfile {
  std::uint64_t rows = 0;
  std::vector<std::uint64_t> label_counts;  // by LabelIndex
  std::vector<double> continuous_min;       // by continuous slot
  std::vector<double> continuous_max;
};

// One pass over a stream collecting the label histogram and value ranges.
DatasetProfile ProfileItems(ItemSource& source, const Schema& schema);

// alpha_l = floor(lower_slack * p_l * k), beta_l = ceil(upper_slack * p_l *
// k) with p_l the normalized histogram. Throws kInfeasibleConstraints when
// sum(alpha) > k.
ConstraintSpec InferBounds(std::span<const double> histogram, int k,
                           double lower_slack = 0.9,
                           double upper_slack = 1.1);

// Builds a schema from a CSV file: columns whose cells all parse as numbers
// are continuous with the observed range, the rest categorical. The label
// column must hold integers >= 1; L is their maximum unless given.
Schema InferSchema(const std::string& path, const std::string& label_column,
                   std::optional<int> label_count = std::nullopt);

}  // namespace cfstream

#endif  // CFSTREAM_INGEST_H_
