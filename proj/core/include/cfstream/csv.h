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

// RFC 4180 CSV: comma separated, double-quote quoting with "" escapes,
// quoted fields may span lines, CRLF or LF record ends.

#ifndef CFSTREAM_CSV_H_
#define CFSTREAM_CSV_H_

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfstream {

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record into `fields`. Returns false at end of input.
  // Throws kParseError on an unterminated quote or stray quote character.
  bool ReadRow(std::vector<std::string>& fields);

  // 1-based index of the last record returned (the header is record 1).
  std::size_t record() const { return record_; }

 private:
  std::istream& in_;
  std::size_t record_ = 0;
};

std::string CsvEscape(std::string_view field);
void WriteCsvRow(std::ostream& out, std::span<const std::string> fields);

}  // namespace cfstream

#endif  // CFSTREAM_CSV_H_
