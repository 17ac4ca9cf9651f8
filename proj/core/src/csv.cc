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

#include "cfstream/csv.h"

#include "cfstream/error.h"

namespace cfstream {

bool CsvReader::ReadRow(std::vector<std::string>& fields) {
  fields.clear();
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) return false;
  ++record_;
  std::string field;
  bool quoted = false;      // inside a quoted section
  bool was_quoted = false;  // field started with a quote
  for (;; c = in_.get()) {
    if (c == std::char_traits<char>::eof()) {
      if (quoted) {
        throw Error(ErrorCode::kParseError,
                    "record " + std::to_string(record_) +
                        ": unterminated quoted field");
      }
      fields.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        break;
      case '\r':
        if (in_.peek() == '\n') in_.get();
        [[fallthrough]];
      case '\n':
        fields.push_back(std::move(field));
        return true;
      case '"':
        if (!field.empty() || was_quoted) {
          throw Error(ErrorCode::kParseError,
                      "record " + std::to_string(record_) + ", field " +
                          std::to_string(fields.size() + 1) +
                          ": quote inside an unquoted field");
        }
        quoted = true;
        was_quoted = true;
        break;
      default:
        if (was_quoted) {
          throw Error(ErrorCode::kParseError,
                      "record " + std::to_string(record_) + ", field " +
                          std::to_string(fields.size() + 1) +
                          ": text after a closing quote");
        }
        field.push_back(ch);
    }
  }
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void WriteCsvRow(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << CsvEscape(fields[i]);
  }
  out << '\n';
}

}  // namespace cfstream
