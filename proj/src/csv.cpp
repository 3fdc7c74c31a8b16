// Copyright 2026 The CoughNet Authors. All Rights Reserved.
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

#include "coughnet/csv.h"

#include "coughnet/error.h"

namespace coughnet::csv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (true) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::string field;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        field += line[i++];
      }
      if (!closed) throw DataError("unterminated quoted field");
      const auto comma = line.find(',', i);
      if (!trim(line.substr(i, comma == std::string_view::npos ? line.size() - i : comma - i)).empty()) {
        throw DataError("unexpected text after quoted field");
      }
      out.push_back(std::move(field));
      if (comma == std::string_view::npos) break;
      i = comma + 1;
    } else {
      const auto comma = line.find(',', i);
      const auto end = comma == std::string_view::npos ? line.size() : comma;
      out.emplace_back(trim(line.substr(i, end - i)));
      if (comma == std::string_view::npos) break;
      i = comma + 1;
    }
  }
  return out;
}

std::vector<Row> parse(std::string_view text, const std::vector<std::string>& header, std::string_view source) {
  std::vector<Row> rows;
  bool seen_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? text.size() : nl;
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!trim(line).empty()) {
      std::vector<std::string> fields;
      try {
        fields = split_line(line);
      } catch (const DataError& e) {
        throw DataError(std::string(source) + ": line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!seen_header) {
        if (fields != header) {
          throw DataError(std::string(source) + ": line " + std::to_string(line_no) + ": expected header `" +
                          join(header) + "`");
        }
        seen_header = true;
      } else {
        if (fields.size() != header.size()) {
          throw DataError(std::string(source) + ": line " + std::to_string(line_no) + ": expected " +
                          std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        rows.push_back({line_no, std::move(fields)});
      }
    }
    if (nl == std::string_view::npos) break;
  }
  if (!seen_header) throw DataError(std::string(source) + ": missing header `" + join(header) + "`");
  return rows;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos && trim(field) == field) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace coughnet::csv
