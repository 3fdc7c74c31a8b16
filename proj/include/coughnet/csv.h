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

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace coughnet::csv {

// One parsed data row and its 1-based line number in the source text.
struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Splits one line on commas. Double-quoted fields may contain commas and
// doubled quotes. Surrounding whitespace of unquoted fields is dropped.
std::vector<std::string> split_line(std::string_view line);

// Parses `text`, requiring the first non-blank line to equal `header`
// (field-wise). Blank lines are skipped. Throws DataError naming `source`.
std::vector<Row> parse(std::string_view text, const std::vector<std::string>& header, std::string_view source);

// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace coughnet::csv
