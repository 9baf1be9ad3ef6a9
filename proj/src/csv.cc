// Copyright 2026 The Fairaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairaudit/csv.h"

#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace fairaudit::csv {

absl::StatusOr<size_t> Table::Column(absl::string_view name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return absl::NotFoundError(absl::StrCat("missing CSV column '", name, "'"));
}

std::string FormatDouble(double value) {
  if (value == 0.0) return "0";  // folds -0 into 0
  return absl::StrFormat("%.17g", value);
}

absl::StatusOr<Table> Parse(absl::string_view text) {
  Table table;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripSuffix(line, "\r");
    if (line.empty()) continue;
    std::vector<std::string> fields = absl::StrSplit(line, ',');
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "CSV line %d has %d fields, header has %d", line_no, fields.size(),
          table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) {
    return absl::InvalidArgumentError("CSV input has no header");
  }
  return table;
}

std::string Write(const Table& table) {
  std::string out = absl::StrJoin(table.header, ",");
  out += '\n';
  for (const auto& row : table.rows) {
    absl::StrAppend(&out, absl::StrJoin(row, ","), "\n");
  }
  return out;
}

absl::StatusOr<double> ParseDouble(absl::string_view field) {
  double v;
  if (!absl::SimpleAtod(field, &v)) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a number: '", field, "'"));
  }
  return v;
}

absl::StatusOr<int64_t> ParseInt(absl::string_view field) {
  int64_t v;
  if (!absl::SimpleAtoi(field, &v)) {
    return absl::InvalidArgumentError(
        absl::StrCat("not an integer: '", field, "'"));
  }
  return v;
}

absl::StatusOr<uint64_t> ParseUint(absl::string_view field) {
  uint64_t v;
  if (!absl::SimpleAtoi(field, &v)) {
    return absl::InvalidArgumentError(
        absl::StrCat("not an unsigned integer: '", field, "'"));
  }
  return v;
}

absl::StatusOr<bool> ParseBool(absl::string_view field) {
  bool v;
  if (!absl::SimpleAtob(field, &v)) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a boolean: '", field, "'"));
  }
  return v;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write ", path));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

}  // namespace fairaudit::csv
