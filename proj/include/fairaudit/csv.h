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

#ifndef FAIRAUDIT_CSV_H_
#define FAIRAUDIT_CSV_H_

// Minimal CSV tables: comma-separated, LF line endings, no quoting (no field
// written by this library contains a comma or newline). Doubles are written
// with 17 significant digits so every value round-trips exactly.

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace fairaudit::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Position of `name` in the header, or NotFound.
  absl::StatusOr<size_t> Column(absl::string_view name) const;
};

std::string FormatDouble(double value);

absl::StatusOr<Table> Parse(absl::string_view text);
std::string Write(const Table& table);

absl::StatusOr<double> ParseDouble(absl::string_view field);
absl::StatusOr<int64_t> ParseInt(absl::string_view field);
absl::StatusOr<uint64_t> ParseUint(absl::string_view field);
absl::StatusOr<bool> ParseBool(absl::string_view field);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

}  // namespace fairaudit::csv

#endif  // FAIRAUDIT_CSV_H_
