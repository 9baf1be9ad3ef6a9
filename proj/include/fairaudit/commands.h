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

#ifndef FAIRAUDIT_COMMANDS_H_
#define FAIRAUDIT_COMMANDS_H_

// The CLI commands as library calls. Each writes CSV files into the output
// directory and returns a process exit status.
//
//   theory         theory.csv
//   validate       validate.csv
//   sweep          sweep.csv, sweep_trials.csv
//   budget         budget.csv, budget_trials.csv
//   impossibility  impossibility.csv, impossibility_summary.csv

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fairaudit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitOracleDisagreement = 2;

struct CommandOptions {
  std::string command;
  std::string scenario_path;      // sweep, budget, impossibility
  std::optional<uint64_t> seed;   // overrides the scenario seed
  std::string out;                // defaults to the scenario's out, or "out"
  int64_t samples = 100000;       // validate
  bool quiet = false;
  std::vector<int> n_list = {2, 3, 5, 10, 20};
  std::vector<double> x_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                0.6, 0.7, 0.8, 0.9, 1.0};
};

const std::vector<std::string>& CommandNames();

// Progress and summaries go to `log` (suppressed by quiet), errors to `err`.
int RunCommand(const CommandOptions& options, std::ostream& log,
               std::ostream& err);

}  // namespace fairaudit

#endif  // FAIRAUDIT_COMMANDS_H_
