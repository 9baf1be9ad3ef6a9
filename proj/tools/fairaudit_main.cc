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

// fairaudit: theory tables, oracle validation and the audit experiments.
//
//   fairaudit theory [--n-list 2,3,5] [--x-grid 0,0.5,1] [--out DIR]
//   fairaudit validate [--samples N] [--seed S] [--out DIR]
//   fairaudit sweep|budget|impossibility --scenario FILE [--seed S]
//       [--out DIR]
//
// Exit status: 0 success, 1 invalid input or failed run, 2 oracle
// disagreement (validate only).

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairaudit/commands.h"

int main(int argc, char** argv) {
  fairaudit::CommandOptions options;
  CLI::App app{"Fairness audit simulator"};
  app.add_option("command", options.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(fairaudit::CommandNames()));
  app.add_option("--scenario", options.scenario_path, "Scenario file");
  uint64_t seed = 0;
  auto* seed_option = app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", options.out, "Output directory");
  app.add_option("--samples", options.samples,
                 "Monte Carlo samples per grid point (validate)")
      ->check(CLI::Range(int64_t{10000}, int64_t{1} << 40));
  app.add_option("--n-list", options.n_list, "Dimensions (theory, validate)")
      ->delimiter(',')
      ->check(CLI::Range(2, 1000));
  app.add_option("--x-grid", options.x_grid,
                 "Values of delta / tau (theory, validate)")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  app.add_flag("--quiet", options.quiet, "Only report errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fairaudit::kExitValidation;
  }
  if (seed_option->count() > 0) options.seed = seed;
  return fairaudit::RunCommand(options, std::cout, std::cerr);
}
