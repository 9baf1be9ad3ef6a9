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

#include "fairaudit/commands.h"

#include <filesystem>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fairaudit/csv.h"
#include "fairaudit/experiments.h"
#include "fairaudit/scenario.h"

namespace fairaudit {

namespace {

// Discards everything written to it.
class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

absl::Status WriteOutput(const std::string& dir, const std::string& name,
                         const std::string& contents, std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat(dir, ": cannot create directory: ", ec.message()));
  }
  const std::string path = (std::filesystem::path(dir) / name).string();
  if (absl::Status st = csv::WriteFile(path, contents); !st.ok()) return st;
  log << "wrote " << path << "\n";
  return absl::OkStatus();
}

absl::StatusOr<Scenario> LoadForCommand(const CommandOptions& options) {
  if (options.scenario_path.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat(options.command, " needs --scenario"));
  }
  auto scenario = LoadScenario(options.scenario_path);
  if (!scenario.ok()) return scenario.status();
  if (options.seed) scenario->seed = *options.seed;
  return scenario;
}

std::string OutDir(const CommandOptions& options, const Scenario* scenario) {
  if (!options.out.empty()) return options.out;
  if (scenario != nullptr && !scenario->out.empty()) return scenario->out;
  return "out";
}

absl::Status Theory(const CommandOptions& options, std::ostream& log) {
  auto rows = TheoryTable(options.n_list, options.x_grid);
  if (!rows.ok()) return rows.status();
  return WriteOutput(OutDir(options, nullptr), "theory.csv",
                     WriteTheoryCsv(*rows), log);
}

absl::StatusOr<int> Validate(const CommandOptions& options,
                             std::ostream& log) {
  auto rows = ValidateTheory(options.n_list, options.x_grid, options.samples,
                             options.seed.value_or(1));
  if (!rows.ok()) return rows.status();
  absl::Status st = WriteOutput(OutDir(options, nullptr), "validate.csv",
                                WriteValidationCsv(*rows), log);
  if (!st.ok()) return st;
  int divergent = 0, interior = 0;
  for (const auto& r : *rows) {
    if (r.x > 0.0 && r.x < 1.0) ++interior;
    if (r.printed_divergent) ++divergent;
  }
  log << absl::StrFormat(
      "%d grid points, oracles %s, printed formula divergent at %d of %d "
      "interior points\n",
      rows->size(), AllOraclesAgree(*rows) ? "agree" : "DISAGREE", divergent,
      interior);
  return AllOraclesAgree(*rows) ? kExitOk : kExitOracleDisagreement;
}

absl::Status Experiment(const CommandOptions& options, std::ostream& log) {
  auto scenario = LoadForCommand(options);
  if (!scenario.ok()) return scenario.status();
  if (options.command == "budget" && scenario->budgets.size() < 3) {
    return absl::InvalidArgumentError(
        "audit.budgets: the budget experiment needs at least 3 budgets");
  }
  auto setup = PrepareAudit(*scenario);
  if (!setup.ok()) return setup.status();
  log << absl::StrFormat("scenario %s, seed %d, tau %.6f (%s)\n",
                         scenario->name, scenario->seed, setup->tau,
                         setup->calibrated ? "calibrated" : "fixed");
  const std::string dir = OutDir(options, &*scenario);

  if (options.command == "impossibility") {
    auto rows = RunImpossibility(*scenario, *setup);
    if (!rows.ok()) return rows.status();
    const ImpossibilitySummary summary =
        SummarizeImpossibility(*rows, setup->tau);
    log << absl::StrFormat(
        "%d trials, %d feasible, %d feasible trials detected, mean "
        "concealed %.4f\n",
        summary.trials, summary.feasible, summary.detected_feasible,
        summary.mean_concealed_feasible);
    if (absl::Status st = WriteOutput(dir, "impossibility.csv",
                                      WriteImpossibilityCsv(*rows), log);
        !st.ok()) {
      return st;
    }
    return WriteOutput(dir, "impossibility_summary.csv",
                       WriteImpossibilitySummaryCsv(summary), log);
  }

  auto records = RunBudgetTrials(*scenario, *setup);
  if (!records.ok()) return records.status();
  std::vector<AuditTrialRecord> all;
  for (const auto& [budget, recs] : *records) {
    all.insert(all.end(), recs.begin(), recs.end());
  }
  const std::vector<StrategySpec> grid = scenario->Grid();
  if (options.command == "sweep") {
    const auto rows = SummarizeSweep(*records, grid, setup->tau);
    if (absl::Status st =
            WriteOutput(dir, "sweep.csv", WriteSweepCsv(rows), log);
        !st.ok()) {
      return st;
    }
    return WriteOutput(dir, "sweep_trials.csv", WriteTrialCsv(all), log);
  }
  const auto rows = SummarizeBudgets(*records, grid, setup->tau);
  for (int budget : scenario->budgets) {
    for (const auto& r : rows) {
      if (r.budget != budget) continue;
      log << absl::StrFormat(
          "budget %5d  honest false positives %.2f  max concealable %.4f\n",
          budget, r.honest_false_positive_rate,
          MaxManipulativeConcealable(rows, budget));
      break;
    }
  }
  if (absl::Status st =
          WriteOutput(dir, "budget.csv", WriteBudgetCsv(rows), log);
      !st.ok()) {
    return st;
  }
  return WriteOutput(dir, "budget_trials.csv", WriteTrialCsv(all), log);
}

}  // namespace

const std::vector<std::string>& CommandNames() {
  static const auto* names = new std::vector<std::string>{
      "theory", "validate", "sweep", "budget", "impossibility"};
  return *names;
}

int RunCommand(const CommandOptions& options, std::ostream& log,
               std::ostream& err) {
  NullBuffer null_buffer;
  std::ostream null_stream(&null_buffer);
  std::ostream& out = options.quiet ? null_stream : log;
  absl::Status status;
  if (options.command == "theory") {
    status = Theory(options, out);
  } else if (options.command == "validate") {
    auto code = Validate(options, out);
    if (code.ok()) return *code;
    status = code.status();
  } else if (options.command == "sweep" || options.command == "budget" ||
             options.command == "impossibility") {
    status = Experiment(options, out);
  } else {
    status = absl::InvalidArgumentError(
        absl::StrCat("unknown command '", options.command, "'"));
  }
  if (!status.ok()) {
    err << "error: " << status.message() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace fairaudit
