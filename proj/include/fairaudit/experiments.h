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

#ifndef FAIRAUDIT_EXPERIMENTS_H_
#define FAIRAUDIT_EXPERIMENTS_H_

// The experiment families behind the CLI commands. Each returns typed rows
// with a CSV writer and a parser; all results are deterministic given the
// inputs and seeds.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fairaudit/audit_core.h"
#include "fairaudit/protocol.h"
#include "fairaudit/scenario.h"
#include "fairaudit/strategies.h"

namespace fairaudit {

// Closed-form detection rate and its printed variant over a grid of
// n and x = delta / tau.
struct TheoryRow {
  int n = 0;
  double x = 0.0;
  double p_uf_decomposition = 0.0;
  double p_uf_printed = 0.0;
  double lower_bound = 0.0;
  double gamma = 0.0;
};

absl::StatusOr<std::vector<TheoryRow>> TheoryTable(
    const std::vector<int>& n_list, const std::vector<double>& x_grid);
std::string WriteTheoryCsv(const std::vector<TheoryRow>& rows);
absl::StatusOr<std::vector<TheoryRow>> ParseTheoryCsv(absl::string_view text);

// Tolerances of the validation report.
inline constexpr double kQuadratureTolerance = 1e-6;
inline constexpr double kMonteCarloSigmas = 4.0;
// The printed formula counts as different from the quadrature oracle above
// this gap (the oracle itself is accurate to ~5e-9).
inline constexpr double kPrintedGapThreshold = 1e-7;

struct ValidationRow {
  int n = 0;
  double x = 0.0;
  double closed_form = 0.0;
  double quadrature = 0.0;
  double mc_estimate = 0.0;
  double mc_stderr = 0.0;
  double printed = 0.0;
  bool quad_ok = false;
  bool mc_ok = false;
  // Printed differs from the quadrature oracle and is rejected by the
  // Monte Carlo oracle.
  bool printed_divergent = false;
  double lower_bound = 0.0;
  bool lower_bound_holds = false;
};

// True when `value` is consistent with a Monte Carlo estimate of a
// probability: inside [0, 1] and within kMonteCarloSigmas binomial standard
// errors, the standard error taken at `value` (the estimate's own standard
// error is 0 when every sample lands on one side).
bool ConsistentWithMonteCarlo(double value, double estimate, int64_t samples);

absl::StatusOr<std::vector<ValidationRow>> ValidateTheory(
    const std::vector<int>& n_list, const std::vector<double>& x_grid,
    int64_t samples, uint64_t seed);
bool AllOraclesAgree(const std::vector<ValidationRow>& rows);
std::string WriteValidationCsv(const std::vector<ValidationRow>& rows);
absl::StatusOr<std::vector<ValidationRow>> ParseValidationCsv(
    absl::string_view text);

// The auditor's pool and threshold for a scenario: audit.tau if set,
// otherwise calibrated on the pool.
struct AuditSetup {
  DatasetPrior prior;
  double tau = 0.0;
  bool calibrated = false;
};
absl::StatusOr<AuditSetup> PrepareAudit(const Scenario& scenario);

// Trial records for every budget of the scenario, keyed by budget. Each
// budget has its own seed stream, so adding a budget leaves the others
// unchanged.
absl::StatusOr<std::map<int, std::vector<AuditTrialRecord>>> RunBudgetTrials(
    const Scenario& scenario, const AuditSetup& setup);

// Mean and standard deviation across trials of detection and concealment
// for each (budget, strategy, hyperparameter) point.
struct SweepRow {
  int budget = 0;
  StrategyId strategy = StrategyId::kHonest;
  double param = 0.0;
  int trials = 0;
  double mean_detection = 0.0;
  double sd_detection = 0.0;
  double mean_concealed = 0.0;
  double sd_concealed = 0.0;
  double mean_dp_honest = 0.0;
  double mean_dp_manipulated = 0.0;
  double detection_rate = 0.0;
  double tau = 0.0;
};

std::vector<SweepRow> SummarizeSweep(
    const std::map<int, std::vector<AuditTrialRecord>>& records,
    const std::vector<StrategySpec>& grid, double tau);
std::string WriteSweepCsv(const std::vector<SweepRow>& rows);
absl::StatusOr<std::vector<SweepRow>> ParseSweepCsv(absl::string_view text);

// Per budget and strategy, the grid point with the largest concealable
// unfairness, plus the honest platform's false-positive rate at that budget.
struct BudgetRow {
  int budget = 0;
  StrategyId strategy = StrategyId::kHonest;
  double best_param = 0.0;
  double max_concealable = 0.0;
  double detection_rate = 0.0;  // of the best grid point
  double tau = 0.0;
  double honest_false_positive_rate = 0.0;
  double honest_false_positive_ci = 0.0;
};

std::vector<BudgetRow> SummarizeBudgets(
    const std::map<int, std::vector<AuditTrialRecord>>& records,
    const std::vector<StrategySpec>& grid, double tau);
// Largest max_concealable over the manipulative strategies at `budget`.
double MaxManipulativeConcealable(const std::vector<BudgetRow>& rows,
                                  int budget);
std::string WriteBudgetCsv(const std::vector<BudgetRow>& rows);
absl::StatusOr<std::vector<BudgetRow>> ParseBudgetCsv(absl::string_view text);

// The prior-aware attack across impossibility.trials trials at
// impossibility.budget.
struct ImpossibilityRow {
  uint64_t seed = 0;
  int budget = 0;
  bool feasible = false;  // some fair answer vector lies in the prior ball
  bool detected = false;
  bool fair = false;
  double detection = 0.0;
  double min_fair_detection = 0.0;
  double dp_honest = 0.0;
  double dp_manipulated = 0.0;
  double concealed = 0.0;
  int flips = 0;
};

struct ImpossibilitySummary {
  int trials = 0;
  int feasible = 0;
  int detected_feasible = 0;
  int fair_and_honest_feasible = 0;
  double mean_concealed_feasible = 0.0;
  double tau = 0.0;
};

std::vector<ImpossibilityRow> ImpossibilityRows(
    const std::vector<AuditTrialRecord>& records);
ImpossibilitySummary SummarizeImpossibility(
    const std::vector<ImpossibilityRow>& rows, double tau);
absl::StatusOr<std::vector<ImpossibilityRow>> RunImpossibility(
    const Scenario& scenario, const AuditSetup& setup);
std::string WriteImpossibilityCsv(const std::vector<ImpossibilityRow>& rows);
absl::StatusOr<std::vector<ImpossibilityRow>> ParseImpossibilityCsv(
    absl::string_view text);
std::string WriteImpossibilitySummaryCsv(const ImpossibilitySummary& summary);

}  // namespace fairaudit

#endif  // FAIRAUDIT_EXPERIMENTS_H_
