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

#ifndef FAIRAUDIT_PROTOCOL_H_
#define FAIRAUDIT_PROTOCOL_H_

// The three-step audit: the auditor sends S, the platform answers (honestly
// or not), the auditor measures DP and disagreement with its prior. Also the
// trial machinery used by the experiments: threshold calibration, repeated
// audits with retrained platforms, and their aggregates.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fairaudit/audit_core.h"
#include "fairaudit/platform.h"
#include "fairaudit/strategies.h"

namespace fairaudit {

struct AuditVerdict {
  bool fair = false;    // |measured_dp| <= epsilon_fair
  bool honest = false;  // measured_detection <= tau_detect
  double measured_dp = 0.0;
  double measured_detection = 0.0;
  double epsilon_fair = 0.0;
  double tau_detect = 0.0;

  static AuditVerdict Make(double dp, double detection, double epsilon_fair,
                           double tau_detect);
};

// The two auditing axioms evaluated on one audit set: (1) the honest model
// is expectable, (2) some fair answer vector lies inside the prior ball.
struct AxiomCheck {
  double honest_detection = 0.0;
  double min_fair_detection = 0.0;  // minimal flips from the prior labels
  bool honest_expectable = false;
  bool fair_expectable_exists = false;

  bool ok() const { return honest_expectable && fair_expectable_exists; }
};

absl::StatusOr<AxiomCheck> CheckAxioms(const AnswerVector& honest,
                                       const DatasetPrior& prior,
                                       const AuditSet& s,
                                       double epsilon_fair);

struct AuditTrialRecord {
  uint64_t seed = 0;
  int budget = 0;
  StrategyId strategy = StrategyId::kHonest;
  std::map<std::string, double> hyperparams;
  AuditVerdict verdict;
  double dp_honest = 0.0;
  double dp_manipulated = 0.0;
  double concealed = 0.0;  // |dp_manipulated - dp_honest|
  int flips = 0;
  AxiomCheck axioms;
};

enum class AxiomPolicy {
  kEnforce,  // a violated axiom is an error
  kRecord,   // the check is stored in the record
};

// Runs one audit. With AxiomPolicy::kRecord, an infeasible prior-aware attack
// falls back to honest answers.
absl::StatusOr<AuditTrialRecord> RunAudit(
    const StrategySpec& spec, const ScoreModel& model,
    const DatasetPrior& prior, const AuditSet& s, double epsilon_fair,
    AxiomPolicy policy = AxiomPolicy::kEnforce,
    const RelaxationOptions& relaxation = {}, uint64_t seed = 0);

struct CalibrationConfig {
  int k_models = 10;
  int train_n = 500;
  int holdout_n = 5000;
  TrainOptions train;
};

// 1 - max holdout accuracy of k models, each trained on fresh task samples.
// The holdout is drawn from the task (config.holdout_n samples) unless one is
// given; the experiments pass the auditor's own labeled pool.
absl::StatusOr<double> CalibrateTau(const SyntheticTask& task,
                                    const CalibrationConfig& config,
                                    uint64_t seed,
                                    const AuditSet* holdout = nullptr);

// Everything a repeated audit needs besides the strategies and budget.
struct AuditEnvironment {
  SyntheticTask task;
  int platform_train_n = 10000;
  TrainOptions platform_train;
  int pool_size = 2000;  // auditor's labeled pool, audit sets drawn from it
  double epsilon_fair = 0.02;
  RelaxationOptions relaxation;
};

// The auditor's labeled pool as a prior with radius tau.
absl::StatusOr<DatasetPrior> BuildPrior(const AuditEnvironment& env,
                                        double tau, uint64_t seed);

// One trial: a freshly trained platform and a fresh audit set of `budget`
// pool samples, audited once per strategy. Records follow `specs` order.
absl::StatusOr<std::vector<AuditTrialRecord>> RunTrial(
    const AuditEnvironment& env, const DatasetPrior& prior,
    const std::vector<StrategySpec>& specs, int budget, uint64_t trial_seed);

// `trials` independent trials with seeds derived from `seed`; records are
// trial-major. The parallel and serial versions return identical results.
absl::StatusOr<std::vector<AuditTrialRecord>> RunTrials(
    const AuditEnvironment& env, const DatasetPrior& prior,
    const std::vector<StrategySpec>& specs, int budget, int trials,
    uint64_t seed);
absl::StatusOr<std::vector<AuditTrialRecord>> RunTrialsSerial(
    const AuditEnvironment& env, const DatasetPrior& prior,
    const std::vector<StrategySpec>& specs, int budget, int trials,
    uint64_t seed);

// A proportion with its Wilson 95% interval half-width.
struct RateEstimate {
  double rate = 0.0;
  double ci_halfwidth = 0.0;
  int count = 0;
  int trials = 0;
};
RateEstimate WilsonRate(int count, int trials);

bool Matches(const AuditTrialRecord& record, const StrategySpec& spec);

// Fraction of the spec's records flagged dishonest.
RateEstimate DetectionRate(const std::vector<AuditTrialRecord>& records,
                           const StrategySpec& spec);

absl::StatusOr<RateEstimate> EmpiricalDetectionRate(
    const AuditEnvironment& env, const StrategySpec& spec, int budget,
    int trials, double tau_detect, uint64_t seed);

// Mean over the spec's trials of concealed * [detection <= tau_detect]:
// unfairness counts only when the manipulation went unnoticed.
double ConcealedUnfairness(const std::vector<AuditTrialRecord>& records,
                           const StrategySpec& spec, double tau_detect);

// Max of ConcealedUnfairness over the grid; 0 for an empty result.
double MaxConcealableUnfairness(const std::vector<AuditTrialRecord>& records,
                                const std::vector<StrategySpec>& grid,
                                double tau_detect);

absl::StatusOr<double> MaxConcealableUnfairness(
    const AuditEnvironment& env, const std::vector<StrategySpec>& grid,
    int budget, int trials, double tau_detect, uint64_t seed);

// Trial CSV, columns seed,budget,strategy,hyperparams,dp_honest,
// dp_manipulated,concealed,detection,flips,fair,honest. Hyperparameters are
// written as name=value pairs joined by ';'. Parsing restores the verdict
// booleans and measured values but not the thresholds or axiom checks.
std::string WriteTrialCsv(const std::vector<AuditTrialRecord>& records);
absl::StatusOr<std::vector<AuditTrialRecord>> ParseTrialCsv(
    absl::string_view text);

}  // namespace fairaudit

#endif  // FAIRAUDIT_PROTOCOL_H_
