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

#ifndef FAIRAUDIT_STRATEGIES_H_
#define FAIRAUDIT_STRATEGIES_H_

// Manipulation strategies: how a platform turns its honest answers on the
// audit set into answers that look fair. Every strategy reports its flips
// relative to the honest answers and the DP it achieves.
//
// Which samples a strategy changes is a choice of this library:
//   optimal projection  - per group, the honest answers closest to the 0.5
//                         boundary (ties by position);
//   ROC mitigation      - all samples with |score - 0.5| <= theta;
//   label transport     - rank-preserving partial transport of scores toward
//                         the pooled score distribution;
//   linear relaxation   - refit with a squared-DP penalty on probabilities;
//   threshold           - per-group thresholds over observed scores;
//   prior-aware attack  - the prior's own labels, projected (by position).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fairaudit/audit_core.h"
#include "fairaudit/platform.h"

namespace fairaudit {

enum class StrategyId {
  kHonest,
  kOptimalProjection,
  kRocMitigation,
  kLabelTransport,
  kLinearRelaxation,
  kThresholdManipulation,
  kPriorAware,
};

absl::string_view StrategyName(StrategyId id);
absl::StatusOr<StrategyId> ParseStrategyName(absl::string_view name);

// Name of the strategy's single hyperparameter ("" for honest).
absl::string_view HyperparameterName(StrategyId id);

struct ManipulationOutcome {
  AnswerVector answers;
  int flips = 0;  // Hamming distance to the honest answers
  double achieved_dp = 0.0;
  StrategyId strategy = StrategyId::kHonest;
  std::map<std::string, double> hyperparams;
};

// Scores and honest answers of a model on an audit set, computed once and
// shared by all strategies evaluated on that set.
struct ScoredAuditSet {
  std::vector<double> scores;
  AnswerVector honest;

  static ScoredAuditSet Make(const ScoreModel& model, const AuditSet& s);
};

ManipulationOutcome HonestOutcome(const ScoreModel& model, const AuditSet& s);

absl::StatusOr<ManipulationOutcome> OptimalProjection(const ScoreModel& model,
                                                      const AuditSet& s,
                                                      double epsilon_fair);

ManipulationOutcome RocMitigation(const ScoreModel& model, const AuditSet& s,
                                  double theta);

absl::StatusOr<ManipulationOutcome> LabelTransport(const ScoreModel& model,
                                                   const AuditSet& s,
                                                   double t);

struct RelaxationOptions {
  double lambda = 0.0;
  int steps = 200;
  double learning_rate = 1.0;
};

// Warm-started from `model`, targets are the honest answers.
absl::StatusOr<ManipulationOutcome> LinearRelaxation(
    const ScoreModel& model, const AuditSet& s,
    const RelaxationOptions& options, uint64_t seed);

absl::StatusOr<ManipulationOutcome> ThresholdManipulation(
    const ScoreModel& model, const AuditSet& s, double epsilon_fair);

// Chosen per-group thresholds, exposed for tests.
struct ThresholdChoice {
  double thresholds[2] = {0.5, 0.5};
  int flips[2] = {0, 0};
};
absl::StatusOr<ThresholdChoice> ChooseThresholds(
    const std::vector<double>& scores, const AuditSet& s,
    double epsilon_fair);

// Answers with the prior's labels, projected onto the fair set. Fails with
// FailedPrecondition when the prior ball misses the fair set on s (second
// auditing axiom). `honest` is the reference for the flip count.
absl::StatusOr<ManipulationOutcome> PriorAwareAttack(
    const DatasetPrior& prior, const AuditSet& s, double epsilon_fair,
    const AnswerVector& honest);

// A strategy with its hyperparameter, as listed in a scenario grid.
struct StrategySpec {
  StrategyId id = StrategyId::kHonest;
  double param = 0.0;
};

struct StrategyContext {
  const ScoreModel* model = nullptr;
  const AuditSet* audit = nullptr;
  const ScoredAuditSet* scored = nullptr;
  const DatasetPrior* prior = nullptr;  // required by kPriorAware only
  RelaxationOptions relaxation;          // lambda taken from the spec
  uint64_t seed = 0;
};

absl::StatusOr<ManipulationOutcome> ApplyStrategy(const StrategySpec& spec,
                                                  const StrategyContext& ctx);

}  // namespace fairaudit

#endif  // FAIRAUDIT_STRATEGIES_H_
