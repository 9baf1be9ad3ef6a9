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

#include "fairaudit/strategies.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace fairaudit {

namespace {

constexpr struct {
  StrategyId id;
  absl::string_view name;
  absl::string_view hyperparameter;
} kStrategyTable[] = {
    {StrategyId::kHonest, "honest", ""},
    {StrategyId::kOptimalProjection, "optimal_projection", "epsilon"},
    {StrategyId::kRocMitigation, "roc_mitigation", "theta"},
    {StrategyId::kLabelTransport, "label_transport", "t"},
    {StrategyId::kLinearRelaxation, "linear_relaxation", "lambda"},
    {StrategyId::kThresholdManipulation, "threshold_manipulation", "epsilon"},
    {StrategyId::kPriorAware, "prior_aware", "epsilon"},
};

ManipulationOutcome Finish(const AuditSet& s, const AnswerVector& honest,
                           AnswerVector answers, StrategyId id,
                           std::optional<double> param) {
  ManipulationOutcome out;
  out.flips = *HammingDistance(answers, honest);
  out.achieved_dp = *DpEstimate(answers, s);
  out.answers = std::move(answers);
  out.strategy = id;
  if (param) out.hyperparams[std::string(HyperparameterName(id))] = *param;
  return out;
}

// Moves `base` to the closest fair vector. Within a group, positions are
// flipped in increasing `priority` (ties by position).
absl::StatusOr<AnswerVector> ProjectToFair(const AuditSet& s,
                                           const AnswerVector& base,
                                           const std::vector<double>& priority,
                                           double epsilon) {
  auto target = MinimalFairTarget(base, s, epsilon);
  if (!target.ok()) return target.status();
  auto counts = *CountPositives(base, s);
  AnswerVector out = base;
  for (int g = 0; g < 2; ++g) {
    const int delta = target->positives[g] - counts.positives[g];
    if (delta == 0) continue;
    const uint8_t from = delta > 0 ? 0 : 1;
    std::vector<size_t> candidates;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i].group == g && base.bits[i] == from) candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](size_t a, size_t b) {
                       return priority[a] < priority[b];
                     });
    for (int k = 0; k < std::abs(delta); ++k) out.bits[candidates[k]] ^= 1;
  }
  return out;
}

absl::StatusOr<ManipulationOutcome> ProjectionImpl(
    const AuditSet& s, const ScoredAuditSet& scored, double epsilon) {
  std::vector<double> distance(scored.scores.size());
  for (size_t i = 0; i < distance.size(); ++i) {
    distance[i] = std::fabs(scored.scores[i] - 0.5);
  }
  auto answers = ProjectToFair(s, scored.honest, distance, epsilon);
  if (!answers.ok()) return answers.status();
  return Finish(s, scored.honest, *std::move(answers),
                StrategyId::kOptimalProjection, epsilon);
}

ManipulationOutcome RocImpl(const AuditSet& s, const ScoredAuditSet& scored,
                            double theta) {
  const GroupCounts counts = *CountPositives(scored.honest, s);
  const double rate0 =
      static_cast<double>(counts.positives[0]) / counts.size[0];
  const double rate1 =
      static_cast<double>(counts.positives[1]) / counts.size[1];
  const int disadvantaged = rate1 < rate0 ? 1 : 0;  // ties: group 0
  AnswerVector answers = scored.honest;
  for (size_t i = 0; i < s.size(); ++i) {
    if (std::fabs(scored.scores[i] - 0.5) <= theta) {
      answers.bits[i] = s[i].group == disadvantaged ? 1 : 0;
    }
  }
  return Finish(s, scored.honest, std::move(answers),
                StrategyId::kRocMitigation, theta);
}

absl::StatusOr<ManipulationOutcome> TransportImpl(
    const AuditSet& s, const ScoredAuditSet& scored, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    return absl::InvalidArgumentError("transport weight t must lie in [0, 1]");
  }
  const size_t n = s.size();
  std::vector<double> pooled = scored.scores;
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> moved = scored.scores;
  for (int g = 0; g < 2; ++g) {
    std::vector<size_t> members;
    for (size_t i = 0; i < n; ++i) {
      if (s[i].group == g) members.push_back(i);
    }
    std::stable_sort(members.begin(), members.end(), [&](size_t a, size_t b) {
      return scored.scores[a] < scored.scores[b];
    });
    const double ng = static_cast<double>(members.size());
    for (size_t r = 0; r < members.size(); ++r) {
      // Pooled quantile at the member's mid-rank level.
      const double level = (r + 0.5) / ng;
      const size_t q = std::min(
          n - 1, static_cast<size_t>(std::floor(level * static_cast<double>(n))));
      const size_t i = members[r];
      moved[i] = (1.0 - t) * scored.scores[i] + t * pooled[q];
    }
  }
  return Finish(s, scored.honest, ThresholdScores(moved),
                StrategyId::kLabelTransport, t);
}

absl::StatusOr<ManipulationOutcome> RelaxationImpl(
    const ScoreModel& model, const AuditSet& s, const ScoredAuditSet& scored,
    const RelaxationOptions& options) {
  if (!(options.lambda >= 0.0)) {
    return absl::InvalidArgumentError("lambda must be non-negative");
  }
  std::vector<double> targets(scored.honest.bits.begin(),
                              scored.honest.bits.end());
  const LogisticObjective objective(s, std::move(targets), options.lambda);
  TrainOptions train;
  train.steps = options.steps;
  train.learning_rate = options.learning_rate;
  train.backtracking = true;
  auto params = MinimizeObjective(objective, model.Flatten(), train);
  if (!params.ok()) return params.status();
  const ScoreModel refit = ScoreModel::Unflatten(*params);
  return Finish(s, scored.honest, HonestAnswers(refit, s),
                StrategyId::kLinearRelaxation, options.lambda);
}

// Per-group threshold candidates with their positive and flip counts.
struct ThresholdTable {
  std::vector<double> thresholds;
  std::vector<int> positives;
  std::vector<int> flips;
};

ThresholdTable BuildThresholdTable(std::vector<double> group_scores) {
  std::sort(group_scores.begin(), group_scores.end());
  std::vector<double> candidates = group_scores;
  candidates.insert(candidates.end(), {0.0, 0.5, 1.0});
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  const int n = static_cast<int>(group_scores.size());
  auto at_least = [&](double t) {
    return n - static_cast<int>(std::lower_bound(group_scores.begin(),
                                                 group_scores.end(), t) -
                                group_scores.begin());
  };
  const int honest_positive = at_least(0.5);
  ThresholdTable table;
  for (double t : candidates) {
    const int pos = at_least(t);
    table.thresholds.push_back(t);
    table.positives.push_back(pos);
    // Thresholds are nested, so the answer sets differ by |pos - honest|.
    table.flips.push_back(std::abs(pos - honest_positive));
  }
  return table;
}

}  // namespace

absl::string_view StrategyName(StrategyId id) {
  for (const auto& row : kStrategyTable) {
    if (row.id == id) return row.name;
  }
  return "unknown";
}

absl::StatusOr<StrategyId> ParseStrategyName(absl::string_view name) {
  for (const auto& row : kStrategyTable) {
    if (row.name == name) return row.id;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown strategy '", name, "'"));
}

absl::string_view HyperparameterName(StrategyId id) {
  for (const auto& row : kStrategyTable) {
    if (row.id == id) return row.hyperparameter;
  }
  return "";
}

ScoredAuditSet ScoredAuditSet::Make(const ScoreModel& model,
                                    const AuditSet& s) {
  ScoredAuditSet out;
  out.scores = model.Scores(s);
  out.honest = ThresholdScores(out.scores);
  return out;
}

ManipulationOutcome HonestOutcome(const ScoreModel& model, const AuditSet& s) {
  AnswerVector honest = HonestAnswers(model, s);
  return Finish(s, honest, honest, StrategyId::kHonest, std::nullopt);
}

absl::StatusOr<ManipulationOutcome> OptimalProjection(const ScoreModel& model,
                                                      const AuditSet& s,
                                                      double epsilon_fair) {
  return ProjectionImpl(s, ScoredAuditSet::Make(model, s), epsilon_fair);
}

ManipulationOutcome RocMitigation(const ScoreModel& model, const AuditSet& s,
                                  double theta) {
  return RocImpl(s, ScoredAuditSet::Make(model, s), theta);
}

absl::StatusOr<ManipulationOutcome> LabelTransport(const ScoreModel& model,
                                                   const AuditSet& s,
                                                   double t) {
  return TransportImpl(s, ScoredAuditSet::Make(model, s), t);
}

absl::StatusOr<ManipulationOutcome> LinearRelaxation(
    const ScoreModel& model, const AuditSet& s,
    const RelaxationOptions& options, uint64_t /*seed*/) {
  return RelaxationImpl(model, s, ScoredAuditSet::Make(model, s), options);
}

absl::StatusOr<ThresholdChoice> ChooseThresholds(
    const std::vector<double>& scores, const AuditSet& s,
    double epsilon_fair) {
  if (scores.size() != s.size()) {
    return absl::InvalidArgumentError("scores misaligned with audit set");
  }
  std::vector<double> by_group[2];
  for (size_t i = 0; i < s.size(); ++i) by_group[s[i].group].push_back(scores[i]);
  const ThresholdTable t0 = BuildThresholdTable(by_group[0]);
  const ThresholdTable t1 = BuildThresholdTable(by_group[1]);
  const int n0 = s.group_size(0), n1 = s.group_size(1);

  bool found = false;
  size_t best0 = 0, best1 = 0;
  // Lexicographic: total flips, group-1 flips, t_0, t_1. Candidates are
  // scanned in increasing threshold order, so strict improvement keeps the
  // lowest thresholds among ties.
  for (size_t a = 0; a < t0.thresholds.size(); ++a) {
    for (size_t b = 0; b < t1.thresholds.size(); ++b) {
      if (!WithinFairness(
              DpFromCounts(t0.positives[a], n0, t1.positives[b], n1),
              epsilon_fair)) {
        continue;
      }
      const int total = t0.flips[a] + t1.flips[b];
      const int best_total = t0.flips[best0] + t1.flips[best1];
      if (!found || total < best_total ||
          (total == best_total && t1.flips[b] < t1.flips[best1])) {
        found = true;
        best0 = a;
        best1 = b;
      }
    }
  }
  // Unreachable: thresholds above every score give all-zero answers.
  if (!found) return absl::InternalError("no fair threshold pair");
  ThresholdChoice choice;
  choice.thresholds[0] = t0.thresholds[best0];
  choice.thresholds[1] = t1.thresholds[best1];
  choice.flips[0] = t0.flips[best0];
  choice.flips[1] = t1.flips[best1];
  return choice;
}

namespace {

absl::StatusOr<ManipulationOutcome> ThresholdImpl(const AuditSet& s,
                                                  const ScoredAuditSet& scored,
                                                  double epsilon) {
  auto choice = ChooseThresholds(scored.scores, s, epsilon);
  if (!choice.ok()) return choice.status();
  AnswerVector answers;
  answers.bits.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    answers.bits.push_back(
        scored.scores[i] >= choice->thresholds[s[i].group] ? 1 : 0);
  }
  return Finish(s, scored.honest, std::move(answers),
                StrategyId::kThresholdManipulation, epsilon);
}

}  // namespace

absl::StatusOr<ManipulationOutcome> ThresholdManipulation(
    const ScoreModel& model, const AuditSet& s, double epsilon_fair) {
  return ThresholdImpl(s, ScoredAuditSet::Make(model, s), epsilon_fair);
}

absl::StatusOr<ManipulationOutcome> PriorAwareAttack(
    const DatasetPrior& prior, const AuditSet& s, double epsilon_fair,
    const AnswerVector& honest) {
  if (honest.size() != s.size()) {
    return absl::InvalidArgumentError("honest answers misaligned");
  }
  auto labels = prior.LabelsFor(s);
  if (!labels.ok()) return labels.status();
  auto flips = MinimalFlipsToFair(*labels, s, epsilon_fair);
  if (!flips.ok()) return flips.status();
  const double needed = static_cast<double>(*flips) / s.size();
  if (needed > prior.tau() + 1e-12) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "second auditing axiom violated: the prior ball misses the fair set "
        "on this audit set (closest fair answers disagree with the prior "
        "labels on %.17g of the queries, tau = %.17g)",
        needed, prior.tau()));
  }
  std::vector<double> order(s.size());
  std::iota(order.begin(), order.end(), 0.0);
  auto answers = ProjectToFair(s, *labels, order, epsilon_fair);
  if (!answers.ok()) return answers.status();
  return Finish(s, honest, *std::move(answers), StrategyId::kPriorAware,
                epsilon_fair);
}

absl::StatusOr<ManipulationOutcome> ApplyStrategy(const StrategySpec& spec,
                                                  const StrategyContext& ctx) {
  const AuditSet& s = *ctx.audit;
  const ScoredAuditSet& scored = *ctx.scored;
  switch (spec.id) {
    case StrategyId::kHonest:
      return Finish(s, scored.honest, scored.honest, StrategyId::kHonest,
                    std::nullopt);
    case StrategyId::kOptimalProjection:
      return ProjectionImpl(s, scored, spec.param);
    case StrategyId::kRocMitigation:
      return RocImpl(s, scored, spec.param);
    case StrategyId::kLabelTransport:
      return TransportImpl(s, scored, spec.param);
    case StrategyId::kLinearRelaxation: {
      RelaxationOptions options = ctx.relaxation;
      options.lambda = spec.param;
      return RelaxationImpl(*ctx.model, s, scored, options);
    }
    case StrategyId::kThresholdManipulation:
      return ThresholdImpl(s, scored, spec.param);
    case StrategyId::kPriorAware:
      if (ctx.prior == nullptr) {
        return absl::InvalidArgumentError(
            "prior_aware strategy needs the auditor's prior");
      }
      return PriorAwareAttack(*ctx.prior, s, spec.param, scored.honest);
  }
  return absl::InvalidArgumentError("unknown strategy");
}

}  // namespace fairaudit
