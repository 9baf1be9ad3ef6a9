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

#include "fairaudit/protocol.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "fairaudit/csv.h"
#include "fairaudit/random.h"

namespace fairaudit {

namespace {

// Platform training data never overlaps the auditor's pool indices.
constexpr uint64_t kPlatformIdxBase = uint64_t{1} << 40;

// Stream indices under a trial seed.
enum TrialStream : uint64_t {
  kPlatformData = 1,
  kAuditDraw = 2,
  kStrategy = 3,
};

absl::StatusOr<AuditTrialRecord> AuditScored(
    const StrategySpec& spec, const ScoreModel& model,
    const DatasetPrior& prior, const AuditSet& s, const ScoredAuditSet& scored,
    double epsilon_fair, AxiomPolicy policy,
    const RelaxationOptions& relaxation, uint64_t seed) {
  auto axioms = CheckAxioms(scored.honest, prior, s, epsilon_fair);
  if (!axioms.ok()) return axioms.status();
  if (policy == AxiomPolicy::kEnforce) {
    if (!axioms->honest_expectable) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "first auditing axiom violated: the honest model disagrees with "
          "the prior on %.17g of the queries, tau = %.17g",
          axioms->honest_detection, prior.tau()));
    }
    if (!axioms->fair_expectable_exists) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "second auditing axiom violated: every fair answer vector "
          "disagrees with the prior on at least %.17g of the queries, "
          "tau = %.17g",
          axioms->min_fair_detection, prior.tau()));
    }
  }

  StrategyContext ctx;
  ctx.model = &model;
  ctx.audit = &s;
  ctx.scored = &scored;
  ctx.prior = &prior;
  ctx.relaxation = relaxation;
  ctx.seed = seed;
  StrategySpec effective = spec;
  if (spec.id == StrategyId::kPriorAware && !axioms->fair_expectable_exists) {
    effective = {StrategyId::kHonest, 0.0};
  }
  auto outcome = ApplyStrategy(effective, ctx);
  if (!outcome.ok()) return outcome.status();

  auto detection = DetectionScore(outcome->answers, prior, s);
  if (!detection.ok()) return detection.status();
  AuditTrialRecord record;
  record.seed = seed;
  record.budget = static_cast<int>(s.size());
  record.strategy = spec.id;
  record.hyperparams = outcome->hyperparams;
  if (effective.id != spec.id) {
    record.hyperparams[std::string(HyperparameterName(spec.id))] = spec.param;
  }
  record.dp_honest = *DpEstimate(scored.honest, s);
  record.dp_manipulated = outcome->achieved_dp;
  record.concealed = std::fabs(record.dp_manipulated - record.dp_honest);
  record.flips = outcome->flips;
  record.verdict = AuditVerdict::Make(record.dp_manipulated, *detection,
                                      epsilon_fair, prior.tau());
  record.axioms = *axioms;
  return record;
}

// `count` distinct positions out of `n`, by partial Fisher-Yates.
std::vector<size_t> SampleWithoutReplacement(size_t n, size_t count,
                                             Engine& engine) {
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), size_t{0});
  for (size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<size_t> pick(i, n - 1);
    std::swap(perm[i], perm[pick(engine)]);
  }
  perm.resize(count);
  return perm;
}

std::string FormatHyperparams(const std::map<std::string, double>& h) {
  return absl::StrJoin(h, ";", [](std::string* out, const auto& kv) {
    absl::StrAppend(out, kv.first, "=", csv::FormatDouble(kv.second));
  });
}

absl::StatusOr<std::map<std::string, double>> ParseHyperparams(
    absl::string_view text) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  for (absl::string_view item : absl::StrSplit(text, ';')) {
    std::pair<absl::string_view, absl::string_view> kv =
        absl::StrSplit(item, absl::MaxSplits('=', 1));
    auto value = csv::ParseDouble(kv.second);
    if (kv.first.empty() || !value.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad hyperparameter '", item, "'"));
    }
    out[std::string(kv.first)] = *value;
  }
  return out;
}

}  // namespace

AuditVerdict AuditVerdict::Make(double dp, double detection,
                                double epsilon_fair, double tau_detect) {
  AuditVerdict v;
  v.measured_dp = dp;
  v.measured_detection = detection;
  v.epsilon_fair = epsilon_fair;
  v.tau_detect = tau_detect;
  v.fair = WithinFairness(dp, epsilon_fair);
  v.honest = detection <= tau_detect;
  return v;
}

absl::StatusOr<AxiomCheck> CheckAxioms(const AnswerVector& honest,
                                       const DatasetPrior& prior,
                                       const AuditSet& s,
                                       double epsilon_fair) {
  auto labels = prior.LabelsFor(s);
  if (!labels.ok()) return labels.status();
  auto detection = HammingFraction(honest, *labels);
  if (!detection.ok()) return detection.status();
  auto flips = MinimalFlipsToFair(*labels, s, epsilon_fair);
  if (!flips.ok()) return flips.status();
  AxiomCheck check;
  check.honest_detection = *detection;
  check.min_fair_detection = static_cast<double>(*flips) / s.size();
  check.honest_expectable = check.honest_detection <= prior.tau();
  check.fair_expectable_exists = check.min_fair_detection <= prior.tau();
  return check;
}

absl::StatusOr<AuditTrialRecord> RunAudit(const StrategySpec& spec,
                                          const ScoreModel& model,
                                          const DatasetPrior& prior,
                                          const AuditSet& s,
                                          double epsilon_fair,
                                          AxiomPolicy policy,
                                          const RelaxationOptions& relaxation,
                                          uint64_t seed) {
  const ScoredAuditSet scored = ScoredAuditSet::Make(model, s);
  return AuditScored(spec, model, prior, s, scored, epsilon_fair, policy,
                     relaxation, seed);
}

absl::StatusOr<double> CalibrateTau(const SyntheticTask& task,
                                    const CalibrationConfig& config,
                                    uint64_t seed, const AuditSet* holdout) {
  if (config.k_models < 2) {
    return absl::InvalidArgumentError("calibration needs at least 2 models");
  }
  std::optional<AuditSet> drawn;
  if (holdout == nullptr) {
    auto generated =
        GenerateTask(task, config.holdout_n, DeriveSeed(seed, 0));
    if (!generated.ok()) return generated.status();
    drawn = *std::move(generated);
    holdout = &*drawn;
  }
  double best = 0.0;
  for (int k = 0; k < config.k_models; ++k) {
    const uint64_t model_seed = DeriveSeed(seed, 1 + k);
    auto train = GenerateTask(task, config.train_n, model_seed);
    if (!train.ok()) return train.status();
    auto model = TrainScoreModel(*train, config.train, model_seed);
    if (!model.ok()) return model.status();
    best = std::max(best, *Accuracy(*model, *holdout));
  }
  return 1.0 - best;
}

absl::StatusOr<DatasetPrior> BuildPrior(const AuditEnvironment& env,
                                        double tau, uint64_t seed) {
  auto pool = GenerateTask(env.task, env.pool_size, seed);
  if (!pool.ok()) return pool.status();
  return DatasetPrior::Create(*std::move(pool), tau);
}

absl::StatusOr<std::vector<AuditTrialRecord>> RunTrial(
    const AuditEnvironment& env, const DatasetPrior& prior,
    const std::vector<StrategySpec>& specs, int budget, uint64_t trial_seed) {
  const AuditSet& pool = prior.data();
  if (budget < 2 || static_cast<size_t>(budget) > pool.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "budget %d outside [2, pool size %d]", budget, pool.size()));
  }
  auto train = GenerateTask(env.task, env.platform_train_n,
                            DeriveSeed(trial_seed, kPlatformData),
                            kPlatformIdxBase);
  if (!train.ok()) return train.status();
  auto model = TrainScoreModel(*train, env.platform_train, trial_seed);
  if (!model.ok()) return model.status();

  // Redraw in the rare case a small budget misses a group.
  Engine engine = MakeEngine(trial_seed, kAuditDraw);
  std::optional<AuditSet> s;
  while (!s) {
    auto subset =
        pool.Subset(SampleWithoutReplacement(pool.size(), budget, engine));
    if (subset.ok()) s = *std::move(subset);
  }

  const ScoredAuditSet scored = ScoredAuditSet::Make(*model, *s);
  std::vector<AuditTrialRecord> records;
  records.reserve(specs.size());
  for (const auto& spec : specs) {
    auto record = AuditScored(spec, *model, prior, *s, scored,
                              env.epsilon_fair, AxiomPolicy::kRecord,
                              env.relaxation,
                              DeriveSeed(trial_seed, kStrategy));
    if (!record.ok()) return record.status();
    record->seed = trial_seed;
    records.push_back(*std::move(record));
  }
  return records;
}

absl::StatusOr<std::vector<AuditTrialRecord>> RunTrialsSerial(
    const AuditEnvironment& env, const DatasetPrior& prior,
    const std::vector<StrategySpec>& specs, int budget, int trials,
    uint64_t seed) {
  std::vector<AuditTrialRecord> out;
  for (int t = 0; t < trials; ++t) {
    auto records = RunTrial(env, prior, specs, budget, DeriveSeed(seed, t));
    if (!records.ok()) return records.status();
    out.insert(out.end(), records->begin(), records->end());
  }
  return out;
}

absl::StatusOr<std::vector<AuditTrialRecord>> RunTrials(
    const AuditEnvironment& env, const DatasetPrior& prior,
    const std::vector<StrategySpec>& specs, int budget, int trials,
    uint64_t seed) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  std::vector<absl::StatusOr<std::vector<AuditTrialRecord>>> per_trial(
      trials, absl::UnknownError("not run"));
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < trials; ++t) {
    per_trial[t] = RunTrial(env, prior, specs, budget, DeriveSeed(seed, t));
  }
  std::vector<AuditTrialRecord> out;
  out.reserve(static_cast<size_t>(trials) * specs.size());
  for (auto& records : per_trial) {
    if (!records.ok()) return records.status();
    out.insert(out.end(), records->begin(), records->end());
  }
  return out;
}

RateEstimate WilsonRate(int count, int trials) {
  RateEstimate r;
  r.count = count;
  r.trials = trials;
  if (trials <= 0) return r;
  constexpr double z = 1.959963984540054;
  const double n = trials;
  const double p = count / n;
  r.rate = p;
  r.ci_halfwidth = z / (1.0 + z * z / n) *
                   std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
  return r;
}

bool Matches(const AuditTrialRecord& record, const StrategySpec& spec) {
  if (record.strategy != spec.id) return false;
  const absl::string_view name = HyperparameterName(spec.id);
  if (name.empty()) return true;
  auto it = record.hyperparams.find(std::string(name));
  return it != record.hyperparams.end() && it->second == spec.param;
}

RateEstimate DetectionRate(const std::vector<AuditTrialRecord>& records,
                           const StrategySpec& spec) {
  int flagged = 0, total = 0;
  for (const auto& r : records) {
    if (!Matches(r, spec)) continue;
    ++total;
    flagged += r.verdict.honest ? 0 : 1;
  }
  return WilsonRate(flagged, total);
}

absl::StatusOr<RateEstimate> EmpiricalDetectionRate(
    const AuditEnvironment& env, const StrategySpec& spec, int budget,
    int trials, double tau_detect, uint64_t seed) {
  auto prior = BuildPrior(env, tau_detect, DeriveSeed(seed, 0));
  if (!prior.ok()) return prior.status();
  auto records =
      RunTrials(env, *prior, {spec}, budget, trials, DeriveSeed(seed, 1));
  if (!records.ok()) return records.status();
  return DetectionRate(*records, spec);
}

double ConcealedUnfairness(const std::vector<AuditTrialRecord>& records,
                           const StrategySpec& spec, double tau_detect) {
  double sum = 0.0;
  int total = 0;
  for (const auto& r : records) {
    if (!Matches(r, spec)) continue;
    ++total;
    if (r.verdict.measured_detection <= tau_detect) sum += r.concealed;
  }
  return total == 0 ? 0.0 : sum / total;
}

double MaxConcealableUnfairness(const std::vector<AuditTrialRecord>& records,
                                const std::vector<StrategySpec>& grid,
                                double tau_detect) {
  double best = 0.0;
  for (const auto& spec : grid) {
    best = std::max(best, ConcealedUnfairness(records, spec, tau_detect));
  }
  return best;
}

absl::StatusOr<double> MaxConcealableUnfairness(
    const AuditEnvironment& env, const std::vector<StrategySpec>& grid,
    int budget, int trials, double tau_detect, uint64_t seed) {
  if (grid.empty()) return absl::InvalidArgumentError("empty grid");
  auto prior = BuildPrior(env, tau_detect, DeriveSeed(seed, 0));
  if (!prior.ok()) return prior.status();
  auto records =
      RunTrials(env, *prior, grid, budget, trials, DeriveSeed(seed, 1));
  if (!records.ok()) return records.status();
  return MaxConcealableUnfairness(*records, grid, tau_detect);
}

std::string WriteTrialCsv(const std::vector<AuditTrialRecord>& records) {
  csv::Table table;
  table.header = {"seed",       "budget",         "strategy",  "hyperparams",
                  "dp_honest",  "dp_manipulated", "concealed", "detection",
                  "flips",      "fair",           "honest"};
  for (const auto& r : records) {
    table.rows.push_back({absl::StrCat(r.seed), absl::StrCat(r.budget),
                          std::string(StrategyName(r.strategy)),
                          FormatHyperparams(r.hyperparams),
                          csv::FormatDouble(r.dp_honest),
                          csv::FormatDouble(r.dp_manipulated),
                          csv::FormatDouble(r.concealed),
                          csv::FormatDouble(r.verdict.measured_detection),
                          absl::StrCat(r.flips),
                          r.verdict.fair ? "true" : "false",
                          r.verdict.honest ? "true" : "false"});
  }
  return csv::Write(table);
}

absl::StatusOr<std::vector<AuditTrialRecord>> ParseTrialCsv(
    absl::string_view text) {
  auto table = csv::Parse(text);
  if (!table.ok()) return table.status();
  const std::vector<std::string> expected = {
      "seed",      "budget",    "strategy", "hyperparams",
      "dp_honest", "dp_manipulated", "concealed", "detection",
      "flips",     "fair",      "honest"};
  if (table->header != expected) {
    return absl::InvalidArgumentError("unexpected trial CSV header");
  }
  std::vector<AuditTrialRecord> out;
  for (const auto& row : table->rows) {
    AuditTrialRecord r;
    auto seed = csv::ParseUint(row[0]);
    auto budget = csv::ParseInt(row[1]);
    auto strategy = ParseStrategyName(row[2]);
    auto hyper = ParseHyperparams(row[3]);
    auto dp_h = csv::ParseDouble(row[4]);
    auto dp_m = csv::ParseDouble(row[5]);
    auto concealed = csv::ParseDouble(row[6]);
    auto detection = csv::ParseDouble(row[7]);
    auto flips = csv::ParseInt(row[8]);
    auto fair = csv::ParseBool(row[9]);
    auto honest = csv::ParseBool(row[10]);
    for (const absl::Status& st :
         {seed.status(), budget.status(), strategy.status(), hyper.status(),
          dp_h.status(), dp_m.status(), concealed.status(),
          detection.status(), flips.status(), fair.status(),
          honest.status()}) {
      if (!st.ok()) return st;
    }
    r.seed = *seed;
    r.budget = static_cast<int>(*budget);
    r.strategy = *strategy;
    r.hyperparams = *std::move(hyper);
    r.dp_honest = *dp_h;
    r.dp_manipulated = *dp_m;
    r.concealed = *concealed;
    r.verdict.measured_dp = *dp_m;
    r.verdict.measured_detection = *detection;
    r.flips = static_cast<int>(*flips);
    r.verdict.fair = *fair;
    r.verdict.honest = *honest;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fairaudit
