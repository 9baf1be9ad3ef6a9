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

#include "fairaudit/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "fairaudit/csv.h"
#include "fairaudit/geometry.h"
#include "fairaudit/random.h"

namespace fairaudit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Seed streams under the scenario seed.
enum ScenarioStream : uint64_t {
  kPool = 1,
  kCalibration = 2,
  kImpossibility = 3,
  kBudgetBase = 1000,  // + budget
};

std::string Bool(bool b) { return b ? "true" : "false"; }
std::string Num(double v) { return csv::FormatDouble(v); }

// Field access by header name with the first parse error kept.
class RowReader {
 public:
  RowReader(const csv::Table& table, std::vector<std::string> expected)
      : table_(table) {
    if (table.header != expected) {
      status_ = absl::InvalidArgumentError(
          absl::StrCat("unexpected CSV header, want ",
                       absl::StrJoin(expected, ",")));
    }
  }

  const absl::Status& status() const { return status_; }
  void set_row(size_t r) { row_ = &table_.rows[r]; }

  double Double(size_t col) { return Keep(csv::ParseDouble(Field(col))); }
  int Int(size_t col) {
    return static_cast<int>(Keep(csv::ParseInt(Field(col))));
  }
  uint64_t Uint(size_t col) { return Keep(csv::ParseUint(Field(col))); }
  bool Bool(size_t col) { return Keep(csv::ParseBool(Field(col))); }
  StrategyId Strategy(size_t col) {
    return Keep(ParseStrategyName(Field(col)));
  }

 private:
  absl::string_view Field(size_t col) const { return (*row_)[col]; }

  template <typename T>
  T Keep(absl::StatusOr<T> value) {
    if (value.ok()) return *value;
    if (status_.ok()) status_ = value.status();
    return T{};
  }

  const csv::Table& table_;
  const std::vector<std::string>* row_ = nullptr;
  absl::Status status_;
};

template <typename Row, typename Fill>
absl::StatusOr<std::vector<Row>> ParseRows(absl::string_view text,
                                           std::vector<std::string> header,
                                           Fill fill) {
  auto table = csv::Parse(text);
  if (!table.ok()) return table.status();
  RowReader reader(*table, std::move(header));
  if (!reader.status().ok()) return reader.status();
  std::vector<Row> rows;
  for (size_t r = 0; r < table->rows.size(); ++r) {
    reader.set_row(r);
    rows.push_back(fill(reader));
    if (!reader.status().ok()) return reader.status();
  }
  return rows;
}

const std::vector<std::string>& TheoryHeader() {
  static const auto* h = new std::vector<std::string>{
      "n", "x", "p_uf_decomposition", "p_uf_printed", "lower_bound", "gamma"};
  return *h;
}

const std::vector<std::string>& ValidationHeader() {
  static const auto* h = new std::vector<std::string>{
      "n",         "x",          "closed_form",       "quadrature",
      "mc_estimate", "mc_stderr", "printed",          "quad_ok",
      "mc_ok",     "printed_divergent", "lower_bound", "lower_bound_holds"};
  return *h;
}

const std::vector<std::string>& SweepHeader() {
  static const auto* h = new std::vector<std::string>{
      "budget",         "strategy",        "param",
      "trials",         "mean_detection",  "sd_detection",
      "mean_concealed", "sd_concealed",    "mean_dp_honest",
      "mean_dp_manipulated", "detection_rate", "tau"};
  return *h;
}

const std::vector<std::string>& BudgetHeader() {
  static const auto* h = new std::vector<std::string>{
      "budget",          "strategy",       "best_param",
      "max_concealable", "detection_rate", "tau",
      "honest_false_positive_rate", "honest_false_positive_ci"};
  return *h;
}

const std::vector<std::string>& ImpossibilityHeader() {
  static const auto* h = new std::vector<std::string>{
      "seed",      "budget",     "feasible",      "detected",
      "fair",      "detection",  "min_fair_detection", "dp_honest",
      "dp_manipulated", "concealed", "flips"};
  return *h;
}

// Sample standard deviation (n - 1); 0 for fewer than two values.
std::pair<double, double> MeanSd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / v.size();
  if (v.size() < 2) return {mean, 0.0};
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / (v.size() - 1))};
}

}  // namespace

absl::StatusOr<std::vector<TheoryRow>> TheoryTable(
    const std::vector<int>& n_list, const std::vector<double>& x_grid) {
  std::vector<TheoryRow> rows;
  for (int n : n_list) {
    for (double x : x_grid) {
      if (!(x >= 0.0 && x <= 1.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("x must lie in [0, 1], got ", x));
      }
      geometry::GeometryParams g;
      g.n = n;
      g.tau = 1.0;
      g.delta = x;
      auto p = geometry::DetectionRate(g);
      if (!p.ok()) return p.status();
      auto printed = geometry::DetectionRatePrinted(g);
      if (!printed.ok()) return printed.status();
      auto bound = geometry::DetectionRateLowerBound(g);
      TheoryRow row;
      row.n = n;
      row.x = x;
      row.p_uf_decomposition = *p;
      row.p_uf_printed = *printed;
      row.lower_bound = bound.ok() ? *bound : kNaN;
      row.gamma = geometry::LowerBoundExtremum(n);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string WriteTheoryCsv(const std::vector<TheoryRow>& rows) {
  csv::Table t;
  t.header = TheoryHeader();
  for (const auto& r : rows) {
    t.rows.push_back({absl::StrCat(r.n), Num(r.x), Num(r.p_uf_decomposition),
                      Num(r.p_uf_printed), Num(r.lower_bound), Num(r.gamma)});
  }
  return csv::Write(t);
}

absl::StatusOr<std::vector<TheoryRow>> ParseTheoryCsv(absl::string_view text) {
  return ParseRows<TheoryRow>(text, TheoryHeader(), [](RowReader& in) {
    TheoryRow r;
    r.n = in.Int(0);
    r.x = in.Double(1);
    r.p_uf_decomposition = in.Double(2);
    r.p_uf_printed = in.Double(3);
    r.lower_bound = in.Double(4);
    r.gamma = in.Double(5);
    return r;
  });
}

bool ConsistentWithMonteCarlo(double value, double estimate,
                              int64_t samples) {
  if (!(value >= 0.0 && value <= 1.0)) return false;
  const double se = std::sqrt(value * (1.0 - value) / samples);
  return std::fabs(value - estimate) <= kMonteCarloSigmas * se;
}

absl::StatusOr<std::vector<ValidationRow>> ValidateTheory(
    const std::vector<int>& n_list, const std::vector<double>& x_grid,
    int64_t samples, uint64_t seed) {
  if (samples < 10000) {
    return absl::InvalidArgumentError("validation needs >= 10000 samples");
  }
  auto theory = TheoryTable(n_list, x_grid);
  if (!theory.ok()) return theory.status();
  std::vector<ValidationRow> rows;
  uint64_t point = 0;
  for (const TheoryRow& t : *theory) {
    geometry::GeometryParams g;
    g.n = t.n;
    g.tau = 1.0;
    g.delta = t.x;
    auto quad = geometry::QuadratureDetectionRate(g);
    if (!quad.ok()) return quad.status();
    auto mc = geometry::MonteCarloDetectionRate(g, samples,
                                                DeriveSeed(seed, point++));
    if (!mc.ok()) return mc.status();
    ValidationRow r;
    r.n = t.n;
    r.x = t.x;
    r.closed_form = t.p_uf_decomposition;
    r.quadrature = *quad;
    r.mc_estimate = mc->estimate;
    r.mc_stderr = mc->std_error;
    r.printed = t.p_uf_printed;
    r.quad_ok = std::fabs(r.closed_form - r.quadrature) <= kQuadratureTolerance;
    r.mc_ok = ConsistentWithMonteCarlo(r.closed_form, r.mc_estimate, samples);
    r.printed_divergent =
        std::fabs(r.printed - r.quadrature) > kPrintedGapThreshold &&
        !ConsistentWithMonteCarlo(r.printed, r.mc_estimate, samples);
    r.lower_bound = t.lower_bound;
    r.lower_bound_holds = r.lower_bound <= r.closed_form;  // false for NaN
    rows.push_back(r);
  }
  return rows;
}

bool AllOraclesAgree(const std::vector<ValidationRow>& rows) {
  for (const auto& r : rows) {
    if (!r.quad_ok || !r.mc_ok) return false;
  }
  return true;
}

std::string WriteValidationCsv(const std::vector<ValidationRow>& rows) {
  csv::Table t;
  t.header = ValidationHeader();
  for (const auto& r : rows) {
    t.rows.push_back({absl::StrCat(r.n), Num(r.x), Num(r.closed_form),
                      Num(r.quadrature), Num(r.mc_estimate), Num(r.mc_stderr),
                      Num(r.printed), Bool(r.quad_ok), Bool(r.mc_ok),
                      Bool(r.printed_divergent), Num(r.lower_bound),
                      Bool(r.lower_bound_holds)});
  }
  return csv::Write(t);
}

absl::StatusOr<std::vector<ValidationRow>> ParseValidationCsv(
    absl::string_view text) {
  return ParseRows<ValidationRow>(text, ValidationHeader(), [](RowReader& in) {
    ValidationRow r;
    r.n = in.Int(0);
    r.x = in.Double(1);
    r.closed_form = in.Double(2);
    r.quadrature = in.Double(3);
    r.mc_estimate = in.Double(4);
    r.mc_stderr = in.Double(5);
    r.printed = in.Double(6);
    r.quad_ok = in.Bool(7);
    r.mc_ok = in.Bool(8);
    r.printed_divergent = in.Bool(9);
    r.lower_bound = in.Double(10);
    r.lower_bound_holds = in.Bool(11);
    return r;
  });
}

absl::StatusOr<AuditSetup> PrepareAudit(const Scenario& scenario) {
  if (absl::Status st = scenario.Validate(); !st.ok()) return st;
  const AuditEnvironment env = scenario.Environment();
  auto pool = BuildPrior(env, 0.0, DeriveSeed(scenario.seed, kPool));
  if (!pool.ok()) return pool.status();
  double tau = 0.0;
  bool calibrated = false;
  if (scenario.tau) {
    tau = *scenario.tau;
  } else {
    auto calibrated_tau =
        CalibrateTau(scenario.task, scenario.calibration,
                     DeriveSeed(scenario.seed, kCalibration), &pool->data());
    if (!calibrated_tau.ok()) return calibrated_tau.status();
    tau = *calibrated_tau;
    calibrated = true;
  }
  auto prior = DatasetPrior::Create(pool->data(), tau);
  if (!prior.ok()) return prior.status();
  return AuditSetup{*std::move(prior), tau, calibrated};
}

absl::StatusOr<std::map<int, std::vector<AuditTrialRecord>>> RunBudgetTrials(
    const Scenario& scenario, const AuditSetup& setup) {
  const AuditEnvironment env = scenario.Environment();
  const std::vector<StrategySpec> grid = scenario.Grid();
  std::map<int, std::vector<AuditTrialRecord>> out;
  for (int budget : scenario.budgets) {
    auto records =
        RunTrials(env, setup.prior, grid, budget, scenario.trials,
                  DeriveSeed(scenario.seed, kBudgetBase + budget));
    if (!records.ok()) return records.status();
    out[budget] = *std::move(records);
  }
  return out;
}

std::vector<SweepRow> SummarizeSweep(
    const std::map<int, std::vector<AuditTrialRecord>>& records,
    const std::vector<StrategySpec>& grid, double tau) {
  std::vector<SweepRow> rows;
  for (const auto& [budget, recs] : records) {
    for (const auto& spec : grid) {
      std::vector<double> detection, concealed;
      double dp_h = 0.0, dp_m = 0.0;
      for (const auto& r : recs) {
        if (!Matches(r, spec)) continue;
        detection.push_back(r.verdict.measured_detection);
        concealed.push_back(r.concealed);
        dp_h += r.dp_honest;
        dp_m += r.dp_manipulated;
      }
      SweepRow row;
      row.budget = budget;
      row.strategy = spec.id;
      row.param = spec.param;
      row.trials = static_cast<int>(detection.size());
      std::tie(row.mean_detection, row.sd_detection) = MeanSd(detection);
      std::tie(row.mean_concealed, row.sd_concealed) = MeanSd(concealed);
      if (row.trials > 0) {
        row.mean_dp_honest = dp_h / row.trials;
        row.mean_dp_manipulated = dp_m / row.trials;
      }
      row.detection_rate = DetectionRate(recs, spec).rate;
      row.tau = tau;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string WriteSweepCsv(const std::vector<SweepRow>& rows) {
  csv::Table t;
  t.header = SweepHeader();
  for (const auto& r : rows) {
    t.rows.push_back({absl::StrCat(r.budget),
                      std::string(StrategyName(r.strategy)), Num(r.param),
                      absl::StrCat(r.trials), Num(r.mean_detection),
                      Num(r.sd_detection), Num(r.mean_concealed),
                      Num(r.sd_concealed), Num(r.mean_dp_honest),
                      Num(r.mean_dp_manipulated), Num(r.detection_rate),
                      Num(r.tau)});
  }
  return csv::Write(t);
}

absl::StatusOr<std::vector<SweepRow>> ParseSweepCsv(absl::string_view text) {
  return ParseRows<SweepRow>(text, SweepHeader(), [](RowReader& in) {
    SweepRow r;
    r.budget = in.Int(0);
    r.strategy = in.Strategy(1);
    r.param = in.Double(2);
    r.trials = in.Int(3);
    r.mean_detection = in.Double(4);
    r.sd_detection = in.Double(5);
    r.mean_concealed = in.Double(6);
    r.sd_concealed = in.Double(7);
    r.mean_dp_honest = in.Double(8);
    r.mean_dp_manipulated = in.Double(9);
    r.detection_rate = in.Double(10);
    r.tau = in.Double(11);
    return r;
  });
}

std::vector<BudgetRow> SummarizeBudgets(
    const std::map<int, std::vector<AuditTrialRecord>>& records,
    const std::vector<StrategySpec>& grid, double tau) {
  std::vector<BudgetRow> rows;
  for (const auto& [budget, recs] : records) {
    const RateEstimate fp = DetectionRate(recs, {StrategyId::kHonest, 0.0});
    std::map<StrategyId, BudgetRow> best;
    for (const auto& spec : grid) {
      const double value = ConcealedUnfairness(recs, spec, tau);
      auto it = best.find(spec.id);
      if (it != best.end() && value <= it->second.max_concealable) continue;
      BudgetRow row;
      row.budget = budget;
      row.strategy = spec.id;
      row.best_param = spec.param;
      row.max_concealable = value;
      row.detection_rate = DetectionRate(recs, spec).rate;
      row.tau = tau;
      row.honest_false_positive_rate = fp.rate;
      row.honest_false_positive_ci = fp.ci_halfwidth;
      best[spec.id] = row;
    }
    for (const auto& [id, row] : best) rows.push_back(row);
  }
  return rows;
}

double MaxManipulativeConcealable(const std::vector<BudgetRow>& rows,
                                  int budget) {
  double best = 0.0;
  for (const auto& r : rows) {
    if (r.budget == budget && r.strategy != StrategyId::kHonest) {
      best = std::max(best, r.max_concealable);
    }
  }
  return best;
}

std::string WriteBudgetCsv(const std::vector<BudgetRow>& rows) {
  csv::Table t;
  t.header = BudgetHeader();
  for (const auto& r : rows) {
    t.rows.push_back({absl::StrCat(r.budget),
                      std::string(StrategyName(r.strategy)),
                      Num(r.best_param), Num(r.max_concealable),
                      Num(r.detection_rate), Num(r.tau),
                      Num(r.honest_false_positive_rate),
                      Num(r.honest_false_positive_ci)});
  }
  return csv::Write(t);
}

absl::StatusOr<std::vector<BudgetRow>> ParseBudgetCsv(absl::string_view text) {
  return ParseRows<BudgetRow>(text, BudgetHeader(), [](RowReader& in) {
    BudgetRow r;
    r.budget = in.Int(0);
    r.strategy = in.Strategy(1);
    r.best_param = in.Double(2);
    r.max_concealable = in.Double(3);
    r.detection_rate = in.Double(4);
    r.tau = in.Double(5);
    r.honest_false_positive_rate = in.Double(6);
    r.honest_false_positive_ci = in.Double(7);
    return r;
  });
}

std::vector<ImpossibilityRow> ImpossibilityRows(
    const std::vector<AuditTrialRecord>& records) {
  std::vector<ImpossibilityRow> rows;
  for (const auto& r : records) {
    ImpossibilityRow row;
    row.seed = r.seed;
    row.budget = r.budget;
    row.feasible = r.axioms.fair_expectable_exists;
    row.detected = !r.verdict.honest;
    row.fair = r.verdict.fair;
    row.detection = r.verdict.measured_detection;
    row.min_fair_detection = r.axioms.min_fair_detection;
    row.dp_honest = r.dp_honest;
    row.dp_manipulated = r.dp_manipulated;
    row.concealed = r.concealed;
    row.flips = r.flips;
    rows.push_back(row);
  }
  return rows;
}

ImpossibilitySummary SummarizeImpossibility(
    const std::vector<ImpossibilityRow>& rows, double tau) {
  ImpossibilitySummary s;
  s.trials = static_cast<int>(rows.size());
  s.tau = tau;
  double concealed = 0.0;
  for (const auto& r : rows) {
    if (!r.feasible) continue;
    ++s.feasible;
    if (r.detected) ++s.detected_feasible;
    if (r.fair && !r.detected) ++s.fair_and_honest_feasible;
    concealed += r.concealed;
  }
  if (s.feasible > 0) s.mean_concealed_feasible = concealed / s.feasible;
  return s;
}

absl::StatusOr<std::vector<ImpossibilityRow>> RunImpossibility(
    const Scenario& scenario, const AuditSetup& setup) {
  auto records = RunTrials(
      scenario.Environment(), setup.prior,
      {{StrategyId::kPriorAware, scenario.epsilon_fair}},
      scenario.impossibility_budget, scenario.impossibility_trials,
      DeriveSeed(scenario.seed, kImpossibility));
  if (!records.ok()) return records.status();
  return ImpossibilityRows(*records);
}

std::string WriteImpossibilityCsv(const std::vector<ImpossibilityRow>& rows) {
  csv::Table t;
  t.header = ImpossibilityHeader();
  for (const auto& r : rows) {
    t.rows.push_back({absl::StrCat(r.seed), absl::StrCat(r.budget),
                      Bool(r.feasible), Bool(r.detected), Bool(r.fair),
                      Num(r.detection), Num(r.min_fair_detection),
                      Num(r.dp_honest), Num(r.dp_manipulated),
                      Num(r.concealed), absl::StrCat(r.flips)});
  }
  return csv::Write(t);
}

absl::StatusOr<std::vector<ImpossibilityRow>> ParseImpossibilityCsv(
    absl::string_view text) {
  return ParseRows<ImpossibilityRow>(
      text, ImpossibilityHeader(), [](RowReader& in) {
        ImpossibilityRow r;
        r.seed = in.Uint(0);
        r.budget = in.Int(1);
        r.feasible = in.Bool(2);
        r.detected = in.Bool(3);
        r.fair = in.Bool(4);
        r.detection = in.Double(5);
        r.min_fair_detection = in.Double(6);
        r.dp_honest = in.Double(7);
        r.dp_manipulated = in.Double(8);
        r.concealed = in.Double(9);
        r.flips = in.Int(10);
        return r;
      });
}

std::string WriteImpossibilitySummaryCsv(const ImpossibilitySummary& s) {
  csv::Table t;
  t.header = {"trials", "feasible", "detected_feasible",
              "fair_and_honest_feasible", "detection_rate_feasible",
              "mean_concealed_feasible", "tau"};
  const double rate =
      s.feasible > 0 ? static_cast<double>(s.detected_feasible) / s.feasible
                     : 0.0;
  t.rows.push_back({absl::StrCat(s.trials), absl::StrCat(s.feasible),
                    absl::StrCat(s.detected_feasible),
                    absl::StrCat(s.fair_and_honest_feasible), Num(rate),
                    Num(s.mean_concealed_feasible), Num(s.tau)});
  return csv::Write(t);
}

}  // namespace fairaudit
