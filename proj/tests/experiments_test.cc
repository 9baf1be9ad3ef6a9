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

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "fairaudit/commands.h"
#include "fairaudit/csv.h"

namespace fairaudit {
namespace {

using ::testing::HasSubstr;

// The hard task at a size that runs in a few seconds.
Scenario SmallHard() {
  Scenario s = Scenario::Hard();
  s.name = "small_hard";
  s.platform_train_n = 2000;
  s.budgets = {50, 100, 200};
  s.trials = 4;
  s.impossibility_trials = 10;
  s.impossibility_budget = 200;
  s.strategies = {{StrategyId::kOptimalProjection, 0.0},
                  {StrategyId::kOptimalProjection, 0.1},
                  {StrategyId::kRocMitigation, 0.05},
                  {StrategyId::kLabelTransport, 0.5},
                  {StrategyId::kThresholdManipulation, 0.1}};
  return s;
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

TEST(TheoryTableTest, EndpointsAndGamma) {
  const auto rows = TheoryTable({2, 3, 10}, {0.0, 0.5, 1.0});
  ASSERT_TRUE(rows.ok()) << rows.status();
  ASSERT_EQ(rows->size(), 9u);
  for (const auto& r : *rows) {
    if (r.x == 1.0) {
      EXPECT_NEAR(r.p_uf_decomposition, 1.0, 1e-12);
      EXPECT_NEAR(r.p_uf_printed, 1.0, 1e-12);
    }
    if (r.x == 0.0) {
      EXPECT_NEAR(r.p_uf_decomposition, 0.0, 1e-12);
      EXPECT_NEAR(r.p_uf_printed, 0.0, 1e-12);
    }
    EXPECT_EQ(std::isnan(r.lower_bound), r.n % 2 == 1);
  }
  EXPECT_NEAR((*rows)[0].gamma, (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
}

TEST(TheoryTableTest, RejectsOutOfRangeX) {
  EXPECT_FALSE(TheoryTable({2}, {1.5}).ok());
  EXPECT_FALSE(TheoryTable({2}, {-0.1}).ok());
  EXPECT_FALSE(TheoryTable({1}, {0.5}).ok());
}

TEST(TheoryTableTest, CsvRoundTrip) {
  const auto rows = TheoryTable({2, 5}, {0.0, 0.3, 1.0});
  ASSERT_TRUE(rows.ok());
  const std::string text = WriteTheoryCsv(*rows);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "n,x,p_uf_decomposition,p_uf_printed,lower_bound,gamma");
  const auto parsed = ParseTheoryCsv(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(WriteTheoryCsv(*parsed), text);
}

TEST(MonteCarloConsistencyTest, Cases) {
  EXPECT_TRUE(ConsistentWithMonteCarlo(1.0, 1.0, 100000));
  EXPECT_TRUE(ConsistentWithMonteCarlo(0.0, 0.0, 100000));
  EXPECT_FALSE(ConsistentWithMonteCarlo(1.0000001, 1.0, 100000));
  EXPECT_FALSE(ConsistentWithMonteCarlo(-1e-9, 0.0, 100000));
  // Four standard errors at p = 0.5 with 10^4 samples is 0.02.
  EXPECT_TRUE(ConsistentWithMonteCarlo(0.5, 0.519, 10000));
  EXPECT_FALSE(ConsistentWithMonteCarlo(0.5, 0.521, 10000));
}

TEST(ValidateTheoryTest, OraclesAgreeAndPrintedDiverges) {
  const auto rows = ValidateTheory({2, 5}, {0.0, 0.2, 0.7, 1.0}, 20000, 3);
  ASSERT_TRUE(rows.ok()) << rows.status();
  EXPECT_TRUE(AllOraclesAgree(*rows));
  for (const auto& r : *rows) {
    const bool interior = r.x > 0.0 && r.x < 1.0;
    EXPECT_EQ(r.printed_divergent, interior) << r.n << " " << r.x;
  }
}

TEST(ValidateTheoryTest, DeterministicAndRoundTrips) {
  const auto a = ValidateTheory({3}, {0.4, 0.6}, 10000, 5);
  const auto b = ValidateTheory({3}, {0.4, 0.6}, 10000, 5);
  ASSERT_TRUE(a.ok() && b.ok());
  const std::string text = WriteValidationCsv(*a);
  EXPECT_EQ(WriteValidationCsv(*b), text);
  const auto parsed = ParseValidationCsv(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(WriteValidationCsv(*parsed), text);
}

TEST(ValidateTheoryTest, RejectsTooFewSamples) {
  EXPECT_FALSE(ValidateTheory({2}, {0.5}, 9999, 1).ok());
}

TEST(PrepareAuditTest, OverrideAndCalibration) {
  Scenario s = SmallHard();
  s.tau = 0.3;
  const auto fixed = PrepareAudit(s);
  ASSERT_TRUE(fixed.ok()) << fixed.status();
  EXPECT_FALSE(fixed->calibrated);
  EXPECT_DOUBLE_EQ(fixed->tau, 0.3);
  EXPECT_DOUBLE_EQ(fixed->prior.tau(), 0.3);
  EXPECT_EQ(fixed->prior.data().size(), 200u);

  s.tau.reset();
  const auto a = PrepareAudit(s);
  const auto b = PrepareAudit(s);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_TRUE(a->calibrated);
  EXPECT_EQ(a->tau, b->tau);
  EXPECT_GE(a->tau, 0.15);
}

class SmallHardExperiment : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    scenario_ = new Scenario(SmallHard());
    auto setup = PrepareAudit(*scenario_);
    ASSERT_TRUE(setup.ok());
    setup_ = new AuditSetup(*std::move(setup));
    auto records = RunBudgetTrials(*scenario_, *setup_);
    ASSERT_TRUE(records.ok());
    records_ = new std::map<int, std::vector<AuditTrialRecord>>(
        *std::move(records));
  }
  static void TearDownTestSuite() {
    delete scenario_;
    delete setup_;
    delete records_;
  }

  static Scenario* scenario_;
  static AuditSetup* setup_;
  static std::map<int, std::vector<AuditTrialRecord>>* records_;
};

Scenario* SmallHardExperiment::scenario_ = nullptr;
AuditSetup* SmallHardExperiment::setup_ = nullptr;
std::map<int, std::vector<AuditTrialRecord>>* SmallHardExperiment::records_ =
    nullptr;

TEST_F(SmallHardExperiment, RecordsPerBudget) {
  ASSERT_EQ(records_->size(), 3u);
  for (const auto& [budget, recs] : *records_) {
    EXPECT_EQ(recs.size(), scenario_->Grid().size() * 4);
    for (const auto& r : recs) EXPECT_EQ(r.budget, budget);
  }
}

TEST_F(SmallHardExperiment, AddingABudgetKeepsTheOthers) {
  Scenario more = *scenario_;
  more.budgets = {50, 75, 100, 200};
  const auto records = RunBudgetTrials(more, *setup_);
  ASSERT_TRUE(records.ok());
  for (int budget : scenario_->budgets) {
    EXPECT_EQ(WriteTrialCsv(records->at(budget)),
              WriteTrialCsv(records_->at(budget)));
  }
}

TEST_F(SmallHardExperiment, SweepRows) {
  const auto rows =
      SummarizeSweep(*records_, scenario_->Grid(), setup_->tau);
  ASSERT_EQ(rows.size(), 3 * scenario_->Grid().size());
  bool conceals_most = false;
  for (const auto& r : rows) {
    EXPECT_EQ(r.trials, 4);
    if (r.strategy == StrategyId::kHonest) {
      EXPECT_DOUBLE_EQ(r.mean_concealed, 0.0);
      EXPECT_DOUBLE_EQ(r.sd_concealed, 0.0);
    } else if (r.mean_concealed >= 0.8 * std::fabs(r.mean_dp_honest)) {
      conceals_most = true;
    }
  }
  EXPECT_TRUE(conceals_most);

  // Oracle for one point.
  const SweepRow& row = rows[1];
  std::vector<double> det;
  for (const auto& r : records_->at(row.budget)) {
    if (Matches(r, {row.strategy, row.param})) {
      det.push_back(r.verdict.measured_detection);
    }
  }
  ASSERT_EQ(det.size(), 4u);
  double mean = 0.0;
  for (double d : det) mean += d / 4;
  double var = 0.0;
  for (double d : det) var += (d - mean) * (d - mean) / 3;
  EXPECT_NEAR(row.mean_detection, mean, 1e-15);
  EXPECT_NEAR(row.sd_detection, std::sqrt(var), 1e-15);
}

TEST_F(SmallHardExperiment, SweepCsvRoundTrip) {
  const std::string text = WriteSweepCsv(
      SummarizeSweep(*records_, scenario_->Grid(), setup_->tau));
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "budget,strategy,param,trials,mean_detection,sd_detection,"
            "mean_concealed,sd_concealed,mean_dp_honest,mean_dp_manipulated,"
            "detection_rate,tau");
  const auto parsed = ParseSweepCsv(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(WriteSweepCsv(*parsed), text);
}

TEST_F(SmallHardExperiment, BudgetRows) {
  const auto rows =
      SummarizeBudgets(*records_, scenario_->Grid(), setup_->tau);
  // Honest plus four manipulative strategies, per budget.
  ASSERT_EQ(rows.size(), 3u * 5u);
  for (const auto& r : rows) {
    if (r.strategy == StrategyId::kHonest) {
      EXPECT_DOUBLE_EQ(r.max_concealable, 0.0);
    }
    double best = 0.0;
    for (const auto& spec : scenario_->strategies) {
      if (spec.id == r.strategy) {
        best = std::max(best, ConcealedUnfairness(records_->at(r.budget),
                                                  spec, setup_->tau));
      }
    }
    EXPECT_DOUBLE_EQ(r.max_concealable, best);
    const RateEstimate fp = DetectionRate(records_->at(r.budget),
                                          {StrategyId::kHonest, 0.0});
    EXPECT_DOUBLE_EQ(r.honest_false_positive_rate, fp.rate);
  }
  for (int budget : scenario_->budgets) {
    EXPECT_DOUBLE_EQ(
        MaxManipulativeConcealable(rows, budget),
        MaxConcealableUnfairness(records_->at(budget), scenario_->Grid(),
                                 setup_->tau));
  }
  const std::string text = WriteBudgetCsv(rows);
  const auto parsed = ParseBudgetCsv(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(WriteBudgetCsv(*parsed), text);
}

TEST_F(SmallHardExperiment, ImpossibilityNeverDetected) {
  const auto rows = RunImpossibility(*scenario_, *setup_);
  ASSERT_TRUE(rows.ok()) << rows.status();
  ASSERT_EQ(rows->size(), 10u);
  const ImpossibilitySummary summary =
      SummarizeImpossibility(*rows, setup_->tau);
  EXPECT_EQ(summary.trials, 10);
  EXPECT_GT(summary.feasible, 0);
  EXPECT_EQ(summary.detected_feasible, 0);
  EXPECT_EQ(summary.fair_and_honest_feasible, summary.feasible);
  for (const auto& r : *rows) {
    if (!r.feasible) continue;
    // The manipulated DP is within epsilon of 0.
    EXPECT_LE(std::fabs(r.concealed - std::fabs(r.dp_honest)),
              scenario_->epsilon_fair + 1e-12);
  }
  const std::string text = WriteImpossibilityCsv(*rows);
  const auto parsed = ParseImpossibilityCsv(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(WriteImpossibilityCsv(*parsed), text);
}

TEST(ImpossibilityTest, ZeroTauIsInfeasibleEverywhere) {
  Scenario s = SmallHard();
  s.tau = 0.0;
  const auto setup = PrepareAudit(s);
  ASSERT_TRUE(setup.ok());
  const auto rows = RunImpossibility(s, *setup);
  ASSERT_TRUE(rows.ok()) << rows.status();
  const ImpossibilitySummary summary = SummarizeImpossibility(*rows, 0.0);
  EXPECT_EQ(summary.trials, 10);
  EXPECT_EQ(summary.feasible, 0);
  EXPECT_THAT(WriteImpossibilitySummaryCsv(summary),
              HasSubstr("trials,feasible,detected_feasible"));
}

class CommandTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = TempPath(::testing::UnitTest::GetInstance()
                        ->current_test_info()
                        ->name());
    std::filesystem::remove_all(dir_);
    scenario_path_ = dir_ + ".scenario";
    Scenario s = SmallHard();
    s.trials = 2;
    s.impossibility_trials = 3;
    ASSERT_TRUE(csv::WriteFile(scenario_path_, WriteScenario(s)).ok());
  }

  int Run(const std::string& command, const std::string& out) {
    CommandOptions options;
    options.command = command;
    options.scenario_path = scenario_path_;
    options.out = out;
    options.samples = 10000;
    options.n_list = {2, 4};
    options.x_grid = {0.0, 0.5, 1.0};
    return RunCommand(options, log_, err_);
  }

  std::string dir_;
  std::string scenario_path_;
  std::ostringstream log_;
  std::ostringstream err_;
};

TEST_F(CommandTest, EveryCommandIsByteDeterministic) {
  const std::map<std::string, std::vector<std::string>> files = {
      {"theory", {"theory.csv"}},
      {"validate", {"validate.csv"}},
      {"sweep", {"sweep.csv", "sweep_trials.csv"}},
      {"budget", {"budget.csv", "budget_trials.csv"}},
      {"impossibility", {"impossibility.csv", "impossibility_summary.csv"}}};
  for (const auto& [command, names] : files) {
    ASSERT_EQ(Run(command, dir_ + "/a"), kExitOk) << err_.str();
    ASSERT_EQ(Run(command, dir_ + "/b"), kExitOk) << err_.str();
    for (const auto& name : names) {
      const auto a = csv::ReadFile(dir_ + "/a/" + name);
      const auto b = csv::ReadFile(dir_ + "/b/" + name);
      ASSERT_TRUE(a.ok() && b.ok()) << name;
      EXPECT_FALSE(a->empty());
      EXPECT_EQ(*a, *b) << name;
    }
  }
}

TEST_F(CommandTest, OutputsParseWithTheirReaders) {
  ASSERT_EQ(Run("budget", dir_), kExitOk) << err_.str();
  ASSERT_EQ(Run("sweep", dir_), kExitOk) << err_.str();
  ASSERT_EQ(Run("impossibility", dir_), kExitOk) << err_.str();
  EXPECT_TRUE(ParseBudgetCsv(*csv::ReadFile(dir_ + "/budget.csv")).ok());
  EXPECT_TRUE(ParseTrialCsv(*csv::ReadFile(dir_ + "/budget_trials.csv")).ok());
  EXPECT_TRUE(ParseSweepCsv(*csv::ReadFile(dir_ + "/sweep.csv")).ok());
  EXPECT_TRUE(ParseTrialCsv(*csv::ReadFile(dir_ + "/sweep_trials.csv")).ok());
  EXPECT_TRUE(
      ParseImpossibilityCsv(*csv::ReadFile(dir_ + "/impossibility.csv")).ok());
}

TEST_F(CommandTest, SeedOverrideChangesResults) {
  CommandOptions options;
  options.command = "impossibility";
  options.scenario_path = scenario_path_;
  options.quiet = true;
  options.out = dir_ + "/s1";
  ASSERT_EQ(RunCommand(options, log_, err_), kExitOk);
  options.seed = 99;
  options.out = dir_ + "/s99";
  ASSERT_EQ(RunCommand(options, log_, err_), kExitOk);
  EXPECT_NE(*csv::ReadFile(dir_ + "/s1/impossibility.csv"),
            *csv::ReadFile(dir_ + "/s99/impossibility.csv"));
  EXPECT_TRUE(log_.str().empty());
}

TEST_F(CommandTest, ValidationFailuresExitWithOne) {
  EXPECT_EQ(Run("dance", dir_), kExitValidation);
  EXPECT_THAT(err_.str(), HasSubstr("unknown command"));

  CommandOptions options;
  options.command = "sweep";
  EXPECT_EQ(RunCommand(options, log_, err_), kExitValidation);
  EXPECT_THAT(err_.str(), HasSubstr("--scenario"));

  Scenario two = SmallHard();
  two.budgets = {50, 100};
  ASSERT_TRUE(csv::WriteFile(scenario_path_, WriteScenario(two)).ok());
  EXPECT_EQ(Run("budget", dir_), kExitValidation);
  EXPECT_THAT(err_.str(), HasSubstr("at least 3 budgets"));

  ASSERT_TRUE(csv::WriteFile(scenario_path_, "audit.trials = 0\n").ok());
  EXPECT_EQ(Run("sweep", dir_), kExitValidation);
}

}  // namespace
}  // namespace fairaudit
