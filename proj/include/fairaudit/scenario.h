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

#ifndef FAIRAUDIT_SCENARIO_H_
#define FAIRAUDIT_SCENARIO_H_

// Experiment configuration. Scenario files are flat `key = value` lines with
// dotted section prefixes; '#' starts a comment and blank lines are ignored.
// Lists are comma-separated. Keys:
//
//   name, seed, out
//   task.feature_dim, task.group1_rate, task.group_mean_shift,
//   task.true_weights, task.intercept, task.group_bias, task.label_noise
//   platform.train_n, platform.steps, platform.learning_rate
//   calibration.k_models, calibration.train_n
//   audit.budgets, audit.trials, audit.epsilon_fair, audit.tau,
//   audit.pool_size
//   relaxation.steps, relaxation.learning_rate
//   impossibility.trials, impossibility.budget
//   strategies.<strategy name> = hyperparameter grid
//
// The honest strategy is always part of the grid and takes no key. Omitted
// keys keep the defaults of `Scenario`, except task.feature_dim,
// task.group_mean_shift and task.true_weights, which are required. audit.tau
// replaces calibration, and audit.pool_size = 0 means the largest budget (or
// impossibility.budget if that is larger).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "fairaudit/platform.h"
#include "fairaudit/protocol.h"
#include "fairaudit/strategies.h"

namespace fairaudit {

struct Scenario {
  std::string name = "scenario";
  SyntheticTask task;
  int platform_train_n = 10000;
  TrainOptions platform_train;
  CalibrationConfig calibration;
  std::vector<int> budgets = {100, 250, 500, 1000, 2000};
  int trials = 20;
  double epsilon_fair = 0.02;
  std::optional<double> tau;
  int pool_size = 0;
  RelaxationOptions relaxation;
  int impossibility_trials = 100;
  int impossibility_budget = 500;
  // Manipulative strategies with their grids, in strategy-id order.
  std::vector<StrategySpec> strategies;
  uint64_t seed = 1;
  std::string out = "out";

  absl::Status Validate() const;

  int EffectivePoolSize() const;
  AuditEnvironment Environment() const;
  // Honest first, then `strategies`.
  std::vector<StrategySpec> Grid() const;

  // The two built-in scenarios, identical to scenarios/*.scenario.
  static Scenario Easy();
  static Scenario Hard();
};

absl::StatusOr<Scenario> ParseScenario(absl::string_view text);
std::string WriteScenario(const Scenario& scenario);
absl::StatusOr<Scenario> LoadScenario(const std::string& path);

}  // namespace fairaudit

#endif  // FAIRAUDIT_SCENARIO_H_
