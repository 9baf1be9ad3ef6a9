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

#include "fairaudit/scenario.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "fairaudit/csv.h"

namespace fairaudit {

namespace {

constexpr absl::string_view kStrategyPrefix = "strategies.";

absl::StatusOr<std::vector<double>> ParseDoubleList(absl::string_view text) {
  std::vector<double> out;
  for (absl::string_view item : absl::StrSplit(text, ',')) {
    auto value = csv::ParseDouble(absl::StripAsciiWhitespace(item));
    if (!value.ok()) return value.status();
    out.push_back(*value);
  }
  return out;
}

absl::StatusOr<std::vector<int>> ParseIntList(absl::string_view text) {
  std::vector<int> out;
  for (absl::string_view item : absl::StrSplit(text, ',')) {
    auto value = csv::ParseInt(absl::StripAsciiWhitespace(item));
    if (!value.ok()) return value.status();
    out.push_back(static_cast<int>(*value));
  }
  return out;
}

// Shortest text that parses back to the same double; scenario files are
// edited by hand.
std::string ShortDouble(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

std::string JoinDoubles(const std::vector<double>& values) {
  return absl::StrJoin(values, ", ", [](std::string* out, double v) {
    out->append(ShortDouble(v));
  });
}

using Setter = std::function<absl::Status(Scenario&, absl::string_view)>;

template <typename T>
Setter IntField(T Scenario::*field) {
  return [field](Scenario& s, absl::string_view v) -> absl::Status {
    auto parsed = csv::ParseInt(v);
    if (!parsed.ok()) return parsed.status();
    s.*field = static_cast<T>(*parsed);
    return absl::OkStatus();
  };
}

Setter DoubleSetter(std::function<double&(Scenario&)> ref) {
  return [ref](Scenario& s, absl::string_view v) -> absl::Status {
    auto parsed = csv::ParseDouble(v);
    if (!parsed.ok()) return parsed.status();
    ref(s) = *parsed;
    return absl::OkStatus();
  };
}

Setter IntSetter(std::function<int&(Scenario&)> ref) {
  return [ref](Scenario& s, absl::string_view v) -> absl::Status {
    auto parsed = csv::ParseInt(v);
    if (!parsed.ok()) return parsed.status();
    ref(s) = static_cast<int>(*parsed);
    return absl::OkStatus();
  };
}

const std::map<std::string, Setter>& Setters() {
  static const auto* setters = new std::map<std::string, Setter>{
      {"name",
       [](Scenario& s, absl::string_view v) {
         s.name = std::string(v);
         return absl::OkStatus();
       }},
      {"out",
       [](Scenario& s, absl::string_view v) {
         s.out = std::string(v);
         return absl::OkStatus();
       }},
      {"seed",
       [](Scenario& s, absl::string_view v) -> absl::Status {
         auto parsed = csv::ParseUint(v);
         if (!parsed.ok()) return parsed.status();
         s.seed = *parsed;
         return absl::OkStatus();
       }},
      {"task.feature_dim", IntSetter([](Scenario& s) -> int& {
         return s.task.feature_dim;
       })},
      {"task.group1_rate", DoubleSetter([](Scenario& s) -> double& {
         return s.task.group1_rate;
       })},
      {"task.group_mean_shift",
       [](Scenario& s, absl::string_view v) -> absl::Status {
         auto parsed = ParseDoubleList(v);
         if (!parsed.ok()) return parsed.status();
         s.task.group_mean_shift = *std::move(parsed);
         return absl::OkStatus();
       }},
      {"task.true_weights",
       [](Scenario& s, absl::string_view v) -> absl::Status {
         auto parsed = ParseDoubleList(v);
         if (!parsed.ok()) return parsed.status();
         s.task.true_weights = *std::move(parsed);
         return absl::OkStatus();
       }},
      {"task.intercept", DoubleSetter([](Scenario& s) -> double& {
         return s.task.intercept;
       })},
      {"task.group_bias", DoubleSetter([](Scenario& s) -> double& {
         return s.task.group_bias;
       })},
      {"task.label_noise", DoubleSetter([](Scenario& s) -> double& {
         return s.task.label_noise;
       })},
      {"platform.train_n", IntField(&Scenario::platform_train_n)},
      {"platform.steps", IntSetter([](Scenario& s) -> int& {
         return s.platform_train.steps;
       })},
      {"platform.learning_rate", DoubleSetter([](Scenario& s) -> double& {
         return s.platform_train.learning_rate;
       })},
      {"calibration.k_models", IntSetter([](Scenario& s) -> int& {
         return s.calibration.k_models;
       })},
      {"calibration.train_n", IntSetter([](Scenario& s) -> int& {
         return s.calibration.train_n;
       })},
      {"audit.budgets",
       [](Scenario& s, absl::string_view v) -> absl::Status {
         auto parsed = ParseIntList(v);
         if (!parsed.ok()) return parsed.status();
         s.budgets = *std::move(parsed);
         return absl::OkStatus();
       }},
      {"audit.trials", IntField(&Scenario::trials)},
      {"audit.epsilon_fair", DoubleSetter([](Scenario& s) -> double& {
         return s.epsilon_fair;
       })},
      {"audit.tau",
       [](Scenario& s, absl::string_view v) -> absl::Status {
         auto parsed = csv::ParseDouble(v);
         if (!parsed.ok()) return parsed.status();
         s.tau = *parsed;
         return absl::OkStatus();
       }},
      {"audit.pool_size", IntField(&Scenario::pool_size)},
      {"relaxation.steps", IntSetter([](Scenario& s) -> int& {
         return s.relaxation.steps;
       })},
      {"relaxation.learning_rate", DoubleSetter([](Scenario& s) -> double& {
         return s.relaxation.learning_rate;
       })},
      {"impossibility.trials", IntField(&Scenario::impossibility_trials)},
      {"impossibility.budget", IntField(&Scenario::impossibility_budget)},
  };
  return *setters;
}

absl::Status FieldError(absl::string_view field, absl::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat(field, ": ", message));
}

}  // namespace

absl::Status Scenario::Validate() const {
  if (absl::Status st = task.Validate(); !st.ok()) {
    return FieldError("task", st.message());
  }
  if (budgets.empty()) return FieldError("audit.budgets", "empty");
  for (size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] < 10) {
      return FieldError("audit.budgets", "every budget must be >= 10");
    }
    if (i > 0 && budgets[i] <= budgets[i - 1]) {
      return FieldError("audit.budgets", "must be strictly ascending");
    }
  }
  if (trials < 1) return FieldError("audit.trials", "must be >= 1");
  if (!(epsilon_fair >= 0.0 && epsilon_fair < 1.0)) {
    return FieldError("audit.epsilon_fair", "must be in [0, 1)");
  }
  if (tau && !(*tau >= 0.0 && *tau <= 1.0)) {
    return FieldError("audit.tau", "must be in [0, 1]");
  }
  if (pool_size != 0 &&
      (pool_size < budgets.back() || pool_size < impossibility_budget)) {
    return FieldError("audit.pool_size",
                      "must be 0 or at least every budget");
  }
  if (platform_train_n < 2) return FieldError("platform.train_n", "< 2");
  if (platform_train.steps < 1) return FieldError("platform.steps", "< 1");
  if (!(platform_train.learning_rate > 0.0)) {
    return FieldError("platform.learning_rate", "must be positive");
  }
  if (calibration.k_models < 2) {
    return FieldError("calibration.k_models", "must be >= 2");
  }
  if (calibration.train_n < 2) {
    return FieldError("calibration.train_n", "< 2");
  }
  if (relaxation.steps < 1) return FieldError("relaxation.steps", "< 1");
  if (!(relaxation.learning_rate > 0.0)) {
    return FieldError("relaxation.learning_rate", "must be positive");
  }
  if (impossibility_trials < 1) {
    return FieldError("impossibility.trials", "must be >= 1");
  }
  if (impossibility_budget < 10) {
    return FieldError("impossibility.budget", "must be >= 10");
  }
  for (const auto& spec : strategies) {
    const std::string field = absl::StrCat(kStrategyPrefix,
                                           StrategyName(spec.id));
    if (spec.id == StrategyId::kHonest) {
      return FieldError(field, "the honest strategy takes no grid");
    }
    if (!(spec.param >= 0.0) || std::isinf(spec.param)) {
      return FieldError(field, "hyperparameters must be finite and >= 0");
    }
    if (spec.id == StrategyId::kLabelTransport && spec.param > 1.0) {
      return FieldError(field, "t must be in [0, 1]");
    }
  }
  return absl::OkStatus();
}

int Scenario::EffectivePoolSize() const {
  if (pool_size > 0) return pool_size;
  return std::max(budgets.empty() ? 0 : budgets.back(), impossibility_budget);
}

AuditEnvironment Scenario::Environment() const {
  AuditEnvironment env;
  env.task = task;
  env.platform_train_n = platform_train_n;
  env.platform_train = platform_train;
  env.pool_size = EffectivePoolSize();
  env.epsilon_fair = epsilon_fair;
  env.relaxation = relaxation;
  return env;
}

std::vector<StrategySpec> Scenario::Grid() const {
  std::vector<StrategySpec> grid = {{StrategyId::kHonest, 0.0}};
  grid.insert(grid.end(), strategies.begin(), strategies.end());
  return grid;
}

namespace {

std::vector<StrategySpec> DefaultStrategies() {
  std::vector<StrategySpec> out;
  for (double e : {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3}) {
    out.push_back({StrategyId::kOptimalProjection, e});
  }
  for (double t : {0.01, 0.02, 0.03, 0.05, 0.075, 0.1, 0.15, 0.2}) {
    out.push_back({StrategyId::kRocMitigation, t});
  }
  for (double t : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    out.push_back({StrategyId::kLabelTransport, t});
  }
  for (double l : {0.1, 1.0, 10.0, 100.0}) {
    out.push_back({StrategyId::kLinearRelaxation, l});
  }
  for (double e : {0.0, 0.1, 0.2}) {
    out.push_back({StrategyId::kThresholdManipulation, e});
  }
  return out;
}

}  // namespace

Scenario Scenario::Easy() {
  Scenario s;
  s.name = "easy";
  s.task = SyntheticTask::Easy();
  s.strategies = DefaultStrategies();
  s.out = "out/easy";
  return s;
}

Scenario Scenario::Hard() {
  Scenario s;
  s.name = "hard";
  s.task = SyntheticTask::Hard();
  s.strategies = DefaultStrategies();
  s.out = "out/hard";
  return s;
}

absl::StatusOr<Scenario> ParseScenario(absl::string_view text) {
  Scenario scenario;
  scenario.task.feature_dim = 0;
  scenario.task.group_mean_shift.clear();
  scenario.task.true_weights.clear();
  std::set<std::string> seen;
  std::map<StrategyId, std::vector<double>> grids;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    const size_t hash = line.find('#');
    if (hash != absl::string_view::npos) line = line.substr(0, hash);
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": expected key = value"));
    }
    const std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    const absl::string_view value =
        absl::StripAsciiWhitespace(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": duplicate key ", key));
    }
    absl::Status st;
    absl::string_view strategy_name = key;
    if (absl::ConsumePrefix(&strategy_name, kStrategyPrefix)) {
      auto id = ParseStrategyName(strategy_name);
      if (!id.ok()) {
        st = id.status();
      } else {
        auto values = ParseDoubleList(value);
        if (values.ok()) {
          grids[*id] = *std::move(values);
        } else {
          st = values.status();
        }
      }
    } else {
      auto it = Setters().find(key);
      if (it == Setters().end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_number, ": unknown key ", key));
      }
      st = it->second(scenario, value);
    }
    if (!st.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": ", key, ": ", st.message()));
    }
  }
  for (const auto& [id, values] : grids) {
    for (double v : values) scenario.strategies.push_back({id, v});
  }
  if (absl::Status st = scenario.Validate(); !st.ok()) return st;
  return scenario;
}

std::string WriteScenario(const Scenario& s) {
  std::string out;
  auto line = [&out](absl::string_view key, absl::string_view value) {
    absl::StrAppend(&out, key, " = ", value, "\n");
  };
  const auto d = [](double v) { return ShortDouble(v); };
  line("name", s.name);
  line("seed", absl::StrCat(s.seed));
  line("out", s.out);
  out += "\n";
  line("task.feature_dim", absl::StrCat(s.task.feature_dim));
  line("task.group1_rate", d(s.task.group1_rate));
  line("task.group_mean_shift", JoinDoubles(s.task.group_mean_shift));
  line("task.true_weights", JoinDoubles(s.task.true_weights));
  line("task.intercept", d(s.task.intercept));
  line("task.group_bias", d(s.task.group_bias));
  line("task.label_noise", d(s.task.label_noise));
  out += "\n";
  line("platform.train_n", absl::StrCat(s.platform_train_n));
  line("platform.steps", absl::StrCat(s.platform_train.steps));
  line("platform.learning_rate", d(s.platform_train.learning_rate));
  line("calibration.k_models", absl::StrCat(s.calibration.k_models));
  line("calibration.train_n", absl::StrCat(s.calibration.train_n));
  out += "\n";
  line("audit.budgets", absl::StrJoin(s.budgets, ", "));
  line("audit.trials", absl::StrCat(s.trials));
  line("audit.epsilon_fair", d(s.epsilon_fair));
  if (s.tau) line("audit.tau", d(*s.tau));
  line("audit.pool_size", absl::StrCat(s.pool_size));
  line("relaxation.steps", absl::StrCat(s.relaxation.steps));
  line("relaxation.learning_rate", d(s.relaxation.learning_rate));
  line("impossibility.trials", absl::StrCat(s.impossibility_trials));
  line("impossibility.budget", absl::StrCat(s.impossibility_budget));
  out += "\n";
  std::map<StrategyId, std::vector<double>> grids;
  for (const auto& spec : s.strategies) grids[spec.id].push_back(spec.param);
  for (const auto& [id, values] : grids) {
    line(absl::StrCat(kStrategyPrefix, StrategyName(id)), JoinDoubles(values));
  }
  return out;
}

absl::StatusOr<Scenario> LoadScenario(const std::string& path) {
  auto text = csv::ReadFile(path);
  if (!text.ok()) return text.status();
  auto scenario = ParseScenario(*text);
  if (!scenario.ok()) {
    return absl::Status(scenario.status().code(),
                        absl::StrCat(path, ": ", scenario.status().message()));
  }
  return scenario;
}

}  // namespace fairaudit
