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

#include "fairaudit/platform.h"

#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fairaudit/csv.h"
#include "fairaudit/random.h"

namespace fairaudit {

absl::Status SyntheticTask::Validate() const {
  if (feature_dim < 1) {
    return absl::InvalidArgumentError("task.feature_dim must be >= 1");
  }
  if (!(group1_rate > 0.0 && group1_rate < 1.0)) {
    return absl::InvalidArgumentError("task.group1_rate must lie in (0, 1)");
  }
  if (static_cast<int>(group_mean_shift.size()) != feature_dim) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "task.group_mean_shift has %d entries, feature_dim is %d",
        group_mean_shift.size(), feature_dim));
  }
  if (static_cast<int>(true_weights.size()) != feature_dim) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "task.true_weights has %d entries, feature_dim is %d",
        true_weights.size(), feature_dim));
  }
  if (!(label_noise >= 0.0 && label_noise < 0.5)) {
    return absl::InvalidArgumentError("task.label_noise must lie in [0, 0.5)");
  }
  return absl::OkStatus();
}

SyntheticTask SyntheticTask::Easy() {
  SyntheticTask t;
  t.feature_dim = 1;
  t.group1_rate = 0.4;
  t.group_mean_shift = {1.0};
  t.true_weights = {16.0};
  t.intercept = -1.0;
  t.group_bias = 2.0;
  t.label_noise = 0.02;
  return t;
}

SyntheticTask SyntheticTask::Hard() {
  SyntheticTask t;
  t.feature_dim = 40;
  t.group1_rate = 0.4;
  t.group_mean_shift.assign(40, 0.0);
  t.group_mean_shift[0] = 0.5;
  t.true_weights.resize(40);
  for (int j = 0; j < 40; ++j) t.true_weights[j] = j % 2 == 0 ? 0.19 : -0.19;
  t.intercept = -0.5;
  t.group_bias = 2.0;
  t.label_noise = 0.2;
  return t;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

AuditSample DrawSample(const SyntheticTask& task, Engine& engine,
                       std::normal_distribution<double>& normal) {
  AuditSample s;
  s.group = UniformUnit(engine) < task.group1_rate ? 1 : 0;
  s.features.resize(task.feature_dim);
  double logit = task.intercept + task.group_bias * s.group;
  for (int j = 0; j < task.feature_dim; ++j) {
    s.features[j] = normal(engine) + s.group * task.group_mean_shift[j];
    logit += task.true_weights[j] * s.features[j];
  }
  int label = UniformUnit(engine) < Sigmoid(logit) ? 1 : 0;
  if (UniformUnit(engine) < task.label_noise) label = 1 - label;
  s.label = label;
  return s;
}

// log(1 + exp(z)), overflow-safe.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

absl::StatusOr<AuditSet> GenerateTask(const SyntheticTask& task, int n,
                                      uint64_t seed, uint64_t first_idx) {
  if (auto st = task.Validate(); !st.ok()) return st;
  if (n < 2) return absl::InvalidArgumentError("need at least 2 samples");
  for (uint64_t attempt = 0;; ++attempt) {
    Engine engine = MakeEngine(seed, attempt);
    std::normal_distribution<double> normal;
    std::vector<AuditSample> samples;
    samples.reserve(n);
    for (int i = 0; i < n; ++i) {
      samples.push_back(DrawSample(task, engine, normal));
      samples.back().idx = first_idx + i;
    }
    auto set = AuditSet::Create(std::move(samples));
    if (set.ok()) return set;
  }
}

double PopulationLabelDp(const SyntheticTask& task, int64_t samples,
                         uint64_t seed) {
  Engine engine = MakeEngine(seed, 0);
  std::normal_distribution<double> normal;
  int64_t count[2] = {0, 0}, positive[2] = {0, 0};
  for (int64_t i = 0; i < samples; ++i) {
    const AuditSample s = DrawSample(task, engine, normal);
    ++count[s.group];
    positive[s.group] += *s.label;
  }
  return static_cast<double>(positive[1]) / count[1] -
         static_cast<double>(positive[0]) / count[0];
}

double ScoreModel::Score(const AuditSample& sample) const {
  double z = intercept;
  for (size_t j = 0; j < sample.features.size(); ++j) {
    z += weights[j] * sample.features[j];
  }
  z += weights[sample.features.size()] * sample.group;
  return Sigmoid(z);
}

std::vector<double> ScoreModel::Scores(const AuditSet& s) const {
  std::vector<double> out;
  out.reserve(s.size());
  for (const AuditSample& sample : s.samples()) out.push_back(Score(sample));
  return out;
}

std::vector<double> ScoreModel::Flatten() const {
  std::vector<double> params = weights;
  params.push_back(intercept);
  return params;
}

ScoreModel ScoreModel::Unflatten(std::span<const double> params) {
  ScoreModel m;
  m.weights.assign(params.begin(), params.end() - 1);
  m.intercept = params.back();
  return m;
}

LogisticObjective::LogisticObjective(const AuditSet& data,
                                     std::vector<double> targets,
                                     double dp_penalty)
    : dim_(data.feature_dim() + 1),
      targets_(std::move(targets)),
      fair_weights_(MakeFairHyperplane(data).weights),
      dp_penalty_(dp_penalty) {
  inputs_.reserve(data.size() * dim_);
  for (const AuditSample& s : data.samples()) {
    inputs_.insert(inputs_.end(), s.features.begin(), s.features.end());
    inputs_.push_back(s.group);
  }
}

double LogisticObjective::Logit(size_t i,
                                std::span<const double> params) const {
  const double* x = &inputs_[i * dim_];
  double z = params[dim_];
  for (int j = 0; j < dim_; ++j) z += params[j] * x[j];
  return z;
}

double LogisticObjective::LogLoss(std::span<const double> params,
                                  std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  const size_t n = targets_.size();
  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double z = Logit(i, params);
    const double y = targets_[i];
    // -y log p - (1-y) log(1-p) = softplus(z) - y z
    loss += Softplus(z) - y * z;
    const double r = Sigmoid(z) - y;
    const double* x = &inputs_[i * dim_];
    for (int j = 0; j < dim_; ++j) grad[j] += r * x[j];
    grad[dim_] += r;
  }
  for (double& g : grad) g /= n;
  return loss / n;
}

double LogisticObjective::DpPenalty(std::span<const double> params,
                                    std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  if (dp_penalty_ == 0.0) return 0.0;
  const size_t n = targets_.size();
  double dp = 0.0;
  std::vector<double> dp_grad(num_params(), 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double p = Sigmoid(Logit(i, params));
    dp += fair_weights_[i] * p;
    const double c = fair_weights_[i] * p * (1.0 - p);
    const double* x = &inputs_[i * dim_];
    for (int j = 0; j < dim_; ++j) dp_grad[j] += c * x[j];
    dp_grad[dim_] += c;
  }
  for (int j = 0; j < num_params(); ++j) {
    grad[j] = 2.0 * dp_penalty_ * dp * dp_grad[j];
  }
  return dp_penalty_ * dp * dp;
}

double LogisticObjective::ValueAndGradient(std::span<const double> params,
                                           std::span<double> grad) const {
  std::vector<double> penalty_grad(num_params());
  const double value =
      LogLoss(params, grad) + DpPenalty(params, penalty_grad);
  for (int j = 0; j < num_params(); ++j) grad[j] += penalty_grad[j];
  return value;
}

double LogisticObjective::Value(std::span<const double> params) const {
  std::vector<double> scratch(num_params());
  return ValueAndGradient(params, scratch);
}

absl::StatusOr<std::vector<double>> MinimizeObjective(
    const LogisticObjective& objective, std::vector<double> params,
    const TrainOptions& options, std::vector<double>* loss_trace) {
  if (static_cast<int>(params.size()) != objective.num_params()) {
    return absl::InvalidArgumentError("initial parameters have wrong size");
  }
  std::vector<double> grad(params.size()), trial(params.size());
  double value = objective.ValueAndGradient(params, grad);
  if (loss_trace) loss_trace->push_back(value);
  double step = options.learning_rate;
  for (int it = 0; it < options.steps; ++it) {
    for (size_t j = 0; j < params.size(); ++j) {
      trial[j] = params[j] - step * grad[j];
    }
    double next = objective.Value(trial);
    if (options.backtracking) {
      for (int halvings = 0; halvings < 40 && !(next <= value); ++halvings) {
        step *= 0.5;
        for (size_t j = 0; j < params.size(); ++j) {
          trial[j] = params[j] - step * grad[j];
        }
        next = objective.Value(trial);
      }
      if (!(next <= value)) break;  // stationary to machine precision
    }
    if (!std::isfinite(next)) {
      return absl::InternalError(absl::StrFormat(
          "gradient descent diverged at step %d (learning rate %g)", it,
          options.learning_rate));
    }
    params.swap(trial);
    value = objective.ValueAndGradient(params, grad);
    if (loss_trace) loss_trace->push_back(value);
  }
  return params;
}

absl::StatusOr<ScoreModel> TrainScoreModel(const AuditSet& train,
                                           const TrainOptions& options,
                                           uint64_t /*seed*/,
                                           std::vector<double>* loss_trace) {
  if (!train.fully_labeled()) {
    return absl::InvalidArgumentError("training set must be fully labeled");
  }
  std::vector<double> targets;
  int positives = 0;
  for (const AuditSample& s : train.samples()) {
    targets.push_back(*s.label);
    positives += *s.label;
  }
  if (positives == 0 || positives == static_cast<int>(train.size())) {
    return absl::InvalidArgumentError("training set needs both classes");
  }
  const LogisticObjective objective(train, std::move(targets));
  auto params = MinimizeObjective(
      objective, std::vector<double>(objective.num_params(), 0.0), options,
      loss_trace);
  if (!params.ok()) return params.status();
  return ScoreModel::Unflatten(*params);
}

absl::StatusOr<double> Accuracy(const ScoreModel& model, const AuditSet& s) {
  if (!s.fully_labeled()) {
    return absl::InvalidArgumentError("accuracy needs labels");
  }
  int correct = 0;
  for (const AuditSample& sample : s.samples()) {
    const int predicted = model.Score(sample) >= 0.5 ? 1 : 0;
    correct += (predicted == *sample.label);
  }
  return static_cast<double>(correct) / s.size();
}

AnswerVector ThresholdScores(std::span<const double> scores,
                             double threshold) {
  AnswerVector out;
  out.bits.reserve(scores.size());
  for (double p : scores) out.bits.push_back(p >= threshold ? 1 : 0);
  return out;
}

AnswerVector HonestAnswers(const ScoreModel& model, const AuditSet& s) {
  return ThresholdScores(model.Scores(s));
}

std::string WriteScoreModelCsv(const ScoreModel& model) {
  csv::Table table;
  table.header = {"name", "value"};
  for (size_t j = 0; j < model.weights.size(); ++j) {
    table.rows.push_back(
        {absl::StrCat("weight_", j), csv::FormatDouble(model.weights[j])});
  }
  table.rows.push_back({"intercept", csv::FormatDouble(model.intercept)});
  return csv::Write(table);
}

absl::StatusOr<ScoreModel> ParseScoreModelCsv(absl::string_view text) {
  auto table = csv::Parse(text);
  if (!table.ok()) return table.status();
  if (table->header != std::vector<std::string>{"name", "value"}) {
    return absl::InvalidArgumentError("model CSV header must be name,value");
  }
  ScoreModel model;
  bool have_intercept = false;
  for (const auto& row : table->rows) {
    auto v = csv::ParseDouble(row[1]);
    if (!v.ok()) return v.status();
    if (row[0] == "intercept") {
      model.intercept = *v;
      have_intercept = true;
    } else if (row[0] == absl::StrCat("weight_", model.weights.size())) {
      model.weights.push_back(*v);
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unexpected model row '", row[0], "'"));
    }
  }
  if (!have_intercept || model.weights.empty()) {
    return absl::InvalidArgumentError("model CSV needs weights and intercept");
  }
  return model;
}

}  // namespace fairaudit
