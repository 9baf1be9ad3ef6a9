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

#ifndef FAIRAUDIT_PLATFORM_H_
#define FAIRAUDIT_PLATFORM_H_

// The platform's side of the audit: a synthetic prediction task standing in
// for a real dataset, and a logistic scoring model trained on it.

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fairaudit/audit_core.h"

namespace fairaudit {

// Two-group Gaussian task. Group-0 features are N(0, I), group-1 features
// N(group_mean_shift, I). Labels are Bernoulli(sigmoid(true_weights . x +
// intercept + group_bias * a)), then flipped with probability label_noise.
struct SyntheticTask {
  int feature_dim = 2;
  double group1_rate = 0.5;
  std::vector<double> group_mean_shift = {0.0, 0.0};
  std::vector<double> true_weights = {1.0, 1.0};
  double intercept = 0.0;
  double group_bias = 0.0;
  double label_noise = 0.0;

  absl::Status Validate() const;

  // One strong feature with 2% label flips; learning saturates early.
  static SyntheticTask Easy();
  // Forty weak features with 20% label flips; accuracy keeps improving
  // with more training data.
  static SyntheticTask Hard();
};

// Draws n labeled samples with idx = first_idx, first_idx + 1, ...
// Redraws until both groups are present.
absl::StatusOr<AuditSet> GenerateTask(const SyntheticTask& task, int n,
                                      uint64_t seed, uint64_t first_idx = 0);

// Population DP of the generator's labels, estimated from `samples` draws.
double PopulationLabelDp(const SyntheticTask& task, int64_t samples,
                         uint64_t seed);

// Logistic scorer over the features plus the group indicator:
// score(x, a) = sigmoid(weights[0..d-1] . x + weights[d] * a + intercept).
struct ScoreModel {
  std::vector<double> weights;
  double intercept = 0.0;

  double Score(const AuditSample& sample) const;
  std::vector<double> Scores(const AuditSet& s) const;

  // Parameter vector [weights..., intercept].
  std::vector<double> Flatten() const;
  static ScoreModel Unflatten(std::span<const double> params);
};

double Sigmoid(double z);

// Mean log-loss of sigmoid(params . [x, a, 1]) against `targets`, plus
// penalty * (h . p)^2 where p are the predicted probabilities and h the
// fair-hyperplane weights of the data: a differentiable surrogate of the
// squared plug-in DP.
class LogisticObjective {
 public:
  LogisticObjective(const AuditSet& data, std::vector<double> targets,
                    double dp_penalty = 0.0);

  int num_params() const { return dim_ + 1; }

  double Value(std::span<const double> params) const;
  // Returns the value and writes the gradient.
  double ValueAndGradient(std::span<const double> params,
                          std::span<double> grad) const;

  // The two terms separately, for derivative checks.
  double LogLoss(std::span<const double> params,
                 std::span<double> grad) const;
  double DpPenalty(std::span<const double> params,
                   std::span<double> grad) const;

 private:
  double Logit(size_t i, std::span<const double> params) const;

  int dim_;  // features + group indicator
  std::vector<double> inputs_;  // row-major [x, a]
  std::vector<double> targets_;
  std::vector<double> fair_weights_;
  double dp_penalty_;
};

struct TrainOptions {
  int steps = 300;
  double learning_rate = 0.5;
  // Halve the step whenever the objective would increase. Off for plain
  // gradient descent.
  bool backtracking = false;
};

// Full-batch gradient descent from `init`. Fails if the objective becomes
// non-finite.
absl::StatusOr<std::vector<double>> MinimizeObjective(
    const LogisticObjective& objective, std::vector<double> init,
    const TrainOptions& options, std::vector<double>* loss_trace = nullptr);

// Logistic regression on a labeled set with both classes present,
// initialized at zero. `seed` is accepted for interface symmetry; zero
// initialization makes training deterministic.
absl::StatusOr<ScoreModel> TrainScoreModel(const AuditSet& train,
                                           const TrainOptions& options,
                                           uint64_t seed,
                                           std::vector<double>* loss_trace =
                                               nullptr);

// Fraction of samples whose thresholded score matches the label.
absl::StatusOr<double> Accuracy(const ScoreModel& model, const AuditSet& s);

// Thresholds scores at 0.5; ties count as positive.
AnswerVector HonestAnswers(const ScoreModel& model, const AuditSet& s);
AnswerVector ThresholdScores(std::span<const double> scores,
                             double threshold = 0.5);

// ScoreModel CSV: rows weight_0..weight_d then intercept, columns name,value.
std::string WriteScoreModelCsv(const ScoreModel& model);
absl::StatusOr<ScoreModel> ParseScoreModelCsv(absl::string_view text);

}  // namespace fairaudit

#endif  // FAIRAUDIT_PLATFORM_H_
