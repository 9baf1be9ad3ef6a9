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

#ifndef FAIRAUDIT_AUDIT_CORE_H_
#define FAIRAUDIT_AUDIT_CORE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace fairaudit {

// One query of an audit: model input, protected group in {0, 1} and, for the
// auditor's own labeled data, the ground-truth label.
struct AuditSample {
  uint64_t idx = 0;  // identity within the auditor's labeled pool
  std::vector<double> features;
  int group = 0;
  std::optional<int> label;
};

// The ordered query set S. Both groups are non-empty and every sample has the
// same feature dimension; both are checked at construction.
class AuditSet {
 public:
  static absl::StatusOr<AuditSet> Create(std::vector<AuditSample> samples);

  size_t size() const { return samples_.size(); }
  const AuditSample& operator[](size_t i) const { return samples_[i]; }
  const std::vector<AuditSample>& samples() const { return samples_; }
  int feature_dim() const { return feature_dim_; }
  int group_size(int group) const { return group_sizes_[group]; }
  bool fully_labeled() const;

  // Subset in the given index order (positions into this set).
  absl::StatusOr<AuditSet> Subset(std::span<const size_t> positions) const;

 private:
  AuditSet() = default;

  std::vector<AuditSample> samples_;
  int feature_dim_ = 0;
  int group_sizes_[2] = {0, 0};
};

// Binary answers aligned by position with an AuditSet.
struct AnswerVector {
  std::vector<uint8_t> bits;

  size_t size() const { return bits.size(); }
  bool operator==(const AnswerVector&) const = default;
};

// The auditor's private labeled dataset and its detection threshold.
class DatasetPrior {
 public:
  static absl::StatusOr<DatasetPrior> Create(AuditSet data, double tau);

  const AuditSet& data() const { return data_; }
  double tau() const { return tau_; }

  // Label of pool sample `idx`, if it belongs to the pool.
  std::optional<int> LabelOf(uint64_t idx) const;

  // The prior's labels restricted to (and aligned with) `s`.
  absl::StatusOr<AnswerVector> LabelsFor(const AuditSet& s) const;

 private:
  DatasetPrior(AuditSet data, double tau);

  AuditSet data_;
  double tau_;
  std::unordered_map<uint64_t, size_t> position_;
};

// Normal vector of the fair hyperplane {v : dp(v) = 0} on a finite audit
// set: 1/|S_1| on group-1 positions and -1/|S_0| on group-0 positions.
struct FairHyperplane {
  std::vector<double> weights;

  double Dot(std::span<const double> v) const;
  double SquaredNorm() const;
};

// Per-group sizes and positive counts; demographic parity depends on
// nothing else.
struct GroupCounts {
  int size[2] = {0, 0};
  int positives[2] = {0, 0};

  double Dp() const;
};

// DP from counts; the single definition shared by every estimator.
double DpFromCounts(int pos0, int n0, int pos1, int n1);

// |dp| <= epsilon, with a 1e-12 slack for floating-point division.
bool WithinFairness(double dp, double epsilon);

absl::StatusOr<GroupCounts> CountPositives(const AnswerVector& answers,
                                           const AuditSet& s);

// Plug-in demographic parity P(h=1 | a=1) - P(h=1 | a=0) on s.
absl::StatusOr<double> DpEstimate(const AnswerVector& answers,
                                  const AuditSet& s);

// Normalized Hamming disagreement between the answers and the prior's labels
// on s.
absl::StatusOr<double> DetectionScore(const AnswerVector& answers,
                                      const DatasetPrior& prior,
                                      const AuditSet& s);

// Fraction of differing positions; the metric underlying DetectionScore.
absl::StatusOr<double> HammingFraction(const AnswerVector& a,
                                       const AnswerVector& b);
absl::StatusOr<int> HammingDistance(const AnswerVector& a,
                                    const AnswerVector& b);

FairHyperplane MakeFairHyperplane(const AuditSet& s);

// Euclidean distance of the answers (as a point of R^|S|) to the fair
// hyperplane: |dp| / sqrt(1/|S_0| + 1/|S_1|).
absl::StatusOr<double> DistanceToFairL2(const AnswerVector& answers,
                                        const AuditSet& s);

// Converts a normalized Hamming threshold into the l2 radius used by the
// ball geometry: for binary vectors ||u - v||^2 = |S| * HammingFraction.
double HammingThresholdToL2(double tau_hamming, size_t audit_size);

// Target per-group positive counts of the closest fair answer vector.
struct FairTarget {
  int positives[2] = {0, 0};
  int flips = 0;
};

// Closest binary vector (in Hamming distance) with |dp| <= epsilon, searched
// over all target counts. Ties prefer the smaller change in group 1, then in
// group 0.
absl::StatusOr<FairTarget> MinimalFairTarget(const AnswerVector& answers,
                                             const AuditSet& s,
                                             double epsilon);

absl::StatusOr<int> MinimalFlipsToFair(const AnswerVector& answers,
                                       const AuditSet& s, double epsilon);

// CSV: header idx,group,label,feature_0..feature_{d-1}; empty label allowed.
std::string WriteAuditSetCsv(const AuditSet& s);
absl::StatusOr<AuditSet> ParseAuditSetCsv(absl::string_view text);

// CSV: header idx,answer.
std::string WriteAnswersCsv(const AnswerVector& answers, const AuditSet& s);
absl::StatusOr<AnswerVector> ParseAnswersCsv(absl::string_view text,
                                             const AuditSet& s);

}  // namespace fairaudit

#endif  // FAIRAUDIT_AUDIT_CORE_H_
