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

#include "fairaudit/audit_core.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fairaudit/csv.h"

namespace fairaudit {

namespace {

absl::Status CheckAligned(size_t answers, size_t samples) {
  if (answers != samples) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "answer vector has %d entries but the audit set has %d samples",
        answers, samples));
  }
  return absl::OkStatus();
}

absl::Status CheckBinary(const AnswerVector& answers) {
  for (uint8_t b : answers.bits) {
    if (b > 1) return absl::InvalidArgumentError("answers must be 0 or 1");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<AuditSet> AuditSet::Create(std::vector<AuditSample> samples) {
  AuditSet set;
  if (!samples.empty()) {
    set.feature_dim_ = static_cast<int>(samples.front().features.size());
  }
  for (size_t i = 0; i < samples.size(); ++i) {
    const AuditSample& s = samples[i];
    if (s.group != 0 && s.group != 1) {
      return absl::InvalidArgumentError(
          absl::StrFormat("sample %d: group must be 0 or 1", s.idx));
    }
    if (s.label && *s.label != 0 && *s.label != 1) {
      return absl::InvalidArgumentError(
          absl::StrFormat("sample %d: label must be 0 or 1", s.idx));
    }
    if (static_cast<int>(s.features.size()) != set.feature_dim_) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "sample %d has %d features, expected %d", s.idx, s.features.size(),
          set.feature_dim_));
    }
    ++set.group_sizes_[s.group];
  }
  if (set.group_sizes_[0] == 0 || set.group_sizes_[1] == 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "audit set needs both groups non-empty (|S_0| = %d, |S_1| = %d)",
        set.group_sizes_[0], set.group_sizes_[1]));
  }
  set.samples_ = std::move(samples);
  return set;
}

bool AuditSet::fully_labeled() const {
  return std::all_of(samples_.begin(), samples_.end(),
                     [](const AuditSample& s) { return s.label.has_value(); });
}

absl::StatusOr<AuditSet> AuditSet::Subset(
    std::span<const size_t> positions) const {
  std::vector<AuditSample> out;
  out.reserve(positions.size());
  for (size_t p : positions) {
    if (p >= samples_.size()) {
      return absl::OutOfRangeError(absl::StrFormat("position %d", p));
    }
    out.push_back(samples_[p]);
  }
  return Create(std::move(out));
}

DatasetPrior::DatasetPrior(AuditSet data, double tau)
    : data_(std::move(data)), tau_(tau) {
  for (size_t i = 0; i < data_.size(); ++i) position_[data_[i].idx] = i;
}

absl::StatusOr<DatasetPrior> DatasetPrior::Create(AuditSet data, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("tau must lie in [0, 1], got %g", tau));
  }
  if (!data.fully_labeled()) {
    return absl::InvalidArgumentError(
        "the prior dataset must carry a label for every sample");
  }
  DatasetPrior prior(std::move(data), tau);
  if (prior.position_.size() != prior.data_.size()) {
    return absl::InvalidArgumentError("duplicate idx in prior dataset");
  }
  return prior;
}

std::optional<int> DatasetPrior::LabelOf(uint64_t idx) const {
  auto it = position_.find(idx);
  if (it == position_.end()) return std::nullopt;
  return data_[it->second].label;
}

absl::StatusOr<AnswerVector> DatasetPrior::LabelsFor(const AuditSet& s) const {
  AnswerVector labels;
  labels.bits.reserve(s.size());
  for (const AuditSample& sample : s.samples()) {
    std::optional<int> label = LabelOf(sample.idx);
    if (!label) {
      return absl::NotFoundError(absl::StrFormat(
          "audited sample %d has no label in the prior", sample.idx));
    }
    labels.bits.push_back(static_cast<uint8_t>(*label));
  }
  return labels;
}

double FairHyperplane::Dot(std::span<const double> v) const {
  double sum = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) sum += weights[i] * v[i];
  return sum;
}

double FairHyperplane::SquaredNorm() const {
  double sum = 0.0;
  for (double w : weights) sum += w * w;
  return sum;
}

double DpFromCounts(int pos0, int n0, int pos1, int n1) {
  return static_cast<double>(pos1) / n1 - static_cast<double>(pos0) / n0;
}

double GroupCounts::Dp() const {
  return DpFromCounts(positives[0], size[0], positives[1], size[1]);
}

bool WithinFairness(double dp, double epsilon) {
  return std::fabs(dp) <= epsilon + 1e-12;
}

absl::StatusOr<GroupCounts> CountPositives(const AnswerVector& answers,
                                           const AuditSet& s) {
  if (auto st = CheckAligned(answers.size(), s.size()); !st.ok()) return st;
  if (auto st = CheckBinary(answers); !st.ok()) return st;
  GroupCounts counts;
  for (size_t i = 0; i < s.size(); ++i) {
    const int g = s[i].group;
    ++counts.size[g];
    counts.positives[g] += answers.bits[i];
  }
  return counts;
}

absl::StatusOr<double> DpEstimate(const AnswerVector& answers,
                                  const AuditSet& s) {
  auto counts = CountPositives(answers, s);
  if (!counts.ok()) return counts.status();
  return counts->Dp();
}

absl::StatusOr<int> HammingDistance(const AnswerVector& a,
                                    const AnswerVector& b) {
  if (auto st = CheckAligned(a.size(), b.size()); !st.ok()) return st;
  int d = 0;
  for (size_t i = 0; i < a.size(); ++i) d += (a.bits[i] != b.bits[i]);
  return d;
}

absl::StatusOr<double> HammingFraction(const AnswerVector& a,
                                       const AnswerVector& b) {
  auto d = HammingDistance(a, b);
  if (!d.ok()) return d.status();
  if (a.size() == 0) return 0.0;
  return static_cast<double>(*d) / a.size();
}

absl::StatusOr<double> DetectionScore(const AnswerVector& answers,
                                      const DatasetPrior& prior,
                                      const AuditSet& s) {
  if (auto st = CheckAligned(answers.size(), s.size()); !st.ok()) return st;
  auto labels = prior.LabelsFor(s);
  if (!labels.ok()) return labels.status();
  return HammingFraction(answers, *labels);
}

FairHyperplane MakeFairHyperplane(const AuditSet& s) {
  FairHyperplane h;
  h.weights.reserve(s.size());
  const double w1 = 1.0 / s.group_size(1);
  const double w0 = -1.0 / s.group_size(0);
  for (const AuditSample& sample : s.samples()) {
    h.weights.push_back(sample.group == 1 ? w1 : w0);
  }
  return h;
}

absl::StatusOr<double> DistanceToFairL2(const AnswerVector& answers,
                                        const AuditSet& s) {
  auto dp = DpEstimate(answers, s);
  if (!dp.ok()) return dp.status();
  return std::fabs(*dp) /
         std::sqrt(1.0 / s.group_size(0) + 1.0 / s.group_size(1));
}

double HammingThresholdToL2(double tau_hamming, size_t audit_size) {
  return std::sqrt(tau_hamming * static_cast<double>(audit_size));
}

absl::StatusOr<FairTarget> MinimalFairTarget(const AnswerVector& answers,
                                             const AuditSet& s,
                                             double epsilon) {
  if (!(epsilon >= 0.0)) {
    return absl::InvalidArgumentError("epsilon must be non-negative");
  }
  auto counts = CountPositives(answers, s);
  if (!counts.ok()) return counts.status();
  const int n0 = counts->size[0], n1 = counts->size[1];
  const int p0 = counts->positives[0], p1 = counts->positives[1];
  auto feasible = [&](int c0, int c1) {
    return WithinFairness(DpFromCounts(c0, n0, c1, n1), epsilon);
  };

  bool found = false;
  FairTarget best;
  int best_d1 = 0, best_d0 = 0;
  for (int c0 = 0; c0 <= n0; ++c0) {
    // Feasible group-1 counts form an interval around c0 * n1 / n0; locate
    // it analytically, then settle the ends with the exact predicate.
    const double rate0 = static_cast<double>(c0) / n0;
    int lo = std::clamp(
        static_cast<int>(std::ceil((rate0 - epsilon) * n1)), 0, n1);
    int hi = std::clamp(
        static_cast<int>(std::floor((rate0 + epsilon) * n1)), 0, n1);
    while (lo > 0 && feasible(c0, lo - 1)) --lo;
    while (lo <= n1 && !feasible(c0, lo)) ++lo;
    while (hi < n1 && feasible(c0, hi + 1)) ++hi;
    while (hi >= 0 && !feasible(c0, hi)) --hi;
    if (lo > hi) continue;
    const int c1 = std::clamp(p1, lo, hi);
    const int d0 = std::abs(c0 - p0), d1 = std::abs(c1 - p1);
    const int flips = d0 + d1;
    const bool better =
        !found || flips < best.flips ||
        (flips == best.flips &&
         (d1 < best_d1 || (d1 == best_d1 && d0 < best_d0)));
    if (better) {
      found = true;
      best.positives[0] = c0;
      best.positives[1] = c1;
      best.flips = flips;
      best_d0 = d0;
      best_d1 = d1;
    }
  }
  // Unreachable: the all-zero vector is always fair.
  if (!found) return absl::InternalError("no fair target found");
  return best;
}

absl::StatusOr<int> MinimalFlipsToFair(const AnswerVector& answers,
                                       const AuditSet& s, double epsilon) {
  auto target = MinimalFairTarget(answers, s, epsilon);
  if (!target.ok()) return target.status();
  return target->flips;
}

std::string WriteAuditSetCsv(const AuditSet& s) {
  csv::Table table;
  table.header = {"idx", "group", "label"};
  for (int j = 0; j < s.feature_dim(); ++j) {
    table.header.push_back(absl::StrCat("feature_", j));
  }
  for (const AuditSample& sample : s.samples()) {
    std::vector<std::string> row = {
        absl::StrCat(sample.idx), absl::StrCat(sample.group),
        sample.label ? absl::StrCat(*sample.label) : std::string()};
    for (double f : sample.features) row.push_back(csv::FormatDouble(f));
    table.rows.push_back(std::move(row));
  }
  return csv::Write(table);
}

absl::StatusOr<AuditSet> ParseAuditSetCsv(absl::string_view text) {
  auto table = csv::Parse(text);
  if (!table.ok()) return table.status();
  const auto& header = table->header;
  if (header.size() < 3 || header[0] != "idx" || header[1] != "group" ||
      header[2] != "label") {
    return absl::InvalidArgumentError(
        "audit set CSV must start with idx,group,label");
  }
  for (size_t j = 3; j < header.size(); ++j) {
    if (header[j] != absl::StrCat("feature_", j - 3)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unexpected column '", header[j], "'"));
    }
  }
  std::vector<AuditSample> samples;
  for (const auto& row : table->rows) {
    AuditSample sample;
    auto idx = csv::ParseUint(row[0]);
    auto group = csv::ParseInt(row[1]);
    if (!idx.ok()) return idx.status();
    if (!group.ok()) return group.status();
    sample.idx = *idx;
    sample.group = static_cast<int>(*group);
    if (!row[2].empty()) {
      auto label = csv::ParseInt(row[2]);
      if (!label.ok()) return label.status();
      sample.label = static_cast<int>(*label);
    }
    for (size_t j = 3; j < row.size(); ++j) {
      auto f = csv::ParseDouble(row[j]);
      if (!f.ok()) return f.status();
      sample.features.push_back(*f);
    }
    samples.push_back(std::move(sample));
  }
  return AuditSet::Create(std::move(samples));
}

std::string WriteAnswersCsv(const AnswerVector& answers, const AuditSet& s) {
  csv::Table table;
  table.header = {"idx", "answer"};
  for (size_t i = 0; i < answers.size() && i < s.size(); ++i) {
    table.rows.push_back(
        {absl::StrCat(s[i].idx), absl::StrCat(answers.bits[i])});
  }
  return csv::Write(table);
}

absl::StatusOr<AnswerVector> ParseAnswersCsv(absl::string_view text,
                                             const AuditSet& s) {
  auto table = csv::Parse(text);
  if (!table.ok()) return table.status();
  if (table->header != std::vector<std::string>{"idx", "answer"}) {
    return absl::InvalidArgumentError("answer CSV header must be idx,answer");
  }
  if (table->rows.size() != s.size()) {
    return CheckAligned(table->rows.size(), s.size());
  }
  AnswerVector answers;
  for (size_t i = 0; i < s.size(); ++i) {
    auto idx = csv::ParseUint(table->rows[i][0]);
    auto bit = csv::ParseInt(table->rows[i][1]);
    if (!idx.ok()) return idx.status();
    if (!bit.ok()) return bit.status();
    if (*idx != s[i].idx) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "answer row %d has idx %d, audit set has %d", i, *idx, s[i].idx));
    }
    if (*bit != 0 && *bit != 1) {
      return absl::InvalidArgumentError("answers must be 0 or 1");
    }
    answers.bits.push_back(static_cast<uint8_t>(*bit));
  }
  return answers;
}

}  // namespace fairaudit
