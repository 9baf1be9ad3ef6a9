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

// Monte Carlo oracle for the detection rate: a serial reference kernel and an
// OpenMP kernel over the same chunk decomposition.

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "fairaudit/geometry.h"
#include "fairaudit/random.h"

namespace fairaudit::geometry {

namespace {

constexpr int64_t kChunkSize = 8192;

absl::Status CheckMonteCarloArgs(const GeometryParams& g, int64_t samples) {
  if (g.n < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Monte Carlo oracle needs n >= 2, got %d", g.n));
  }
  if (samples < 1000) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Monte Carlo oracle needs at least 1000 samples, got %d", samples));
  }
  return absl::OkStatus();
}

// Counts detected points in chunk `chunk`. Axis 0 is the hyperplane normal;
// a point is detected iff the norm of its remaining coordinates exceeds the
// disc radius sqrt(tau^2 - delta^2).
int64_t CountChunk(const GeometryParams& g, int64_t samples, uint64_t seed,
                   int64_t chunk) {
  const int64_t begin = chunk * kChunkSize;
  const int64_t end = std::min(samples, begin + kChunkSize);
  Engine engine = MakeEngine(seed, static_cast<uint64_t>(chunk));
  std::normal_distribution<double> normal;
  const double tau2 = g.tau * g.tau;
  const double disc2 = std::max(0.0, tau2 - g.delta * g.delta);
  const double radial_exponent = 2.0 / g.n;
  int64_t detected = 0;
  for (int64_t i = begin; i < end; ++i) {
    const double z0 = normal(engine);
    double perp = 0.0;
    for (int j = 1; j < g.n; ++j) {
      const double z = normal(engine);
      perp += z * z;
    }
    const double total = perp + z0 * z0;
    const double r2 = tau2 * std::pow(UniformUnit(engine), radial_exponent);
    // |orthogonal part|^2 = r2 * perp / total > disc2, without dividing.
    if (r2 * perp > disc2 * total) ++detected;
  }
  return detected;
}

MonteCarloEstimate Summarize(int64_t detected, int64_t samples) {
  MonteCarloEstimate out;
  out.detected = detected;
  out.samples = samples;
  out.estimate = static_cast<double>(detected) / samples;
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / samples);
  return out;
}

int64_t NumChunks(int64_t samples) {
  return (samples + kChunkSize - 1) / kChunkSize;
}

}  // namespace

absl::StatusOr<MonteCarloEstimate> MonteCarloDetectionRateSerial(
    const GeometryParams& g, int64_t samples, uint64_t seed) {
  if (auto s = CheckMonteCarloArgs(g, samples); !s.ok()) return s;
  int64_t detected = 0;
  for (int64_t c = 0; c < NumChunks(samples); ++c) {
    detected += CountChunk(g, samples, seed, c);
  }
  return Summarize(detected, samples);
}

absl::StatusOr<MonteCarloEstimate> MonteCarloDetectionRate(
    const GeometryParams& g, int64_t samples, uint64_t seed) {
  if (auto s = CheckMonteCarloArgs(g, samples); !s.ok()) return s;
  const int64_t chunks = NumChunks(samples);
  int64_t detected = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : detected)
  for (int64_t c = 0; c < chunks; ++c) {
    detected += CountChunk(g, samples, seed, c);
  }
  return Summarize(detected, samples);
}

}  // namespace fairaudit::geometry
