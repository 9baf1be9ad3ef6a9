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

#ifndef FAIRAUDIT_GEOMETRY_H_
#define FAIRAUDIT_GEOMETRY_H_

// Detection probability of an optimally manipulating platform under a
// uniform prior on the ball of expectable models.
//
// Setting: answers live in R^n (n = audit budget). The auditor's prior is the
// ball of radius tau centred on its labels Y, and the fair set is a
// hyperplane at distance delta from Y. A platform whose honest model h lies
// in the ball projects h onto the hyperplane; it escapes detection iff the
// projection stays inside the disc ball ∩ hyperplane, i.e. iff h lies in the
// right cylinder over that disc. The detection rate is therefore
//
//   P_uf = (ball - cylinder - 2 * cap) / ball
//        = 1 - (I_n(acos(x)) + x (1 - x^2)^((n-1)/2)) / W_n,   x = delta/tau,
//
// where W_n is the Wallis integral and I_n the incomplete sine integral.
// All special functions are evaluated by recurrences so that n may reach a
// few thousand without overflow in the normalized quantities.

#include <cstdint>

#include "absl/status/statusor.h"

namespace fairaudit::geometry {

struct GeometryParams {
  int n = 2;          // ambient dimension (audit budget)
  double tau = 1.0;   // prior-ball radius
  double delta = 0;   // distance of the prior centre to the fair hyperplane

  // Validates n >= 1, tau > 0 and 0 <= delta <= tau.
  static absl::StatusOr<GeometryParams> Create(int n, double tau,
                                               double delta);

  double ratio() const { return delta / tau; }
};

struct VolumeReport {
  double ball = 0;
  double cap = 0;           // one cap, height in [delta, tau]
  double cylinder = 0;      // solid cylinder of height 2 * delta
  double intersection = 0;  // cylinder + 2 * cap
  double p_uf = 0;          // (ball - intersection) / ball
};

// W_n = ∫_0^{π/2} sin^n. Strictly decreasing in n.
double Wallis(int n);

// I_n(phi) = ∫_0^phi sin^n; phi must lie in [0, π/2].
absl::StatusOr<double> IncompleteSineIntegral(int n, double phi);

// Volume of the n-ball of radius r. n = 0 gives 1.
double BallVolume(int n, double r);

double CapVolume(const GeometryParams& g);
double CylinderVolume(const GeometryParams& g);

// Absolute volumes. Underflows for large n; use DetectionRate there.
absl::StatusOr<VolumeReport> ComputeVolumes(const GeometryParams& g);

// Authoritative closed form (volume decomposition). Requires n >= 2.
absl::StatusOr<double> DetectionRate(const GeometryParams& g);

// The closed form with a minus sign between the two inner terms, kept for
// side-by-side reporting. Not a probability: exceeds 1 on interior points.
absl::StatusOr<double> DetectionRatePrinted(const GeometryParams& g);

// (1 / W_n) x (1 - x^2)^((n-1)/2); only defined for even n >= 2.
absl::StatusOr<double> DetectionRateLowerBound(const GeometryParams& g);

// Interior stationary point (sqrt(n+3) - sqrt(n-1)) / 2 of the lower bound
// as a function of x = delta / tau.
double LowerBoundExtremum(int n);

// Independent oracle: 1-D adaptive Simpson quadrature of the (n-1)-ball
// cross-sections of ball ∩ cylinder. Relative tolerance 1e-8.
absl::StatusOr<double> QuadratureDetectionRate(const GeometryParams& g);

struct MonteCarloEstimate {
  double estimate = 0;
  double std_error = 0;
  int64_t detected = 0;
  int64_t samples = 0;
};

// Independent oracle: uniform sampling in the ball. Samples are processed in
// fixed-size chunks whose random streams are derived from (seed, chunk), so
// the serial and OpenMP kernels return bit-identical results for every
// thread count. Requires n >= 2 and samples >= 1000.
absl::StatusOr<MonteCarloEstimate> MonteCarloDetectionRate(
    const GeometryParams& g, int64_t samples, uint64_t seed);

// Single-threaded reference for MonteCarloDetectionRate.
absl::StatusOr<MonteCarloEstimate> MonteCarloDetectionRateSerial(
    const GeometryParams& g, int64_t samples, uint64_t seed);

}  // namespace fairaudit::geometry

#endif  // FAIRAUDIT_GEOMETRY_H_
