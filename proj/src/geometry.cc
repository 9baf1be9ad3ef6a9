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

#include "fairaudit/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "fairaudit/quadrature.h"

namespace fairaudit::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

absl::Status RequireHyperplaneDimension(const GeometryParams& g) {
  if (g.n < 2) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "hyperplane geometry needs n >= 2, got n = %d", g.n));
  }
  return absl::OkStatus();
}

// x (1 - x^2)^((n-1)/2), the cylinder term normalized by tau^n.
double CylinderTerm(int n, double x) {
  return x * std::pow(1.0 - x * x, 0.5 * (n - 1));
}

// I_n(acos x) without the range check.
double SineIntegralAtAcos(int n, double x) {
  return *IncompleteSineIntegral(n, std::acos(std::clamp(x, 0.0, 1.0)));
}

}  // namespace

absl::StatusOr<GeometryParams> GeometryParams::Create(int n, double tau,
                                                      double delta) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("dimension n must be >= 1, got %d", n));
  }
  if (!(tau > 0) || !std::isfinite(tau)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("tau must be positive and finite, got %g", tau));
  }
  if (!(delta >= 0) || delta > tau) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "delta must lie in [0, tau] (first auditing axiom), got delta = %g, "
        "tau = %g",
        delta, tau));
  }
  return GeometryParams{n, tau, delta};
}

double Wallis(int n) {
  // W_n = (n-1)/n W_{n-2}
  double w = (n % 2 == 0) ? kPi / 2.0 : 1.0;
  for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2) {
    w *= static_cast<double>(k - 1) / k;
  }
  return w;
}

absl::StatusOr<double> IncompleteSineIntegral(int n, double phi) {
  if (n < 0) {
    return absl::InvalidArgumentError("n must be non-negative");
  }
  if (!(phi >= 0.0) || phi > kPi / 2.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("phi must lie in [0, pi/2], got %.17g", phi));
  }
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  // I_k = (-cos(phi) sin^{k-1}(phi) + (k-1) I_{k-2}) / k, stepping k by 2
  // from I_0 = phi or I_1 = 1 - cos(phi).
  double value = (n % 2 == 0) ? phi : 1.0 - c;
  double sin_pow = (n % 2 == 0) ? s : s * s;  // sin^{k-1} for the first k
  for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2) {
    value = (-c * sin_pow + (k - 1) * value) / k;
    sin_pow *= s * s;
  }
  return std::max(value, 0.0);
}

double BallVolume(int n, double r) {
  // V_n(r) = (2 pi r^2 / n) V_{n-2}(r), V_0 = 1, V_1 = 2r.
  double v = (n % 2 == 0) ? 1.0 : 2.0 * r;
  for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2) {
    v *= 2.0 * kPi * r * r / k;
  }
  return v;
}

double CapVolume(const GeometryParams& g) {
  if (g.delta == g.tau) return 0.0;
  // pi^{(n-1)/2} / Gamma((n+1)/2) is the unit (n-1)-ball volume.
  return BallVolume(g.n - 1, 1.0) * std::pow(g.tau, g.n) *
         SineIntegralAtAcos(g.n, g.ratio());
}

double CylinderVolume(const GeometryParams& g) {
  const double radius =
      std::sqrt(std::max(0.0, g.tau * g.tau - g.delta * g.delta));
  return 2.0 * g.delta * BallVolume(g.n - 1, radius);
}

absl::StatusOr<VolumeReport> ComputeVolumes(const GeometryParams& g) {
  if (auto s = RequireHyperplaneDimension(g); !s.ok()) return s;
  VolumeReport report;
  report.ball = BallVolume(g.n, g.tau);
  report.cap = CapVolume(g);
  report.cylinder = CylinderVolume(g);
  report.intersection = report.cylinder + 2.0 * report.cap;
  report.p_uf = std::clamp((report.ball - report.intersection) / report.ball,
                           0.0, 1.0);
  return report;
}

absl::StatusOr<double> DetectionRate(const GeometryParams& g) {
  if (auto s = RequireHyperplaneDimension(g); !s.ok()) return s;
  if (g.delta == g.tau) return 1.0;
  if (g.delta == 0.0) return 0.0;
  // Volumes divided by the ball volume: cap / ball = I_n / (2 W_n) and
  // cylinder / ball = x (1 - x^2)^((n-1)/2) / W_n.
  const double x = g.ratio();
  const double w = Wallis(g.n);
  const double cap_fraction = SineIntegralAtAcos(g.n, x) / (2.0 * w);
  const double cylinder_fraction = CylinderTerm(g.n, x) / w;
  return std::clamp(1.0 - 2.0 * cap_fraction - cylinder_fraction, 0.0, 1.0);
}

absl::StatusOr<double> DetectionRatePrinted(const GeometryParams& g) {
  if (auto s = RequireHyperplaneDimension(g); !s.ok()) return s;
  const double x = g.ratio();
  return 1.0 - (SineIntegralAtAcos(g.n, x) - CylinderTerm(g.n, x)) /
                   Wallis(g.n);
}

absl::StatusOr<double> DetectionRateLowerBound(const GeometryParams& g) {
  if (g.n < 2 || g.n % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "the detection-rate lower bound is stated for even n >= 2, got %d",
        g.n));
  }
  return CylinderTerm(g.n, g.ratio()) / Wallis(g.n);
}

double LowerBoundExtremum(int n) {
  return 0.5 * (std::sqrt(n + 3.0) - std::sqrt(std::max(0.0, n - 1.0)));
}

absl::StatusOr<double> QuadratureDetectionRate(const GeometryParams& g) {
  if (auto s = RequireHyperplaneDimension(g); !s.ok()) return s;
  // Work in units of tau (the rate is scale invariant); the cross-section at
  // height s is an (n-1)-ball of radius min(sqrt(1 - s^2), sqrt(1 - x^2)).
  const double x = g.ratio();
  const double disc = std::sqrt(std::max(0.0, 1.0 - x * x));
  const double ball = BallVolume(g.n, 1.0);
  auto section = [&](double s) {
    const double r = std::min(std::sqrt(std::max(0.0, 1.0 - s * s)), disc);
    return BallVolume(g.n - 1, r) / ball;
  };
  // The integrand has a kink at |s| = x; split there. The integral is of
  // order one, so the relative tolerance doubles as an absolute one.
  constexpr double kTol = 1e-8;
  const double intersection = AdaptiveSimpson(section, -1.0, -x, kTol / 4) +
                              AdaptiveSimpson(section, -x, x, kTol / 4) +
                              AdaptiveSimpson(section, x, 1.0, kTol / 4);
  return std::clamp(1.0 - intersection, 0.0, 1.0);
}

}  // namespace fairaudit::geometry
