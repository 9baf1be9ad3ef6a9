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

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"

namespace fairaudit::geometry {
namespace {

constexpr double kPi = std::numbers::pi;

GeometryParams Params(int n, double tau, double delta) {
  return *GeometryParams::Create(n, tau, delta);
}

// Fixed-panel composite Simpson; deliberately unrelated to the library's
// adaptive routine.
template <typename F>
double CompositeSimpson(const F& f, double a, double b, int panels = 1 << 16) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

double GammaBallVolume(int n, double r) {
  return std::exp(0.5 * n * std::log(kPi) + n * std::log(r) -
                  std::lgamma(0.5 * n + 1.0));
}

TEST(WallisTest, BaseCasesAndRecurrence) {
  EXPECT_DOUBLE_EQ(Wallis(0), kPi / 2);
  EXPECT_DOUBLE_EQ(Wallis(1), 1.0);
  EXPECT_NEAR(Wallis(5), 8.0 / 15.0, 1e-15);
}

TEST(WallisTest, StrictlyDecreasing) {
  for (int n = 0; n < 3000; ++n) {
    ASSERT_LT(Wallis(n + 1), Wallis(n)) << "n = " << n;
  }
}

TEST(WallisTest, MatchesQuadrature) {
  for (int n : {2, 3, 7, 12}) {
    const double q = CompositeSimpson(
        [n](double t) { return std::pow(std::sin(t), n); }, 0.0, kPi / 2);
    EXPECT_NEAR(Wallis(n), q, 1e-12) << n;
  }
}

TEST(IncompleteSineIntegralTest, EndpointIsWallis) {
  for (int n = 0; n <= 10; ++n) {
    EXPECT_NEAR(*IncompleteSineIntegral(n, kPi / 2), Wallis(n), 1e-12) << n;
  }
}

TEST(IncompleteSineIntegralTest, ZerothOrderIsIdentity) {
  EXPECT_DOUBLE_EQ(*IncompleteSineIntegral(0, 0.7), 0.7);
}

TEST(IncompleteSineIntegralTest, MatchesQuadratureOracle) {
  const double oracle = CompositeSimpson(
      [](double t) { return std::sin(t) * std::sin(t); }, 0.0, kPi / 3);
  EXPECT_NEAR(*IncompleteSineIntegral(2, kPi / 3), oracle, 1e-10);
  for (int n : {1, 5, 9, 20}) {
    for (double phi : {0.1, 0.9, 1.4}) {
      const double q = CompositeSimpson(
          [n](double t) { return std::pow(std::sin(t), n); }, 0.0, phi);
      EXPECT_NEAR(*IncompleteSineIntegral(n, phi), q, 1e-10);
    }
  }
}

TEST(IncompleteSineIntegralTest, RejectsOutOfRangeAngle) {
  EXPECT_FALSE(IncompleteSineIntegral(3, -0.1).ok());
  EXPECT_FALSE(IncompleteSineIntegral(3, kPi / 2 + 1e-9).ok());
}

TEST(IncompleteSineIntegralTest, MonotoneAndBounded) {
  for (int n : {0, 1, 2, 5, 30, 200}) {
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double v = *IncompleteSineIntegral(n, kPi / 2 * i / 100.0);
      ASSERT_GE(v, prev - 1e-15);
      ASSERT_LE(v, Wallis(n) + 1e-12);
      prev = v;
    }
  }
}

TEST(BallVolumeTest, KnownValues) {
  EXPECT_NEAR(BallVolume(2, 1.0), kPi, 1e-15);
  EXPECT_NEAR(BallVolume(3, 1.0), 4.0 * kPi / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(BallVolume(1, 2.0), 4.0);
}

TEST(BallVolumeTest, RecurrenceMatchesGammaForm) {
  for (int n = 1; n <= 30; ++n) {
    for (double r : {0.3, 1.0, 2.5}) {
      const double expected = GammaBallVolume(n, r);
      EXPECT_NEAR(BallVolume(n, r) / expected, 1.0, 1e-9) << n << " " << r;
    }
  }
}

TEST(CapVolumeTest, Endpoints) {
  for (int n : {2, 3, 6}) {
    EXPECT_NEAR(CapVolume(Params(n, 1.3, 0.0)), BallVolume(n, 1.3) / 2, 1e-12);
    EXPECT_EQ(CapVolume(Params(n, 1.3, 1.3)), 0.0);
  }
}

TEST(CapVolumeTest, PlanarCircularSegment) {
  // tau^2 acos(d / tau) - d sqrt(tau^2 - d^2)
  const double segment = std::acos(0.5) - 0.5 * std::sqrt(0.75);
  EXPECT_NEAR(CapVolume(Params(2, 1.0, 0.5)), segment, 1e-12);
  EXPECT_NEAR(segment, 0.6142, 1e-4);
}

TEST(CylinderVolumeTest, Values) {
  EXPECT_EQ(CylinderVolume(Params(4, 1.0, 0.0)), 0.0);
  EXPECT_EQ(CylinderVolume(Params(4, 1.0, 1.0)), 0.0);
  EXPECT_NEAR(CylinderVolume(Params(2, 1.0, 0.5)), 2.0 * std::sqrt(0.75),
              1e-12);
}

TEST(ParamsTest, Validation) {
  EXPECT_FALSE(GeometryParams::Create(0, 1.0, 0.0).ok());
  EXPECT_FALSE(GeometryParams::Create(3, 0.0, 0.0).ok());
  EXPECT_FALSE(GeometryParams::Create(3, 1.0, 1.01).ok());
  EXPECT_FALSE(GeometryParams::Create(3, 1.0, -0.1).ok());
  EXPECT_TRUE(GeometryParams::Create(3, 1.0, 1.0).ok());
}

TEST(VolumeReportTest, InvariantsOnGrid) {
  for (int n : {2, 3, 5, 10, 20}) {
    for (int i = 0; i <= 10; ++i) {
      const auto g = Params(n, 1.7, 1.7 * i / 10.0);
      const VolumeReport r = *ComputeVolumes(g);
      EXPECT_NEAR(r.intersection, r.cylinder + 2 * r.cap, 1e-12 * r.ball);
      EXPECT_LE(r.intersection, r.ball * (1 + 1e-12));
      EXPECT_NEAR(r.p_uf, (r.ball - r.intersection) / r.ball, 1e-12);
      EXPECT_NEAR(r.p_uf, *DetectionRate(g), 1e-12);
    }
  }
}

TEST(DetectionRateTest, Endpoints) {
  for (int n = 2; n <= 20; ++n) {
    EXPECT_EQ(*DetectionRate(Params(n, 1.0, 1.0)), 1.0);
    EXPECT_EQ(*DetectionRate(Params(n, 1.0, 0.0)), 0.0);
  }
}

TEST(DetectionRateTest, RejectsDegenerateDimension) {
  EXPECT_FALSE(DetectionRate(Params(1, 1.0, 0.5)).ok());
  EXPECT_FALSE(QuadratureDetectionRate(Params(1, 1.0, 0.5)).ok());
}

TEST(DetectionRateTest, PlanarCaseAgainstMonteCarlo) {
  const auto g = Params(2, 1.0, 0.5);
  const double closed = *DetectionRate(g);
  const auto mc = *MonteCarloDetectionRate(g, 1'000'000, 7);
  EXPECT_NEAR(closed, mc.estimate, 3 * mc.std_error);
  EXPECT_NEAR(closed, 0.058, 1e-3);
}

TEST(DetectionRateTest, IncreasingInDelta) {
  for (int n : {2, 3, 5, 10, 20}) {
    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
      const double p = *DetectionRate(Params(n, 1.0, i / 20.0));
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
      EXPECT_GT(p, prev) << "n = " << n << " i = " << i;
      prev = p;
    }
  }
  // At n = 100 the rate rounds to 1.0 well before x = 1.
  double prev = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double p = *DetectionRate(Params(100, 1.0, i / 20.0));
    EXPECT_GE(p, prev - 1e-15);
    prev = p;
  }
}

TEST(DetectionRateTest, ScaleInvariant) {
  for (int n : {2, 7, 15}) {
    for (double x : {0.2, 0.5, 0.8}) {
      const double base = *DetectionRate(Params(n, 1.0, x));
      for (double c : {0.01, 3.0, 250.0}) {
        EXPECT_NEAR(*DetectionRate(Params(n, c, c * x)), base, 1e-12);
      }
    }
  }
}

TEST(DetectionRateTest, LargeDimensionStaysFinite) {
  for (int n : {500, 2000, 4000}) {
    const double p = *DetectionRate(Params(n, 1.0, 0.05));
    EXPECT_TRUE(std::isfinite(p));
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(DetectionRatePrintedTest, AgreesOnlyAtEndpoints) {
  for (int n : {2, 3, 5, 10, 20}) {
    EXPECT_NEAR(*DetectionRatePrinted(Params(n, 1.0, 1.0)), 1.0, 1e-12);
    EXPECT_NEAR(*DetectionRatePrinted(Params(n, 1.0, 0.0)), 0.0, 1e-12);
    for (int i = 1; i <= 9; ++i) {
      const auto g = Params(n, 1.0, i / 10.0);
      // The gap is 2 x (1 - x^2)^((n-1)/2) / W_n, about 9e-7 at n = 20,
      // x = 0.9; still far above quadrature resolution.
      EXPECT_GT(std::fabs(*DetectionRatePrinted(g) - *DetectionRate(g)), 1e-7);
    }
  }
  EXPECT_GT(*DetectionRatePrinted(Params(2, 1.0, 0.5)), 1.0);
}

TEST(LowerBoundTest, Values) {
  EXPECT_EQ(*DetectionRateLowerBound(Params(4, 1.0, 0.0)), 0.0);
  EXPECT_NEAR(*DetectionRateLowerBound(Params(4, 1.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(*DetectionRateLowerBound(Params(2, 1.0, 0.5)),
              4.0 / kPi * 0.5 * std::sqrt(0.75), 1e-12);
  EXPECT_FALSE(DetectionRateLowerBound(Params(3, 1.0, 0.5)).ok());
}

TEST(LowerBoundTest, ExtremumClosedForm) {
  EXPECT_DOUBLE_EQ(LowerBoundExtremum(1), 1.0);
  EXPECT_NEAR(LowerBoundExtremum(2), (std::sqrt(5.0) - 1) / 2, 1e-15);
  EXPECT_NEAR(LowerBoundExtremum(2), 0.618, 1e-3);
  EXPECT_LT(LowerBoundExtremum(1000), 0.05);
}

// d/dx [x (1 - x^2)^((n-1)/2)] = (1 - x^2)^((n-3)/2) (1 - n x^2), so the bound
// is stationary at 1/sqrt(n), not at the closed-form gamma. Both still tend
// to 0 as n grows. This test pins the discrepancy.
TEST(LowerBoundTest, StationaryPointIsInverseSqrtN) {
  auto slope = [](int n, double x) {
    const double h = 1e-6;
    return (*DetectionRateLowerBound(Params(n, 1.0, x + h)) -
            *DetectionRateLowerBound(Params(n, 1.0, x - h))) /
           (2 * h);
  };
  for (int n : {2, 4, 10, 40}) {
    EXPECT_NEAR(slope(n, 1.0 / std::sqrt(n)), 0.0, 1e-6) << n;
    EXPECT_GT(std::fabs(slope(n, LowerBoundExtremum(n))), 1e-2) << n;
  }
}

TEST(QuadratureTest, MatchesClosedForm) {
  for (int n = 2; n <= 20; ++n) {
    for (int i = 0; i <= 10; ++i) {
      const auto g = Params(n, 2.0, 2.0 * i / 10.0);
      EXPECT_NEAR(*QuadratureDetectionRate(g), *DetectionRate(g), 1e-6)
          << n << " " << i;
    }
  }
}

TEST(QuadratureTest, Endpoints) {
  EXPECT_NEAR(*QuadratureDetectionRate(Params(5, 1.0, 0.0)), 0.0, 1e-8);
  EXPECT_NEAR(*QuadratureDetectionRate(Params(5, 1.0, 1.0)), 1.0, 1e-8);
}

TEST(MonteCarloTest, EndpointsAreExact) {
  EXPECT_EQ(MonteCarloDetectionRate(Params(4, 1.0, 1.0), 5000, 1)->estimate,
            1.0);
  EXPECT_EQ(MonteCarloDetectionRate(Params(4, 1.0, 0.0), 5000, 1)->estimate,
            0.0);
}

TEST(MonteCarloTest, AgreesWithClosedForm) {
  const auto g = Params(5, 1.0, 0.4);
  const auto mc = *MonteCarloDetectionRate(g, 100'000, 11);
  EXPECT_NEAR(mc.estimate, *DetectionRate(g), 3 * mc.std_error);
}

TEST(MonteCarloTest, SerialAndParallelKernelsAreIdentical) {
  const auto g = Params(7, 1.0, 0.35);
  for (int64_t samples : {1000, 8192, 50'001}) {
    const auto serial = *MonteCarloDetectionRateSerial(g, samples, 99);
    const auto parallel = *MonteCarloDetectionRate(g, samples, 99);
    EXPECT_EQ(serial.detected, parallel.detected);
    EXPECT_EQ(serial.estimate, parallel.estimate);
  }
}

TEST(MonteCarloTest, DeterministicPerSeed) {
  const auto g = Params(3, 1.0, 0.6);
  EXPECT_EQ(MonteCarloDetectionRate(g, 20'000, 5)->detected,
            MonteCarloDetectionRate(g, 20'000, 5)->detected);
  EXPECT_NE(MonteCarloDetectionRate(g, 20'000, 5)->detected,
            MonteCarloDetectionRate(g, 20'000, 7)->detected);
}

TEST(MonteCarloTest, RejectsBadArguments) {
  EXPECT_FALSE(MonteCarloDetectionRate(Params(1, 1.0, 0.5), 5000, 1).ok());
  EXPECT_FALSE(MonteCarloDetectionRate(Params(3, 1.0, 0.5), 999, 1).ok());
}

}  // namespace
}  // namespace fairaudit::geometry
