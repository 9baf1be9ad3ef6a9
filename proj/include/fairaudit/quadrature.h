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

#ifndef FAIRAUDIT_QUADRATURE_H_
#define FAIRAUDIT_QUADRATURE_H_

#include <cmath>

namespace fairaudit {

namespace internal {

template <typename F>
double SimpsonStep(const F& f, double a, double fa, double b, double fb,
                   double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::fabs(diff) <= 15.0 * tol) {
    return left + right + diff / 15.0;
  }
  return SimpsonStep(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         SimpsonStep(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace internal

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance abs_tol
// (Richardson-corrected). Recursion is capped at max_depth bisections.
template <typename F>
double AdaptiveSimpson(const F& f, double a, double b, double abs_tol,
                       int max_depth = 50) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return internal::SimpsonStep(f, a, fa, b, fb, m, fm, whole, abs_tol,
                               max_depth);
}

}  // namespace fairaudit

#endif  // FAIRAUDIT_QUADRATURE_H_
