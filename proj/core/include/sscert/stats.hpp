// Copyright 2026 The sscert Authors
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

#ifndef SSCERT_STATS_HPP
#define SSCERT_STATS_HPP

#include <cstdint>

namespace sscert {

double normal_pdf(double x);
// Phi(x), computed through erfc for full tail accuracy.
double normal_cdf(double x);

// Inverse standard-normal CDF. Rational approximation (Acklam) refined by a
// Newton step on the CDF; |error| < 1e-10 on [1e-12, 1 - 1e-12].
double normal_quantile(double p);

// P[Bin(n, p) >= k], exact via the regularized incomplete beta function.
double binomial_tail_geq(std::int64_t k, std::int64_t n, double p);
// P[Bin(n, p) <= k].
double binomial_cdf(std::int64_t k, std::int64_t n, double p);

// One-sided Clopper-Pearson bounds at confidence 1 - alpha.
// Lower bound L solves P[Bin(n, L) >= k] = alpha (L = 0 when k = 0);
// upper bound U solves P[Bin(n, U) <= k] = alpha (U = 1 when k = n).
// Both are found by bisection on the exact binomial tail to 1e-10.
double binom_lower_bound(std::int64_t successes, std::int64_t trials, double alpha);
double binom_upper_bound(std::int64_t successes, std::int64_t trials, double alpha);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

}  // namespace sscert

#endif  // SSCERT_STATS_HPP
