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

#include "sscert/stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sscert {

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation to the inverse normal CDF (|rel err| ~ 1e-9).
double acklam_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  // Reflect the upper half onto the lower tail, where the erfc-based CDF
  // keeps full relative accuracy; 1 - p is exact for p in [0.5, 1].
  if (p > 0.5) return -normal_quantile(1.0 - p);
  double x = acklam_quantile(p);
  // One Newton step on the CDF; quadratic convergence takes the rational
  // approximation's ~1e-9 error below 1e-10 across [1e-12, 1 - 1e-12].
  const double err = normal_cdf(x) - p;
  x -= err / normal_pdf(x);
  return x;
}

namespace {

double betacf(double a, double b, double x) {
  // Continued fraction for the incomplete beta function (Lentz's method).
  const int max_iter = 300;
  const double eps = 3e-16;
  const double fpmin = std::numeric_limits<double>::min() / eps;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double binomial_tail_geq(std::int64_t k, std::int64_t n, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  // P[X >= k] = I_p(k, n - k + 1)
  return incomplete_beta(static_cast<double>(k), static_cast<double>(n - k + 1), p);
}

double binomial_cdf(std::int64_t k, std::int64_t n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  return 1.0 - binomial_tail_geq(k + 1, n, p);
}

namespace {

void check_kn(std::int64_t k, std::int64_t n) {
  if (n < 1 || k < 0 || k > n) {
    throw std::invalid_argument("binomial bound: need 0 <= k <= n, n >= 1");
  }
}

}  // namespace

double binom_lower_bound(std::int64_t successes, std::int64_t trials, double alpha) {
  check_kn(successes, trials);
  if (successes == 0) return 0.0;
  // P[Bin(n, p) >= k] is increasing in p; bisect for the p where it hits alpha.
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_tail_geq(successes, trials, mid) < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double binom_upper_bound(std::int64_t successes, std::int64_t trials, double alpha) {
  check_kn(successes, trials);
  if (successes == trials) return 1.0;
  // P[Bin(n, p) <= k] is decreasing in p.
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_cdf(successes, trials, mid) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace sscert
