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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "sscert/stats.hpp"

using namespace sscert;

namespace {

// Independent quantile: bisection on normal_cdf, no shared code with the
// rational-approximation path under test.
double quantile_oracle(double p) {
  // Reflect onto the lower tail, where the CDF keeps relative accuracy.
  if (p > 0.5) return -quantile_oracle(1.0 - p);
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Independent binomial tail: direct pmf summation in log space.
double tail_geq_oracle(std::int64_t k, std::int64_t n, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double sum = 0.0;
  for (std::int64_t j = k; j <= n; ++j) {
    const double logc = std::lgamma(static_cast<double>(n) + 1.0) -
                        std::lgamma(static_cast<double>(j) + 1.0) -
                        std::lgamma(static_cast<double>(n - j) + 1.0);
    sum += std::exp(logc + j * std::log(p) + (n - j) * std::log1p(-p));
  }
  return std::min(sum, 1.0);
}

double lower_bound_oracle(std::int64_t k, std::int64_t n, double alpha) {
  if (k <= 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail_geq_oracle(k, n, mid) < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double upper_bound_oracle(std::int64_t k, std::int64_t n, double alpha) {
  if (k >= n) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 1.0 - tail_geq_oracle(k + 1, n, mid);
    if (cdf > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal cdf basics") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-6));
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
}

TEST_CASE("normal quantile matches the bisection oracle to 1e-10") {
  const std::vector<double> ps = {1e-12, 1e-9,  1e-6, 1e-3, 0.01, 0.1, 0.25,
                                  0.5,   0.75,  0.9,  0.99, 1.0 - 1e-3,
                                  1.0 - 1e-6, 1.0 - 1e-9, 1.0 - 1e-12};
  for (double p : ps) {
    CHECK(std::fabs(normal_quantile(p) - quantile_oracle(p)) < 1e-10);
  }
  // A dense sweep of the bulk.
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    CHECK(std::fabs(normal_quantile(p) - quantile_oracle(p)) < 1e-10);
  }
}

TEST_CASE("quantile and cdf are inverse") {
  for (int i = 1; i < 100; ++i) {
    const double p = i / 100.0;
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("binomial tails match pmf summation") {
  const std::vector<std::int64_t> ns = {1, 2, 7, 20, 50, 200};
  const std::vector<double> ps = {0.01, 0.2, 0.5, 0.83, 0.999};
  for (std::int64_t n : ns) {
    for (double p : ps) {
      for (std::int64_t k = 0; k <= n; k += std::max<std::int64_t>(1, n / 7)) {
        const double want = tail_geq_oracle(k, n, p);
        CHECK(binomial_tail_geq(k, n, p) == doctest::Approx(want).epsilon(1e-10));
        CHECK(binomial_cdf(k, n, p) ==
              doctest::Approx(1.0 - tail_geq_oracle(k + 1, n, p)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("clopper-pearson edge cases") {
  CHECK(binom_lower_bound(0, 30, 0.001) == 0.0);
  CHECK(binom_upper_bound(30, 30, 0.001) == 1.0);
  // k = n: L = alpha^(1/n).
  CHECK(binom_lower_bound(30, 30, 0.001) ==
        doctest::Approx(std::pow(0.001, 1.0 / 30.0)).epsilon(1e-8));
  // k = 0: U = 1 - alpha^(1/n).
  CHECK(binom_upper_bound(0, 30, 0.001) ==
        doctest::Approx(1.0 - std::pow(0.001, 1.0 / 30.0)).epsilon(1e-8));
}

TEST_CASE("clopper-pearson bounds match the dual-route oracle") {
  for (std::int64_t n : {5, 17, 50, 100}) {
    for (std::int64_t k = 0; k <= n; k += std::max<std::int64_t>(1, n / 9)) {
      for (double alpha : {0.05, 0.001}) {
        CHECK(std::fabs(binom_lower_bound(k, n, alpha) -
                        lower_bound_oracle(k, n, alpha)) < 1e-8);
        CHECK(std::fabs(binom_upper_bound(k, n, alpha) -
                        upper_bound_oracle(k, n, alpha)) < 1e-8);
      }
    }
  }
}

TEST_CASE("bound monotonicity in k") {
  for (std::int64_t k = 0; k < 40; ++k) {
    CHECK(binom_lower_bound(k, 40, 0.05) <= binom_lower_bound(k + 1, 40, 0.05));
    CHECK(binom_upper_bound(k, 40, 0.05) <= binom_upper_bound(k + 1, 40, 0.05));
  }
}

TEST_CASE("lower bound sits below the point estimate, upper above") {
  for (std::int64_t k = 1; k < 50; ++k) {
    const double hat = static_cast<double>(k) / 50.0;
    CHECK(binom_lower_bound(k, 50, 0.05) < hat);
    CHECK(binom_upper_bound(k, 50, 0.05) > hat);
  }
}

TEST_CASE("incomplete beta endpoints and symmetry") {
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(a, b) = 1 - I_{1-x}(b, a).
  for (double x : {0.1, 0.37, 0.5, 0.92}) {
    CHECK(incomplete_beta(2.5, 4.0, x) ==
          doctest::Approx(1.0 - incomplete_beta(4.0, 2.5, 1.0 - x)).epsilon(1e-12));
  }
  // I_x(1, b) = 1 - (1-x)^b.
  CHECK(incomplete_beta(1.0, 5.0, 0.3) ==
        doctest::Approx(1.0 - std::pow(0.7, 5.0)).epsilon(1e-12));
}
