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

#include <doctest.h>

#include "sscert/boundary.hpp"
#include "sscert/rng.hpp"

using namespace sscert;

namespace {

// For a binary linear model the closest boundary point is the orthogonal
// projection; distance |w.x + b| / ||w||.
double projection_distance(const Eigen::VectorXd& w, double b, const Eigen::VectorXd& x) {
  return std::fabs(w.dot(x) + b) / w.norm();
}

BoundarySearchConfig pool_config(const Eigen::VectorXd& anchor, std::uint64_t seed) {
  BoundarySearchConfig cfg;
  cfg.init_pool = {anchor};
  cfg.seed = seed;
  return cfg;
}

MlpClassifier random_mlp(Eigen::Index d, int hidden, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd w1(hidden, d);
  for (Eigen::Index i = 0; i < w1.size(); ++i) w1.data()[i] = rng.normal();
  Eigen::MatrixXd w2(2, hidden);
  for (Eigen::Index i = 0; i < w2.size(); ++i) w2.data()[i] = rng.normal();
  std::vector<Eigen::MatrixXd> w = {w1, w2};
  std::vector<Eigen::VectorXd> b = {0.1 * rng.normal_vector(hidden),
                                    0.1 * rng.normal_vector(2)};
  return MlpClassifier(std::move(w), std::move(b));
}

}  // namespace

TEST_CASE("linear models reach the orthogonal projection") {
  Rng rng(31);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::VectorXd w = rng.normal_vector(4);
    if (w.norm() < 0.1) continue;
    const double b = 0.3 * rng.normal();
    const auto model = LinearClassifier::from_binary_score(w, b);
    Eigen::VectorXd x = 2.0 * rng.normal_vector(4);
    const int y = predict(model, x);
    // An anchor well on the other side of the hyperplane.
    const double s = w.dot(x) + b;
    const Eigen::VectorXd anchor = x - 3.0 * (s / w.squaredNorm()) * w;
    auto cfg = pool_config(anchor, trial);
    const auto res = closest_boundary_sample(model, x, y, cfg);
    CHECK(res.converged);
    CHECK(std::fabs(res.distance - projection_distance(w, b, x)) < 1e-6);
    CHECK(res.residual_margin <= cfg.line_search_tol);
    ++checked;
  }
  CHECK(checked >= 25);
}

TEST_CASE("a query already on the boundary returns immediately") {
  const auto model = LinearClassifier::from_binary_score(Eigen::Vector2d(1.0, 0.0), 0.0);
  BoundarySearchConfig cfg;
  const Eigen::Vector2d x(1e-9, 4.0);
  const auto res = closest_boundary_sample(model, x, predict(model, x), cfg);
  CHECK(res.converged);
  CHECK(res.distance == 0.0);
}

TEST_CASE("mlp boundary points satisfy the residual tolerance") {
  const auto model = random_mlp(2, 8, 12);
  Rng rng(5);
  int found = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = 2.0 * rng.normal_vector(2);
    const int y = predict(model, x);
    // Scan for an opposite-side anchor.
    Eigen::VectorXd anchor;
    bool have = false;
    for (int k = 0; k < 50 && !have; ++k) {
      const Eigen::VectorXd c = 3.0 * rng.normal_vector(2);
      if (predict(model, c) != y) {
        anchor = c;
        have = true;
      }
    }
    if (!have) continue;
    auto cfg = pool_config(anchor, trial);
    cfg.line_search_tol = 1e-6;
    const auto res = closest_boundary_sample(model, x, y, cfg);
    CHECK(res.residual_margin <= 1e-3);
    CHECK(res.distance <= (x - anchor).norm() + 1e-9);
    ++found;
  }
  CHECK(found >= 10);
}

TEST_CASE("searches fail loudly without a usable anchor") {
  const auto model = LinearClassifier::from_binary_score(Eigen::Vector2d(1.0, 0.0), 0.0);
  const Eigen::Vector2d x(2.0, 0.0);
  BoundarySearchConfig cfg;
  CHECK_THROWS_AS(closest_boundary_sample(model, x, 1, cfg), BoundarySearchFailure);
  cfg.init_pool = {Eigen::Vector2d(5.0, 0.0)};  // same side: no sign change
  CHECK_THROWS_AS(closest_boundary_sample(model, x, 1, cfg), BoundarySearchFailure);
  // Wrong class for the query point.
  cfg.init_pool = {Eigen::Vector2d(-5.0, 0.0)};
  CHECK_THROWS_AS(closest_boundary_sample(model, x, 0, cfg), BoundarySearchFailure);
}

TEST_CASE("histogram separates two clusters at different depths") {
  const auto model = LinearClassifier::from_binary_score(Eigen::Vector2d(1.0, 0.0), 0.0);
  Dataset samples;
  samples.num_classes = 2;
  samples.dim = 2;
  Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    Sample s;
    const double depth = i < 15 ? 1.0 : 6.0;
    s.features = Eigen::Vector2d(depth + 0.05 * rng.normal(), rng.normal());
    s.label = 1;
    samples.samples.push_back(s);
  }
  BoundarySearchConfig cfg;
  cfg.init_pool = {Eigen::Vector2d(-4.0, 0.0)};
  cfg.seed = 3;
  const auto hist = boundary_distance_histogram(model, samples, 1, cfg, 10);
  CHECK(hist.failed.empty());
  REQUIRE(hist.distances.size() == 30);
  REQUIRE(hist.bin_counts.size() == 10);
  // Mass at both ends, none in the middle bins.
  CHECK(hist.bin_counts.front() > 0);
  CHECK(hist.bin_counts.back() > 0);
  std::size_t middle = 0;
  for (std::size_t b = 3; b < 7; ++b) middle += hist.bin_counts[b];
  CHECK(middle == 0);
}

TEST_CASE("histogram records per-sample failures without aborting") {
  const auto model = LinearClassifier::from_binary_score(Eigen::Vector2d(1.0, 0.0), 0.0);
  Dataset samples;
  samples.num_classes = 2;
  samples.dim = 2;
  Sample good;
  good.features = Eigen::Vector2d(2.0, 0.0);
  good.label = 1;
  Sample bad;
  bad.features = Eigen::Vector2d(-2.0, 0.0);  // not classified 1: search fails
  bad.label = 1;
  samples.samples = {good, bad};
  BoundarySearchConfig cfg;
  cfg.init_pool = {Eigen::Vector2d(-4.0, 0.0)};
  const auto hist = boundary_distance_histogram(model, samples, 1, cfg, 5);
  CHECK(hist.distances.size() == 1);
  REQUIRE(hist.failed.size() == 1);
  CHECK(hist.failed[0] == 1);
}
