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
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "sscert/certstore.hpp"
#include "sscert/rng.hpp"

using namespace sscert;

namespace {

CertTriplet triplet(const Eigen::VectorXd& x, int label, double radius) {
  CertTriplet t;
  t.input = x;
  t.label = label;
  t.region.center = x;
  t.region.radius = radius;
  t.original_radius = radius;
  return t;
}

CertTriplet triplet2(double x0, double x1, int label, double radius) {
  return triplet(Eigen::Vector2d(x0, x1), label, radius);
}

// Grid oracle in d=2: the largest centered radius honoring the conflict
// constraint, measured on a 0.01 lattice around the pair of balls.
double grid_oracle_radius(const Eigen::Vector2d& c_new, double r_new,
                          const Eigen::Vector2d& c_old, double r_old, bool inside) {
  const double lo_x = std::min(c_new[0] - r_new, c_old[0] - r_old) - 0.02;
  const double hi_x = std::max(c_new[0] + r_new, c_old[0] + r_old) + 0.02;
  const double lo_y = std::min(c_new[1] - r_new, c_old[1] - r_old) - 0.02;
  const double hi_y = std::max(c_new[1] + r_new, c_old[1] + r_old) + 0.02;
  double best = r_new;
  for (double gx = lo_x; gx <= hi_x; gx += 0.01) {
    for (double gy = lo_y; gy <= hi_y; gy += 0.01) {
      const Eigen::Vector2d g(gx, gy);
      const bool in_old = (g - c_old).norm() < r_old;
      // inside: the shrunk ball must stay within the stored ball, so any
      // point outside it caps the radius. outside: any point inside the
      // stored ball caps it.
      if (inside != in_old) best = std::min(best, (g - c_new).norm());
    }
  }
  return best;
}

}  // namespace

TEST_CASE("overlap uses open balls: touching is disjoint") {
  Ball a{Eigen::Vector2d(0.0, 0.0), 1.0};
  Ball b{Eigen::Vector2d(2.0, 0.0), 1.0};
  CHECK(!overlaps(a, b));
  b.center[0] = 1.999999;
  CHECK(overlaps(a, b));
  b.radius = 0.0;
  b.center[0] = 0.5;
  CHECK(overlaps(a, b));  // point inside an open ball
}

TEST_CASE("worked conflict cases reproduce the reference radii") {
  SUBCASE("outside conflict shrinks to dist - r_i") {
    CertStore store;
    store.insert(triplet2(0.0, 0.0, 0, 1.0));
    const auto rep = store.insert(triplet2(1.5, 0.0, 1, 1.0));
    CHECK(rep.case_taken == StoreCase::kOutsideConflict);
    CHECK(rep.final_radius == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.final_label == 1);
    CHECK(store.verify().empty());
  }
  SUBCASE("inside conflict shrinks to r_i - dist and adopts the stored label") {
    CertStore store;
    store.insert(triplet2(0.0, 0.0, 0, 1.0));
    const auto rep = store.insert(triplet2(0.5, 0.0, 1, 1.0));
    CHECK(rep.case_taken == StoreCase::kInsideConflict);
    CHECK(rep.final_radius == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.final_label == 0);
    CHECK(store.verify().empty());
  }
  SUBCASE("consistent overlap is stored untouched") {
    CertStore store;
    store.insert(triplet2(0.0, 0.0, 0, 1.0));
    const auto rep = store.insert(triplet2(1.5, 0.0, 0, 1.0));
    CHECK(rep.case_taken == StoreCase::kConsistentOverlap);
    CHECK(rep.final_radius == 1.0);
    CHECK(rep.shrink_events.empty());
  }
}

TEST_CASE("disjoint inserts report the disjoint case") {
  CertStore store;
  store.insert(triplet2(0.0, 0.0, 0, 1.0));
  const auto rep = store.insert(triplet2(10.0, 0.0, 1, 1.0));
  CHECK(rep.case_taken == StoreCase::kDisjoint);
  CHECK(rep.final_radius == 1.0);
}

TEST_CASE("radii clamp at zero and the triplet is still stored") {
  CertStore store;
  store.insert(triplet2(0.0, 0.0, 0, 2.0));
  // dist == r_i: inside with r_i - dist == 0.
  const auto rep = store.insert(triplet2(2.0, 0.0, 1, 1.0));
  CHECK(rep.final_radius == 0.0);
  CHECK(rep.final_label == 0);
  CHECK(store.size() == 2);
  CHECK(store.verify().empty());
}

TEST_CASE("multi-conflict resolution is sequential and label-propagating") {
  CertStore store;
  store.insert(triplet2(0.0, 0.0, 0, 1.0));
  store.insert(triplet2(4.0, 0.0, 1, 1.5));
  // Conflicts first with label 0 (outside, shrink to 1.0), then the shrunk
  // ball still reaches into the second region (outside, shrink to 0.5).
  const auto rep = store.insert(triplet2(2.0, 0.0, 2, 3.0));
  CHECK(rep.case_taken == StoreCase::kMultiConflict);
  CHECK(rep.shrink_events.size() == 2);
  CHECK(rep.final_radius == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.final_label == 2);
  CHECK(store.verify().empty());
}

TEST_CASE("case-3a label adoption disarms later conflicts with that label") {
  CertStore store;
  store.insert(triplet2(0.0, 0.0, 0, 2.0));
  store.insert(triplet2(1.0, 0.0, 0, 0.5));
  // New label-1 point inside the first region adopts label 0; the second
  // stored region then matches and is no conflict.
  const auto rep = store.insert(triplet2(0.6, 0.0, 1, 1.0));
  CHECK(rep.final_label == 0);
  CHECK(rep.shrink_events.size() == 1);
  CHECK(store.verify().empty());
}

TEST_CASE("randomized insertion fuzzing never violates the invariant") {
  Rng rng(2024);
  for (int seq = 0; seq < 200; ++seq) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 4);
    const std::size_t len = 1 + rng.next_u64() % 40;
    CertStore store;
    for (std::size_t i = 0; i < len; ++i) {
      const Eigen::VectorXd c = 3.0 * rng.normal_vector(d);
      const int label = static_cast<int>(rng.next_u64() % 3);
      const double r = 2.0 * rng.uniform();
      store.insert(triplet(c, label, r));
    }
    CHECK(store.verify().empty());
    for (const auto& e : store.entries()) {
      CHECK(e.region.radius >= 0.0);
      CHECK(e.region.radius <= e.original_radius);
    }
  }
}

TEST_CASE("shrunk radii agree with the grid-membership oracle") {
  Rng rng(55);
  int tested = 0;
  while (tested < 100) {
    const Eigen::Vector2d c_old = rng.normal_vector(2);
    const double r_old = 0.3 + 0.8 * rng.uniform();
    const Eigen::Vector2d c_new = c_old + (0.2 + 1.3 * rng.uniform()) * rng.normal_vector(2).normalized();
    const double r_new = 0.3 + 0.8 * rng.uniform();
    Ball bo{c_old, r_old}, bn{c_new, r_new};
    if (!overlaps(bo, bn)) continue;
    const double dist = (c_new - c_old).norm();
    if (std::fabs(dist - r_old) < 0.03) continue;  // skip grid-ambiguous edge
    CertStore store;
    store.insert(triplet(c_old, 0, r_old));
    const auto rep = store.insert(triplet(c_new, 1, r_new));
    const bool inside = dist <= r_old;
    const double want = grid_oracle_radius(c_new, r_new, c_old, r_old, inside);
    CHECK(std::fabs(rep.final_radius - want) < 0.02);
    ++tested;
  }
}

TEST_CASE("snapshots round-trip bit exactly") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sscert_tests";
  fs::create_directories(dir);
  const auto path = (dir / "store.json").string();

  CertStore store;
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    store.insert(triplet(5.0 * rng.normal_vector(3), static_cast<int>(rng.next_u64() % 2),
                         rng.uniform()));
  }
  store.snapshot(path);
  const CertStore back = CertStore::restore(path);
  REQUIRE(back.size() == store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    CHECK(back.entry(i).input == store.entry(i).input);
    CHECK(back.entry(i).label == store.entry(i).label);
    CHECK(back.entry(i).region.radius == store.entry(i).region.radius);
    CHECK(back.entry(i).original_radius == store.entry(i).original_radius);
  }
  // A second snapshot of the restored store is byte-identical.
  const auto path2 = (dir / "store2.json").string();
  back.snapshot(path2);
  std::ifstream f1(path), f2(path2);
  const std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
}

TEST_CASE("dimension mismatches are rejected") {
  CertStore store;
  store.insert(triplet2(0.0, 0.0, 0, 1.0));
  CHECK_THROWS(store.insert(triplet(Eigen::Vector3d(0, 0, 0), 1, 1.0)));
}
