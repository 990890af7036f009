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

#include "sscert/errors.hpp"
#include "sscert/poison.hpp"

using namespace sscert;

namespace {

Dataset blobs(std::size_t n_per_class, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> means = {Eigen::Vector3d(-3.0, 0.0, 0.0),
                                        Eigen::Vector3d(3.0, 0.0, 0.0)};
  return make_synthetic_gaussians(n_per_class, means, 0.5, seed);
}

}  // namespace

TEST_CASE("trigger deltas hit the l2 budget exactly") {
  for (auto kind : {TriggerKind::kOnePixel, TriggerKind::kFourPixel, TriggerKind::kBlending}) {
    TriggerSpec spec;
    spec.kind = kind;
    spec.budget = 0.1;
    spec.seed = 9;
    const Eigen::VectorXd delta = make_trigger_delta(spec, 8);
    CHECK(std::fabs(delta.norm() - 0.1) < 1e-9);
  }
}

TEST_CASE("pixel triggers touch only the trailing coordinates by default") {
  TriggerSpec spec;
  spec.kind = TriggerKind::kFourPixel;
  spec.budget = 0.2;
  const Eigen::VectorXd delta = make_trigger_delta(spec, 10);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(delta[i] == 0.0);
  for (Eigen::Index i = 6; i < 10; ++i) CHECK(delta[i] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("explicit coordinates are honored and validated") {
  TriggerSpec spec;
  spec.kind = TriggerKind::kOnePixel;
  spec.budget = 0.5;
  spec.coordinates = {2};
  const Eigen::VectorXd delta = make_trigger_delta(spec, 5);
  CHECK(delta[2] == 0.5);
  spec.coordinates = {7};
  CHECK_THROWS_AS(make_trigger_delta(spec, 5), ConfigError);
  spec.coordinates = {0, 1};
  CHECK_THROWS_AS(make_trigger_delta(spec, 5), ConfigError);
}

TEST_CASE("blending pattern is dense and seed-stable") {
  TriggerSpec spec;
  spec.kind = TriggerKind::kBlending;
  spec.budget = 1.0;
  spec.seed = 4;
  const Eigen::VectorXd a = make_trigger_delta(spec, 16);
  const Eigen::VectorXd b = make_trigger_delta(spec, 16);
  CHECK(a == b);
  int nonzero = 0;
  for (Eigen::Index i = 0; i < 16; ++i) nonzero += a[i] != 0.0;
  CHECK(nonzero == 16);
  spec.seed = 5;
  CHECK(make_trigger_delta(spec, 16) != a);
}

TEST_CASE("poisoning marks floor(rate n) samples and relabels them") {
  const Dataset clean = blobs(50, 3);  // n = 100
  TriggerSpec spec;
  spec.budget = 0.1;
  LabelGenerator gen;
  gen.target_label = 0;
  gen.num_classes = 2;
  const PoisonResult res =
      poison_dataset(clean, spec, gen, 0.13, PoisonSelection::kRandom, 77);
  CHECK(res.poisoned_indices.size() == 13);
  const Eigen::VectorXd delta = make_trigger_delta(spec, clean.dim);
  for (std::size_t i : res.poisoned_indices) {
    const Sample& s = res.dataset.samples[i];
    CHECK(s.is_poisoned);
    CHECK(s.label == 0);
    CHECK((s.features - clean.samples[i].features - delta).norm() < 1e-12);
  }
  std::size_t untouched = 0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    if (!res.dataset.samples[i].is_poisoned) {
      CHECK(res.dataset.samples[i].features == clean.samples[i].features);
      CHECK(res.dataset.samples[i].label == clean.samples[i].label);
      ++untouched;
    }
  }
  CHECK(untouched == 87);

  // Same seed, same selection.
  const PoisonResult res2 =
      poison_dataset(clean, spec, gen, 0.13, PoisonSelection::kRandom, 77);
  CHECK(res2.poisoned_indices == res.poisoned_indices);
}

TEST_CASE("all-to-all relabeling rotates labels") {
  LabelGenerator gen;
  gen.mode = AttackMode::kAllToAll;
  gen.num_classes = 3;
  CHECK(gen.relabel(0) == 1);
  CHECK(gen.relabel(2) == 0);
}

TEST_CASE("zero-budget selection is rejected") {
  const Dataset clean = blobs(4, 3);
  TriggerSpec spec;
  LabelGenerator gen;
  CHECK_THROWS_AS(poison_dataset(clean, spec, gen, 0.1, PoisonSelection::kRandom, 1),
                  ConfigError);
}

TEST_CASE("map vulnerable selection takes the smallest margins, ties by index") {
  // Margin along x0: samples nearer 0 are more vulnerable.
  Dataset test;
  test.num_classes = 2;
  test.dim = 1;
  for (double v : {2.0, 0.5, -0.1, 1.0}) {
    Sample s;
    s.features = Eigen::VectorXd::Constant(1, v);
    s.label = v > 0 ? 1 : 0;
    test.samples.push_back(s);
  }
  const auto model = LinearClassifier::from_binary_score(Eigen::VectorXd::Ones(1), 0.0);
  const auto vulnerable = map_select_vulnerable(model, test, 2);
  REQUIRE(vulnerable.size() == 2);
  CHECK(vulnerable[0] == 1);  // |0.5|
  CHECK(vulnerable[1] == 2);  // |-0.1| smallest, sorted output by index
}

TEST_CASE("map poison selection excludes the target class and ranks by distance") {
  Dataset train;
  train.num_classes = 2;
  train.dim = 1;
  for (double v : {10.0, 0.6, 0.4, -5.0}) {
    Sample s;
    s.features = Eigen::VectorXd::Constant(1, v);
    s.label = v == -5.0 ? 0 : 1;
    train.samples.push_back(s);
  }
  Dataset test;
  test.num_classes = 2;
  test.dim = 1;
  Sample t;
  t.features = Eigen::VectorXd::Constant(1, 0.5);
  t.label = 1;
  test.samples.push_back(t);

  // target label 0: sample 3 (label 0) is excluded even though it exists.
  const auto chosen = map_select_poison(train, {0}, test, 0, 2);
  REQUIRE(chosen.size() == 2);
  CHECK(chosen[0] == 1);
  CHECK(chosen[1] == 2);
  CHECK_THROWS_AS(map_select_poison(train, {0}, test, 1, 2), ConfigError);
}
