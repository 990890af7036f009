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

#include <doctest.h>

#include "sscert/classifier.hpp"
#include "sscert/rng.hpp"
#include "sscert/stats.hpp"

using namespace sscert;

namespace {

MlpClassifier random_mlp(Eigen::Index d, int hidden, int classes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
  Eigen::MatrixXd w1(hidden, d);
  for (Eigen::Index i = 0; i < w1.size(); ++i) w1.data()[i] = rng.normal();
  Eigen::MatrixXd w2(classes, hidden);
  for (Eigen::Index i = 0; i < w2.size(); ++i) w2.data()[i] = rng.normal();
  w.push_back(w1);
  w.push_back(w2);
  b.push_back(0.1 * rng.normal_vector(hidden));
  b.push_back(0.1 * rng.normal_vector(classes));
  return MlpClassifier(std::move(w), std::move(b));
}

Dataset blobs(std::size_t n_per_class, double sep, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> means = {Eigen::Vector2d(-sep, 0.0),
                                        Eigen::Vector2d(sep, 0.0)};
  return make_synthetic_gaussians(n_per_class, means, 0.7, seed);
}

}  // namespace

TEST_CASE("predict breaks exact ties toward the smaller label") {
  Eigen::MatrixXd w(3, 2);
  w << 1.0, 0.0, 1.0, 0.0, 0.5, 0.0;
  const LinearClassifier model(w, Eigen::Vector3d::Zero());
  CHECK(predict(model, Eigen::Vector2d(2.0, 5.0)) == 0);  // classes 0 and 1 tie
}

TEST_CASE("logit margin and its gradient on a linear model") {
  Eigen::MatrixXd w(2, 2);
  w << 1.0, 0.0, -1.0, 0.0;
  const LinearClassifier model(w, Eigen::Vector2d::Zero());
  const Eigen::Vector2d x(0.7, 3.0);
  const auto m = logit_margin(model, x, 0);
  CHECK(m.value == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(m.runner_up == 1);
  const Eigen::VectorXd g = margin_gradient(model, x, 0);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mlp backprop matches finite differences") {
  const auto model = random_mlp(3, 5, 2, 11);
  Rng rng(21);
  const Eigen::VectorXd x = rng.normal_vector(3);
  const Eigen::Vector2d v(0.8, -0.3);
  const Eigen::VectorXd g = model.backprop(x, v);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < 3; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd =
        (v.dot(model.logits(xp)) - v.dot(model.logits(xm))) / (2.0 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("softmax scores sum to one and gradient matches finite differences") {
  const auto model = random_mlp(4, 6, 3, 31);
  Rng rng(32);
  const Eigen::VectorXd x = rng.normal_vector(4);
  const Eigen::VectorXd s = softmax_scores(model, x);
  CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.minCoeff() > 0.0);
  for (int y = 0; y < 3; ++y) {
    const Eigen::VectorXd g = softmax_score_gradient(model, x, y);
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < 4; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd =
          (softmax_scores(model, xp)[y] - softmax_scores(model, xm)[y]) / (2.0 * h);
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("training separates well-separated blobs deterministically") {
  const Dataset data = blobs(100, 3.0, 5);
  TrainHyperparams hp;
  hp.hidden_sizes = {8};
  hp.seed = 17;
  const TrainResult a = train_classifier(data, hp);
  const TrainResult b = train_classifier(data, hp);
  CHECK(a.train_accuracy > 0.97);
  CHECK(a.train_accuracy == b.train_accuracy);
  CHECK(serialize_classifier_bytes(*a.model) == serialize_classifier_bytes(*b.model));

  TrainHyperparams hp2 = hp;
  hp2.seed = 18;
  const TrainResult c = train_classifier(data, hp2);
  CHECK(serialize_classifier_bytes(*a.model) != serialize_classifier_bytes(*c.model));
}

TEST_CASE("linear training works too") {
  const Dataset data = blobs(100, 3.0, 6);
  TrainHyperparams hp;
  const TrainResult r = train_classifier(data, hp);
  CHECK(r.train_accuracy > 0.97);
}

TEST_CASE("model files round-trip bit exactly") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sscert_tests";
  fs::create_directories(dir);

  const auto mlp = random_mlp(3, 4, 2, 41);
  const auto path = (dir / "model.bin").string();
  save_classifier(mlp, path);
  const auto back = load_classifier(path);
  CHECK(serialize_classifier_bytes(mlp) == serialize_classifier_bytes(*back));

  const auto lin = LinearClassifier::from_binary_score(Eigen::Vector3d(1.0, -2.0, 0.5), 0.3);
  const auto lpath = (dir / "linear.bin").string();
  save_classifier(lin, lpath);
  const auto lback = load_classifier(lpath);
  CHECK(serialize_classifier_bytes(lin) == serialize_classifier_bytes(*lback));
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd x = rng.normal_vector(3);
    CHECK(lback->logits(x) == lin.logits(x));
  }
}

TEST_CASE("binary score encoding: sign decides the class, zero goes to 0") {
  const auto model = LinearClassifier::from_binary_score(Eigen::Vector2d(1.0, 0.0), 0.0);
  CHECK(predict(model, Eigen::Vector2d(0.5, 0.0)) == 1);
  CHECK(predict(model, Eigen::Vector2d(-0.5, 0.0)) == 0);
  CHECK(predict(model, Eigen::Vector2d(0.0, 7.0)) == 0);
}

TEST_CASE("linear smoothing oracle matches the closed form") {
  const Eigen::Vector2d w(2.0, -1.0);
  const double b = 0.4;
  const auto model = LinearClassifier::from_binary_score(w, b);
  const Eigen::Vector2d x(0.3, 0.9);
  const double sigma = 0.7;
  const double want = normal_cdf((w.dot(x) + b) / (sigma * w.norm()));
  CHECK(linear_smoothing_oracle(model, x, sigma) == doctest::Approx(want).epsilon(1e-14));
}
