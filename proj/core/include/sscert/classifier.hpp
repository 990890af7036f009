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

#ifndef SSCERT_CLASSIFIER_HPP
#define SSCERT_CLASSIFIER_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sscert/dataset.hpp"

namespace sscert {

struct LogitMargin {
  double value = 0.0;
  int top_label = 0;
  int runner_up = 0;
};

// Differentiable score function over K classes. Immutable after
// construction/training; evaluation is reentrant.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual int num_classes() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::VectorXd logits(const Eigen::VectorXd& x) const = 0;
  // Gradient of v . logits(x) with respect to x (one backward pass).
  virtual Eigen::VectorXd backprop(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v) const = 0;
  virtual std::unique_ptr<Classifier> clone() const = 0;
  virtual void serialize(std::ostream& out) const = 0;
};

// Argmax over logits; exact ties break toward the smaller label index.
int predict(const Classifier& model, const Eigen::VectorXd& x);

// phi_y(x) = logit_y - max_{y' != y} logit_{y'}.
LogitMargin logit_margin(const Classifier& model, const Eigen::VectorXd& x, int y);

// d logit_y / dx.
Eigen::VectorXd logit_gradient(const Classifier& model, const Eigen::VectorXd& x, int y);
// d phi_y / dx = grad logit_y - grad logit_{y'}, y' the active runner-up.
Eigen::VectorXd margin_gradient(const Classifier& model, const Eigen::VectorXd& x, int y);

// softmax(temperature * logits); sums to 1 exactly.
Eigen::VectorXd softmax_scores(const Classifier& model, const Eigen::VectorXd& x,
                               double temperature = 1.0);
// d softmax_y / dx at the given temperature.
Eigen::VectorXd softmax_score_gradient(const Classifier& model, const Eigen::VectorXd& x,
                                       int y, double temperature = 1.0);

class LinearClassifier final : public Classifier {
 public:
  LinearClassifier(Eigen::MatrixXd weights, Eigen::VectorXd biases);
  // Binary signed-score model with symmetric two-logit encoding {+s, -s},
  // s = w . x + b. Class 1 wins iff s > 0 (the argmax tie rule sends s = 0
  // to class 0).
  static LinearClassifier from_binary_score(const Eigen::VectorXd& w, double b);

  int num_classes() const override { return static_cast<int>(weights_.rows()); }
  Eigen::Index dim() const override { return weights_.cols(); }
  Eigen::VectorXd logits(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd backprop(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& v) const override;
  std::unique_ptr<Classifier> clone() const override;
  void serialize(std::ostream& out) const override;

  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& biases() const { return biases_; }

 private:
  Eigen::MatrixXd weights_;  // K x d
  Eigen::VectorXd biases_;   // K
};

// Fully connected net with tanh hidden activations and linear output logits.
// The smooth activation keeps input gradients defined everywhere, which the
// scale-optimization path requires. An empty hidden list gives a plain
// linear softmax model.
class MlpClassifier final : public Classifier {
 public:
  MlpClassifier(std::vector<Eigen::MatrixXd> weights, std::vector<Eigen::VectorXd> biases);

  int num_classes() const override;
  Eigen::Index dim() const override;
  Eigen::VectorXd logits(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd backprop(const Eigen::VectorXd& x,
                           const Eigen::VectorXd& v) const override;
  std::unique_ptr<Classifier> clone() const override;
  void serialize(std::ostream& out) const override;

  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  // Defined only when there are no hidden layers.
  LinearClassifier as_linear() const;

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

struct TrainHyperparams {
  std::vector<int> hidden_sizes;  // empty => linear softmax
  int iters = 300;
  double learning_rate = 0.5;
  double l2_reg = 1e-4;
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::unique_ptr<Classifier> model;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
};

// Full-batch gradient descent on cross-entropy; deterministic given the seed.
// Throws TrainingError if the loss goes non-finite.
TrainResult train_classifier(const Dataset& data, const TrainHyperparams& hp);

// Exact probability that a binary linear model classifies x + sigma * Z as
// class 1, Z ~ N(0, I): Phi(score / (sigma * ||delta_w||)).
double linear_smoothing_oracle(const LinearClassifier& model, const Eigen::VectorXd& x,
                               double sigma);

// Versioned binary model files; round-trips are bit-exact.
void save_classifier(const Classifier& model, const std::string& path);
std::unique_ptr<Classifier> load_classifier(const std::string& path);
std::unique_ptr<Classifier> deserialize_classifier(std::istream& in);
std::string serialize_classifier_bytes(const Classifier& model);

}  // namespace sscert

#endif  // SSCERT_CLASSIFIER_HPP
