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

#include "sscert/classifier.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sscert/errors.hpp"
#include "sscert/rng.hpp"
#include "sscert/stats.hpp"

namespace sscert {

namespace {

constexpr char kMagic[4] = {'S', 'S', 'C', 'M'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint8_t kTagLinear = 0;
constexpr std::uint8_t kTagMlp = 1;

void check_dim(const Classifier& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dim()) {
    throw ShapeError("input dimension " + std::to_string(x.size()) +
                     " does not match model dimension " + std::to_string(model.dim()));
  }
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("model file truncated");
  return v;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  write_pod<std::int64_t>(out, m.rows());
  write_pod<std::int64_t>(out, m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) write_pod<double>(out, m(r, c));
  }
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  const auto rows = read_pod<std::int64_t>(in);
  const auto cols = read_pod<std::int64_t>(in);
  if (rows < 0 || cols < 0 || rows > (1 << 24) || cols > (1 << 24)) {
    throw IoError("model file corrupt: bad matrix shape");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = read_pod<double>(in);
  }
  return m;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  write_pod<std::int64_t>(out, v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) write_pod<double>(out, v[i]);
}

Eigen::VectorXd read_vector(std::istream& in) {
  const auto n = read_pod<std::int64_t>(in);
  if (n < 0 || n > (1 << 24)) throw IoError("model file corrupt: bad vector size");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = read_pod<double>(in);
  return v;
}

int argmax_smallest_tie(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

int predict(const Classifier& model, const Eigen::VectorXd& x) {
  check_dim(model, x);
  return argmax_smallest_tie(model.logits(x));
}

LogitMargin logit_margin(const Classifier& model, const Eigen::VectorXd& x, int y) {
  check_dim(model, x);
  if (y < 0 || y >= model.num_classes()) {
    throw std::invalid_argument("logit_margin: label out of range");
  }
  const Eigen::VectorXd z = model.logits(x);
  int runner = y == 0 ? 1 : 0;
  for (int c = 0; c < z.size(); ++c) {
    if (c != y && z[c] > z[runner]) runner = c;
  }
  return LogitMargin{z[y] - z[runner], y, runner};
}

Eigen::VectorXd logit_gradient(const Classifier& model, const Eigen::VectorXd& x, int y) {
  check_dim(model, x);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(model.num_classes());
  v[y] = 1.0;
  return model.backprop(x, v);
}

Eigen::VectorXd margin_gradient(const Classifier& model, const Eigen::VectorXd& x, int y) {
  const LogitMargin m = logit_margin(model, x, y);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(model.num_classes());
  v[y] = 1.0;
  v[m.runner_up] -= 1.0;
  return model.backprop(x, v);
}

Eigen::VectorXd softmax_scores(const Classifier& model, const Eigen::VectorXd& x,
                               double temperature) {
  check_dim(model, x);
  Eigen::VectorXd z = temperature * model.logits(x);
  const double zmax = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - zmax).exp();
  return e / e.sum();
}

Eigen::VectorXd softmax_score_gradient(const Classifier& model, const Eigen::VectorXd& x,
                                       int y, double temperature) {
  const Eigen::VectorXd s = softmax_scores(model, x, temperature);
  Eigen::VectorXd v(s.size());
  for (int c = 0; c < s.size(); ++c) {
    v[c] = temperature * s[y] * ((c == y ? 1.0 : 0.0) - s[c]);
  }
  return model.backprop(x, v);
}

// ---------------------------------------------------------------------------
// LinearClassifier

LinearClassifier::LinearClassifier(Eigen::MatrixXd weights, Eigen::VectorXd biases)
    : weights_(std::move(weights)), biases_(std::move(biases)) {
  if (weights_.rows() != biases_.size()) {
    throw ShapeError("LinearClassifier: weights/biases class count mismatch");
  }
  if (!weights_.allFinite() || !biases_.allFinite()) {
    throw std::invalid_argument("LinearClassifier: non-finite parameters");
  }
}

LinearClassifier LinearClassifier::from_binary_score(const Eigen::VectorXd& w, double b) {
  Eigen::MatrixXd weights(2, w.size());
  weights.row(0) = -w.transpose();
  weights.row(1) = w.transpose();
  Eigen::VectorXd biases(2);
  biases << -b, b;
  return LinearClassifier(std::move(weights), std::move(biases));
}

Eigen::VectorXd LinearClassifier::logits(const Eigen::VectorXd& x) const {
  return weights_ * x + biases_;
}

Eigen::VectorXd LinearClassifier::backprop(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& v) const {
  (void)x;
  return weights_.transpose() * v;
}

std::unique_ptr<Classifier> LinearClassifier::clone() const {
  return std::make_unique<LinearClassifier>(*this);
}

void LinearClassifier::serialize(std::ostream& out) const {
  out.write(kMagic, 4);
  write_pod(out, kFormatVersion);
  write_pod(out, kTagLinear);
  write_matrix(out, weights_);
  write_vector(out, biases_);
}

// ---------------------------------------------------------------------------
// MlpClassifier

MlpClassifier::MlpClassifier(std::vector<Eigen::MatrixXd> weights,
                             std::vector<Eigen::VectorXd> biases)
    : weights_(std::move(weights)), biases_(std::move(biases)) {
  if (weights_.empty() || weights_.size() != biases_.size()) {
    throw ShapeError("MlpClassifier: need matching weight/bias layer lists");
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l].rows() != biases_[l].size()) {
      throw ShapeError("MlpClassifier: layer " + std::to_string(l) + " bias mismatch");
    }
    if (l > 0 && weights_[l].cols() != weights_[l - 1].rows()) {
      throw ShapeError("MlpClassifier: layer " + std::to_string(l) + " shape mismatch");
    }
  }
}

int MlpClassifier::num_classes() const { return static_cast<int>(weights_.back().rows()); }

Eigen::Index MlpClassifier::dim() const { return weights_.front().cols(); }

Eigen::VectorXd MlpClassifier::logits(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw ShapeError("MlpClassifier: input dimension mismatch");
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l + 1 < weights_.size(); ++l) {
    a = (weights_[l] * a + biases_[l]).array().tanh();
  }
  return weights_.back() * a + biases_.back();
}

Eigen::VectorXd MlpClassifier::backprop(const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& v) const {
  if (x.size() != dim()) throw ShapeError("MlpClassifier: input dimension mismatch");
  std::vector<Eigen::VectorXd> acts;
  acts.reserve(weights_.size());
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l + 1 < weights_.size(); ++l) {
    a = (weights_[l] * a + biases_[l]).array().tanh();
    acts.push_back(a);
  }
  Eigen::VectorXd g = weights_.back().transpose() * v;
  for (std::size_t l = weights_.size() - 1; l-- > 0;) {
    // d tanh = 1 - tanh^2, with acts[l] the post-activation of layer l.
    g = g.cwiseProduct(Eigen::VectorXd::Ones(acts[l].size()) -
                       acts[l].cwiseProduct(acts[l]));
    g = weights_[l].transpose() * g;
  }
  return g;
}

std::unique_ptr<Classifier> MlpClassifier::clone() const {
  return std::make_unique<MlpClassifier>(*this);
}

void MlpClassifier::serialize(std::ostream& out) const {
  out.write(kMagic, 4);
  write_pod(out, kFormatVersion);
  write_pod(out, kTagMlp);
  write_pod<std::int64_t>(out, static_cast<std::int64_t>(weights_.size()));
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    write_matrix(out, weights_[l]);
    write_vector(out, biases_[l]);
  }
}

LinearClassifier MlpClassifier::as_linear() const {
  if (weights_.size() != 1) {
    throw std::logic_error("as_linear: model has hidden layers");
  }
  return LinearClassifier(weights_[0], biases_[0]);
}

// ---------------------------------------------------------------------------
// Training

TrainResult train_classifier(const Dataset& data, const TrainHyperparams& hp) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const int num_classes = data.num_classes;
  if (n < num_classes) {
    throw TrainingError("train_classifier: need at least one sample per class");
  }
  const Eigen::Index d = data.dim;

  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(d));
  for (int h : hp.hidden_sizes) sizes.push_back(h);
  sizes.push_back(num_classes);

  Rng rng(derive_seed(hp.seed, "train-init"));
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
    Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * rng.normal();
    }
    weights.push_back(std::move(w));
    biases.emplace_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }

  Eigen::MatrixXd X(n, d);
  std::vector<int> labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X.row(i) = data.samples[i].features.transpose();
    labels[i] = data.samples[i].label;
  }

  const std::size_t L = weights.size();
  double loss = 0.0;
  for (int iter = 0; iter < hp.iters; ++iter) {
    // Forward, keeping post-activations per layer.
    std::vector<Eigen::MatrixXd> acts(L);
    Eigen::MatrixXd a = X;
    for (std::size_t l = 0; l + 1 < L; ++l) {
      acts[l] = ((a * weights[l].transpose()).rowwise() + biases[l].transpose())
                    .array()
                    .tanh();
      a = acts[l];
    }
    Eigen::MatrixXd logits =
        (a * weights[L - 1].transpose()).rowwise() + biases[L - 1].transpose();

    // Softmax cross-entropy.
    Eigen::MatrixXd p = logits;
    loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = p.row(i).maxCoeff();
      p.row(i) = (p.row(i).array() - m).exp();
      const double s = p.row(i).sum();
      p.row(i) /= s;
      loss -= std::log(std::max(p(i, labels[i]), 1e-300));
    }
    loss /= static_cast<double>(n);
    if (!std::isfinite(loss)) {
      throw TrainingError("train_classifier: loss diverged at iteration " +
                          std::to_string(iter));
    }

    Eigen::MatrixXd g = p;
    for (Eigen::Index i = 0; i < n; ++i) g(i, labels[i]) -= 1.0;
    g /= static_cast<double>(n);

    for (std::size_t l = L; l-- > 0;) {
      const Eigen::MatrixXd& input = (l == 0) ? X : acts[l - 1];
      const Eigen::MatrixXd dw = g.transpose() * input + hp.l2_reg * weights[l];
      const Eigen::VectorXd db = g.colwise().sum().transpose();
      if (l > 0) {
        g = (g * weights[l]).cwiseProduct(
            (1.0 - acts[l - 1].array().square()).matrix());
      }
      weights[l] -= hp.learning_rate * dw;
      biases[l] -= hp.learning_rate * db;
    }
  }

  auto model = std::make_unique<MlpClassifier>(std::move(weights), std::move(biases));
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (predict(*model, data.samples[i].features) == labels[i]) ++correct;
  }
  TrainResult res;
  res.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  res.final_loss = loss;
  res.model = std::move(model);
  return res;
}

// ---------------------------------------------------------------------------
// Linear smoothing oracle

double linear_smoothing_oracle(const LinearClassifier& model, const Eigen::VectorXd& x,
                               double sigma) {
  if (model.num_classes() != 2) {
    throw std::invalid_argument("linear_smoothing_oracle: binary models only");
  }
  if (sigma <= 0.0) throw std::domain_error("linear_smoothing_oracle: sigma must be > 0");
  check_dim(model, x);
  const Eigen::VectorXd dw = (model.weights().row(1) - model.weights().row(0)).transpose();
  const double db = model.biases()[1] - model.biases()[0];
  const double norm = dw.norm();
  if (norm == 0.0) {
    throw std::domain_error("linear_smoothing_oracle: degenerate model (zero weight)");
  }
  return normal_cdf((dw.dot(x) + db) / (sigma * norm));
}

// ---------------------------------------------------------------------------
// Persistence

std::unique_ptr<Classifier> deserialize_classifier(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != std::string(kMagic, 4)) {
    throw IoError("model file: bad magic");
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw IoError("model file: unsupported version " + std::to_string(version));
  }
  const auto tag = read_pod<std::uint8_t>(in);
  if (tag == kTagLinear) {
    Eigen::MatrixXd w = read_matrix(in);
    Eigen::VectorXd b = read_vector(in);
    return std::make_unique<LinearClassifier>(std::move(w), std::move(b));
  }
  if (tag == kTagMlp) {
    const auto layers = read_pod<std::int64_t>(in);
    if (layers < 1 || layers > 64) throw IoError("model file: bad layer count");
    std::vector<Eigen::MatrixXd> ws;
    std::vector<Eigen::VectorXd> bs;
    for (std::int64_t l = 0; l < layers; ++l) {
      ws.push_back(read_matrix(in));
      bs.push_back(read_vector(in));
    }
    return std::make_unique<MlpClassifier>(std::move(ws), std::move(bs));
  }
  throw IoError("model file: unknown type tag");
}

void save_classifier(const Classifier& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file: " + path);
  model.serialize(out);
  if (!out) throw IoError("write failed: " + path);
}

std::unique_ptr<Classifier> load_classifier(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  return deserialize_classifier(in);
}

std::string serialize_classifier_bytes(const Classifier& model) {
  std::ostringstream out(std::ios::binary);
  model.serialize(out);
  return out.str();
}

}  // namespace sscert
