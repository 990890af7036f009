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

#ifndef SSCERT_NOISEOPT_HPP
#define SSCERT_NOISEOPT_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "sscert/classifier.hpp"
#include "sscert/dataset.hpp"

namespace sscert {

// Differentiable class-probability target for the scale optimization. Soft
// scores stand in for hard vote frequencies, which have zero gradient in the
// scale almost everywhere.
class SoftScoreFn {
 public:
  virtual ~SoftScoreFn() = default;
  virtual int num_classes() const = 0;
  virtual Eigen::Index dim() const = 0;
  // Probability vector; sums to 1.
  virtual Eigen::VectorXd scores(const Eigen::VectorXd& x) const = 0;
  // d scores[y] / dx.
  virtual Eigen::VectorXd score_gradient(const Eigen::VectorXd& x, int y) const = 0;
};

// Softmax scores of a single classifier at the given temperature.
class ClassifierScores final : public SoftScoreFn {
 public:
  explicit ClassifierScores(const Classifier& model, double temperature = 1.0)
      : model_(&model), temperature_(temperature) {}
  int num_classes() const override { return model_->num_classes(); }
  Eigen::Index dim() const override { return model_->dim(); }
  Eigen::VectorXd scores(const Eigen::VectorXd& x) const override {
    return softmax_scores(*model_, x, temperature_);
  }
  Eigen::VectorXd score_gradient(const Eigen::VectorXd& x, int y) const override {
    return softmax_score_gradient(*model_, x, y, temperature_);
  }

 private:
  const Classifier* model_;
  double temperature_;
};

struct SgaConfig {
  int iters = 100;          // T
  int mc_per_step = 8;      // J
  double learning_rate = 1e-4;
  double sigma_init = 0.25;
  double sigma_floor = kSigmaFloor;
  double sigma_ceiling = 0.0;  // 0 => 4 * sigma_init
  double clamp_eps = 1e-12;

  double ceiling() const { return sigma_ceiling > 0.0 ? sigma_ceiling : 4.0 * sigma_init; }
};

// Mean of soft class scores over J reparameterized draws x + sigma * z_j.
Eigen::VectorXd soft_class_frequencies(const SoftScoreFn& fn, const Eigen::VectorXd& x,
                                       double sigma, int mc_samples, std::uint64_t seed);

struct SurrogateEval {
  double radius = 0.0;       // sigma/2 (Phi^-1(F_A) - Phi^-1(F_B)), clamped probs
  double grad = 0.0;         // pathwise d radius / d sigma under the same draws
  Eigen::VectorXd freqs;     // the averaged soft frequencies
  int y_a = 0;
  int y_b = 0;
};

// Radius surrogate and its pathwise scale-gradient for a FIXED set of unit
// draws (common random numbers). The gradient has the explicit sigma term
// plus the chain term through each frequency, mean_j(grad score . z_j);
// clamped frequencies contribute no chain term.
SurrogateEval surrogate_radius(const SoftScoreFn& fn, const Eigen::VectorXd& x,
                               double sigma, const std::vector<Eigen::VectorXd>& unit_draws,
                               double clamp_eps = 1e-12);

// One ascent step: sigma + lr * grad, clipped to [floor, ceiling]. A
// non-finite gradient skips the step and leaves sigma unchanged.
double sga_step(const SoftScoreFn& fn, const Eigen::VectorXd& x, double sigma,
                const SgaConfig& cfg, std::uint64_t step_seed);

// T steps from sigma_init; returns the final iterate.
double optimize_sigma(const SoftScoreFn& fn, const Eigen::VectorXd& x,
                      const SgaConfig& cfg, std::uint64_t seed);

// Per-sample optimization over a whole dataset; failures fall back to
// sigma_init (counted in the result).
struct OptimizeAllResult {
  NoiseAssignment assignment;
  std::size_t failures = 0;
};
OptimizeAllResult optimize_all(const SoftScoreFn& fn, const Dataset& data,
                               const SgaConfig& cfg, std::uint64_t seed,
                               int workers = 1);

}  // namespace sscert

#endif  // SSCERT_NOISEOPT_HPP
