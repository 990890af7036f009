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

#ifndef SSCERT_ENSEMBLE_HPP
#define SSCERT_ENSEMBLE_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sscert/classifier.hpp"
#include "sscert/dataset.hpp"
#include "sscert/noiseopt.hpp"
#include "sscert/smoothing.hpp"

namespace sscert {

// M models, each trained on its own noise-perturbed copy of the training
// set, plus one stored unit-scale base noise vector per model. The base
// vector's seed is a 64-bit hash of the model's canonical serialization, so
// it is reproducible from the model file alone and changes whenever any
// parameter changes.
class SmoothedEnsemble {
 public:
  SmoothedEnsemble() = default;
  SmoothedEnsemble(std::vector<std::unique_ptr<Classifier>> models,
                   std::vector<std::uint64_t> dataset_noise_seeds);
  SmoothedEnsemble(const SmoothedEnsemble& other);
  SmoothedEnsemble& operator=(const SmoothedEnsemble& other);
  SmoothedEnsemble(SmoothedEnsemble&&) = default;
  SmoothedEnsemble& operator=(SmoothedEnsemble&&) = default;

  std::size_t size() const { return models_.size(); }
  const Classifier& model(std::size_t m) const { return *models_[m]; }
  const Eigen::VectorXd& base_noise(std::size_t m) const { return base_noise_[m]; }
  const std::vector<std::uint64_t>& dataset_noise_seeds() const {
    return dataset_noise_seeds_;
  }
  int num_classes() const { return models_.front()->num_classes(); }
  Eigen::Index dim() const { return models_.front()->dim(); }

 private:
  std::vector<std::unique_ptr<Classifier>> models_;
  std::vector<Eigen::VectorXd> base_noise_;
  std::vector<std::uint64_t> dataset_noise_seeds_;
};

// The base noise vector for a model: d standard normals from a generator
// seeded with the FNV-1a hash of the model's serialized bytes.
Eigen::VectorXd derive_base_noise(const Classifier& model);

// Each sample perturbed by sigma_i * b_i, b_i ~ N(0, I) from the per-sample
// stream of seed_m; labels unchanged.
Dataset build_perturbed_dataset(const Dataset& poisoned, const NoiseAssignment& assignment,
                                std::uint64_t seed_m);

// Trains M models on independently perturbed datasets. Any model divergence
// aborts the build: M is the statistical sample size of the vote bound.
SmoothedEnsemble train_ensemble(const Dataset& poisoned, const NoiseAssignment& assignment,
                                int ensemble_size, const TrainHyperparams& hyper,
                                std::uint64_t seed, int workers = 1);

// Model m votes predict(model_m, x + sigma * mu_m); deterministic inference.
VoteCounts ensemble_votes(const SmoothedEnsemble& ensemble, const Eigen::VectorXd& x,
                          double sigma);

CertificationResult certify_ensemble(const SmoothedEnsemble& ensemble,
                                     const Eigen::VectorXd& x, double sigma_star,
                                     double alpha);

// Mean member softmax; the scale-optimization target for a trained ensemble.
class EnsembleScores final : public SoftScoreFn {
 public:
  explicit EnsembleScores(const SmoothedEnsemble& ensemble, double temperature = 1.0)
      : ensemble_(&ensemble), temperature_(temperature) {}
  int num_classes() const override { return ensemble_->num_classes(); }
  Eigen::Index dim() const override { return ensemble_->dim(); }
  Eigen::VectorXd scores(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd score_gradient(const Eigen::VectorXd& x, int y) const override;

 private:
  const SmoothedEnsemble* ensemble_;
  double temperature_;
};

// Model files plus a JSON manifest (seeds, hashes, sigma map reference)
// under a directory.
void save_ensemble(const SmoothedEnsemble& ensemble, const std::string& dir,
                   const std::string& sigma_map_ref = "");
SmoothedEnsemble load_ensemble(const std::string& manifest_path);

}  // namespace sscert

#endif  // SSCERT_ENSEMBLE_HPP
