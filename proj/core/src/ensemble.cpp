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

#include "sscert/ensemble.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sscert/errors.hpp"
#include "sscert/parallel.hpp"
#include "sscert/rng.hpp"

namespace sscert {

namespace fs = std::filesystem;
using nlohmann::json;

SmoothedEnsemble::SmoothedEnsemble(std::vector<std::unique_ptr<Classifier>> models,
                                   std::vector<std::uint64_t> dataset_noise_seeds)
    : models_(std::move(models)), dataset_noise_seeds_(std::move(dataset_noise_seeds)) {
  if (models_.empty()) throw ConfigError("SmoothedEnsemble: need at least one model");
  base_noise_.reserve(models_.size());
  for (const auto& m : models_) base_noise_.push_back(derive_base_noise(*m));
}

SmoothedEnsemble::SmoothedEnsemble(const SmoothedEnsemble& other)
    : base_noise_(other.base_noise_), dataset_noise_seeds_(other.dataset_noise_seeds_) {
  models_.reserve(other.models_.size());
  for (const auto& m : other.models_) models_.push_back(m->clone());
}

SmoothedEnsemble& SmoothedEnsemble::operator=(const SmoothedEnsemble& other) {
  if (this != &other) {
    SmoothedEnsemble tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

Eigen::VectorXd derive_base_noise(const Classifier& model) {
  const std::string bytes = serialize_classifier_bytes(model);
  Rng rng(fnv1a64(bytes.data(), bytes.size()));
  return rng.normal_vector(model.dim());
}

Dataset build_perturbed_dataset(const Dataset& poisoned, const NoiseAssignment& assignment,
                                std::uint64_t seed_m) {
  Dataset out = poisoned;
  for (std::size_t i = 0; i < out.size(); ++i) {
    Rng rng(derive_seed(seed_m, i));
    out.samples[i].features +=
        assignment.sigma_for(i) * rng.normal_vector(out.dim);
  }
  return out;
}

SmoothedEnsemble train_ensemble(const Dataset& poisoned, const NoiseAssignment& assignment,
                                int ensemble_size, const TrainHyperparams& hyper,
                                std::uint64_t seed, int workers) {
  if (ensemble_size < 1) throw ConfigError("train_ensemble: M must be >= 1");
  std::vector<std::unique_ptr<Classifier>> models(static_cast<std::size_t>(ensemble_size));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(ensemble_size));
  for (std::size_t m = 0; m < seeds.size(); ++m) {
    seeds[m] = derive_seed(seed, "dataset-noise", m);
  }
  parallel_for(models.size(), workers, [&](std::size_t m) {
    const Dataset perturbed = build_perturbed_dataset(poisoned, assignment, seeds[m]);
    TrainHyperparams hp = hyper;
    hp.seed = derive_seed(seed, "model-init", m);
    models[m] = train_classifier(perturbed, hp).model;  // TrainingError aborts the build
  });
  return SmoothedEnsemble(std::move(models), std::move(seeds));
}

VoteCounts ensemble_votes(const SmoothedEnsemble& ensemble, const Eigen::VectorXd& x,
                          double sigma) {
  if (x.size() != ensemble.dim()) throw ShapeError("ensemble_votes: dimension mismatch");
  VoteCounts votes;
  votes.counts.assign(ensemble.num_classes(), 0);
  for (std::size_t m = 0; m < ensemble.size(); ++m) {
    ++votes.counts[static_cast<std::size_t>(
        predict(ensemble.model(m), x + sigma * ensemble.base_noise(m)))];
  }
  votes.total = static_cast<std::int64_t>(ensemble.size());
  return votes;
}

CertificationResult certify_ensemble(const SmoothedEnsemble& ensemble,
                                     const Eigen::VectorXd& x, double sigma_star,
                                     double alpha) {
  if (sigma_star <= 0.0) throw std::domain_error("certify_ensemble: sigma must be > 0");
  return certify_from_counts(ensemble_votes(ensemble, x, sigma_star), sigma_star, alpha);
}

Eigen::VectorXd EnsembleScores::scores(const Eigen::VectorXd& x) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(num_classes());
  for (std::size_t m = 0; m < ensemble_->size(); ++m) {
    s += softmax_scores(ensemble_->model(m), x, temperature_);
  }
  return s / static_cast<double>(ensemble_->size());
}

Eigen::VectorXd EnsembleScores::score_gradient(const Eigen::VectorXd& x, int y) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim());
  for (std::size_t m = 0; m < ensemble_->size(); ++m) {
    g += softmax_score_gradient(ensemble_->model(m), x, y, temperature_);
  }
  return g / static_cast<double>(ensemble_->size());
}

void save_ensemble(const SmoothedEnsemble& ensemble, const std::string& dir,
                   const std::string& sigma_map_ref) {
  fs::create_directories(dir);
  json manifest;
  manifest["version"] = 1;
  manifest["ensemble_size"] = ensemble.size();
  manifest["dim"] = ensemble.dim();
  manifest["sigma_map_ref"] = sigma_map_ref;
  json models = json::array();
  for (std::size_t m = 0; m < ensemble.size(); ++m) {
    char name[32];
    std::snprintf(name, sizeof(name), "model_%04zu.bin", m);
    save_classifier(ensemble.model(m), (fs::path(dir) / name).string());
    const std::string bytes = serialize_classifier_bytes(ensemble.model(m));
    json entry;
    entry["file"] = name;
    entry["dataset_noise_seed"] = ensemble.dataset_noise_seeds()[m];
    entry["param_hash"] = fnv1a64(bytes.data(), bytes.size());
    models.push_back(entry);
  }
  manifest["models"] = models;
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) throw IoError("cannot write ensemble manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

SmoothedEnsemble load_ensemble(const std::string& manifest_path) {
  fs::path path(manifest_path);
  if (fs::is_directory(path)) path /= "manifest.json";
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ensemble manifest: " + path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw IoError("corrupt ensemble manifest: " + std::string(e.what()));
  }
  if (manifest.value("version", 0) != 1) {
    throw IoError("unsupported ensemble manifest version");
  }
  const fs::path dir = path.parent_path();
  std::vector<std::unique_ptr<Classifier>> models;
  std::vector<std::uint64_t> seeds;
  for (const auto& entry : manifest.at("models")) {
    auto model = load_classifier((dir / entry.at("file").get<std::string>()).string());
    const std::string bytes = serialize_classifier_bytes(*model);
    if (fnv1a64(bytes.data(), bytes.size()) != entry.at("param_hash").get<std::uint64_t>()) {
      throw IoError("ensemble model hash mismatch: " + entry.at("file").get<std::string>());
    }
    models.push_back(std::move(model));
    seeds.push_back(entry.at("dataset_noise_seed").get<std::uint64_t>());
  }
  return SmoothedEnsemble(std::move(models), std::move(seeds));
}

}  // namespace sscert
