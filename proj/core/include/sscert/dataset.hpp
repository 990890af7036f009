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

#ifndef SSCERT_DATASET_HPP
#define SSCERT_DATASET_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sscert {

// Hard floor on smoothing scales; the certified radius degenerates as the
// scale approaches zero, so scales are never allowed to reach it.
inline constexpr double kSigmaFloor = 1e-3;

struct Sample {
  Eigen::VectorXd features;
  int label = 0;
  std::optional<Eigen::VectorXd> trigger_delta;
  bool is_poisoned = false;
};

// Ordered sample collection; index i is the identity of sample i, and every
// per-sample map in the library keys on that index.
struct Dataset {
  std::vector<Sample> samples;
  int num_classes = 0;
  Eigen::Index dim = 0;

  std::size_t size() const { return samples.size(); }
};

// Per-sample smoothing scales, default_sigma filling unlisted indices.
struct NoiseAssignment {
  std::map<std::size_t, double> per_sample_sigma;
  double default_sigma = 0.25;

  double sigma_for(std::size_t index) const {
    auto it = per_sample_sigma.find(index);
    return it == per_sample_sigma.end() ? default_sigma : it->second;
  }
};

// CSV with header f0,...,f{d-1},label[,poisoned,delta0,...,delta{d-1}].
// Poison columns are written only when the dataset contains poisoned samples.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& ds, const std::string& path);

// Reproducible Gaussian blobs: one cluster per mean, n_per_class samples
// each, class label = cluster index. Identical seed => bit-identical output.
Dataset make_synthetic_gaussians(std::size_t n_per_class,
                                 const std::vector<Eigen::VectorXd>& means,
                                 double std_dev, std::uint64_t seed);

// Full-precision (round-trippable) decimal rendering of a double.
std::string format_double(double v);

void save_noise_assignment(const NoiseAssignment& na, const std::string& path);
NoiseAssignment load_noise_assignment(const std::string& path);

}  // namespace sscert

#endif  // SSCERT_DATASET_HPP
