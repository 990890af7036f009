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

#ifndef SSCERT_BOUNDARY_HPP
#define SSCERT_BOUNDARY_HPP

#include <cstdint>
#include <vector>

#include "sscert/classifier.hpp"
#include "sscert/dataset.hpp"

namespace sscert {

struct BoundarySearchConfig {
  int max_iters = 100;
  // Tolerance on |phi_y| for a point to count as on-boundary; the line
  // search bisects until the residual falls below it.
  double line_search_tol = 1e-6;
  // Step scale c in alpha_t = c / sqrt(t + 1); c = step_scale * ||x - x0||.
  double step_scale = 0.1;
  // Opposite-side anchors: validation samples whose label differs from y.
  std::vector<Eigen::VectorXd> init_pool;
  std::uint64_t seed = 0;
};

struct BoundaryResult {
  Eigen::VectorXd boundary_point;
  double distance = 0.0;
  double residual_margin = 0.0;
  int iterations_used = 0;
  bool converged = false;
};

struct BoundarySearchFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Closest boundary point for (x, y): finds an on-boundary point by bisecting
// the margin sign change toward a pool anchor, then walks the boundary
// manifold with decaying tangential pulls toward x, re-projecting after each
// step. Reports the minimum-distance on-boundary iterate seen.
BoundaryResult closest_boundary_sample(const Classifier& model, const Eigen::VectorXd& x,
                                       int y, const BoundarySearchConfig& cfg);

struct DistanceHistogram {
  std::vector<double> distances;       // one per successfully searched sample
  std::vector<bool> converged;         // parallel to distances
  std::vector<std::size_t> failed;     // sample indices whose search failed
  std::vector<double> bin_edges;       // size bins + 1
  std::vector<std::size_t> bin_counts;
};

// Distances from each sample (all predicted y) to the decision boundary.
// Individual search failures are recorded, not fatal.
DistanceHistogram boundary_distance_histogram(const Classifier& model,
                                              const Dataset& samples, int y,
                                              const BoundarySearchConfig& cfg,
                                              std::size_t bins = 20);

}  // namespace sscert

#endif  // SSCERT_BOUNDARY_HPP
