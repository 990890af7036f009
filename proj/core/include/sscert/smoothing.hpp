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

#ifndef SSCERT_SMOOTHING_HPP
#define SSCERT_SMOOTHING_HPP

#include <cstdint>
#include <vector>

#include "sscert/classifier.hpp"

namespace sscert {

// Sentinel label for a refused certification.
inline constexpr int kAbstain = -1;

// Probabilities are clamped to [kProbClip, 1 - kProbClip] before the normal
// quantile, which is infinite at 0 and 1.
inline constexpr double kProbClip = 1e-12;

struct VoteCounts {
  std::vector<std::int64_t> counts;  // one per class
  std::int64_t total = 0;

  // Two largest classes; exact count ties break toward the smaller label.
  std::pair<int, int> top_two() const;
};

struct ConfidenceBounds {
  double p_a_lower = 0.0;
  double p_b_upper = 1.0;
  double alpha = 0.001;
  int y_a = 0;
  int y_b = 0;
};

struct CertificationResult {
  int label = kAbstain;     // kAbstain or a class index
  double radius = 0.0;      // 0 when abstaining
  ConfidenceBounds bounds;
  double sigma_used = 0.0;

  bool abstained() const { return label == kAbstain; }
};

// Hard-prediction votes over n_samples draws of x + sigma * z, z ~ N(0, I).
// Draws are organized in fixed-size chunks with per-chunk derived seeds, so
// single- and multi-worker runs produce identical counts.
VoteCounts mc_class_probabilities(const Classifier& model, const Eigen::VectorXd& x,
                                  double sigma, std::int64_t n_samples,
                                  std::uint64_t seed, int workers = 1);

// sigma/2 * (Phi^-1(p_a) - Phi^-1(p_b)) after clamping; may be negative when
// p_a < p_b -- the caller decides whether to abstain.
double certified_radius(double p_a, double p_b, double sigma);

// Top-2 by counts, one-sided Clopper-Pearson bounds at level alpha, abstain
// iff P_A <= P_B. Shared by the Monte Carlo and ensemble certification paths.
CertificationResult certify_from_counts(const VoteCounts& votes, double sigma,
                                        double alpha);

CertificationResult certify_single(const Classifier& model, const Eigen::VectorXd& x,
                                   double sigma, std::int64_t n_samples, double alpha,
                                   std::uint64_t seed, int workers = 1);

}  // namespace sscert

#endif  // SSCERT_SMOOTHING_HPP
