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

#include "sscert/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "sscert/parallel.hpp"
#include "sscert/rng.hpp"
#include "sscert/stats.hpp"

namespace sscert {

namespace {
// The chunk layout is part of the seed derivation, which is what makes the
// counts independent of the worker count.
constexpr std::int64_t kMcChunk = 1024;
}  // namespace

std::pair<int, int> VoteCounts::top_two() const {
  int a = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
    if (counts[c] > counts[a]) a = c;
  }
  int b = a == 0 ? 1 : 0;
  for (int c = 0; c < static_cast<int>(counts.size()); ++c) {
    if (c != a && counts[c] > counts[b]) b = c;
  }
  return {a, b};
}

VoteCounts mc_class_probabilities(const Classifier& model, const Eigen::VectorXd& x,
                                  double sigma, std::int64_t n_samples,
                                  std::uint64_t seed, int workers) {
  if (sigma <= 0.0) throw std::domain_error("mc_class_probabilities: sigma must be > 0");
  const int num_classes = model.num_classes();
  const auto num_chunks =
      static_cast<std::size_t>((n_samples + kMcChunk - 1) / kMcChunk);
  std::vector<std::vector<std::int64_t>> chunk_counts(
      num_chunks, std::vector<std::int64_t>(num_classes, 0));

  parallel_for(num_chunks, workers, [&](std::size_t c) {
    Rng rng(derive_seed(seed, "mc-chunk", c));
    const std::int64_t begin = static_cast<std::int64_t>(c) * kMcChunk;
    const std::int64_t end = std::min(begin + kMcChunk, n_samples);
    Eigen::VectorXd z(x.size());
    for (std::int64_t i = begin; i < end; ++i) {
      for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rng.normal();
      ++chunk_counts[c][static_cast<std::size_t>(predict(model, x + sigma * z))];
    }
  });

  VoteCounts votes;
  votes.counts.assign(num_classes, 0);
  for (const auto& cc : chunk_counts) {
    for (int y = 0; y < num_classes; ++y) votes.counts[y] += cc[y];
  }
  votes.total = n_samples;
  return votes;
}

namespace {

// Quantile with the probability clamped to [kProbClip, 1 - kProbClip].
// Clamping happens in tail space: 1 - kProbClip is not representable, so
// clamping the value itself would make the two extremes asymmetric by ~3e-6.
double clamped_quantile(double p) {
  if (p > 0.5) return -clamped_quantile(1.0 - p);  // 1 - p is exact here
  return normal_quantile(std::max(p, kProbClip));
}

}  // namespace

double certified_radius(double p_a, double p_b, double sigma) {
  if (sigma <= 0.0) throw std::domain_error("certified_radius: sigma must be > 0");
  return 0.5 * sigma * (clamped_quantile(p_a) - clamped_quantile(p_b));
}

CertificationResult certify_from_counts(const VoteCounts& votes, double sigma,
                                        double alpha) {
  const auto [y_a, y_b] = votes.top_two();
  CertificationResult res;
  res.sigma_used = sigma;
  res.bounds.alpha = alpha;
  res.bounds.y_a = y_a;
  res.bounds.y_b = y_b;
  res.bounds.p_a_lower = binom_lower_bound(votes.counts[y_a], votes.total, alpha);
  res.bounds.p_b_upper = binom_upper_bound(votes.counts[y_b], votes.total, alpha);
  if (res.bounds.p_a_lower <= res.bounds.p_b_upper) {
    res.label = kAbstain;
    res.radius = 0.0;
    return res;
  }
  res.label = y_a;
  res.radius = certified_radius(res.bounds.p_a_lower, res.bounds.p_b_upper, sigma);
  return res;
}

CertificationResult certify_single(const Classifier& model, const Eigen::VectorXd& x,
                                   double sigma, std::int64_t n_samples, double alpha,
                                   std::uint64_t seed, int workers) {
  const VoteCounts votes =
      mc_class_probabilities(model, x, sigma, n_samples, seed, workers);
  return certify_from_counts(votes, sigma, alpha);
}

}  // namespace sscert
