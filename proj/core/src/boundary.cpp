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

#include "sscert/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sscert/rng.hpp"

namespace sscert {

namespace {

double margin_at(const Classifier& model, const Eigen::VectorXd& z, int y) {
  return logit_margin(model, z, y).value;
}

// Bisection for the zero crossing of phi on the segment [neg, pos],
// phi(neg) <= 0 <= phi(pos); runs until |phi| <= tol.
Eigen::VectorXd bisect_crossing(const Classifier& model, Eigen::VectorXd neg,
                                Eigen::VectorXd pos, int y, double tol) {
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd mid = 0.5 * (neg + pos);
    const double phi = margin_at(model, mid, y);
    if (std::fabs(phi) <= tol) return mid;
    if (phi > 0.0) {
      pos = std::move(mid);
    } else {
      neg = std::move(mid);
    }
  }
  return 0.5 * (neg + pos);
}

// Pulls z back onto the boundary along the margin gradient. Falls back to
// bisection against the anchor if Newton steps fail to settle.
bool reproject(const Classifier& model, Eigen::VectorXd& z, int y,
               const Eigen::VectorXd& neg_anchor, double tol) {
  for (int it = 0; it < 60; ++it) {
    const double phi = margin_at(model, z, y);
    if (std::fabs(phi) <= tol) return true;
    const Eigen::VectorXd g = margin_gradient(model, z, y);
    const double g2 = g.squaredNorm();
    if (g2 < 1e-30 || !std::isfinite(phi)) break;
    z -= (phi / g2) * g;
  }
  if (margin_at(model, z, y) > 0.0 && margin_at(model, neg_anchor, y) <= 0.0) {
    z = bisect_crossing(model, neg_anchor, z, y, tol);
    return std::fabs(margin_at(model, z, y)) <= tol;
  }
  return false;
}

}  // namespace

BoundaryResult closest_boundary_sample(const Classifier& model, const Eigen::VectorXd& x,
                                       int y, const BoundarySearchConfig& cfg) {
  if (cfg.line_search_tol <= 0.0) {
    throw std::domain_error("closest_boundary_sample: tolerance must be > 0");
  }
  const double tol = cfg.line_search_tol;

  const double phi_x = margin_at(model, x, y);
  if (std::fabs(phi_x) <= tol) {
    return BoundaryResult{x, 0.0, std::fabs(phi_x), 0, true};
  }
  if (phi_x < 0.0) {
    throw BoundarySearchFailure("closest_boundary_sample: x is not classified y");
  }

  // Anchor selection: shuffle the pool deterministically, take the first
  // element on the opposite side of the boundary.
  if (cfg.init_pool.empty()) {
    throw BoundarySearchFailure("closest_boundary_sample: empty init pool");
  }
  std::vector<std::size_t> order(cfg.init_pool.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(cfg.seed, "boundary-pool"));
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const std::size_t j = i + rng.next_u64() % (order.size() - i);
    std::swap(order[i], order[j]);
  }
  const Eigen::VectorXd* anchor = nullptr;
  for (std::size_t i : order) {
    if (margin_at(model, cfg.init_pool[i], y) <= 0.0) {
      anchor = &cfg.init_pool[i];
      break;
    }
  }
  if (anchor == nullptr) {
    throw BoundarySearchFailure(
        "closest_boundary_sample: no sign change against any pool element");
  }

  // First on-boundary point: crossing of the segment [anchor, x].
  Eigen::VectorXd z = bisect_crossing(model, *anchor, x, y, tol);
  Eigen::VectorXd best = z;
  double best_dist = (z - x).norm();

  const double step_c = cfg.step_scale * (x - *anchor).norm();
  bool converged = false;
  int t = 0;
  for (; t < cfg.max_iters; ++t) {
    const Eigen::VectorXd g = margin_gradient(model, z, y);
    const double gnorm = g.norm();
    if (gnorm < 1e-15) break;
    const Eigen::VectorXd n_hat = g / gnorm;
    const Eigen::VectorXd to_x = x - z;
    Eigen::VectorXd tang = to_x - to_x.dot(n_hat) * n_hat;
    const double tnorm = tang.norm();
    if (tnorm <= tol) {
      converged = true;
      break;
    }
    const double alpha = step_c / std::sqrt(static_cast<double>(t + 1));
    Eigen::VectorXd cand = z + std::min(1.0, alpha / tnorm) * tang;
    if (!reproject(model, cand, y, *anchor, tol)) break;
    z = std::move(cand);
    const double dist = (z - x).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = z;
    }
  }

  BoundaryResult res;
  res.residual_margin = std::fabs(margin_at(model, best, y));
  res.boundary_point = std::move(best);
  res.distance = best_dist;
  res.iterations_used = t;
  res.converged = converged || res.residual_margin <= tol;
  if (t >= cfg.max_iters) res.converged = converged;
  return res;
}

DistanceHistogram boundary_distance_histogram(const Classifier& model,
                                              const Dataset& samples, int y,
                                              const BoundarySearchConfig& cfg,
                                              std::size_t bins) {
  DistanceHistogram hist;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    BoundarySearchConfig per = cfg;
    per.seed = derive_seed(cfg.seed, "histogram-sample", i);
    try {
      const auto res = closest_boundary_sample(model, samples.samples[i].features, y, per);
      hist.distances.push_back(res.distance);
      hist.converged.push_back(res.converged);
    } catch (const BoundarySearchFailure&) {
      hist.failed.push_back(i);
    }
  }
  if (hist.distances.empty() || bins == 0) return hist;

  const auto [mn_it, mx_it] = std::minmax_element(hist.distances.begin(), hist.distances.end());
  double lo = *mn_it, hi = *mx_it;
  if (hi <= lo) hi = lo + 1.0;  // all-equal distances collapse into one bin
  hist.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    hist.bin_edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  }
  hist.bin_counts.assign(bins, 0);
  for (double dist : hist.distances) {
    auto b = static_cast<std::size_t>((dist - lo) / (hi - lo) * static_cast<double>(bins));
    if (b >= bins) b = bins - 1;
    ++hist.bin_counts[b];
  }
  return hist;
}

}  // namespace sscert
