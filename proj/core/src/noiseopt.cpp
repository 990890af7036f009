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

#include "sscert/noiseopt.hpp"

#include <algorithm>
#include <cmath>

#include "sscert/parallel.hpp"
#include "sscert/rng.hpp"
#include "sscert/stats.hpp"

namespace sscert {

namespace {

std::vector<Eigen::VectorXd> draw_units(Eigen::Index d, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> z;
  z.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) z.push_back(rng.normal_vector(d));
  return z;
}

}  // namespace

Eigen::VectorXd soft_class_frequencies(const SoftScoreFn& fn, const Eigen::VectorXd& x,
                                       double sigma, int mc_samples, std::uint64_t seed) {
  if (sigma <= 0.0) throw std::domain_error("soft_class_frequencies: sigma must be > 0");
  if (mc_samples < 1) throw std::invalid_argument("soft_class_frequencies: J must be >= 1");
  const auto draws = draw_units(x.size(), mc_samples, seed);
  Eigen::VectorXd freqs = Eigen::VectorXd::Zero(fn.num_classes());
  for (const auto& z : draws) freqs += fn.scores(x + sigma * z);
  return freqs / static_cast<double>(mc_samples);
}

SurrogateEval surrogate_radius(const SoftScoreFn& fn, const Eigen::VectorXd& x,
                               double sigma, const std::vector<Eigen::VectorXd>& unit_draws,
                               double clamp_eps) {
  const auto count = static_cast<double>(unit_draws.size());
  Eigen::VectorXd freqs = Eigen::VectorXd::Zero(fn.num_classes());
  for (const auto& z : unit_draws) freqs += fn.scores(x + sigma * z);
  freqs /= count;

  SurrogateEval ev;
  ev.freqs = freqs;
  // argmax with ties toward the smaller label, then the runner-up.
  for (int c = 1; c < freqs.size(); ++c) {
    if (freqs[c] > freqs[ev.y_a]) ev.y_a = c;
  }
  ev.y_b = ev.y_a == 0 ? 1 : 0;
  for (int c = 0; c < freqs.size(); ++c) {
    if (c != ev.y_a && freqs[c] > freqs[ev.y_b]) ev.y_b = c;
  }

  const double fa = std::clamp(freqs[ev.y_a], clamp_eps, 1.0 - clamp_eps);
  const double fb = std::clamp(freqs[ev.y_b], clamp_eps, 1.0 - clamp_eps);
  const double qa = normal_quantile(fa);
  const double qb = normal_quantile(fb);
  ev.radius = 0.5 * sigma * (qa - qb);

  // dF_y/dsigma = mean_j grad score_y(x + sigma z_j) . z_j; a clamped
  // frequency is flat in sigma and contributes nothing.
  double dfa = 0.0, dfb = 0.0;
  const bool a_clamped = freqs[ev.y_a] <= clamp_eps || freqs[ev.y_a] >= 1.0 - clamp_eps;
  const bool b_clamped = freqs[ev.y_b] <= clamp_eps || freqs[ev.y_b] >= 1.0 - clamp_eps;
  if (!a_clamped || !b_clamped) {
    for (const auto& z : unit_draws) {
      const Eigen::VectorXd xz = x + sigma * z;
      if (!a_clamped) dfa += fn.score_gradient(xz, ev.y_a).dot(z);
      if (!b_clamped) dfb += fn.score_gradient(xz, ev.y_b).dot(z);
    }
    dfa /= count;
    dfb /= count;
  }
  const double chain_a = a_clamped ? 0.0 : dfa / normal_pdf(qa);
  const double chain_b = b_clamped ? 0.0 : dfb / normal_pdf(qb);
  ev.grad = 0.5 * (qa - qb) + 0.5 * sigma * (chain_a - chain_b);
  return ev;
}

double sga_step(const SoftScoreFn& fn, const Eigen::VectorXd& x, double sigma,
                const SgaConfig& cfg, std::uint64_t step_seed) {
  const auto draws = draw_units(x.size(), cfg.mc_per_step, step_seed);
  const SurrogateEval ev = surrogate_radius(fn, x, sigma, draws, cfg.clamp_eps);
  if (!std::isfinite(ev.grad)) return sigma;  // skipped step
  return std::clamp(sigma + cfg.learning_rate * ev.grad, cfg.sigma_floor, cfg.ceiling());
}

double optimize_sigma(const SoftScoreFn& fn, const Eigen::VectorXd& x,
                      const SgaConfig& cfg, std::uint64_t seed) {
  double sigma = std::clamp(cfg.sigma_init, cfg.sigma_floor, cfg.ceiling());
  for (int t = 0; t < cfg.iters; ++t) {
    sigma = sga_step(fn, x, sigma, cfg, derive_seed(seed, "sga-step", static_cast<std::uint64_t>(t)));
  }
  return sigma;  // final iterate, not best-seen
}

OptimizeAllResult optimize_all(const SoftScoreFn& fn, const Dataset& data,
                               const SgaConfig& cfg, std::uint64_t seed, int workers) {
  std::vector<double> sigmas(data.size(), cfg.sigma_init);
  std::vector<char> failed(data.size(), 0);
  parallel_for(data.size(), workers, [&](std::size_t i) {
    try {
      sigmas[i] = optimize_sigma(fn, data.samples[i].features, cfg,
                                 derive_seed(seed, "sigma-opt", i));
    } catch (const std::exception&) {
      failed[i] = 1;  // fall back to sigma_init
    }
  });
  OptimizeAllResult res;
  res.assignment.default_sigma = cfg.sigma_init;
  for (std::size_t i = 0; i < data.size(); ++i) {
    res.assignment.per_sample_sigma[i] = sigmas[i];
    res.failures += failed[i];
  }
  return res;
}

}  // namespace sscert
