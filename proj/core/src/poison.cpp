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

#include "sscert/poison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sscert/errors.hpp"
#include "sscert/rng.hpp"

namespace sscert {

Eigen::VectorXd make_trigger_delta(const TriggerSpec& spec, Eigen::Index d) {
  if (spec.budget <= 0.0) throw ConfigError("trigger budget must be > 0");
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(d);

  if (spec.kind == TriggerKind::kBlending) {
    Rng rng(derive_seed(spec.seed, "blend-pattern"));
    Eigen::VectorXd pattern = rng.normal_vector(d);
    const double norm = pattern.norm();
    if (norm == 0.0) throw ConfigError("degenerate blending pattern");
    return spec.budget * pattern / norm;
  }

  const std::size_t count = spec.kind == TriggerKind::kOnePixel ? 1 : 4;
  std::vector<Eigen::Index> coords = spec.coordinates;
  if (coords.empty()) {
    // Default: the last coordinate(s) of the flat vector.
    for (std::size_t i = 0; i < count; ++i) {
      coords.push_back(d - static_cast<Eigen::Index>(count - i));
    }
  }
  if (coords.size() != count) {
    throw ConfigError("trigger kind expects exactly " + std::to_string(count) +
                      " coordinates, got " + std::to_string(coords.size()));
  }
  // Budget split equally: count * per^2 = budget^2.
  const double per = spec.budget / std::sqrt(static_cast<double>(count));
  for (Eigen::Index c : coords) {
    if (c < 0 || c >= d) throw ConfigError("trigger coordinate out of range");
    delta[c] = per;
  }
  return delta;
}

Eigen::VectorXd apply_test_trigger(const Eigen::VectorXd& x, const TriggerSpec& spec) {
  return x + make_trigger_delta(spec, x.size());
}

PoisonResult poison_dataset(const Dataset& clean, const TriggerSpec& spec,
                            const LabelGenerator& gen, double rate,
                            PoisonSelection selection, std::uint64_t seed,
                            const std::vector<std::size_t>* map_indices) {
  const std::size_t n = clean.size();
  const auto budget = static_cast<std::size_t>(std::floor(rate * static_cast<double>(n)));
  if (budget < 1) throw ConfigError("poison_dataset: floor(rate * n) must be >= 1");
  if (gen.mode == AttackMode::kAllToOne && gen.target_label >= clean.num_classes) {
    throw ConfigError("poison_dataset: target label out of range");
  }

  std::vector<std::size_t> chosen;
  if (selection == PoisonSelection::kMapSet) {
    if (map_indices == nullptr) {
      throw ConfigError("poison_dataset: MAP selection requires an index set");
    }
    chosen = *map_indices;
    if (chosen.size() != budget) {
      throw ConfigError("poison_dataset: MAP index set size != floor(rate * n)");
    }
  } else {
    // Fisher-Yates prefix over the index range.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(seed, "poison-select"));
    for (std::size_t i = 0; i < budget; ++i) {
      const std::size_t j = i + rng.next_u64() % (n - i);
      std::swap(idx[i], idx[j]);
    }
    chosen.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(budget));
  }
  std::sort(chosen.begin(), chosen.end());

  const Eigen::VectorXd delta = make_trigger_delta(spec, clean.dim);
  PoisonResult result;
  result.dataset = clean;
  result.poisoned_indices = chosen;
  for (std::size_t i : chosen) {
    Sample& s = result.dataset.samples[i];
    s.features += delta;
    s.label = gen.relabel(s.label);
    s.trigger_delta = delta;
    s.is_poisoned = true;
  }
  result.dataset.num_classes =
      std::max(result.dataset.num_classes, gen.mode == AttackMode::kAllToOne
                                               ? gen.target_label + 1
                                               : result.dataset.num_classes);
  return result;
}

std::vector<std::size_t> map_select_vulnerable(const Classifier& model,
                                               const Dataset& test, std::size_t k) {
  if (k > test.size()) throw ConfigError("map_select_vulnerable: k exceeds test size");
  std::vector<std::pair<double, std::size_t>> margins;
  margins.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto m = logit_margin(model, test.samples[i].features, test.samples[i].label);
    margins.emplace_back(std::fabs(m.value), i);
  }
  // stable by (margin, index): ties go to the smaller index.
  std::sort(margins.begin(), margins.end());
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(margins[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> map_select_poison(const Dataset& train,
                                           const std::vector<std::size_t>& vulnerable,
                                           const Dataset& test, int target_label,
                                           std::size_t budget) {
  if (vulnerable.empty()) throw ConfigError("map_select_poison: empty vulnerable set");
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.samples[i].label == target_label) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t : vulnerable) {
      best = std::min(best,
                      (train.samples[i].features - test.samples[t].features).norm());
    }
    dist.emplace_back(best, i);
  }
  if (dist.size() < budget) {
    throw ConfigError("map_select_poison: fewer non-target candidates than the budget");
  }
  std::sort(dist.begin(), dist.end());
  std::vector<std::size_t> out;
  out.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i) out.push_back(dist[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sscert
