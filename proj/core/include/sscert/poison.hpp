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

#ifndef SSCERT_POISON_HPP
#define SSCERT_POISON_HPP

#include <cstdint>
#include <vector>

#include "sscert/classifier.hpp"
#include "sscert/config.hpp"
#include "sscert/dataset.hpp"

namespace sscert {

enum class TriggerKind { kOnePixel, kFourPixel, kBlending };

// A trigger pattern with a fixed l2 budget. Pixel kinds touch exactly 1 or 4
// coordinates ("lower right corner" generalizes to the last coordinates of a
// flat vector); blending uses a fixed random unit-norm dense pattern.
struct TriggerSpec {
  TriggerKind kind = TriggerKind::kOnePixel;
  double budget = 0.1;
  std::vector<Eigen::Index> coordinates;  // defaulted to trailing coords if empty
  std::uint64_t seed = 0;                 // fixes the blending pattern
};

struct LabelGenerator {
  AttackMode mode = AttackMode::kAllToOne;
  int target_label = 0;  // y_t, used by all-to-one
  int num_classes = 2;

  int relabel(int y) const {
    return mode == AttackMode::kAllToOne ? target_label : (y + 1) % num_classes;
  }
};

enum class PoisonSelection { kRandom, kMapSet };

struct MapConfig {
  std::size_t k_vulnerable = 10;
};

// The delta vector for a d-dimensional input; ||delta||_2 == budget to 1e-9.
Eigen::VectorXd make_trigger_delta(const TriggerSpec& spec, Eigen::Index d);

Eigen::VectorXd apply_test_trigger(const Eigen::VectorXd& x, const TriggerSpec& spec);

struct PoisonResult {
  Dataset dataset;
  std::vector<std::size_t> poisoned_indices;  // sorted
};

// Marks floor(rate * n) samples, adds the trigger delta to their features,
// and relabels them with the generator. Selection is uniform without
// replacement by default; map_indices (when selection == kMapSet) overrides
// the choice.
PoisonResult poison_dataset(const Dataset& clean, const TriggerSpec& spec,
                            const LabelGenerator& gen, double rate,
                            PoisonSelection selection, std::uint64_t seed,
                            const std::vector<std::size_t>* map_indices = nullptr);

// MAP stage 1: the k test indices with the smallest |phi_y(x)| at the true
// label; ties break toward the smaller index.
std::vector<std::size_t> map_select_vulnerable(const Classifier& model,
                                               const Dataset& test, std::size_t k);

// MAP stage 2: among training samples with label != target_label, the
// `budget` indices minimizing the distance to the nearest vulnerable sample.
std::vector<std::size_t> map_select_poison(const Dataset& train,
                                           const std::vector<std::size_t>& vulnerable,
                                           const Dataset& test, int target_label,
                                           std::size_t budget);

}  // namespace sscert

#endif  // SSCERT_POISON_HPP
