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

#ifndef SSCERT_PIPELINE_HPP
#define SSCERT_PIPELINE_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "sscert/config.hpp"
#include "sscert/metrics.hpp"
#include "sscert/poison.hpp"

namespace sscert {

// Everything a full run needs; stages read their inputs from the files the
// previous stage wrote, so each one also works standalone.
struct PipelineConfig {
  RunConfig run;
  double sigma0 = 0.25;

  std::size_t n_train_per_class = 200;
  std::size_t n_test_per_class = 50;
  Eigen::Index data_dim = 2;
  int num_classes = 2;
  double cluster_std = 1.0;
  double separation = 4.0;  // spacing of class means along the first axis

  std::vector<int> hidden_sizes;  // empty => linear softmax members
  int train_iters = 300;
  double train_learning_rate = 0.5;
  double train_l2_reg = 1e-4;

  TriggerKind trigger_kind = TriggerKind::kOnePixel;
  PoisonSelection poison_selection = PoisonSelection::kRandom;
  std::size_t map_k_vulnerable = 10;

  std::vector<double> radius_grid = default_radius_grid();

  std::string out_dir = "out";
  int workers = 1;
};

PipelineConfig pipeline_config_from(const ConfigFile& cfg);

// A failed stage, tagged with the stage name for the CLI's exit-code logic.
struct StageError : std::runtime_error {
  StageError(std::string stage_name, const std::string& message)
      : std::runtime_error(stage_name + ": " + message), stage(std::move(stage_name)) {}
  std::string stage;
};

// Artifacts per stage, all under out_dir:
//   gen-data        train.csv, test.csv
//   poison          poisoned.csv, trigger.json
//   train           ensemble/ (models + manifest), sigma_train.csv
//   optimize-noise  sigma_test.csv
//   certify         records.jsonl
//   store-insert    store.json
//   eval            curves.csv, metrics.json
void stage_gen_data(const PipelineConfig& cfg);
void stage_poison(const PipelineConfig& cfg);
void stage_train(const PipelineConfig& cfg);
void stage_optimize_noise(const PipelineConfig& cfg);
void stage_certify(const PipelineConfig& cfg);
void stage_store_insert(const PipelineConfig& cfg);
void stage_eval(const PipelineConfig& cfg);

// All stages in order, then a run manifest (manifest.json). Any stage
// failure surfaces as StageError.
void run_pipeline(const PipelineConfig& cfg);

}  // namespace sscert

#endif  // SSCERT_PIPELINE_HPP
