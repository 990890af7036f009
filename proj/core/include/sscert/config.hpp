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

#ifndef SSCERT_CONFIG_HPP
#define SSCERT_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sscert {

enum class AttackMode { kAllToOne, kAllToAll };

// Run-wide knobs; every stage derives its randomness from `seed` through
// named sub-streams (see rng.hpp).
struct RunConfig {
  std::vector<double> sigma0_grid = {0.12, 0.25, 0.5, 1.0};
  int ensemble_size = 50;        // M
  int sga_iters_train = 1;       // T during training-side optimization
  int sga_iters_infer = 100;     // T during inference-side optimization
  int mc_per_step = 1;           // J
  double sga_learning_rate = 1e-4;
  double confidence_alpha = 0.001;
  double poison_rate = 0.10;     // lambda
  double trigger_budget = 0.1;   // l2 norm of the trigger
  int target_label = 0;
  AttackMode attack_mode = AttackMode::kAllToOne;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError on any violated invariant
};

// Parsed sectioned key=value file: values keyed by "section.key".
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;  // throws ConfigError
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  // Whitespace- or comma-separated list of reals.
  std::vector<double> get_double_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Reads the [run] section into a RunConfig; missing keys keep defaults.
RunConfig run_config_from(const ConfigFile& cfg);

}  // namespace sscert

#endif  // SSCERT_CONFIG_HPP
