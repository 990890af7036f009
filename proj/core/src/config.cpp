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

#include "sscert/config.hpp"

#include <fstream>
#include <sstream>

#include "sscert/errors.hpp"

namespace sscert {

void RunConfig::validate() const {
  if (!(poison_rate > 0.0 && poison_rate < 1.0)) {
    throw ConfigError("run.poison_rate must lie in (0, 1)");
  }
  if (ensemble_size < 1) throw ConfigError("run.ensemble_size must be >= 1");
  if (mc_per_step < 1) throw ConfigError("run.mc_per_step must be >= 1");
  if (!(confidence_alpha > 0.0 && confidence_alpha < 1.0)) {
    throw ConfigError("run.confidence_alpha must lie in (0, 1)");
  }
  if (sigma0_grid.empty()) throw ConfigError("run.sigma0_grid must be nonempty");
  for (double s : sigma0_grid) {
    if (s <= 0.0) throw ConfigError("run.sigma0_grid entries must be > 0");
  }
  if (trigger_budget <= 0.0) throw ConfigError("run.trigger_budget must be > 0");
  if (target_label < 0) throw ConfigError("run.target_label must be >= 0");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile cfg;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    cfg.entries_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool ConfigFile::has(const std::string& key) const { return entries_.count(key) != 0; }

const std::string& ConfigFile::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string ConfigFile::get_or(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double ConfigFile::get_double(const std::string& key) const {
  try {
    return std::stod(get(key));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: '" + get(key) + "'");
  }
}

std::int64_t ConfigFile::get_int(const std::string& key) const {
  try {
    return std::stoll(get(key));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not an integer: '" + get(key) + "'");
  }
}

std::vector<double> ConfigFile::get_double_list(const std::string& key) const {
  std::string v = get(key);
  for (char& c : v) {
    if (c == ',') c = ' ';
  }
  std::vector<double> out;
  std::stringstream ss(v);
  double x;
  while (ss >> x) out.push_back(x);
  if (out.empty()) throw ConfigError("config key " + key + ": empty list");
  return out;
}

RunConfig run_config_from(const ConfigFile& cfg) {
  RunConfig rc;
  if (cfg.has("run.sigma0_grid")) rc.sigma0_grid = cfg.get_double_list("run.sigma0_grid");
  if (cfg.has("run.ensemble_size")) rc.ensemble_size = static_cast<int>(cfg.get_int("run.ensemble_size"));
  if (cfg.has("run.sga_iters_train")) rc.sga_iters_train = static_cast<int>(cfg.get_int("run.sga_iters_train"));
  if (cfg.has("run.sga_iters_infer")) rc.sga_iters_infer = static_cast<int>(cfg.get_int("run.sga_iters_infer"));
  if (cfg.has("run.mc_per_step")) rc.mc_per_step = static_cast<int>(cfg.get_int("run.mc_per_step"));
  if (cfg.has("run.sga_learning_rate")) rc.sga_learning_rate = cfg.get_double("run.sga_learning_rate");
  if (cfg.has("run.confidence_alpha")) rc.confidence_alpha = cfg.get_double("run.confidence_alpha");
  if (cfg.has("run.poison_rate")) rc.poison_rate = cfg.get_double("run.poison_rate");
  if (cfg.has("run.trigger_budget")) rc.trigger_budget = cfg.get_double("run.trigger_budget");
  if (cfg.has("run.target_label")) rc.target_label = static_cast<int>(cfg.get_int("run.target_label"));
  if (cfg.has("run.attack_mode")) {
    const std::string& m = cfg.get("run.attack_mode");
    if (m == "all-to-one") {
      rc.attack_mode = AttackMode::kAllToOne;
    } else if (m == "all-to-all") {
      rc.attack_mode = AttackMode::kAllToAll;
    } else {
      throw ConfigError("run.attack_mode must be all-to-one or all-to-all, got '" + m + "'");
    }
  }
  if (cfg.has("run.seed")) rc.seed = static_cast<std::uint64_t>(cfg.get_int("run.seed"));
  rc.validate();
  return rc;
}

}  // namespace sscert
