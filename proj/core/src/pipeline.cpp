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

#include "sscert/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sscert/certstore.hpp"
#include "sscert/ensemble.hpp"
#include "sscert/errors.hpp"
#include "sscert/rng.hpp"

namespace sscert {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename Fn>
void with_stage(const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;  // config problems keep their own exit code
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

fs::path artifact(const PipelineConfig& cfg, const char* name) {
  return fs::path(cfg.out_dir) / name;
}

TriggerSpec trigger_spec(const PipelineConfig& cfg) {
  TriggerSpec spec;
  spec.kind = cfg.trigger_kind;
  spec.budget = cfg.run.trigger_budget;
  spec.seed = derive_seed(cfg.run.seed, "trigger");
  return spec;
}

TrainHyperparams train_hyper(const PipelineConfig& cfg) {
  TrainHyperparams hp;
  hp.hidden_sizes = cfg.hidden_sizes;
  hp.iters = cfg.train_iters;
  hp.learning_rate = cfg.train_learning_rate;
  hp.l2_reg = cfg.train_l2_reg;
  return hp;
}

SgaConfig sga_config(const PipelineConfig& cfg, int iters) {
  SgaConfig sc;
  sc.iters = iters;
  sc.mc_per_step = cfg.run.mc_per_step;
  sc.learning_rate = cfg.run.sga_learning_rate;
  sc.sigma_init = cfg.sigma0;
  return sc;
}

Eigen::VectorXd load_trigger_delta(const PipelineConfig& cfg) {
  std::ifstream in(artifact(cfg, "trigger.json"));
  if (!in) throw IoError("missing trigger.json; run the poison stage first");
  json doc;
  in >> doc;
  const auto values = doc.at("delta").get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

}  // namespace

PipelineConfig pipeline_config_from(const ConfigFile& cfg) {
  PipelineConfig pc;
  pc.run = run_config_from(cfg);
  if (cfg.has("run.sigma0")) pc.sigma0 = cfg.get_double("run.sigma0");
  if (pc.sigma0 <= 0.0) throw ConfigError("run.sigma0 must be > 0");

  if (cfg.has("data.n_train_per_class")) {
    pc.n_train_per_class = static_cast<std::size_t>(cfg.get_int("data.n_train_per_class"));
  }
  if (cfg.has("data.n_test_per_class")) {
    pc.n_test_per_class = static_cast<std::size_t>(cfg.get_int("data.n_test_per_class"));
  }
  if (cfg.has("data.dim")) pc.data_dim = static_cast<Eigen::Index>(cfg.get_int("data.dim"));
  if (cfg.has("data.num_classes")) {
    pc.num_classes = static_cast<int>(cfg.get_int("data.num_classes"));
  }
  if (cfg.has("data.cluster_std")) pc.cluster_std = cfg.get_double("data.cluster_std");
  if (cfg.has("data.separation")) pc.separation = cfg.get_double("data.separation");
  if (pc.n_train_per_class == 0 || pc.n_test_per_class == 0) {
    throw ConfigError("data sizes must be >= 1 per class");
  }
  if (pc.data_dim < 1) throw ConfigError("data.dim must be >= 1");
  if (pc.num_classes < 2) throw ConfigError("data.num_classes must be >= 2");
  if (pc.cluster_std <= 0.0) throw ConfigError("data.cluster_std must be > 0");
  if (pc.run.target_label >= pc.num_classes) {
    throw ConfigError("run.target_label must be < data.num_classes");
  }

  if (cfg.has("model.hidden_sizes")) {
    pc.hidden_sizes.clear();
    for (double h : cfg.get_double_list("model.hidden_sizes")) {
      if (h < 1) throw ConfigError("model.hidden_sizes entries must be >= 1");
      pc.hidden_sizes.push_back(static_cast<int>(h));
    }
  }
  if (cfg.has("model.iters")) pc.train_iters = static_cast<int>(cfg.get_int("model.iters"));
  if (cfg.has("model.learning_rate")) {
    pc.train_learning_rate = cfg.get_double("model.learning_rate");
  }
  if (cfg.has("model.l2_reg")) pc.train_l2_reg = cfg.get_double("model.l2_reg");
  if (pc.train_iters < 1) throw ConfigError("model.iters must be >= 1");
  if (pc.train_learning_rate <= 0.0) throw ConfigError("model.learning_rate must be > 0");

  if (cfg.has("poison.trigger")) {
    const std::string& t = cfg.get("poison.trigger");
    if (t == "one-pixel") {
      pc.trigger_kind = TriggerKind::kOnePixel;
    } else if (t == "four-pixel") {
      pc.trigger_kind = TriggerKind::kFourPixel;
    } else if (t == "blending") {
      pc.trigger_kind = TriggerKind::kBlending;
    } else {
      throw ConfigError("poison.trigger must be one-pixel, four-pixel, or blending");
    }
  }
  if (cfg.has("poison.selection")) {
    const std::string& s = cfg.get("poison.selection");
    if (s == "random") {
      pc.poison_selection = PoisonSelection::kRandom;
    } else if (s == "map") {
      pc.poison_selection = PoisonSelection::kMapSet;
    } else {
      throw ConfigError("poison.selection must be random or map");
    }
  }
  if (cfg.has("poison.k_vulnerable")) {
    pc.map_k_vulnerable = static_cast<std::size_t>(cfg.get_int("poison.k_vulnerable"));
    if (pc.map_k_vulnerable < 1) throw ConfigError("poison.k_vulnerable must be >= 1");
  }

  if (cfg.has("eval.radius_grid")) pc.radius_grid = cfg.get_double_list("eval.radius_grid");
  for (std::size_t i = 1; i < pc.radius_grid.size(); ++i) {
    if (pc.radius_grid[i] <= pc.radius_grid[i - 1]) {
      throw ConfigError("eval.radius_grid must be strictly ascending");
    }
  }
  return pc;
}

void stage_gen_data(const PipelineConfig& cfg) {
  with_stage("gen-data", [&] {
    fs::create_directories(cfg.out_dir);
    std::vector<Eigen::VectorXd> means;
    for (int c = 0; c < cfg.num_classes; ++c) {
      Eigen::VectorXd m = Eigen::VectorXd::Zero(cfg.data_dim);
      m[0] = (static_cast<double>(c) - 0.5 * (cfg.num_classes - 1)) * cfg.separation;
      means.push_back(std::move(m));
    }
    const Dataset train = make_synthetic_gaussians(
        cfg.n_train_per_class, means, cfg.cluster_std, derive_seed(cfg.run.seed, "gen-train"));
    const Dataset test = make_synthetic_gaussians(
        cfg.n_test_per_class, means, cfg.cluster_std, derive_seed(cfg.run.seed, "gen-test"));
    save_dataset(train, artifact(cfg, "train.csv").string());
    save_dataset(test, artifact(cfg, "test.csv").string());
  });
}

void stage_poison(const PipelineConfig& cfg) {
  with_stage("poison", [&] {
    const Dataset clean = load_dataset(artifact(cfg, "train.csv").string());
    const TriggerSpec spec = trigger_spec(cfg);
    LabelGenerator gen;
    gen.mode = cfg.run.attack_mode;
    gen.target_label = cfg.run.target_label;
    gen.num_classes = clean.num_classes;

    std::vector<std::size_t> map_indices;
    const std::vector<std::size_t>* map_ptr = nullptr;
    if (cfg.poison_selection == PoisonSelection::kMapSet) {
      // The two-stage attack needs a clean surrogate model and the test set.
      const Dataset test = load_dataset(artifact(cfg, "test.csv").string());
      TrainHyperparams hp = train_hyper(cfg);
      hp.seed = derive_seed(cfg.run.seed, "map-surrogate");
      const TrainResult surrogate = train_classifier(clean, hp);
      const auto vulnerable =
          map_select_vulnerable(*surrogate.model, test, cfg.map_k_vulnerable);
      const auto budget = static_cast<std::size_t>(
          std::floor(cfg.run.poison_rate * static_cast<double>(clean.size())));
      map_indices = map_select_poison(clean, vulnerable, test, cfg.run.target_label, budget);
      map_ptr = &map_indices;
    }
    const PoisonResult result =
        poison_dataset(clean, spec, gen, cfg.run.poison_rate, cfg.poison_selection,
                       derive_seed(cfg.run.seed, "poison"), map_ptr);
    save_dataset(result.dataset, artifact(cfg, "poisoned.csv").string());

    const Eigen::VectorXd delta = make_trigger_delta(spec, clean.dim);
    json doc;
    doc["version"] = 1;
    doc["budget"] = spec.budget;
    doc["kind"] = static_cast<int>(spec.kind);
    doc["seed"] = spec.seed;
    doc["delta"] = std::vector<double>(delta.data(), delta.data() + delta.size());
    doc["poisoned_indices"] = result.poisoned_indices;
    std::ofstream out(artifact(cfg, "trigger.json"));
    if (!out) throw IoError("cannot write trigger.json");
    out << doc.dump(2) << '\n';
  });
}

void stage_train(const PipelineConfig& cfg) {
  with_stage("train", [&] {
    const Dataset poisoned = load_dataset(artifact(cfg, "poisoned.csv").string());
    TrainHyperparams hp = train_hyper(cfg);
    hp.seed = derive_seed(cfg.run.seed, "base-model");
    const TrainResult base = train_classifier(poisoned, hp);

    // Training-side scales: a short per-sample optimization against the
    // base model fixes the noise each ensemble member trains under.
    const ClassifierScores scores(*base.model);
    const OptimizeAllResult sigma_train =
        optimize_all(scores, poisoned, sga_config(cfg, cfg.run.sga_iters_train),
                     derive_seed(cfg.run.seed, "train-sigma"), cfg.workers);
    save_noise_assignment(sigma_train.assignment, artifact(cfg, "sigma_train.csv").string());

    const SmoothedEnsemble ensemble =
        train_ensemble(poisoned, sigma_train.assignment, cfg.run.ensemble_size, hp,
                       derive_seed(cfg.run.seed, "ensemble"), cfg.workers);
    save_ensemble(ensemble, artifact(cfg, "ensemble").string(), "sigma_train.csv");
  });
}

void stage_optimize_noise(const PipelineConfig& cfg) {
  with_stage("optimize-noise", [&] {
    const SmoothedEnsemble ensemble = load_ensemble(artifact(cfg, "ensemble").string());
    const Dataset test = load_dataset(artifact(cfg, "test.csv").string());
    const EnsembleScores scores(ensemble);
    const OptimizeAllResult sigma_test =
        optimize_all(scores, test, sga_config(cfg, cfg.run.sga_iters_infer),
                     derive_seed(cfg.run.seed, "test-sigma"), cfg.workers);
    save_noise_assignment(sigma_test.assignment, artifact(cfg, "sigma_test.csv").string());
  });
}

void stage_certify(const PipelineConfig& cfg) {
  with_stage("certify", [&] {
    const SmoothedEnsemble ensemble = load_ensemble(artifact(cfg, "ensemble").string());
    const Dataset test = load_dataset(artifact(cfg, "test.csv").string());
    const NoiseAssignment sigma_test =
        load_noise_assignment(artifact(cfg, "sigma_test.csv").string());
    const Eigen::VectorXd delta = load_trigger_delta(cfg);

    std::vector<CertRecord> records;
    records.reserve(2 * test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      const double sigma = sigma_test.sigma_for(i);
      const CertificationResult res =
          certify_ensemble(ensemble, test.samples[i].features, sigma, cfg.run.confidence_alpha);
      CertRecord rec;
      rec.sample_index = i;
      rec.is_triggered = false;
      rec.true_label = test.samples[i].label;
      rec.certified_label = res.label;
      rec.radius = res.radius;
      rec.sigma_used = sigma;
      records.push_back(rec);
    }
    for (std::size_t i = 0; i < test.size(); ++i) {
      const double sigma = sigma_test.sigma_for(i);
      const CertificationResult res = certify_ensemble(
          ensemble, test.samples[i].features + delta, sigma, cfg.run.confidence_alpha);
      CertRecord rec;
      rec.sample_index = i;
      rec.is_triggered = true;
      rec.true_label = test.samples[i].label;  // defense target: the original label
      rec.certified_label = res.label;
      rec.radius = res.radius;
      rec.sigma_used = sigma;
      records.push_back(rec);
    }
    save_cert_records(records, artifact(cfg, "records.jsonl").string());
  });
}

void stage_store_insert(const PipelineConfig& cfg) {
  with_stage("store-insert", [&] {
    const Dataset test = load_dataset(artifact(cfg, "test.csv").string());
    const auto records = load_cert_records(artifact(cfg, "records.jsonl").string());
    CertStore store;
    for (const auto& rec : records) {
      if (rec.is_triggered || rec.certified_label == kAbstain) continue;
      CertTriplet t;
      t.input = test.samples[rec.sample_index].features;
      t.label = rec.certified_label;
      t.region.center = t.input;
      t.region.radius = rec.radius;
      t.original_radius = rec.radius;
      store.insert(std::move(t));
    }
    const auto violations = store.verify();
    if (!violations.empty()) throw std::logic_error("store invariant violated after inserts");
    store.snapshot(artifact(cfg, "store.json").string());
  });
}

void stage_eval(const PipelineConfig& cfg) {
  with_stage("eval", [&] {
    const auto records = load_cert_records(artifact(cfg, "records.jsonl").string());
    emit_curves(records, cfg.radius_grid, artifact(cfg, "curves.csv").string());

    const auto clean = filter_records(records, false);
    const auto triggered = filter_records(records, true);
    json doc;
    doc["clean_count"] = clean.size();
    doc["triggered_count"] = triggered.size();
    if (!clean.empty()) {
      doc["era_0"] = era_at(clean, 0.0);
      doc["aer"] = aer(clean);
      doc["abstain_rate_clean"] = abstain_rate(clean);
    }
    if (!triggered.empty()) {
      doc["cra_0"] = cra_at(triggered, 0.0);
      doc["acr"] = acr(triggered);
      doc["abstain_rate_triggered"] = abstain_rate(triggered);
    }
    std::ofstream out(artifact(cfg, "metrics.json"));
    if (!out) throw IoError("cannot write metrics.json");
    out << doc.dump(2) << '\n';
  });
}

void run_pipeline(const PipelineConfig& cfg) {
  stage_gen_data(cfg);
  stage_poison(cfg);
  stage_train(cfg);
  stage_optimize_noise(cfg);
  stage_certify(cfg);
  stage_store_insert(cfg);
  stage_eval(cfg);

  json manifest;
  manifest["version"] = 1;
  manifest["seed"] = cfg.run.seed;
  manifest["sigma0"] = cfg.sigma0;
  manifest["ensemble_size"] = cfg.run.ensemble_size;
  manifest["poison_rate"] = cfg.run.poison_rate;
  manifest["trigger_budget"] = cfg.run.trigger_budget;
  manifest["confidence_alpha"] = cfg.run.confidence_alpha;
  manifest["stages"] = {"gen-data", "poison",       "train", "optimize-noise",
                        "certify",  "store-insert", "eval"};
  manifest["artifacts"] = {"train.csv",       "test.csv",       "poisoned.csv",
                           "trigger.json",    "ensemble",       "sigma_train.csv",
                           "sigma_test.csv",  "records.jsonl",  "store.json",
                           "curves.csv",      "metrics.json"};
  std::ofstream out(artifact(cfg, "manifest.json"));
  if (!out) throw StageError("manifest", "cannot write manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace sscert
