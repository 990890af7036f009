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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sscert/boundary.hpp"
#include "sscert/certstore.hpp"
#include "sscert/classifier.hpp"
#include "sscert/errors.hpp"
#include "sscert/pipeline.hpp"
#include "sscert/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitStage = 2;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 1;
};

sscert::PipelineConfig make_config(const GlobalOpts& g) {
  sscert::PipelineConfig cfg;
  if (!g.config_path.empty()) {
    cfg = sscert::pipeline_config_from(sscert::ConfigFile::parse_file(g.config_path));
  }
  if (g.seed_set) cfg.run.seed = g.seed;
  cfg.out_dir = g.out_dir;
  if (g.workers < 1) throw sscert::ConfigError("--workers must be >= 1");
  cfg.workers = g.workers;
  return cfg;
}

void write_boundary_outputs(const sscert::DistanceHistogram& hist,
                            const std::string& dist_path, const std::string& hist_path) {
  std::ofstream dist(dist_path);
  if (!dist) throw sscert::IoError("cannot write " + dist_path);
  dist << "index,distance,converged\n";
  for (std::size_t i = 0; i < hist.distances.size(); ++i) {
    dist << i << ',' << sscert::format_double(hist.distances[i]) << ','
         << (hist.converged[i] ? 1 : 0) << '\n';
  }
  std::ofstream out(hist_path);
  if (!out) throw sscert::IoError("cannot write " + hist_path);
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < hist.bin_counts.size(); ++b) {
    out << sscert::format_double(hist.bin_edges[b]) << ','
        << sscert::format_double(hist.bin_edges[b + 1]) << ',' << hist.bin_counts[b]
        << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified smoothing defense pipeline"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "Sectioned key=value config file");
  app.add_option("--out-dir", g.out_dir, "Artifact directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--workers", g.workers, "Worker threads for parallel stages");

  auto* sc_gen = app.add_subcommand("gen-data", "Generate the synthetic train/test sets");
  auto* sc_poison = app.add_subcommand("poison", "Inject the backdoor into the training set");
  auto* sc_train = app.add_subcommand("train", "Train the smoothed ensemble");
  auto* sc_opt = app.add_subcommand("optimize-noise", "Optimize per-sample smoothing scales");
  auto* sc_cert = app.add_subcommand("certify", "Certify clean and triggered test samples");
  auto* sc_eval = app.add_subcommand("eval", "Metrics and curves from certification records");
  auto* sc_curves = app.add_subcommand("curves", "Emit ERA/CRA curves from a records file");
  auto* sc_run = app.add_subcommand("run", "Full pipeline, all stages in order");

  auto* sc_boundary = app.add_subcommand("boundary", "Boundary-distance histogram");
  std::string bd_model, bd_data;
  int bd_label = 0;
  std::size_t bd_bins = 20;
  sc_boundary->add_option("--model", bd_model, "Model file")->required();
  sc_boundary->add_option("--data", bd_data, "Dataset CSV")->required();
  sc_boundary->add_option("--label", bd_label, "Class whose margin is searched");
  sc_boundary->add_option("--bins", bd_bins, "Histogram bin count");

  std::vector<std::string> eval_records;
  sc_eval->add_option("--records", eval_records,
                      "Records files to merge (per-radius max); default: the run's own");
  std::string curves_records;
  sc_curves->add_option("--records", curves_records, "Records file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    g.seed_set = seed_opt->count() > 0;
    const sscert::PipelineConfig cfg = make_config(g);

    if (sc_gen->parsed()) {
      sscert::stage_gen_data(cfg);
    } else if (sc_poison->parsed()) {
      sscert::stage_poison(cfg);
    } else if (sc_train->parsed()) {
      sscert::stage_train(cfg);
    } else if (sc_opt->parsed()) {
      sscert::stage_optimize_noise(cfg);
    } else if (sc_cert->parsed()) {
      sscert::stage_certify(cfg);
    } else if (sc_eval->parsed()) {
      if (eval_records.empty()) {
        sscert::stage_eval(cfg);
      } else {
        std::vector<std::vector<sscert::CurvePoint>> runs;
        for (const auto& path : eval_records) {
          runs.push_back(
              sscert::compute_curves(sscert::load_cert_records(path), cfg.radius_grid));
        }
        std::filesystem::create_directories(cfg.out_dir);
        sscert::write_curves_csv(
            sscert::max_curves(runs),
            (std::filesystem::path(cfg.out_dir) / "curves.csv").string());
      }
    } else if (sc_curves->parsed()) {
      std::filesystem::create_directories(cfg.out_dir);
      sscert::emit_curves(sscert::load_cert_records(curves_records), cfg.radius_grid,
                          (std::filesystem::path(cfg.out_dir) / "curves.csv").string());
    } else if (sc_boundary->parsed()) {
      const auto model = sscert::load_classifier(bd_model);
      const sscert::Dataset data = sscert::load_dataset(bd_data);
      sscert::BoundarySearchConfig bc;
      bc.seed = sscert::derive_seed(cfg.run.seed, "boundary");
      for (const auto& s : data.samples) {
        if (s.label != bd_label) bc.init_pool.push_back(s.features);
      }
      sscert::Dataset targets;
      targets.num_classes = data.num_classes;
      targets.dim = data.dim;
      for (const auto& s : data.samples) {
        if (s.label == bd_label) targets.samples.push_back(s);
      }
      const auto hist =
          sscert::boundary_distance_histogram(*model, targets, bd_label, bc, bd_bins);
      std::filesystem::create_directories(cfg.out_dir);
      const std::filesystem::path dir(cfg.out_dir);
      write_boundary_outputs(hist, (dir / "boundary_distances.csv").string(),
                             (dir / "boundary_hist.csv").string());
    } else if (sc_run->parsed()) {
      sscert::run_pipeline(cfg);
    }
  } catch (const sscert::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const sscert::StageError& e) {
    std::cerr << "stage failure [" << e.stage << "]: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "stage failure: " << e.what() << '\n';
    return kExitStage;
  }
  return kExitOk;
}
