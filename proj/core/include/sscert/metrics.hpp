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

#ifndef SSCERT_METRICS_HPP
#define SSCERT_METRICS_HPP

#include <string>
#include <vector>

#include "sscert/smoothing.hpp"

namespace sscert {

struct CertRecord {
  std::size_t sample_index = 0;
  bool is_triggered = false;
  int true_label = 0;
  int certified_label = kAbstain;
  double radius = 0.0;  // >= 0
  double sigma_used = 0.0;
};

struct CurvePoint {
  double radius_threshold = 0.0;
  double era = 0.0;
  double cra = 0.0;
};

// Fraction of clean records certified to the true label at radius >= r.
// Abstains count as failures. Throws std::invalid_argument on an empty set
// or if any record is triggered.
double era_at(const std::vector<CertRecord>& records, double r);

// Same threshold rule over triggered records; correctness target is the
// original label, not the attack target.
double cra_at(const std::vector<CertRecord>& records, double r);

// Mean radius over clean records; abstaining or incorrect records
// contribute 0.
double aer(const std::vector<CertRecord>& records);

// Mean radius over triggered records under the same contribute-0 rule.
double acr(const std::vector<CertRecord>& records);

double abstain_rate(const std::vector<CertRecord>& records);

inline const std::vector<double>& default_radius_grid() {
  static const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75};
  return grid;
}

// One point per grid value; ERA over the clean records, CRA over the
// triggered ones. Either side may be empty (reported as 0).
std::vector<CurvePoint> compute_curves(const std::vector<CertRecord>& records,
                                       const std::vector<double>& grid);

// Validates the grid is sorted ascending and both curves are non-increasing,
// then writes a fixed-format CSV. Byte-identical across reruns.
void emit_curves(const std::vector<CertRecord>& records, const std::vector<double>& grid,
                 const std::string& path);

// Pointwise max over several runs' curves (the multi-noise-level reporting
// convention); all inputs must share the same threshold grid.
std::vector<CurvePoint> max_curves(const std::vector<std::vector<CurvePoint>>& runs);

void write_curves_csv(const std::vector<CurvePoint>& curves, const std::string& path);

// JSON-lines persistence; metrics recomputed from the file match the
// in-memory values exactly.
void save_cert_records(const std::vector<CertRecord>& records, const std::string& path);
std::vector<CertRecord> load_cert_records(const std::string& path);

std::vector<CertRecord> filter_records(const std::vector<CertRecord>& records,
                                       bool triggered);

}  // namespace sscert

#endif  // SSCERT_METRICS_HPP
