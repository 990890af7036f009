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

#include "sscert/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sscert/errors.hpp"

namespace sscert {

using nlohmann::json;

namespace {

double certified_fraction(const std::vector<CertRecord>& records, double r,
                          bool want_triggered, const char* what) {
  if (records.empty()) throw std::invalid_argument(std::string(what) + ": empty record set");
  std::size_t hits = 0;
  for (const auto& rec : records) {
    if (rec.is_triggered != want_triggered) {
      throw std::invalid_argument(std::string(what) + ": mixed triggered/clean records");
    }
    if (rec.certified_label != kAbstain && rec.certified_label == rec.true_label &&
        rec.radius >= r) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double mean_radius(const std::vector<CertRecord>& records, bool want_triggered,
                   const char* what) {
  if (records.empty()) throw std::invalid_argument(std::string(what) + ": empty record set");
  double sum = 0.0;
  for (const auto& rec : records) {
    if (rec.is_triggered != want_triggered) {
      throw std::invalid_argument(std::string(what) + ": mixed triggered/clean records");
    }
    if (rec.certified_label != kAbstain && rec.certified_label == rec.true_label) {
      sum += rec.radius;
    }
  }
  return sum / static_cast<double>(records.size());
}

}  // namespace

double era_at(const std::vector<CertRecord>& records, double r) {
  return certified_fraction(records, r, false, "era_at");
}

double cra_at(const std::vector<CertRecord>& records, double r) {
  return certified_fraction(records, r, true, "cra_at");
}

double aer(const std::vector<CertRecord>& records) {
  return mean_radius(records, false, "aer");
}

double acr(const std::vector<CertRecord>& records) {
  return mean_radius(records, true, "acr");
}

double abstain_rate(const std::vector<CertRecord>& records) {
  if (records.empty()) throw std::invalid_argument("abstain_rate: empty record set");
  std::size_t abstains = 0;
  for (const auto& rec : records) abstains += rec.certified_label == kAbstain;
  return static_cast<double>(abstains) / static_cast<double>(records.size());
}

std::vector<CertRecord> filter_records(const std::vector<CertRecord>& records,
                                       bool triggered) {
  std::vector<CertRecord> out;
  for (const auto& rec : records) {
    if (rec.is_triggered == triggered) out.push_back(rec);
  }
  return out;
}

std::vector<CurvePoint> compute_curves(const std::vector<CertRecord>& records,
                                       const std::vector<double>& grid) {
  const auto clean = filter_records(records, false);
  const auto triggered = filter_records(records, true);
  std::vector<CurvePoint> curves;
  curves.reserve(grid.size());
  for (double r : grid) {
    CurvePoint pt;
    pt.radius_threshold = r;
    pt.era = clean.empty() ? 0.0 : era_at(clean, r);
    pt.cra = triggered.empty() ? 0.0 : cra_at(triggered, r);
    curves.push_back(pt);
  }
  return curves;
}

void write_curves_csv(const std::vector<CurvePoint>& curves, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write curves CSV: " + path);
  out << "radius,era,cra\n";
  char line[96];
  for (const auto& pt : curves) {
    std::snprintf(line, sizeof(line), "%.4f,%.6f,%.6f\n", pt.radius_threshold, pt.era,
                  pt.cra);
    out << line;
  }
}

void emit_curves(const std::vector<CertRecord>& records, const std::vector<double>& grid,
                 const std::string& path) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("emit_curves: grid must be strictly ascending");
    }
  }
  const auto curves = compute_curves(records, grid);
  for (std::size_t i = 1; i < curves.size(); ++i) {
    if (curves[i].era > curves[i - 1].era || curves[i].cra > curves[i - 1].cra) {
      throw std::logic_error("emit_curves: non-monotone curve");
    }
  }
  write_curves_csv(curves, path);
}

std::vector<CurvePoint> max_curves(const std::vector<std::vector<CurvePoint>>& runs) {
  if (runs.empty()) throw std::invalid_argument("max_curves: no runs");
  std::vector<CurvePoint> out = runs.front();
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (runs[k].size() != out.size()) {
      throw std::invalid_argument("max_curves: mismatched grids");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (runs[k][i].radius_threshold != out[i].radius_threshold) {
        throw std::invalid_argument("max_curves: mismatched grids");
      }
      out[i].era = std::max(out[i].era, runs[k][i].era);
      out[i].cra = std::max(out[i].cra, runs[k][i].cra);
    }
  }
  return out;
}

void save_cert_records(const std::vector<CertRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write cert records: " + path);
  for (const auto& rec : records) {
    json row;
    row["sample_index"] = rec.sample_index;
    row["is_triggered"] = rec.is_triggered;
    row["true_label"] = rec.true_label;
    row["certified_label"] = rec.certified_label;
    row["radius"] = rec.radius;
    row["sigma_used"] = rec.sigma_used;
    out << row.dump() << '\n';
  }
}

std::vector<CertRecord> load_cert_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cert records: " + path);
  std::vector<CertRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("cert records line " + std::to_string(lineno) + ": " + e.what());
    }
    CertRecord rec;
    rec.sample_index = row.at("sample_index").get<std::size_t>();
    rec.is_triggered = row.at("is_triggered").get<bool>();
    rec.true_label = row.at("true_label").get<int>();
    rec.certified_label = row.at("certified_label").get<int>();
    rec.radius = row.at("radius").get<double>();
    rec.sigma_used = row.at("sigma_used").get<double>();
    records.push_back(rec);
  }
  return records;
}

}  // namespace sscert
