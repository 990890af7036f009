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

#include "sscert/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sscert/errors.hpp"
#include "sscert/rng.hpp"

namespace sscert {

std::string format_double(double v) {
  char buf[32];
  // 17 significant digits round-trip any IEEE double.
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_finite(const std::string& tok, std::size_t line_no) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + tok + "'");
  }
  if (pos != tok.size() || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line_no) + ": non-finite value '" + tok + "'");
  }
  return v;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);

  Eigen::Index d = 0;
  while (d < static_cast<Eigen::Index>(header.size()) &&
         header[d] == "f" + std::to_string(d)) {
    ++d;
  }
  if (d == 0 || static_cast<std::size_t>(d) >= header.size() ||
      header[d] != "label") {
    throw ParseError(path + ": header must be f0,...,f{d-1},label[,poisoned,delta...]");
  }
  const bool has_poison_cols = header.size() > static_cast<std::size_t>(d) + 1;
  if (has_poison_cols &&
      (header.size() != static_cast<std::size_t>(2 * d) + 2 || header[d + 1] != "poisoned")) {
    throw ParseError(path + ": malformed poison columns in header");
  }

  Dataset ds;
  ds.dim = d;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tok = split_csv_line(line);
    if (tok.size() != header.size()) {
      throw ShapeError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(tok.size()));
    }
    Sample s;
    s.features.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) s.features[i] = parse_finite(tok[i], line_no);
    const double lbl = parse_finite(tok[d], line_no);
    s.label = static_cast<int>(lbl);
    if (s.label < 0 || static_cast<double>(s.label) != lbl) {
      throw ParseError("line " + std::to_string(line_no) + ": bad label '" + tok[d] + "'");
    }
    if (has_poison_cols) {
      s.is_poisoned = tok[d + 1] == "1";
      if (s.is_poisoned) {
        Eigen::VectorXd delta(d);
        for (Eigen::Index i = 0; i < d; ++i) {
          delta[i] = parse_finite(tok[d + 2 + i], line_no);
        }
        s.trigger_delta = std::move(delta);
      }
    }
    ds.num_classes = std::max(ds.num_classes, s.label + 1);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file: " + path);
  const Eigen::Index d = ds.dim;
  bool any_poisoned = false;
  for (const auto& s : ds.samples) any_poisoned |= s.is_poisoned;

  for (Eigen::Index i = 0; i < d; ++i) out << 'f' << i << ',';
  out << "label";
  if (any_poisoned) {
    out << ",poisoned";
    for (Eigen::Index i = 0; i < d; ++i) out << ",delta" << i;
  }
  out << '\n';
  for (const auto& s : ds.samples) {
    for (Eigen::Index i = 0; i < d; ++i) out << format_double(s.features[i]) << ',';
    out << s.label;
    if (any_poisoned) {
      out << ',' << (s.is_poisoned ? 1 : 0);
      for (Eigen::Index i = 0; i < d; ++i) {
        out << ',' << (s.trigger_delta ? format_double((*s.trigger_delta)[i]) : "0");
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Dataset make_synthetic_gaussians(std::size_t n_per_class,
                                 const std::vector<Eigen::VectorXd>& means,
                                 double std_dev, std::uint64_t seed) {
  if (means.size() < 2) throw ConfigError("make_synthetic_gaussians: need >= 2 means");
  if (std_dev <= 0.0) throw std::domain_error("make_synthetic_gaussians: std must be > 0");
  const Eigen::Index d = means.front().size();
  for (const auto& m : means) {
    if (m.size() != d) throw ShapeError("make_synthetic_gaussians: inconsistent mean dims");
  }
  Dataset ds;
  ds.dim = d;
  ds.num_classes = static_cast<int>(means.size());
  Rng rng(derive_seed(seed, "synthetic-gaussians"));
  for (std::size_t i = 0; i < n_per_class; ++i) {
    for (std::size_t c = 0; c < means.size(); ++c) {
      Sample s;
      s.features = means[c] + std_dev * rng.normal_vector(d);
      s.label = static_cast<int>(c);
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

void save_noise_assignment(const NoiseAssignment& na, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write noise assignment: " + path);
  out << "index,sigma\n";
  out << "default," << format_double(na.default_sigma) << '\n';
  for (const auto& [idx, sigma] : na.per_sample_sigma) {
    out << idx << ',' << format_double(sigma) << '\n';
  }
}

NoiseAssignment load_noise_assignment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open noise assignment: " + path);
  std::string line;
  std::getline(in, line);  // header
  NoiseAssignment na;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tok = split_csv_line(line);
    if (tok.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": bad row");
    const double sigma = parse_finite(tok[1], line_no);
    if (tok[0] == "default") {
      na.default_sigma = sigma;
    } else {
      na.per_sample_sigma[std::stoul(tok[0])] = sigma;
    }
  }
  return na;
}

}  // namespace sscert
