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

#include "sscert/certstore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sscert/errors.hpp"

namespace sscert {

using nlohmann::json;

bool overlaps(const Ball& a, const Ball& b) {
  if (a.center.size() != b.center.size()) {
    throw ShapeError("overlaps: dimension mismatch");
  }
  return (a.center - b.center).norm() < a.radius + b.radius;
}

StoreReport insert_resolve(std::vector<CertTriplet>& entries, CertTriplet t) {
  StoreReport report;
  bool any_overlap = false;
  std::size_t conflicts = 0;
  bool last_inside = false;

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const CertTriplet& stored = entries[i];
    if (!overlaps(stored.region, t.region)) continue;
    any_overlap = true;
    if (stored.label == t.label) continue;  // Case 2: added untouched

    ++conflicts;
    const double dist = (t.input - stored.input).norm();
    ShrinkEvent ev;
    ev.conflicting_index = i;
    ev.radius_before = t.region.radius;
    ev.label_before = t.label;
    if (dist <= stored.region.radius) {
      // Inside: shrink to the largest centered ball inside both regions and
      // adopt the stored label.
      ev.inside = true;
      t.region.radius = std::max(0.0, std::min(t.region.radius, stored.region.radius - dist));
      t.label = stored.label;
      last_inside = true;
    } else {
      // Outside: largest centered ball disjoint from the stored region.
      ev.inside = false;
      t.region.radius = std::max(0.0, std::min(t.region.radius, dist - stored.region.radius));
      last_inside = false;
    }
    ev.radius_after = t.region.radius;
    ev.label_after = t.label;
    report.shrink_events.push_back(ev);
  }

  // The closed-form radii are exact in real arithmetic, but dist - r_i can
  // round so that (dist - r_i) + r_i lands one ulp above dist, which the
  // strict overlap inequality then flags. Nudge the radius down by ulps
  // until the stored invariant holds numerically as well.
  for (const CertTriplet& stored : entries) {
    if (stored.label == t.label) continue;
    while (t.region.radius > 0.0 && overlaps(stored.region, t.region)) {
      t.region.radius = std::nextafter(t.region.radius, 0.0);
    }
  }
  if (!report.shrink_events.empty()) {
    report.shrink_events.back().radius_after = t.region.radius;
  }

  if (conflicts == 0) {
    report.case_taken = any_overlap ? StoreCase::kConsistentOverlap : StoreCase::kDisjoint;
  } else if (conflicts == 1) {
    report.case_taken = last_inside ? StoreCase::kInsideConflict : StoreCase::kOutsideConflict;
  } else {
    report.case_taken = StoreCase::kMultiConflict;
  }
  report.final_label = t.label;
  report.final_radius = t.region.radius;
  entries.push_back(std::move(t));
  return report;
}

StoreReport CertStore::insert(CertTriplet triplet) {
  if (!entries_.empty() &&
      triplet.input.size() != entries_.front().input.size()) {
    throw ShapeError("CertStore::insert: dimension mismatch");
  }
  return insert_resolve(entries_, std::move(triplet));
}

std::vector<StoreViolation> CertStore::verify() const {
  std::vector<StoreViolation> violations;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = i + 1; j < entries_.size(); ++j) {
      if (entries_[i].label != entries_[j].label &&
          overlaps(entries_[i].region, entries_[j].region)) {
        violations.push_back({i, j});
      }
    }
  }
  return violations;
}

void CertStore::snapshot(const std::string& path) const {
  json doc;
  doc["version"] = 1;
  doc["dim"] = entries_.empty() ? 0 : entries_.front().input.size();
  json arr = json::array();
  for (const auto& e : entries_) {
    json entry;
    entry["center"] = std::vector<double>(e.input.data(), e.input.data() + e.input.size());
    entry["label"] = e.label;
    entry["radius"] = e.region.radius;
    entry["original_radius"] = e.original_radius;
    arr.push_back(std::move(entry));
  }
  doc["entries"] = std::move(arr);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write store snapshot: " + path);
  out << doc.dump(2) << '\n';
}

CertStore CertStore::restore(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open store snapshot: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("corrupt store snapshot: " + std::string(e.what()));
  }
  if (doc.value("version", 0) != 1) {
    throw IoError("unsupported store snapshot version");
  }
  CertStore store;
  for (const auto& entry : doc.at("entries")) {
    CertTriplet t;
    const auto center = entry.at("center").get<std::vector<double>>();
    t.input = Eigen::Map<const Eigen::VectorXd>(center.data(),
                                                static_cast<Eigen::Index>(center.size()));
    t.label = entry.at("label").get<int>();
    t.region.center = t.input;
    t.region.radius = entry.at("radius").get<double>();
    t.original_radius = entry.at("original_radius").get<double>();
    store.entries_.push_back(std::move(t));
  }
  return store;
}

}  // namespace sscert
