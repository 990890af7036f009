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

#ifndef SSCERT_CERTSTORE_HPP
#define SSCERT_CERTSTORE_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

namespace sscert {

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;  // radius 0 is a point region
};

// Open-ball semantics: regions whose boundaries merely touch do NOT overlap,
// which makes the Case-3b shrunk radius (distance - r_i) attainable.
bool overlaps(const Ball& a, const Ball& b);

struct CertTriplet {
  Eigen::VectorXd input;  // region stays a ball centered here
  int label = 0;
  Ball region;
  double original_radius = 0.0;
};

enum class StoreCase { kDisjoint, kConsistentOverlap, kInsideConflict, kOutsideConflict, kMultiConflict };

struct ShrinkEvent {
  std::size_t conflicting_index = 0;
  bool inside = false;  // Case 3a (inside) vs 3b (outside)
  double radius_before = 0.0;
  double radius_after = 0.0;
  int label_before = 0;
  int label_after = 0;
};

struct StoreReport {
  StoreCase case_taken = StoreCase::kDisjoint;
  int final_label = 0;
  double final_radius = 0.0;
  std::vector<ShrinkEvent> shrink_events;
};

struct StoreViolation {
  std::size_t i = 0;
  std::size_t j = 0;
};

// Ordered triplet store maintaining the key invariant: any two stored
// regions with different labels are disjoint. Single-writer; inserts are
// order-dependent by design (entries are processed in insertion order).
class CertStore {
 public:
  // Resolves conflicts against stored entries in insertion order:
  //   inside  (||x_new - x_i|| <= r_i): radius <- min(r_new, r_i - dist),
  //                                     label  <- Y_i;
  //   outside:                          radius <- min(r_new, dist - r_i).
  // Radii clamp at 0; a zero-radius triplet is still stored. Once the label
  // flips, later comparisons use the updated label.
  StoreReport insert(CertTriplet triplet);

  // Exhaustive pairwise check of the invariant.
  std::vector<StoreViolation> verify() const;

  std::size_t size() const { return entries_.size(); }
  const CertTriplet& entry(std::size_t i) const { return entries_[i]; }
  const std::vector<CertTriplet>& entries() const { return entries_; }

  // Versioned JSON snapshot; floats survive the round trip bit-exactly.
  void snapshot(const std::string& path) const;
  static CertStore restore(const std::string& path);

  // Test hook: append without conflict resolution.
  void append_unchecked(CertTriplet triplet) { entries_.push_back(std::move(triplet)); }

 private:
  std::vector<CertTriplet> entries_;
};

}  // namespace sscert

#endif  // SSCERT_CERTSTORE_HPP
