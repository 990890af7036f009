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

#include <benchmark/benchmark.h>

#include "sscert/certstore.hpp"
#include "sscert/rng.hpp"
#include "sscert/smoothing.hpp"
#include "sscert/stats.hpp"

namespace {

void BM_CertifiedRadius(benchmark::State& state) {
  double p_a = 0.9, p_b = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sscert::certified_radius(p_a, p_b, 0.5));
    p_a = 0.5 + 0.499999 * (p_a * 3.9 * (1.0 - p_a));  // wander the input
  }
}
BENCHMARK(BM_CertifiedRadius);

void BM_BinomLowerBound(benchmark::State& state) {
  std::int64_t k = 0;
  const std::int64_t n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sscert::binom_lower_bound(k, n, 0.001));
    k = (k + 7) % (n + 1);
  }
}
BENCHMARK(BM_BinomLowerBound)->Arg(50)->Arg(1000);

void BM_McClassProbabilities(benchmark::State& state) {
  const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(16, -1.0, 1.0);
  const auto model = sscert::LinearClassifier::from_binary_score(w, 0.1);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(16, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sscert::mc_class_probabilities(model, x, 0.5, state.range(0), 42));
  }
}
BENCHMARK(BM_McClassProbabilities)->Arg(1024)->Arg(16384);

void BM_StoreInsert(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    sscert::CertStore store;
    sscert::Rng rng(7);
    state.ResumeTiming();
    for (std::size_t i = 0; i < n; ++i) {
      sscert::CertTriplet t;
      t.input = 10.0 * rng.normal_vector(3);
      t.label = static_cast<int>(rng.next_u64() % 3);
      t.region.center = t.input;
      t.region.radius = 0.5 + rng.uniform();
      t.original_radius = t.region.radius;
      store.insert(std::move(t));
    }
  }
}
BENCHMARK(BM_StoreInsert)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
