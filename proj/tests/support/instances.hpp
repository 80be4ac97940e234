// Copyright 2026 The drcover Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Test-only random instance builders, independent of the library generator.

#ifndef DRCOVER_TESTS_SUPPORT_INSTANCES_HPP_
#define DRCOVER_TESTS_SUPPORT_INSTANCES_HPP_

#include <random>
#include <vector>

#include "drcover/model.hpp"

namespace drcover::testing {

inline Instance make_random_instance(std::mt19937_64& rng, int n, int targets,
                                     int scenarios, double p, double delta,
                                     double epsilon, int max_coverage_level = 2) {
  Instance inst;
  inst.n_elements = n;
  inst.n_targets = targets;
  inst.n_scenarios = scenarios;
  inst.p = p;
  inst.delta = delta;
  inst.epsilon = epsilon;
  std::uniform_int_distribution<int> cost_dist(1, 100);
  std::uniform_int_distribution<int> cov_dist(1, std::min(n, max_coverage_level));
  std::bernoulli_distribution bit(0.6);
  inst.cost.resize(n);
  for (auto& c : inst.cost) c = cost_dist(rng);
  inst.coverage.resize(targets);
  for (auto& v : inst.coverage) v = cov_dist(rng);
  inst.samples.resize(static_cast<std::size_t>(scenarios) * targets * n);
  for (auto& s : inst.samples) s = bit(rng) ? 1 : 0;
  return inst;
}

inline std::vector<int> random_binary(std::mt19937_64& rng, int n, double density = 0.5) {
  std::bernoulli_distribution bit(density);
  std::vector<int> x(n);
  for (auto& e : x) e = bit(rng) ? 1 : 0;
  return x;
}

}  // namespace drcover::testing

#endif  // DRCOVER_TESTS_SUPPORT_INSTANCES_HPP_
