// Copyright 2026 The Authors.
//
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

// Small self-contained problem instances for the oracle and for tests.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crancache/random.hpp"
#include "crancache/topology.hpp"
#include "crancache/workload.hpp"

namespace crancache {

struct Instance {
  Topology topology;
  Catalog catalog;
  Popularity popularity;
  CacheCapacities capacities;
};

/// R=2, F=3, one slot per cache, d_1=10, d_2=20, d_12=d_21=30, d_0=100,
/// popularity (0.5, 0.3, 0.2), one user per BS.
inline Instance canonical_instance() {
  return Instance{Topology({10.0, 20.0}, 100.0, {{"u1", 1}, {"u2", 2}}), Catalog(3, 20.0),
                  Popularity({0.5, 0.3, 0.2}), CacheCapacities(1, {1, 1})};
}

struct RandomInstanceLimits {
  std::size_t max_bs = 3;
  std::size_t max_files = 6;
  std::size_t max_capacity = 2;
  std::size_t max_users_per_bs = 3;
};

/// Random instance: seeded delays in the usual ranges, 0..max users per BS,
/// capacities uniform in 0..max_capacity, popularity from normalized
/// uniform weights (so ties and near-ties occur).
inline Instance random_instance(Rng& rng, const RandomInstanceLimits& limits = {}) {
  const std::size_t num_bs = 1 + uniform_index(rng, limits.max_bs);
  const std::size_t num_files = 1 + uniform_index(rng, limits.max_files);
  Topology base = build_seeded_topology(num_bs, rng());

  std::vector<User> users;
  for (std::size_t r = 1; r <= num_bs; ++r) {
    const std::size_t n = uniform_index(rng, limits.max_users_per_bs + 1);
    for (std::size_t j = 0; j < n; ++j) users.push_back({"u" + std::to_string(users.size() + 1), r});
  }
  if (users.empty()) users.push_back({"u1", 1});

  std::vector<std::size_t> edge(num_bs);
  for (auto& m : edge) m = uniform_index(rng, limits.max_capacity + 1);
  const std::size_t cloud = uniform_index(rng, limits.max_capacity + 1);

  std::vector<double> weights(num_files);
  double sum = 0.0;
  for (auto& w : weights) sum += w = 0.05 + uniform01(rng);
  for (auto& w : weights) w /= sum;

  return Instance{base.with_users(std::move(users)), Catalog(num_files, 20.0),
                  Popularity(std::move(weights)), CacheCapacities(cloud, std::move(edge))};
}

}  // namespace crancache
