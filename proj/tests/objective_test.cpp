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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "crancache/instances.hpp"
#include "crancache/objective.hpp"
#include "oracles.hpp"

namespace crancache {
namespace {

// The greedy placement of the canonical instance: f1 in the cloud, f2 at
// BS 1, f3 at BS 2.
Placement canonical_pcd_placement(const Instance& inst) {
  Placement c(inst.capacities, 3);
  c.add({0, 0});
  c.add({1, 1});
  c.add({2, 2});
  return c;
}

TEST(RouteTest, LocalHitIsFree) {
  const auto inst = canonical_instance();
  Placement c(inst.capacities, 3);
  c.add({0, 1});
  c.add({0, 0});
  const auto src = route_request(c, inst.topology, 1, 0);
  EXPECT_EQ(src.kind, SourceKind::kLocalEdge);
  EXPECT_EQ(src.delay_ms, 0.0);
}

TEST(RouteTest, CloudOnly) {
  const auto inst = canonical_instance();
  Placement c(inst.capacities, 3);
  c.add({1, 0});
  const auto src = route_request(c, inst.topology, 1, 1);
  EXPECT_EQ(src.kind, SourceKind::kCloud);
  EXPECT_EQ(src.delay_ms, 10.0);
}

TEST(RouteTest, CloudBeatsNeighbor) {
  const auto inst = canonical_instance();
  Placement c(inst.capacities, 3);
  c.add({2, 2});
  c.add({2, 0});
  // Sources for BS 1: cloud 10, neighbor 30, CDN 100.
  const auto src = route_request(c, inst.topology, 1, 2);
  EXPECT_EQ(src.kind, SourceKind::kCloud);
  EXPECT_EQ(src.delay_ms, 10.0);
}

TEST(RouteTest, NeighborAndCdn) {
  const auto inst = canonical_instance();
  Placement c(inst.capacities, 3);
  c.add({2, 2});
  EXPECT_EQ(route_request(c, inst.topology, 1, 2), (Source{SourceKind::kNeighborEdge, 2, 30.0}));
  EXPECT_EQ(route_request(c, inst.topology, 1, 1).kind, SourceKind::kCdn);
  EXPECT_EQ(route_request(c, inst.topology, 1, 1).delay_ms, 100.0);
}

TEST(RouteTest, RoutingModesRestrictSources) {
  const auto inst = canonical_instance();
  Placement c(inst.capacities, 3);
  c.add({2, 2});
  c.add({1, 0});
  EXPECT_EQ(route_request(c, inst.topology, 1, 2, RoutingMode::kEdgeCloudOnly).kind, SourceKind::kCdn);
  EXPECT_EQ(route_request(c, inst.topology, 1, 1, RoutingMode::kEdgeCloudOnly).kind, SourceKind::kCloud);
  EXPECT_EQ(route_request(c, inst.topology, 1, 1, RoutingMode::kEdgeOnly).kind, SourceKind::kCdn);
  EXPECT_EQ(route_request(c, inst.topology, 2, 2, RoutingMode::kEdgeOnly).kind, SourceKind::kLocalEdge);
}

TEST(RouteTest, EqualCostsPickLowestCacheIndex) {
  // d_1 = d_12 makes cloud and neighbor tie for BS 1.
  const Topology t({10.0, 10.0, 10.0}, {{0, 10, 10}, {20, 0, 20}, {20, 20, 0}}, 100.0);
  Placement c(CacheCapacities(1, {1, 1, 1}), 1);
  c.add({0, 3});
  c.add({0, 2});
  EXPECT_EQ(route_request(c, t, 1, 0).cache, 2u);
  c.add({0, 0});
  EXPECT_EQ(route_request(c, t, 1, 0).cache, 0u);
}

TEST(RouteTest, RejectsBadIndices) {
  const auto inst = canonical_instance();
  Placement c(inst.capacities, 3);
  EXPECT_THROW(route_request(c, inst.topology, 0, 0), ArgumentError);
  EXPECT_THROW(route_request(c, inst.topology, 3, 0), ArgumentError);
  EXPECT_THROW(route_request(c, inst.topology, 1, 3), ArgumentError);
}

TEST(RouteTest, MatchesExhaustiveCostComparison) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_instance(rng, {4, 6, 3, 2});
    const auto c = oracle::random_placement(rng, inst);
    for (std::size_t bs = 1; bs <= inst.topology.num_bs(); ++bs)
      for (FileIndex f = 0; f < inst.catalog.num_files; ++f)
        for (auto mode : {RoutingMode::kFull, RoutingMode::kEdgeCloudOnly, RoutingMode::kEdgeOnly}) {
          const auto src = route_request(c, inst.topology, bs, f, mode);
          ASSERT_EQ(src.delay_ms, oracle::request_cost(c, inst.topology, bs, f, mode));
          if (c.contains(f, bs)) {
            ASSERT_EQ(src.kind, SourceKind::kLocalEdge);
          }
          if (src.kind != SourceKind::kCdn) {
            ASSERT_TRUE(c.contains(f, src.cache));
          }
          ASSERT_EQ(src.delay_ms == 0.0, src.kind == SourceKind::kLocalEdge);
        }
  }
}

TEST(DelayTest, CanonicalUsers) {
  const auto inst = canonical_instance();
  const auto c = canonical_pcd_placement(inst);
  // u1: 0.5*10 + 0.3*0 + 0.2*30; u2: 0.5*20 + 0.3*30 + 0.2*0.
  EXPECT_NEAR(user_expected_delay(c, inst.topology, inst.popularity, "u1"), 11.0, 1e-12);
  EXPECT_NEAR(user_expected_delay(c, inst.topology, inst.popularity, "u2"), 19.0, 1e-12);
  EXPECT_NEAR(total_expected_delay(c, inst.topology, inst.popularity), 30.0, 1e-12);
  EXPECT_NEAR(oracle::total_delay(c, inst.topology, inst.popularity), 30.0, 1e-12);
  EXPECT_THROW(user_expected_delay(c, inst.topology, inst.popularity, "u9"), ArgumentError);
}

TEST(DelayTest, EmptyAndSaturatedPlacements) {
  const auto inst = canonical_instance();
  Placement empty(inst.capacities, 3);
  EXPECT_DOUBLE_EQ(user_expected_delay(empty, inst.topology, inst.popularity, "u1"), 100.0);
  EXPECT_DOUBLE_EQ(total_expected_delay(empty, inst.topology, inst.popularity), 200.0);
  EXPECT_EQ(utility(empty, inst.topology, inst.popularity), 0.0);

  Placement all(CacheCapacities(3, {3, 3}), 3);
  for (FileIndex f = 0; f < 3; ++f)
    for (CacheIndex k = 0; k < 3; ++k) all.add({f, k});
  EXPECT_DOUBLE_EQ(user_expected_delay(all, inst.topology, inst.popularity, "u2"), 0.0);
  EXPECT_NEAR(utility(all, inst.topology, inst.popularity), 200.0, 1e-12);
}

TEST(UtilityTest, CanonicalValue) {
  const auto inst = canonical_instance();
  const auto c = canonical_pcd_placement(inst);
  // u1: 0.5*90 + 0.3*100 + 0.2*70 = 89; u2: 0.5*80 + 0.3*70 + 0.2*100 = 81.
  EXPECT_NEAR(oracle::utility(c, inst.topology, inst.popularity), 170.0, 1e-12);
  EXPECT_NEAR(utility(c, inst.topology, inst.popularity), 170.0, 1e-12);
}

TEST(UtilityTest, CanonicalMarginals) {
  const auto inst = canonical_instance();
  Placement empty(inst.capacities, 3);
  EXPECT_NEAR(marginal_gain(empty, {0, 0}, inst.topology, inst.popularity), 85.0, 1e-12);
  Placement cloud_f1 = oracle::with(empty, {0, 0});
  EXPECT_NEAR(marginal_gain(cloud_f1, {0, 1}, inst.topology, inst.popularity), 5.0, 1e-12);

  const auto c = canonical_pcd_placement(inst);
  EXPECT_NEAR(marginal_loss(c, {1, 1}, inst.topology, inst.popularity), 51.0, 1e-12);
  EXPECT_THROW(marginal_loss(c, {1, 2}, inst.topology, inst.popularity), ArgumentError);
  EXPECT_THROW(marginal_gain(c, {1, 1}, inst.topology, inst.popularity), ArgumentError);
  EXPECT_THROW(marginal_gain(c, {0, 1}, inst.topology, inst.popularity), ArgumentError);  // full
}

TEST(UtilityTest, NoGainWhenEveryUserHasItLocally) {
  const auto inst = canonical_instance();
  Placement c(CacheCapacities(1, {1, 1}), 3);
  c.add({0, 1});
  c.add({0, 2});
  EXPECT_EQ(marginal_gain(c, {0, 0}, inst.topology, inst.popularity), 0.0);
  // Removing a copy that no user routes to loses nothing.
  c.add({0, 0});
  EXPECT_EQ(marginal_loss(c, {0, 0}, inst.topology, inst.popularity), 0.0);
}

TEST(UtilityTest, DualityOnRandomPlacements) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = random_instance(rng, {5, 8, 4, 3});
    const auto c = oracle::random_placement(rng, inst);
    const double users = static_cast<double>(inst.topology.users().size());
    const double lhs = utility(c, inst.topology, inst.popularity) +
                       total_expected_delay(c, inst.topology, inst.popularity);
    const double rhs = users * inst.topology.cdn_delay();
    ASSERT_NEAR(lhs, rhs, 1e-9 * rhs);
    ASSERT_NEAR(utility(c, inst.topology, inst.popularity),
                oracle::utility(c, inst.topology, inst.popularity), 1e-9 * rhs);
  }
}

TEST(UtilityTest, MonotoneAndSubmodular) {
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    auto inst = random_instance(rng, {4, 6, 3, 3});
    // Unbounded capacities so any superset stays feasible.
    inst.capacities = CacheCapacities(inst.catalog.num_files,
                                      std::vector<std::size_t>(inst.topology.num_bs(), inst.catalog.num_files));
    const auto big = oracle::random_placement(rng, inst);
    Placement small = big;
    for (const auto& e : big.elements())
      if (uniform01(rng) < 0.5) small.remove(e);
    const Element e{uniform_index(rng, inst.catalog.num_files), uniform_index(rng, big.num_caches())};
    if (big.contains(e)) continue;
    const double g_big = marginal_gain(big, e, inst.topology, inst.popularity);
    const double g_small = marginal_gain(small, e, inst.topology, inst.popularity);
    ASSERT_GE(g_big, 0.0);
    ASSERT_GE(g_small + 1e-9, g_big);
    // Marginal matches the utility difference by the independent route.
    ASSERT_NEAR(g_big,
                oracle::utility(oracle::with(big, e), inst.topology, inst.popularity) -
                    oracle::utility(big, inst.topology, inst.popularity),
                1e-9);
  }
}

TEST(UtilityTest, LossEqualsGainOfRemovedElement) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_instance(rng);
    const auto c = oracle::random_placement(rng, inst);
    for (const auto& e : c.elements()) {
      const double loss = marginal_loss(c, e, inst.topology, inst.popularity);
      ASSERT_GE(loss, 0.0);
      ASSERT_NEAR(loss, marginal_gain(oracle::without(c, e), e, inst.topology, inst.popularity), 1e-9);
    }
  }
}

TEST(TrackerTest, AgreesWithFreeFunctions) {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    auto inst = random_instance(rng, {5, 8, 3, 3});
    const auto mode = trial % 3 == 0 ? RoutingMode::kEdgeCloudOnly : RoutingMode::kFull;
    UtilityTracker tracker(inst.topology, inst.popularity, oracle::random_placement(rng, inst), mode);
    for (int step = 0; step < 20; ++step) {
      const auto& c = tracker.placement();
      const double u = utility(c, inst.topology, inst.popularity, mode);
      ASSERT_NEAR(tracker.utility(), u, 1e-9 * std::max(1.0, u));
      ASSERT_NEAR(tracker.exact_utility(), u, 1e-9 * std::max(1.0, u));
      for (const auto& e : c.elements())
        ASSERT_NEAR(tracker.loss(e), marginal_loss(c, e, inst.topology, inst.popularity, mode), 1e-9);
      if (auto m = tracker.min_loss_element()) {
        for (const auto& e : c.elements()) ASSERT_LE(tracker.loss(*m), tracker.loss(e));
      }
      // Random mutation: add when possible, else remove.
      const Element e{uniform_index(rng, c.num_files()), uniform_index(rng, c.num_caches())};
      if (c.contains(e)) {
        tracker.remove(e);
      } else if (!c.full(e.cache)) {
        ASSERT_NEAR(tracker.gain(e), marginal_gain(c, e, inst.topology, inst.popularity, mode), 1e-9);
        tracker.add(e);
      }
    }
  }
}

TEST(PlacementTest, CapacityAndDuplicates) {
  Placement c(CacheCapacities(1, {2}), 3);
  c.add({0, 1});
  EXPECT_THROW(c.add({0, 1}), ArgumentError);
  c.add({1, 1});
  EXPECT_THROW(c.add({2, 1}), ArgumentError);
  c.add({0, 0});  // same file, different cache
  EXPECT_TRUE(c.feasible());
  EXPECT_THROW(c.remove({2, 0}), ArgumentError);
  EXPECT_THROW(c.add({3, 0}), ArgumentError);
}

TEST(PlacementTest, TextFormat) {
  const auto inst = canonical_instance();
  const auto c = canonical_pcd_placement(inst);
  const auto text = placement_to_string(c);
  EXPECT_EQ(text, "0\t1\n1\t2\n2\t3\n");
  std::istringstream in(text);
  EXPECT_EQ(read_placement(in, inst.capacities, 3), c);
}

// Partition matroid axioms, checked by enumerating every subset of a small
// ground set.
TEST(PlacementTest, FeasibleSetsFormAPartitionMatroid) {
  const CacheCapacities caps(1, {2, 1});
  const std::size_t files = 3;
  std::vector<Element> ground;
  for (CacheIndex k = 0; k < 3; ++k)
    for (FileIndex f = 0; f < files; ++f) ground.push_back({f, k});
  const std::size_t n = ground.size();
  auto feasible = [&](unsigned mask) {
    std::vector<std::size_t> count(3, 0);
    for (std::size_t b = 0; b < n; ++b)
      if (mask >> b & 1u) ++count[ground[b].cache];
    for (CacheIndex k = 0; k < 3; ++k)
      if (count[k] > caps.at(k)) return false;
    return true;
  };
  auto placement_accepts = [&](unsigned mask) {
    Placement c(caps, files);
    try {
      for (std::size_t b = 0; b < n; ++b)
        if (mask >> b & 1u) c.add(ground[b]);
    } catch (const ArgumentError&) {
      return false;
    }
    return true;
  };
  for (unsigned a = 0; a < (1u << n); ++a) {
    ASSERT_EQ(feasible(a), placement_accepts(a));
    if (!feasible(a)) continue;
    for (unsigned sub = a; sub; sub = (sub - 1) & a) ASSERT_TRUE(feasible(sub));
    for (unsigned b = 0; b < (1u << n); ++b) {
      if (!feasible(b) || std::popcount(a) >= std::popcount(b)) continue;
      bool exchange = false;
      for (std::size_t e = 0; e < n && !exchange; ++e)
        if ((b >> e & 1u) && !(a >> e & 1u) && feasible(a | (1u << e))) exchange = true;
      ASSERT_TRUE(exchange);
    }
  }
}

}  // namespace
}  // namespace crancache
