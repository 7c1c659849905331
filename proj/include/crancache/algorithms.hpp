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

// Placement algorithms: proactive greedy distribution, reactive swap-based
// replacement, exhaustive search for small instances, and the static
// baseline placements used for comparison.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "crancache/core.hpp"
#include "crancache/objective.hpp"
#include "crancache/placement.hpp"
#include "crancache/topology.hpp"

namespace crancache {

struct Swap {
  Element evicted;
  Element inserted;
  double utility_after = 0.0;
};

struct PlacementReport {
  Placement placement;
  std::size_t iterations = 0;
  std::vector<double> utility_trace;  // utility after each iteration
  std::vector<Element> chosen;        // greedy: element added per iteration
  std::vector<Swap> swaps;            // replacement: accepted swaps
  std::vector<std::string> warnings;
  std::chrono::duration<double> wall_time{0};
};

namespace detail {

// Heap entry for lazy greedy. `gain` may be stale; by submodularity a stale
// value is an upper bound on the current one.
struct GreedyCandidate {
  double gain;
  Element element;
};

// True when a should be chosen before b: larger gain, then lower file,
// then lower cache.
inline bool greedy_before(const GreedyCandidate& a, const GreedyCandidate& b) {
  if (a.gain != b.gain) return a.gain > b.gain;
  if (a.element.file != b.element.file) return a.element.file < b.element.file;
  return a.element.cache < b.element.cache;
}

struct GreedyAfter {
  bool operator()(const GreedyCandidate& a, const GreedyCandidate& b) const {
    return greedy_before(b, a);
  }
};

}  // namespace detail

/// Greedy proactive distribution. Starting from the empty placement, each
/// iteration adds the (file, cache) element of largest marginal gain among
/// caches that still have room, until every cache holds min(M_r, F) files.
///
/// Candidates sit in a max-heap with possibly stale gains. The popped
/// element is re-evaluated and accepted only if it still orders before the
/// next heap entry; since gains never grow as the placement grows, this
/// picks exactly the element a full rescan would pick, ties included.
///
/// `mode` selects the routing the utility is computed under; kFull is the
/// cooperative objective, kEdgeCloudOnly gives the FemtoX variant.
inline PlacementReport pcd(const Topology& topology, const Catalog& catalog,
                           const Popularity& popularity, const CacheCapacities& capacities,
                           RoutingMode mode = RoutingMode::kFull) {
  const auto start = std::chrono::steady_clock::now();
  if (popularity.size() != catalog.num_files)
    throw ArgumentError("popularity and catalog disagree on F");
  if (capacities.num_caches() != topology.num_bs() + 1)
    throw ArgumentError("capacities and topology disagree on R");

  PlacementReport report;
  const std::size_t num_files = catalog.num_files;
  for (CacheIndex c = 0; c < capacities.num_caches(); ++c)
    if (capacities.at(c) > num_files)
      report.warnings.push_back("cache " + std::to_string(c) + " capacity " +
                                std::to_string(capacities.at(c)) + " clamped to F=" +
                                std::to_string(num_files));

  UtilityTracker tracker(topology, popularity, Placement(capacities, num_files), mode);

  std::vector<detail::GreedyCandidate> seed;
  for (CacheIndex c = 0; c < capacities.num_caches(); ++c) {
    if (capacities.at(c) == 0) continue;
    for (FileIndex f = 0; f < num_files; ++f) seed.push_back({tracker.gain({f, c}), {f, c}});
  }
  std::priority_queue<detail::GreedyCandidate, std::vector<detail::GreedyCandidate>,
                      detail::GreedyAfter>
      heap(detail::GreedyAfter{}, std::move(seed));

  while (!heap.empty()) {
    auto top = heap.top();
    heap.pop();
    if (tracker.placement().full(top.element.cache)) continue;
    top.gain = tracker.gain(top.element);
    if (!heap.empty() && !detail::greedy_before(top, heap.top())) {
      heap.push(top);
      continue;
    }
    tracker.add(top.element);
    report.chosen.push_back(top.element);
    report.utility_trace.push_back(tracker.utility());
    ++report.iterations;
  }

  report.placement = tracker.placement();
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

/// Reactive replacement after a miss on `new_file`, applied in place. Up to
/// R+1 rounds: take the placed element with the smallest marginal loss,
/// (f_j, cache r'), and replace it with (new_file, r') if that strictly
/// raises utility; stop at the first round that would not.
inline std::vector<Swap> reactive_replace(UtilityTracker& tracker, FileIndex new_file) {
  if (new_file >= tracker.num_files()) throw ArgumentError("file index out of range");
  if (tracker.placement().cached_anywhere(new_file))
    throw ArgumentError("file " + std::to_string(new_file + 1) + " is already cached");

  std::vector<Swap> swaps;
  for (std::size_t round = 0; round < tracker.num_caches(); ++round) {
    const auto victim = tracker.min_loss_element();
    if (!victim) break;
    const Element incoming{new_file, victim->cache};
    // Other files' terms are unaffected by the swap, so the utility change
    // is gain(incoming) - loss(victim).
    if (victim->file == new_file || tracker.placement().contains(incoming)) break;
    if (!(tracker.gain(incoming) > tracker.loss(*victim))) break;
    tracker.remove(*victim);
    tracker.add(incoming);
    swaps.push_back({*victim, incoming, tracker.utility()});
  }
  return swaps;
}

inline PlacementReport rcr(const Placement& placement, FileIndex new_file, const Topology& topology,
                           const Popularity& popularity, RoutingMode mode = RoutingMode::kFull) {
  const auto start = std::chrono::steady_clock::now();
  UtilityTracker tracker(topology, popularity, placement, mode);
  PlacementReport report;
  report.swaps = reactive_replace(tracker, new_file);
  report.iterations = report.swaps.size();
  for (const auto& s : report.swaps) {
    report.chosen.push_back(s.inserted);
    report.utility_trace.push_back(s.utility_after);
  }
  report.placement = tracker.placement();
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Product over caches of C(F, min(M_r, F)), saturated just above `cap`.
inline std::uint64_t placement_count(std::size_t num_files, const CacheCapacities& capacities,
                                     std::uint64_t cap = kBruteForceLimit) {
  std::uint64_t product = 1;
  for (CacheIndex c = 0; c < capacities.num_caches(); ++c) {
    const std::size_t k = std::min(capacities.at(c), num_files);
    std::uint64_t binom = 1;
    for (std::size_t j = 1; j <= k; ++j) {
      binom = binom * (num_files - k + j) / j;
      if (binom > cap) return cap + 1;
    }
    if (binom != 0 && product > cap / binom) return cap + 1;
    product *= binom;
  }
  return product;
}

/// Exhaustive search over every placement that fills each cache with
/// min(M_r, F) files (monotonicity makes smaller sets no better). Among
/// maximizers the lexicographically smallest (cache, file) list wins;
/// utilities within 1e-12 relative count as tied.
inline Placement brute_force_optimal(const Topology& topology, const Catalog& catalog,
                                     const Popularity& popularity,
                                     const CacheCapacities& capacities,
                                     RoutingMode mode = RoutingMode::kFull) {
  const std::size_t num_files = catalog.num_files;
  if (popularity.size() != num_files) throw ArgumentError("popularity and catalog disagree on F");
  if (capacities.num_caches() != topology.num_bs() + 1)
    throw ArgumentError("capacities and topology disagree on R");
  const auto count = placement_count(num_files, capacities);
  if (count > kBruteForceLimit)
    throw SizeError("instance too large for exhaustive search: product of C(F, M_r) exceeds " +
                    std::to_string(kBruteForceLimit));

  Placement current(capacities, num_files);
  Placement best = current;
  double best_utility = -1.0;

  // Caches are enumerated outermost-first and each cache's subsets in
  // lexicographic order, so visiting order is lexicographic on elements().
  std::function<void(CacheIndex)> visit_cache;
  std::function<void(CacheIndex, FileIndex, std::size_t)> choose;
  visit_cache = [&](CacheIndex c) {
    if (c == capacities.num_caches()) {
      const double u = utility(current, topology, popularity, mode);
      if (u > best_utility + 1e-12 * std::max(1.0, std::abs(best_utility))) {
        best_utility = u;
        best = current;
      }
      return;
    }
    choose(c, 0, std::min(capacities.at(c), num_files));
  };
  choose = [&](CacheIndex c, FileIndex from, std::size_t remaining) {
    if (remaining == 0) {
      visit_cache(c + 1);
      return;
    }
    for (FileIndex f = from; f + remaining <= num_files; ++f) {
      current.add({f, c});
      choose(c, f + 1, remaining - 1);
      current.remove({f, c});
    }
  };
  visit_cache(0);
  return best;
}

namespace detail {

inline void fill_top(Placement& placement, CacheIndex cache, const std::vector<FileIndex>& ranking,
                     const std::function<bool(FileIndex)>& skip = {}) {
  for (FileIndex f : ranking) {
    if (placement.full(cache)) break;
    if (skip && skip(f)) continue;
    placement.add({f, cache});
  }
}

inline void check_inputs(const Topology& topology, const Catalog& catalog,
                         const Popularity& popularity, const CacheCapacities& capacities) {
  if (popularity.size() != catalog.num_files)
    throw ArgumentError("popularity and catalog disagree on F");
  if (capacities.num_caches() != topology.num_bs() + 1)
    throw ArgumentError("capacities and topology disagree on R");
}

}  // namespace detail

/// Edge-only: every edge holds its M_r most popular files; the cloud is
/// unused. Evaluated with RoutingMode::kEdgeOnly.
inline Placement place_eo(const Topology& topology, const Catalog& catalog,
                          const Popularity& popularity, const CacheCapacities& capacities) {
  detail::check_inputs(topology, catalog, popularity, capacities);
  Placement placement(capacities, catalog.num_files);
  const auto ranking = popularity.ranking();
  for (CacheIndex r = 1; r <= topology.num_bs(); ++r) detail::fill_top(placement, r, ranking);
  return placement;
}

/// Edge + cloud, non-cooperative: edges and cloud each independently hold
/// their most popular files. Evaluated with RoutingMode::kEdgeCloudOnly.
inline Placement place_ecnc(const Topology& topology, const Catalog& catalog,
                            const Popularity& popularity, const CacheCapacities& capacities) {
  Placement placement = place_eo(topology, catalog, popularity, capacities);
  detail::fill_top(placement, kCloud, popularity.ranking());
  return placement;
}

/// Exclusive most-popular: edges hold the top files, the cloud holds the
/// next most popular files that no edge holds.
inline Placement place_exmpc(const Topology& topology, const Catalog& catalog,
                             const Popularity& popularity, const CacheCapacities& capacities) {
  Placement placement = place_eo(topology, catalog, popularity, capacities);
  detail::fill_top(placement, kCloud, popularity.ranking(),
                   [&](FileIndex f) { return placement.cached_anywhere(f); });
  return placement;
}

/// FemtoCaching extended with a cloud cache: the same greedy as pcd() but
/// scoring placements without neighbor retrieval.
inline Placement place_femtox(const Topology& topology, const Catalog& catalog,
                              const Popularity& popularity, const CacheCapacities& capacities) {
  return pcd(topology, catalog, popularity, capacities, RoutingMode::kEdgeCloudOnly).placement;
}

}  // namespace crancache
