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

// Request routing and the placement objective.
//
// A request for file i at BS r is served by the cheapest cache holding i
// among those the routing mode allows: the local edge (cost 0), the cloud
// (d_r), a neighbor edge k (d_rk); otherwise by the CDN (d_0). The
// delay-reduction utility credits each (user, file) pair with
// p_i * (d_0 - cost of its best source), which is monotone submodular over
// (file, cache) elements. utility(C) + total_expected_delay(C) = U * d_0.
//
// Users with the same home BS see identical costs, so sums over users are
// carried as sums over BSs weighted by |U_r|.

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "crancache/core.hpp"
#include "crancache/placement.hpp"
#include "crancache/topology.hpp"

namespace crancache {

/// Delay of serving a request at `bs` from cache `cache`, or nullopt when the
/// routing mode forbids that cache.
inline std::optional<double> source_cost(const Topology& topology, std::size_t bs, CacheIndex cache,
                                         RoutingMode mode) {
  if (cache == bs) return 0.0;
  if (cache == kCloud) {
    if (mode == RoutingMode::kEdgeOnly) return std::nullopt;
    return topology.edge_delay(bs);
  }
  if (mode != RoutingMode::kFull) return std::nullopt;
  return topology.peer_delay(bs, cache);
}

/// Cheapest allowed source. Ties go to the lower cache index, so the cloud
/// wins a tie against any neighbor; the CDN is used only when strictly
/// cheaper than every cached copy or when nothing is cached.
inline Source route_request(const Placement& placement, const Topology& topology, std::size_t bs,
                            FileIndex file, RoutingMode mode = RoutingMode::kFull) {
  if (bs < 1 || bs > topology.num_bs()) throw ArgumentError("BS index outside 1..R");
  if (file >= placement.num_files()) throw ArgumentError("file index out of range");
  if (placement.num_caches() != topology.num_bs() + 1)
    throw ArgumentError("placement and topology disagree on R");

  Source best{SourceKind::kCdn, 0, topology.cdn_delay()};
  bool found = false;
  for (CacheIndex c = 0; c < placement.num_caches(); ++c) {
    if (!placement.contains(file, c)) continue;
    const auto cost = source_cost(topology, bs, c, mode);
    if (!cost) continue;
    if (*cost >= topology.cdn_delay()) continue;
    if (!found || *cost < best.delay_ms) {
      found = true;
      const SourceKind kind = c == bs ? SourceKind::kLocalEdge
                              : c == kCloud ? SourceKind::kCloud
                                            : SourceKind::kNeighborEdge;
      best = Source{kind, c, *cost};
    }
  }
  return best;
}

/// Expected per-request delay seen by any user homed at `bs`.
inline double bs_expected_delay(const Placement& placement, const Topology& topology,
                                const Popularity& popularity, std::size_t bs,
                                RoutingMode mode = RoutingMode::kFull) {
  double sum = 0.0;
  for (FileIndex i = 0; i < popularity.size(); ++i)
    sum += popularity[i] * route_request(placement, topology, bs, i, mode).delay_ms;
  return sum;
}

inline double user_expected_delay(const Placement& placement, const Topology& topology,
                                  const Popularity& popularity, std::string_view user,
                                  RoutingMode mode = RoutingMode::kFull) {
  const auto& u = topology.users()[topology.user_index(user)];
  return bs_expected_delay(placement, topology, popularity, u.home_bs, mode);
}

inline double total_expected_delay(const Placement& placement, const Topology& topology,
                                   const Popularity& popularity,
                                   RoutingMode mode = RoutingMode::kFull) {
  const auto weights = topology.users_per_bs();
  double total = 0.0;
  for (std::size_t r = 1; r <= topology.num_bs(); ++r) {
    if (weights[r] == 0.0) continue;
    total += weights[r] * bs_expected_delay(placement, topology, popularity, r, mode);
  }
  return total;
}

/// Delay reduction d_0 - cost for each (BS, cache) pair; 0 where routing
/// forbids the cache. Row r-1 holds BS r, columns are caches 0..R.
class ReductionTable {
 public:
  ReductionTable(const Topology& topology, RoutingMode mode)
      : num_bs_(topology.num_bs()), values_(num_bs_ * (num_bs_ + 1), 0.0) {
    for (std::size_t r = 1; r <= num_bs_; ++r)
      for (CacheIndex c = 0; c <= num_bs_; ++c)
        if (auto cost = source_cost(topology, r, c, mode))
          values_[(r - 1) * (num_bs_ + 1) + c] = std::max(0.0, topology.cdn_delay() - *cost);
  }

  double operator()(std::size_t bs, CacheIndex cache) const {
    return values_[(bs - 1) * (num_bs_ + 1) + cache];
  }
  std::size_t num_bs() const { return num_bs_; }

 private:
  std::size_t num_bs_;
  std::vector<double> values_;
};

namespace detail {

// Best reduction available to BS r for file i, optionally ignoring one cache.
inline double best_reduction(const Placement& placement, const ReductionTable& t, std::size_t bs,
                             FileIndex file, std::optional<CacheIndex> skip = std::nullopt) {
  double best = 0.0;
  for (CacheIndex c = 0; c < placement.num_caches(); ++c)
    if (c != skip && placement.contains(file, c)) best = std::max(best, t(bs, c));
  return best;
}

inline void check_compatible(const Placement& placement, const Topology& topology,
                             const Popularity& popularity) {
  if (placement.num_caches() != topology.num_bs() + 1)
    throw ArgumentError("placement and topology disagree on R");
  if (placement.num_files() != popularity.size())
    throw ArgumentError("placement and popularity disagree on F");
}

}  // namespace detail

/// Total expected delay reduction relative to serving everything from the
/// CDN. Accumulated by ascending file, then BS.
inline double utility(const Placement& placement, const Topology& topology,
                      const Popularity& popularity, RoutingMode mode = RoutingMode::kFull) {
  detail::check_compatible(placement, topology, popularity);
  const ReductionTable t(topology, mode);
  const auto weights = topology.users_per_bs();
  double total = 0.0;
  for (FileIndex i = 0; i < popularity.size(); ++i) {
    if (popularity[i] == 0.0) continue;
    for (std::size_t r = 1; r <= topology.num_bs(); ++r) {
      if (weights[r] == 0.0) continue;
      total += weights[r] * popularity[i] * detail::best_reduction(placement, t, r, i);
    }
  }
  return total;
}

/// utility(C + e) - utility(C), computed locally from file e.file's copies.
inline double marginal_gain(const Placement& placement, Element candidate, const Topology& topology,
                            const Popularity& popularity, RoutingMode mode = RoutingMode::kFull) {
  detail::check_compatible(placement, topology, popularity);
  if (candidate.cache >= placement.num_caches() || candidate.file >= placement.num_files())
    throw ArgumentError("candidate out of range");
  if (placement.contains(candidate)) throw ArgumentError("candidate already placed");
  if (placement.full(candidate.cache)) throw ArgumentError("candidate cache is full");
  const ReductionTable t(topology, mode);
  const auto weights = topology.users_per_bs();
  double gain = 0.0;
  for (std::size_t r = 1; r <= topology.num_bs(); ++r) {
    const double current = detail::best_reduction(placement, t, r, candidate.file);
    gain += weights[r] * std::max(0.0, t(r, candidate.cache) - current);
  }
  return popularity[candidate.file] * gain;
}

/// utility(C) - utility(C - e) for a placed element.
inline double marginal_loss(const Placement& placement, Element member, const Topology& topology,
                            const Popularity& popularity, RoutingMode mode = RoutingMode::kFull) {
  detail::check_compatible(placement, topology, popularity);
  if (member.cache >= placement.num_caches() || member.file >= placement.num_files() ||
      !placement.contains(member))
    throw ArgumentError("element is not placed");
  const ReductionTable t(topology, mode);
  const auto weights = topology.users_per_bs();
  double loss = 0.0;
  for (std::size_t r = 1; r <= topology.num_bs(); ++r) {
    const double with = detail::best_reduction(placement, t, r, member.file);
    const double without = detail::best_reduction(placement, t, r, member.file, member.cache);
    loss += weights[r] * (with - without);
  }
  return popularity[member.file] * loss;
}

/// A placement plus the per-(file, BS) best-reduction table and an ordered
/// index of every placed element's marginal loss. Gains and losses cost
/// O(R) and O(R^2); add/remove refresh only the touched file.
class UtilityTracker {
 public:
  UtilityTracker(const Topology& topology, const Popularity& popularity, Placement placement,
                 RoutingMode mode = RoutingMode::kFull)
      : num_bs_(topology.num_bs()),
        table_(topology, mode),
        weights_(topology.users_per_bs()),
        probs_(popularity.probs()),
        placement_(std::move(placement)),
        best_(placement_.num_files() * num_bs_, 0.0),
        loss_(placement_.num_files() * (num_bs_ + 1), 0.0) {
    detail::check_compatible(placement_, topology, popularity);
    for (FileIndex f = 0; f < placement_.num_files(); ++f) refresh(f);
    utility_ = exact_utility();
  }

  const Placement& placement() const { return placement_; }
  std::size_t num_files() const { return placement_.num_files(); }
  std::size_t num_caches() const { return placement_.num_caches(); }
  double popularity(FileIndex f) const { return probs_[f]; }

  /// Running utility: the start value plus every applied gain and loss.
  double utility() const { return utility_; }

  /// Utility recomputed from the best-reduction table.
  double exact_utility() const {
    double total = 0.0;
    for (FileIndex f = 0; f < num_files(); ++f) {
      if (probs_[f] == 0.0) continue;
      for (std::size_t r = 1; r <= num_bs_; ++r) {
        if (weights_[r] == 0.0) continue;
        total += weights_[r] * probs_[f] * best(f, r);
      }
    }
    return total;
  }

  /// Marginal gain of an element not yet placed. Ignores capacity.
  double gain(Element e) const {
    double g = 0.0;
    for (std::size_t r = 1; r <= num_bs_; ++r)
      g += weights_[r] * std::max(0.0, table_(r, e.cache) - best(e.file, r));
    return probs_[e.file] * g;
  }

  /// Marginal loss of a placed element.
  double loss(Element e) const { return loss_[e.file * (num_bs_ + 1) + e.cache]; }

  void add(Element e) {
    const double g = gain(e);
    unindex(e.file);
    placement_.add(e);
    refresh(e.file);
    utility_ += g;
  }

  void remove(Element e) {
    const double l = loss(e);
    unindex(e.file);
    placement_.remove(e);
    refresh(e.file);
    utility_ -= l;
  }

  /// Placed element with the smallest marginal loss; ties by lower file,
  /// then lower cache.
  std::optional<Element> min_loss_element() const {
    if (index_.empty()) return std::nullopt;
    const auto& [l, f, c] = *index_.begin();
    return Element{f, c};
  }

 private:
  double best(FileIndex f, std::size_t bs) const { return best_[f * num_bs_ + (bs - 1)]; }

  double compute_loss(FileIndex f, CacheIndex cache) const {
    double l = 0.0;
    for (std::size_t r = 1; r <= num_bs_; ++r) {
      const double with = best(f, r);
      if (table_(r, cache) < with) continue;
      double without = 0.0;
      for (CacheIndex c = 0; c < num_caches(); ++c)
        if (c != cache && placement_.contains(f, c)) without = std::max(without, table_(r, c));
      l += weights_[r] * (with - without);
    }
    return probs_[f] * l;
  }

  void unindex(FileIndex f) {
    for (CacheIndex c = 0; c < num_caches(); ++c)
      if (placement_.contains(f, c)) index_.erase({loss_[f * (num_bs_ + 1) + c], f, c});
  }

  void refresh(FileIndex f) {
    for (std::size_t r = 1; r <= num_bs_; ++r) {
      double b = 0.0;
      for (CacheIndex c = 0; c < num_caches(); ++c)
        if (placement_.contains(f, c)) b = std::max(b, table_(r, c));
      best_[f * num_bs_ + (r - 1)] = b;
    }
    for (CacheIndex c = 0; c < num_caches(); ++c) {
      if (!placement_.contains(f, c)) continue;
      const double l = compute_loss(f, c);
      loss_[f * (num_bs_ + 1) + c] = l;
      index_.insert({l, f, c});
    }
  }

  std::size_t num_bs_;
  ReductionTable table_;
  std::vector<double> weights_;
  std::vector<double> probs_;
  Placement placement_;
  std::vector<double> best_;
  std::vector<double> loss_;
  std::set<std::tuple<double, FileIndex, CacheIndex>> index_;
  double utility_ = 0.0;
};

}  // namespace crancache
