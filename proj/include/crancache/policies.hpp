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

#pragma once

#include <algorithm>
#include <array>
#include <list>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "crancache/algorithms.hpp"
#include "crancache/core.hpp"
#include "crancache/objective.hpp"
#include "crancache/placement.hpp"
#include "crancache/topology.hpp"

namespace crancache {

inline constexpr std::array<std::string_view, 7> kPolicyNames = {
    "octopus", "eo", "ecnc", "exmpc", "femtox", "lfu", "lru"};

inline bool is_policy_name(std::string_view name) {
  return std::find(kPolicyNames.begin(), kPolicyNames.end(), name) != kPolicyNames.end();
}

/// Routing each policy is evaluated under.
inline RoutingMode policy_routing(std::string_view name) {
  if (name == "eo") return RoutingMode::kEdgeOnly;
  if (name == "ecnc") return RoutingMode::kEdgeCloudOnly;
  return RoutingMode::kFull;
}

/// A cache-management policy driven by the request stream.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual RoutingMode routing() const { return RoutingMode::kFull; }

  /// Serves one request from BS `bs` and applies the policy's update rule.
  virtual Source on_request(std::size_t bs, FileIndex file) = 0;

  virtual const Placement& contents() const = 0;
};

/// A fixed placement; requests never change it.
class StaticPolicy final : public Policy {
 public:
  StaticPolicy(std::string name, const Topology& topology, Placement placement, RoutingMode mode)
      : name_(std::move(name)), topology_(topology), placement_(std::move(placement)), mode_(mode) {}

  std::string_view name() const override { return name_; }
  RoutingMode routing() const override { return mode_; }
  Source on_request(std::size_t bs, FileIndex file) override {
    return route_request(placement_, topology_, bs, file, mode_);
  }
  const Placement& contents() const override { return placement_; }

 private:
  std::string name_;
  const Topology& topology_;
  Placement placement_;
  RoutingMode mode_;
};

/// Greedy proactive placement, then reactive replacement on every miss,
/// both scored against a popularity snapshot fixed at construction.
class OctopusPolicy final : public Policy {
 public:
  OctopusPolicy(const Topology& topology, const Catalog& catalog, const Popularity& popularity,
                const CacheCapacities& capacities, bool reactive = true)
      : topology_(topology),
        tracker_(topology, popularity, pcd(topology, catalog, popularity, capacities).placement),
        reactive_(reactive) {}

  std::string_view name() const override { return "octopus"; }

  Source on_request(std::size_t bs, FileIndex file) override {
    const Source src = route_request(tracker_.placement(), topology_, bs, file);
    if (!src.is_hit() && reactive_) on_miss(file);
    return src;
  }

  /// Runs replacement for a file that no cache holds.
  void on_miss(FileIndex file) {
    const auto swaps = reactive_replace(tracker_, file);
    swaps_ += swaps.size();
  }

  const Placement& contents() const override { return tracker_.placement(); }
  double utility() const { return tracker_.utility(); }
  std::size_t swaps() const { return swaps_; }

 private:
  const Topology& topology_;
  UtilityTracker tracker_;
  bool reactive_;
  std::size_t swaps_ = 0;
};

/// Least recently used, applied per cache. A CDN miss at BS r inserts the
/// file into edge cache r and the cloud cache; a hit refreshes the serving
/// cache's recency. Insertion counts as a use.
class LruPolicy final : public Policy {
 public:
  LruPolicy(const Topology& topology, const CacheCapacities& capacities, std::size_t num_files)
      : topology_(topology),
        placement_(capacities, num_files),
        order_(capacities.num_caches()),
        where_(capacities.num_caches()) {}

  std::string_view name() const override { return "lru"; }

  Source on_request(std::size_t bs, FileIndex file) override {
    const Source src = route_request(placement_, topology_, bs, file);
    if (src.is_hit()) {
      touch(src.cache, file);
    } else {
      insert(bs, file);
      insert(kCloud, file);
    }
    return src;
  }

  const Placement& contents() const override { return placement_; }

 private:
  void touch(CacheIndex c, FileIndex f) {
    order_[c].splice(order_[c].begin(), order_[c], where_[c].at(f));
  }

  void insert(CacheIndex c, FileIndex f) {
    if (placement_.capacity(c) == 0 || placement_.contains(f, c)) return;
    if (placement_.full(c)) {
      const FileIndex victim = order_[c].back();
      order_[c].pop_back();
      where_[c].erase(victim);
      placement_.remove({victim, c});
    }
    order_[c].push_front(f);
    where_[c][f] = order_[c].begin();
    placement_.add({f, c});
  }

  const Topology& topology_;
  Placement placement_;
  std::vector<std::list<FileIndex>> order_;  // front = most recent
  std::vector<std::unordered_map<FileIndex, std::list<FileIndex>::iterator>> where_;
};

/// Least frequently used with full request history. Edge cache r counts
/// every request made at BS r; the cloud cache counts every request in the
/// network. Counters never decay and persist for uncached files.
///
/// A CDN miss offers the file to edge r and the cloud. A cache with room
/// admits it; a full cache evicts its lowest-count resident (ties: least
/// recently requested, then lower file index) only if the newcomer's count
/// is strictly higher.
class LfuPolicy final : public Policy {
 public:
  LfuPolicy(const Topology& topology, const CacheCapacities& capacities, std::size_t num_files)
      : topology_(topology),
        placement_(capacities, num_files),
        count_(capacities.num_caches(), std::vector<std::uint64_t>(num_files, 0)),
        last_use_(capacities.num_caches(), std::vector<std::uint64_t>(num_files, 0)),
        resident_(capacities.num_caches()) {}

  std::string_view name() const override { return "lfu"; }

  Source on_request(std::size_t bs, FileIndex file) override {
    ++clock_;
    record(bs, file);
    record(kCloud, file);
    const Source src = route_request(placement_, topology_, bs, file);
    if (!src.is_hit()) {
      admit(bs, file);
      admit(kCloud, file);
    }
    return src;
  }

  const Placement& contents() const override { return placement_; }
  std::uint64_t count(CacheIndex c, FileIndex f) const { return count_[c][f]; }

 private:
  using Key = std::tuple<std::uint64_t, std::uint64_t, FileIndex>;  // count, last use, file

  Key key(CacheIndex c, FileIndex f) const { return {count_[c][f], last_use_[c][f], f}; }

  void record(CacheIndex c, FileIndex f) {
    const bool resident = placement_.contains(f, c);
    if (resident) resident_[c].erase(key(c, f));
    ++count_[c][f];
    last_use_[c][f] = clock_;
    if (resident) resident_[c].insert(key(c, f));
  }

  void admit(CacheIndex c, FileIndex f) {
    if (placement_.capacity(c) == 0 || placement_.contains(f, c)) return;
    if (placement_.full(c)) {
      const auto victim = *resident_[c].begin();
      if (!(count_[c][f] > std::get<0>(victim))) return;
      resident_[c].erase(resident_[c].begin());
      placement_.remove({std::get<2>(victim), c});
    }
    placement_.add({f, c});
    resident_[c].insert(key(c, f));
  }

  const Topology& topology_;
  Placement placement_;
  std::vector<std::vector<std::uint64_t>> count_;
  std::vector<std::vector<std::uint64_t>> last_use_;
  std::vector<std::set<Key>> resident_;
  std::uint64_t clock_ = 0;
};

/// Builds a policy by its CLI name. Proactive policies place files using
/// `popularity`; LFU and LRU start empty. The topology must outlive the
/// policy.
inline std::unique_ptr<Policy> make_policy(std::string_view name, const Topology& topology,
                                           const Catalog& catalog, const Popularity& popularity,
                                           const CacheCapacities& capacities) {
  const auto mode = policy_routing(name);
  if (name == "octopus")
    return std::make_unique<OctopusPolicy>(topology, catalog, popularity, capacities);
  if (name == "eo")
    return std::make_unique<StaticPolicy>("eo", topology,
                                          place_eo(topology, catalog, popularity, capacities), mode);
  if (name == "ecnc")
    return std::make_unique<StaticPolicy>(
        "ecnc", topology, place_ecnc(topology, catalog, popularity, capacities), mode);
  if (name == "exmpc")
    return std::make_unique<StaticPolicy>(
        "exmpc", topology, place_exmpc(topology, catalog, popularity, capacities), mode);
  if (name == "femtox")
    return std::make_unique<StaticPolicy>(
        "femtox", topology, place_femtox(topology, catalog, popularity, capacities), mode);
  if (name == "lfu") return std::make_unique<LfuPolicy>(topology, capacities, catalog.num_files);
  if (name == "lru") return std::make_unique<LruPolicy>(topology, capacities, catalog.num_files);
  throw ArgumentError("unknown policy: " + std::string(name));
}

}  // namespace crancache
