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

// Trace replay. A run builds the topology, users and workload from the
// configuration, places content for proactive policies, then feeds every
// event to the policy. The first warm-up fraction of events updates policy
// state but is not counted in the metrics.

#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "crancache/core.hpp"
#include "crancache/policies.hpp"
#include "crancache/random.hpp"
#include "crancache/topology.hpp"
#include "crancache/workload.hpp"

namespace crancache {

struct Metrics {
  std::uint64_t requests_total = 0;
  std::uint64_t local_hits = 0;
  std::uint64_t cloud_hits = 0;
  std::uint64_t neighbor_hits = 0;
  std::uint64_t cdn_fetches = 0;
  std::uint64_t skipped_events = 0;  // unknown user or file
  double sum_delay_ms = 0.0;
  std::uint64_t file_size_bytes = 0;

  void record(const Source& src) {
    ++requests_total;
    sum_delay_ms += src.delay_ms;
    switch (src.kind) {
      case SourceKind::kLocalEdge: ++local_hits; break;
      case SourceKind::kCloud: ++cloud_hits; break;
      case SourceKind::kNeighborEdge: ++neighbor_hits; break;
      case SourceKind::kCdn: ++cdn_fetches; break;
    }
  }

  std::uint64_t cache_hits() const { return local_hits + cloud_hits + neighbor_hits; }
  double hit_ratio() const {
    return requests_total ? static_cast<double>(cache_hits()) / static_cast<double>(requests_total)
                          : 0.0;
  }
  double avg_access_delay_ms() const {
    return requests_total ? sum_delay_ms / static_cast<double>(requests_total) : 0.0;
  }
  std::uint64_t backhaul_bytes() const { return cdn_fetches * file_size_bytes; }
};

struct SyntheticWorkload {
  std::size_t num_files = 10000;
  double zipf_alpha = 0.8;
  std::size_t num_requests = 100000;
  std::size_t num_users = 1000;
};

struct TraceWorkload {
  std::string path;
  // Pre-parsed trace; when set, `path` is informational only.
  std::shared_ptr<const RequestTrace> trace;
};

enum class PopularitySource {
  kEstimated,  // smoothed counts over the warm-up window
  kModel,      // the Zipf law the synthetic workload was drawn from
};

struct ExperimentConfig {
  std::size_t num_bs = 7;
  std::optional<Topology> topology;  // overrides the seeded topology
  double file_size_mb = 20.0;
  std::uint64_t cache_total_bytes = 400'000'000'000ULL;
  std::size_t cloud_edge_ratio = 4;
  std::optional<CacheCapacities> capacities;  // overrides the byte budget
  std::string policy = "octopus";
  std::variant<SyntheticWorkload, TraceWorkload> workload = SyntheticWorkload{};
  double warmup_frac = 0.2;
  PopularitySource popularity_source = PopularitySource::kEstimated;
  std::optional<Popularity> popularity;  // given snapshot; overrides the source above
  bool reactive = true;  // octopus only: replacement on misses
  double smoothing = 1.0;
  std::uint64_t seed = 1;
};

/// Everything a run derives from its configuration before replay.
struct PreparedExperiment {
  Topology topology;
  Catalog catalog;
  CacheCapacities capacities;
  std::shared_ptr<const RequestTrace> trace;
  std::size_t warmup_events = 0;
  Popularity popularity;  // what proactive policies place against
  std::uint64_t topology_seed = 0;
  std::uint64_t users_seed = 0;
  std::uint64_t workload_seed = 0;
};

inline std::shared_ptr<const RequestTrace> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace: " + path);
  return std::make_shared<const RequestTrace>(parse_trace(in));
}

inline PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  if (!is_policy_name(config.policy)) throw ArgumentError("unknown policy: " + config.policy);
  if (!(config.warmup_frac >= 0.0 && config.warmup_frac < 1.0))
    throw ArgumentError("warm-up fraction must be in [0, 1)");

  const std::uint64_t topology_seed = derive_seed(config.seed, "topology");
  const std::uint64_t users_seed = derive_seed(config.seed, "users");
  const std::uint64_t workload_seed = derive_seed(config.seed, "workload");

  Topology base = config.topology ? *config.topology : build_seeded_topology(config.num_bs, topology_seed);

  std::shared_ptr<const RequestTrace> trace;
  std::size_t num_files = 0;
  std::optional<Popularity> model;
  std::vector<User> users;
  if (const auto* syn = std::get_if<SyntheticWorkload>(&config.workload)) {
    num_files = syn->num_files;
    model = zipf_popularity(syn->num_files, syn->zipf_alpha);
    if (config.topology && !config.topology->users().empty()) {
      users = config.topology->users();
    } else {
      if (syn->num_users == 0) throw ArgumentError("synthetic workload needs at least one user");
      const auto ids = numbered_users(syn->num_users);
      users = make_users(ids, assign_users(ids.size(), base.num_bs(), users_seed));
    }
    std::vector<std::string> ids;
    for (const auto& u : users) ids.push_back(u.id);
    trace = std::make_shared<const RequestTrace>(
        generate_requests(*model, syn->num_requests, ids, workload_seed));
  } else {
    const auto& tw = std::get<TraceWorkload>(config.workload);
    trace = tw.trace ? tw.trace : load_trace(tw.path);
    num_files = trace->catalog_size();
    if (config.topology && !config.topology->users().empty()) {
      // Home BSs come from the topology; every trace user must be listed.
      for (const auto& id : trace->user_ids)
        users.push_back({id, config.topology->users()[config.topology->user_index(id)].home_bs});
    } else {
      users = make_users(trace->user_ids,
                         assign_users(trace->user_ids.size(), base.num_bs(), users_seed));
    }
    if (config.popularity_source == PopularitySource::kModel && !config.popularity)
      throw ArgumentError("model popularity requires a synthetic workload");
  }

  const Catalog catalog(num_files, config.file_size_mb);
  Topology topology = base.with_users(std::move(users));
  const CacheCapacities capacities =
      config.capacities ? *config.capacities
                        : capacities_from_budget(config.cache_total_bytes, topology, catalog,
                                                 config.cloud_edge_ratio);
  if (capacities.num_caches() != topology.num_bs() + 1)
    throw SizeError("capacities list " + std::to_string(capacities.num_caches()) +
                    " caches but the topology has " + std::to_string(topology.num_bs() + 1));

  const auto warmup = static_cast<std::size_t>(config.warmup_frac * static_cast<double>(trace->size()));
  if (warmup >= trace->size()) throw ArgumentError("evaluation window is empty");

  if (config.popularity && config.popularity->size() != num_files)
    throw ArgumentError("configured popularity has " + std::to_string(config.popularity->size()) +
                        " entries for " + std::to_string(num_files) + " files");
  Popularity popularity = config.popularity ? *config.popularity
                          : config.popularity_source == PopularitySource::kModel
                              ? *model
                              : estimate_popularity(*trace, warmup, config.smoothing);

  return PreparedExperiment{std::move(topology), catalog,  capacities,    std::move(trace), warmup,
                            std::move(popularity), topology_seed, users_seed, workload_seed};
}

inline std::unique_ptr<Policy> make_policy(const ExperimentConfig& config,
                                           const PreparedExperiment& prep) {
  if (config.policy == "octopus")
    return std::make_unique<OctopusPolicy>(prep.topology, prep.catalog, prep.popularity,
                                           prep.capacities, config.reactive);
  return make_policy(config.policy, prep.topology, prep.catalog, prep.popularity, prep.capacities);
}

/// Replays the prepared trace through `policy`.
inline Metrics replay(const PreparedExperiment& prep, Policy& policy) {
  Metrics metrics;
  metrics.file_size_bytes = prep.catalog.file_size_bytes();
  const auto& users = prep.topology.users();
  for (std::size_t n = 0; n < prep.trace->size(); ++n) {
    const auto& e = prep.trace->events[n];
    if (e.user >= users.size() || e.file >= prep.catalog.num_files) {
      ++metrics.skipped_events;
      continue;
    }
    const Source src = policy.on_request(users[e.user].home_bs, e.file);
    if (n >= prep.warmup_events) metrics.record(src);
  }
  return metrics;
}

inline Metrics run_experiment(const ExperimentConfig& config) {
  const auto prep = prepare_experiment(config);
  auto policy = make_policy(config, prep);
  return replay(prep, *policy);
}

enum class SweepAxis { kCacheTotal, kZipfAlpha, kPolicy };

inline SweepAxis parse_axis(std::string_view name) {
  if (name == "cache-total" || name == "total_cache_bytes") return SweepAxis::kCacheTotal;
  if (name == "zipf-alpha" || name == "zipf_alpha") return SweepAxis::kZipfAlpha;
  if (name == "policy") return SweepAxis::kPolicy;
  throw ArgumentError("unknown sweep axis: " + std::string(name));
}

struct SweepRow {
  std::string policy;
  std::string axis_value;
  std::uint64_t seed = 0;
  Metrics metrics;
};

/// Configuration for one sweep cell.
inline ExperimentConfig sweep_cell(const ExperimentConfig& base, SweepAxis axis,
                                   const std::string& value, const std::string& policy) {
  ExperimentConfig cell = base;
  cell.policy = policy;
  switch (axis) {
    case SweepAxis::kCacheTotal:
      if (!parse_bytes(value, cell.cache_total_bytes))
        throw ArgumentError("bad cache size: " + value);
      cell.capacities.reset();
      break;
    case SweepAxis::kZipfAlpha: {
      auto* syn = std::get_if<SyntheticWorkload>(&cell.workload);
      if (!syn) throw ArgumentError("zipf-alpha sweep needs a synthetic workload");
      if (!parse_double(value, syn->zipf_alpha)) throw ArgumentError("bad zipf alpha: " + value);
      break;
    }
    case SweepAxis::kPolicy:
      cell.policy = value;
      break;
  }
  if (!is_policy_name(cell.policy)) throw ArgumentError("unknown policy: " + cell.policy);
  return cell;
}

/// One row per (value, policy), value-major. With the policy axis the
/// values are the policy names and `policies` is ignored. Every cell uses
/// the base master seed, so cells differ only in the swept factor. Cells
/// run on up to `jobs` threads; row order does not depend on `jobs`.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                       const std::vector<std::string>& values,
                                       std::vector<std::string> policies = {}, std::size_t jobs = 1) {
  if (policies.empty() || axis == SweepAxis::kPolicy) policies = {base.policy};
  std::vector<ExperimentConfig> cells;
  std::vector<SweepRow> rows;
  for (const auto& value : values)
    for (const auto& policy : policies) {
      cells.push_back(sweep_cell(base, axis, value, policy));
      rows.push_back({cells.back().policy, value, base.seed, {}});
    }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cells.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        rows[i].metrics = run_experiment(cells[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, cells.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
  return rows;
}

// --- output ---------------------------------------------------------------

inline constexpr const char* kMetricsCsvHeader =
    "policy,axis_value,seed,requests,hit_ratio,avg_delay_ms,backhaul_bytes,local_hits,cloud_hits,"
    "neighbor_hits,cdn_fetches";

inline void write_metrics_csv_row(std::ostream& out, const SweepRow& row) {
  const auto& m = row.metrics;
  out << row.policy << ',' << row.axis_value << ',' << row.seed << ',' << m.requests_total << ','
      << format_double(m.hit_ratio()) << ',' << format_double(m.avg_access_delay_ms()) << ','
      << m.backhaul_bytes() << ',' << m.local_hits << ',' << m.cloud_hits << ',' << m.neighbor_hits
      << ',' << m.cdn_fetches << '\n';
}

inline nlohmann::json metrics_json(const SweepRow& row) {
  const auto& m = row.metrics;
  return {{"policy", row.policy},
          {"axis_value", row.axis_value},
          {"seed", row.seed},
          {"requests", m.requests_total},
          {"hit_ratio", m.hit_ratio()},
          {"avg_delay_ms", m.avg_access_delay_ms()},
          {"backhaul_bytes", m.backhaul_bytes()},
          {"local_hits", m.local_hits},
          {"cloud_hits", m.cloud_hits},
          {"neighbor_hits", m.neighbor_hits},
          {"cdn_fetches", m.cdn_fetches},
          {"skipped_events", m.skipped_events}};
}

}  // namespace crancache
