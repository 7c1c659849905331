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

// Command-line front end. Subcommands: simulate, sweep, gen-trace, oracle,
// validate-trace.
//
// Exit codes: 0 success, 1 configuration error, 2 trace or file I/O error,
// 3 infeasible or oversized instance.
//
// `--config FILE` reads flat key=value lines named after the long flags
// (without dashes); flags given on the command line win.

#pragma once

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crancache/algorithms.hpp"
#include "crancache/engine.hpp"
#include "crancache/instances.hpp"
#include "crancache/objective.hpp"
#include "crancache/topology.hpp"
#include "crancache/workload.hpp"

namespace crancache::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kIoError = 2, kInfeasible = 3 };

struct RunFlags {
  std::string policy;
  std::vector<std::string> policies;
  std::size_t bs = 7;
  std::size_t files = 10000;
  double file_size_mb = 20.0;
  std::string cache_total = "0.4TB";
  std::size_t cloud_edge_ratio = 4;
  double zipf_alpha = 0.8;
  std::size_t requests = 100000;
  std::size_t users = 1000;
  std::string trace;
  std::string topology;
  std::string popularity = "estimated";
  bool static_octopus = false;
  double warmup_frac = 0.2;
  std::uint64_t seed = 1;
  std::string axis;
  std::vector<std::string> values;
  std::string out;
  std::string format = "csv";
  std::size_t jobs = 1;
  std::size_t trials = 0;
  std::string instance;
};

namespace detail {

inline void add_workload_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--bs", f.bs, "number of base stations")->check(CLI::PositiveNumber);
  cmd->add_option("--files", f.files, "catalog size F for synthetic workloads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--file-size-mb", f.file_size_mb, "file size in MB (10^6 bytes)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cache-total", f.cache_total, "total cache budget, e.g. 0.4TB");
  cmd->add_option("--cloud-edge-ratio", f.cloud_edge_ratio, "M_0 / M_r");
  cmd->add_option("--zipf-alpha", f.zipf_alpha, "Zipf exponent")->check(CLI::NonNegativeNumber);
  cmd->add_option("--requests", f.requests, "synthetic request count");
  cmd->add_option("--users", f.users, "synthetic user count")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output path (default stdout)");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

inline void add_run_flags(CLI::App* cmd, RunFlags& f) {
  add_workload_flags(cmd, f);
  cmd->add_option("--trace", f.trace, "CSV request trace (replaces the synthetic workload)");
  cmd->add_option("--topology", f.topology, "topology config file (replaces the seeded topology)");
  cmd->add_option("--warmup-frac", f.warmup_frac, "leading fraction of events excluded from metrics");
  cmd->add_option("--popularity", f.popularity, "estimated or model")
      ->check(CLI::IsMember({"estimated", "model"}));
  cmd->add_flag("--static", f.static_octopus, "octopus: keep the proactive placement fixed");
  cmd->add_option("--jobs", f.jobs, "parallel sweep cells")->check(CLI::PositiveNumber);
}

// Pulls "--config FILE" out of the arguments and splices the file's keys in
// front of the remaining flags so explicit flags override them.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  const auto kv = crancache::detail::read_key_values(in);
  std::vector<std::string> injected;
  for (const auto& [key, value] : kv) {
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) injected.push_back(flag + "=" + value);
  }
  // args[0] is the subcommand name.
  if (!args.empty()) args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

inline std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw)
    for (auto& part : crancache::detail::split(item, ','))
      if (!part.empty()) out.push_back(part);
  return out;
}

inline ExperimentConfig to_config(const RunFlags& f) {
  ExperimentConfig config;
  config.num_bs = f.bs;
  config.file_size_mb = f.file_size_mb;
  if (!parse_bytes(f.cache_total, config.cache_total_bytes))
    throw ArgumentError("bad --cache-total: " + f.cache_total);
  config.cloud_edge_ratio = f.cloud_edge_ratio;
  config.policy = f.policy;
  if (!f.trace.empty()) {
    config.workload = TraceWorkload{f.trace, nullptr};
  } else {
    config.workload = SyntheticWorkload{f.files, f.zipf_alpha, f.requests, f.users};
  }
  if (!f.topology.empty()) {
    std::ifstream in(f.topology);
    if (!in) throw TraceError("cannot open topology config: " + f.topology);
    config.topology = read_topology_config(in);
    config.num_bs = config.topology->num_bs();
  }
  config.warmup_frac = f.warmup_frac;
  config.popularity_source =
      f.popularity == "model" ? PopularitySource::kModel : PopularitySource::kEstimated;
  config.reactive = !f.static_octopus;
  config.seed = f.seed;
  return config;
}

inline std::string join_sizes(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

// Resolved configuration and seeds, as ordered key/value pairs.
inline std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& config,
                                                                 const PreparedExperiment& prep) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("policy", config.policy);
  kv.emplace_back("bs", std::to_string(prep.topology.num_bs()));
  kv.emplace_back("edge_delay_ms", crancache::detail::join(prep.topology.edge_delays()));
  kv.emplace_back("cdn_delay_ms", format_double(prep.topology.cdn_delay()));
  kv.emplace_back("peer_delay_model",
                  prep.topology.peer_delay_model() == PeerDelayModel::kUTurn ? "uturn" : "explicit");
  kv.emplace_back("files", std::to_string(prep.catalog.num_files));
  kv.emplace_back("file_size_mb", format_double(prep.catalog.file_size_mb));
  kv.emplace_back("cache_total_bytes", std::to_string(config.cache_total_bytes));
  kv.emplace_back("cloud_edge_ratio", std::to_string(config.cloud_edge_ratio));
  kv.emplace_back("cloud_capacity", std::to_string(prep.capacities.cloud));
  kv.emplace_back("edge_capacity", join_sizes(prep.capacities.edge));
  if (const auto* syn = std::get_if<SyntheticWorkload>(&config.workload)) {
    kv.emplace_back("workload", "zipf");
    kv.emplace_back("zipf_alpha", format_double(syn->zipf_alpha));
    kv.emplace_back("requests", std::to_string(syn->num_requests));
  } else {
    kv.emplace_back("workload", "trace");
    kv.emplace_back("trace", std::get<TraceWorkload>(config.workload).path);
    kv.emplace_back("requests", std::to_string(prep.trace->size()));
  }
  kv.emplace_back("users", std::to_string(prep.topology.users().size()));
  kv.emplace_back("warmup_frac", format_double(config.warmup_frac));
  kv.emplace_back("warmup_events", std::to_string(prep.warmup_events));
  kv.emplace_back("popularity",
                  config.popularity_source == PopularitySource::kModel ? "model" : "estimated");
  kv.emplace_back("rcr", config.reactive ? "on" : "off");
  kv.emplace_back("seed", std::to_string(config.seed));
  kv.emplace_back("topology_seed", std::to_string(prep.topology_seed));
  kv.emplace_back("users_seed", std::to_string(prep.users_seed));
  kv.emplace_back("workload_seed", std::to_string(prep.workload_seed));
  return kv;
}

inline void emit_rows(std::ostream& out, const std::string& format,
                      const std::vector<std::pair<std::string, std::string>>& header,
                      const std::vector<SweepRow>& rows) {
  if (format == "json") {
    nlohmann::json doc;
    doc["config"] = nlohmann::json::object();
    for (const auto& [k, v] : header) doc["config"][k] = v;
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : rows) doc["rows"].push_back(metrics_json(row));
    out << doc.dump(2) << '\n';
    return;
  }
  for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
  out << kMetricsCsvHeader << '\n';
  for (const auto& row : rows) write_metrics_csv_row(out, row);
}

// Writes to --out when given, otherwise to `fallback`.
template <typename Fn>
int with_output(const std::string& path, std::ostream& fallback, std::ostream& err, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return kOk;
  }
  std::ofstream file(path);
  if (!file) {
    err << "error: cannot write " << path << '\n';
    return kIoError;
  }
  fn(file);
  return file ? kOk : kIoError;
}

inline int cmd_simulate(const RunFlags& f, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = to_config(f);
  const auto prep = prepare_experiment(config);
  auto policy = make_policy(config, prep);
  SweepRow row{config.policy, "", config.seed, replay(prep, *policy)};
  return with_output(f.out, out, err,
                     [&](std::ostream& o) { emit_rows(o, f.format, describe(config, prep), {row}); });
}

inline int cmd_sweep(const RunFlags& f, std::ostream& out, std::ostream& err) {
  const auto values = split_list(f.values);
  if (values.empty()) throw ArgumentError("--values must list at least one value");
  const SweepAxis axis = parse_axis(f.axis);
  auto policies = split_list(f.policies);
  if (policies.empty() && !f.policy.empty()) policies.push_back(f.policy);
  if (policies.empty() && axis != SweepAxis::kPolicy)
    throw ArgumentError("sweep needs --policies or --policy");
  for (const auto& p : policies)
    if (!is_policy_name(p)) throw ArgumentError("unknown policy: " + p);

  RunFlags base_flags = f;
  base_flags.policy = axis == SweepAxis::kPolicy ? values.front() : policies.front();
  ExperimentConfig base = to_config(base_flags);
  if (auto* tw = std::get_if<TraceWorkload>(&base.workload)) tw->trace = load_trace(tw->path);

  const auto rows = run_sweep(base, axis, values, policies, f.jobs);
  auto header = describe(base, prepare_experiment(base));
  header.erase(header.begin());  // per-row policy
  header.insert(header.begin(), {"axis", f.axis});
  return with_output(f.out, out, err, [&](std::ostream& o) { emit_rows(o, f.format, header, rows); });
}

inline int cmd_gen_trace(const RunFlags& f, std::ostream& out, std::ostream& err) {
  const auto popularity = zipf_popularity(f.files, f.zipf_alpha);
  const auto trace = generate_requests(popularity, f.requests, numbered_users(f.users), f.seed);
  // The trace format has no comment syntax; the resolved settings go to stderr.
  err << "# gen-trace files=" << f.files << " zipf_alpha=" << format_double(f.zipf_alpha)
      << " requests=" << f.requests << " users=" << f.users << " seed=" << f.seed << '\n';
  return with_output(f.out, out, err, [&](std::ostream& o) { write_trace(trace, o); });
}

inline int cmd_validate_trace(const RunFlags& f, std::ostream& out, std::ostream&) {
  if (f.trace.empty()) throw ArgumentError("validate-trace needs --trace");
  const auto trace = load_trace(f.trace);
  if (f.format == "json") {
    out << nlohmann::json{{"trace", f.trace},
                          {"events", trace->size()},
                          {"files", trace->catalog_size()},
                          {"users", trace->user_ids.size()},
                          {"malformed_lines", trace->malformed_lines}}
                .dump(2)
        << '\n';
  } else {
    out << "trace=" << f.trace << "\nevents=" << trace->size()
        << "\nfiles=" << trace->catalog_size() << "\nusers=" << trace->user_ids.size()
        << "\nmalformed_lines=" << trace->malformed_lines << '\n';
  }
  return kOk;
}

struct OracleOutcome {
  double pcd_utility = 0.0;
  double optimal_utility = 0.0;
  double ratio() const { return optimal_utility > 0.0 ? pcd_utility / optimal_utility : 1.0; }
};

inline OracleOutcome compare_with_optimum(const Instance& inst, Placement* pcd_out = nullptr,
                                          Placement* opt_out = nullptr) {
  const auto optimal = brute_force_optimal(inst.topology, inst.catalog, inst.popularity, inst.capacities);
  const auto greedy = pcd(inst.topology, inst.catalog, inst.popularity, inst.capacities).placement;
  OracleOutcome outcome{utility(greedy, inst.topology, inst.popularity),
                        utility(optimal, inst.topology, inst.popularity)};
  if (pcd_out) *pcd_out = greedy;
  if (opt_out) *opt_out = optimal;
  return outcome;
}

inline int cmd_oracle(const RunFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, std::string>> kv;
  if (f.trials > 0 && f.instance.empty()) {
    Rng rng(f.seed);
    RandomInstanceLimits limits;
    limits.max_bs = std::min<std::size_t>(f.bs, 3);
    limits.max_files = std::min<std::size_t>(f.files, 6);
    double min_ratio = 1.0, sum_ratio = 0.0;
    for (std::size_t t = 0; t < f.trials; ++t) {
      const auto outcome = compare_with_optimum(random_instance(rng, limits));
      min_ratio = std::min(min_ratio, outcome.ratio());
      sum_ratio += outcome.ratio();
    }
    kv = {{"trials", std::to_string(f.trials)},
          {"seed", std::to_string(f.seed)},
          {"min_ratio", format_double(min_ratio)},
          {"mean_ratio", format_double(sum_ratio / static_cast<double>(f.trials))}};
  } else {
    Instance inst = canonical_instance();
    if (f.instance.empty()) {
      const Catalog catalog(f.files, f.file_size_mb);
      const auto topo = build_seeded_topology(f.bs, derive_seed(f.seed, "topology"));
      const auto ids = numbered_users(f.users);
      auto topology = topo.with_users(make_users(ids, assign_users(ids.size(), f.bs, derive_seed(f.seed, "users"))));
      std::uint64_t bytes = 0;
      if (!parse_bytes(f.cache_total, bytes)) throw ArgumentError("bad --cache-total: " + f.cache_total);
      auto caps = capacities_from_budget(bytes, topology, catalog, f.cloud_edge_ratio);
      inst = Instance{std::move(topology), catalog, zipf_popularity(f.files, f.zipf_alpha), caps};
    } else if (f.instance != "canonical") {
      throw ArgumentError("unknown --instance: " + f.instance);
    }
    Placement greedy, optimal;
    const auto outcome = compare_with_optimum(inst, &greedy, &optimal);
    kv = {{"instance", f.instance.empty() ? "generated" : f.instance},
          {"pcd_utility", format_double(outcome.pcd_utility)},
          {"optimal_utility", format_double(outcome.optimal_utility)},
          {"ratio", format_double(outcome.ratio())},
          {"pcd_placement", placement_to_string(greedy)},
          {"optimal_placement", placement_to_string(optimal)}};
  }
  return with_output(f.out, out, err, [&](std::ostream& o) {
    if (f.format == "json") {
      nlohmann::json doc = nlohmann::json::object();
      for (const auto& [k, v] : kv) doc[k] = v;
      o << doc.dump(2) << '\n';
    } else {
      for (const auto& [k, v] : kv) {
        if (v.find('\n') == std::string::npos) {
          o << k << '=' << v << '\n';
        } else {
          o << k << ":\n" << v;
        }
      }
    }
  });
}

}  // namespace detail

/// Parses and runs one command line. `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Trace-driven cooperative cache simulator for cloud RANs", "crancache"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  RunFlags f;

  auto* simulate = app.add_subcommand("simulate", "replay one workload against one policy");
  detail::add_run_flags(simulate, f);
  simulate->add_option("--policy", f.policy, "policy name")->required();

  auto* sweep = app.add_subcommand("sweep", "metrics across policies and one swept parameter");
  detail::add_run_flags(sweep, f);
  sweep->add_option("--policy", f.policy, "single policy (alternative to --policies)");
  sweep->add_option("--policies", f.policies, "comma-separated policy names")->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sweep->add_option("--axis", f.axis, "cache-total, zipf-alpha or policy")->required();
  sweep->add_option("--values", f.values, "comma-separated axis values")->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  auto* gen = app.add_subcommand("gen-trace", "write a synthetic Zipf request trace");
  detail::add_workload_flags(gen, f);

  auto* oracle = app.add_subcommand("oracle", "greedy placement versus the exhaustive optimum");
  detail::add_workload_flags(oracle, f);
  oracle->add_option("--trials", f.trials, "number of random small instances");
  oracle->add_option("--instance", f.instance, "built-in instance: canonical");

  auto* validate = app.add_subcommand("validate-trace", "parse a trace and report its shape");
  validate->add_option("--trace", f.trace, "CSV request trace")->required();
  validate->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    args = detail::expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kConfigError;
  }

  try {
    if (simulate->parsed()) return detail::cmd_simulate(f, out, err);
    if (sweep->parsed()) return detail::cmd_sweep(f, out, err);
    if (gen->parsed()) return detail::cmd_gen_trace(f, out, err);
    if (oracle->parsed()) return detail::cmd_oracle(f, out, err);
    if (validate->parsed()) return detail::cmd_validate_trace(f, out, err);
  } catch (const TraceError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace crancache::cli
