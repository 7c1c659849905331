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

// The cache hierarchy of a cloud RAN: R base stations, each with an edge
// cache, one cloud cache at the CPU, and the CDN origin behind the backhaul.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "crancache/core.hpp"
#include "crancache/random.hpp"

namespace crancache {

struct User {
  std::string id;
  std::size_t home_bs = 1;  // 1..R

  friend bool operator==(const User&, const User&) = default;
};

/// How neighbor (U-turn) delays were obtained. kUTurn means
/// d_rk = d_r + d_k, the two fronthaul legs through the CPU.
enum class PeerDelayModel { kUTurn, kExplicit };

class Topology {
 public:
  /// U-turn peer delays derived from the edge delays.
  Topology(std::vector<double> edge_delay_ms, double cdn_delay_ms,
           std::vector<User> users = {})
      : edge_delay_(std::move(edge_delay_ms)),
        cdn_delay_(cdn_delay_ms),
        model_(PeerDelayModel::kUTurn),
        users_(std::move(users)) {
    const std::size_t n = edge_delay_.size();
    peer_delay_.assign(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k)
        if (r != k) peer_delay_[r * n + k] = edge_delay_[r] + edge_delay_[k];
    validate();
  }

  /// Explicit R x R peer delay matrix, row r = requesting BS. The diagonal
  /// is ignored (local retrieval is free).
  Topology(std::vector<double> edge_delay_ms, std::vector<std::vector<double>> peer_delay_ms,
           double cdn_delay_ms, std::vector<User> users = {})
      : edge_delay_(std::move(edge_delay_ms)),
        cdn_delay_(cdn_delay_ms),
        model_(PeerDelayModel::kExplicit),
        users_(std::move(users)) {
    const std::size_t n = edge_delay_.size();
    if (peer_delay_ms.size() != n) throw ArgumentError("peer delay matrix must be R x R");
    peer_delay_.assign(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      if (peer_delay_ms[r].size() != n) throw ArgumentError("peer delay matrix must be R x R");
      for (std::size_t k = 0; k < n; ++k)
        if (r != k) peer_delay_[r * n + k] = peer_delay_ms[r][k];
    }
    validate();
  }

  std::size_t num_bs() const { return edge_delay_.size(); }

  /// d_r: cloud cache to BS r over fronthaul. r in 1..R.
  double edge_delay(std::size_t bs) const { return edge_delay_.at(bs - 1); }

  /// d_rk: file held at BS k's cache delivered to BS r. r != k, both 1..R.
  double peer_delay(std::size_t bs, std::size_t from_bs) const {
    if (bs == from_bs) throw ArgumentError("peer delay undefined for r == k");
    return peer_delay_.at((bs - 1) * num_bs() + (from_bs - 1));
  }

  double cdn_delay() const { return cdn_delay_; }
  PeerDelayModel peer_delay_model() const { return model_; }
  const std::vector<double>& edge_delays() const { return edge_delay_; }

  const std::vector<User>& users() const { return users_; }

  /// Copy of this topology with a different user population.
  Topology with_users(std::vector<User> users) const {
    Topology t = *this;
    t.users_ = std::move(users);
    t.validate();
    return t;
  }

  /// |U_r| for r = 1..R; index 0 is unused and always 0.
  std::vector<double> users_per_bs() const {
    std::vector<double> counts(num_bs() + 1, 0.0);
    for (const auto& u : users_) counts[u.home_bs] += 1.0;
    return counts;
  }

  std::size_t user_index(std::string_view id) const {
    for (std::size_t i = 0; i < users_.size(); ++i)
      if (users_[i].id == id) return i;
    throw ArgumentError("unknown user: " + std::string(id));
  }

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  void validate() const {
    const std::size_t n = edge_delay_.size();
    if (n == 0) throw ArgumentError("topology needs at least one BS");
    if (!(cdn_delay_ > 0.0) || !std::isfinite(cdn_delay_))
      throw ArgumentError("cdn delay must be positive");
    for (double d : edge_delay_) {
      if (!(d > 0.0) || !std::isfinite(d)) throw ArgumentError("edge delays must be positive");
      if (!(cdn_delay_ > d)) throw ArgumentError("cdn delay must exceed every edge delay");
    }
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k) {
        if (r == k) continue;
        const double d = peer_delay_[r * n + k];
        if (!(d > 0.0) || !std::isfinite(d)) throw ArgumentError("peer delays must be positive");
        if (!(cdn_delay_ > d)) throw ArgumentError("cdn delay must exceed every peer delay");
      }
    for (const auto& u : users_)
      if (u.home_bs < 1 || u.home_bs > n)
        throw ArgumentError("user " + u.id + " has home BS outside 1..R");
  }

  std::vector<double> edge_delay_;
  std::vector<double> peer_delay_;  // row-major R x R
  double cdn_delay_ = 0.0;
  PeerDelayModel model_ = PeerDelayModel::kUTurn;
  std::vector<User> users_;
};

struct Catalog {
  std::size_t num_files = 1;
  double file_size_mb = 20.0;

  Catalog() = default;
  Catalog(std::size_t files, double size_mb) : num_files(files), file_size_mb(size_mb) {
    if (num_files < 1) throw ArgumentError("catalog needs at least one file");
    if (!(file_size_mb > 0.0)) throw ArgumentError("file size must be positive");
  }

  /// Sizes use powers of ten (1 MB = 10^6 bytes).
  std::uint64_t file_size_bytes() const {
    return static_cast<std::uint64_t>(std::llround(file_size_mb * 1e6));
  }
};

/// Request probability per file; non-negative and summing to one.
class Popularity {
 public:
  Popularity() = default;
  explicit Popularity(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ArgumentError("popularity over an empty catalog");
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw ArgumentError("popularity entries must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ArgumentError("popularity must sum to 1");
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](FileIndex i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

  /// File indices by decreasing probability, ties by lower index.
  std::vector<FileIndex> ranking() const {
    std::vector<FileIndex> order(probs_.size());
    std::iota(order.begin(), order.end(), FileIndex{0});
    std::stable_sort(order.begin(), order.end(),
                     [this](FileIndex a, FileIndex b) { return probs_[a] > probs_[b]; });
    return order;
  }

 private:
  std::vector<double> probs_;
};

/// Per-cache capacities in files. Index 0 is the cloud cache.
struct CacheCapacities {
  std::size_t cloud = 0;
  std::vector<std::size_t> edge;  // edge[r-1] = M_r

  CacheCapacities() = default;
  CacheCapacities(std::size_t cloud_files, std::vector<std::size_t> edge_files)
      : cloud(cloud_files), edge(std::move(edge_files)) {}

  std::size_t num_caches() const { return edge.size() + 1; }
  std::size_t at(CacheIndex c) const { return c == kCloud ? cloud : edge.at(c - 1); }
  std::size_t total() const { return std::accumulate(edge.begin(), edge.end(), cloud); }

  friend bool operator==(const CacheCapacities&, const CacheCapacities&) = default;
};

/// Topology with the delay ranges used for the 7-cell experiments: d_r drawn
/// from U[10, 30] ms and the CDN leg from U[60, 100] ms. If a U-turn delay
/// reaches the CDN delay, d_0 is redrawn until it clears max d_rk by 1 ms.
inline Topology build_seeded_topology(std::size_t num_bs, std::uint64_t seed) {
  if (num_bs < 1) throw ArgumentError("num_bs must be >= 1");
  Rng rng(seed);
  std::vector<double> edge(num_bs);
  for (auto& d : edge) d = uniform_real(rng, 10.0, 30.0);
  double max_peer = 0.0;
  if (num_bs > 1) {
    std::vector<double> sorted = edge;
    std::sort(sorted.rbegin(), sorted.rend());
    max_peer = sorted[0] + sorted[1];
  }
  double cdn = uniform_real(rng, 60.0, 100.0);
  while (cdn < max_peer + 1.0) cdn = uniform_real(rng, 60.0, 100.0);
  return Topology(std::move(edge), cdn);
}

/// Splits a byte budget into M_0 = ratio * M_r with equal edge capacities:
/// M_r = floor(total_files / (ratio + R)). Leftover files are dropped.
inline CacheCapacities capacities_from_budget(std::uint64_t total_bytes, const Topology& topology,
                                              const Catalog& catalog, std::size_t cloud_edge_ratio = 4) {
  const std::uint64_t total_files = total_bytes / catalog.file_size_bytes();
  const std::uint64_t per_edge = total_files / (cloud_edge_ratio + topology.num_bs());
  return CacheCapacities(static_cast<std::size_t>(per_edge * cloud_edge_ratio),
                         std::vector<std::size_t>(topology.num_bs(), static_cast<std::size_t>(per_edge)));
}

// ---------------------------------------------------------------------------
// Topology config text: flat key=value lines, '#' comments.
//
//   num_bs=2
//   edge_delay_ms=10,20
//   cdn_delay_ms=100
//   peer_delay_model=uturn            (or "explicit" with peer_delay_ms)
//   peer_delay_ms=0,30;30,0           (rows separated by ';')
//   user_home_bs=1,2                  (optional; users named u1..uN)

namespace detail {

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<double> parse_double_list(std::string_view text, std::string_view key) {
  std::vector<double> out;
  for (const auto& field : split(text, ',')) {
    double v = 0.0;
    if (!parse_double(trim(field), v)) throw ArgumentError("bad number in " + std::string(key));
    out.push_back(v);
  }
  return out;
}

inline std::string join(const std::vector<double>& values, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += format_double(values[i]);
  }
  return out;
}

/// Reads key=value lines; later keys overwrite earlier ones.
inline std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ArgumentError("config line " + std::to_string(line_no) + " is not key=value");
    kv[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
  }
  return kv;
}

}  // namespace detail

inline void write_topology_config(const Topology& topology, std::ostream& out) {
  out << "num_bs=" << topology.num_bs() << '\n';
  out << "edge_delay_ms=" << detail::join(topology.edge_delays()) << '\n';
  out << "cdn_delay_ms=" << format_double(topology.cdn_delay()) << '\n';
  if (topology.peer_delay_model() == PeerDelayModel::kUTurn) {
    out << "peer_delay_model=uturn\n";
  } else {
    out << "peer_delay_model=explicit\npeer_delay_ms=";
    const std::size_t n = topology.num_bs();
    for (std::size_t r = 1; r <= n; ++r) {
      if (r > 1) out << ';';
      for (std::size_t k = 1; k <= n; ++k) {
        if (k > 1) out << ',';
        out << (r == k ? std::string("0") : format_double(topology.peer_delay(r, k)));
      }
    }
    out << '\n';
  }
  if (!topology.users().empty()) {
    out << "user_home_bs=";
    for (std::size_t i = 0; i < topology.users().size(); ++i)
      out << (i ? "," : "") << topology.users()[i].home_bs;
    out << '\n';
  }
}

inline Topology read_topology_config(std::istream& in) {
  const auto kv = detail::read_key_values(in);
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ArgumentError(std::string("topology config missing ") + key);
    return it->second;
  };
  std::size_t num_bs = 0;
  if (!parse_size(need("num_bs"), num_bs)) throw ArgumentError("bad num_bs");
  auto edge = detail::parse_double_list(need("edge_delay_ms"), "edge_delay_ms");
  if (edge.size() != num_bs) throw ArgumentError("edge_delay_ms must list num_bs values");
  double cdn = 0.0;
  if (!parse_double(need("cdn_delay_ms"), cdn)) throw ArgumentError("bad cdn_delay_ms");

  std::vector<User> users;
  if (auto it = kv.find("user_home_bs"); it != kv.end() && !it->second.empty()) {
    for (const auto& field : detail::split(it->second, ',')) {
      std::size_t bs = 0;
      if (!parse_size(detail::trim(field), bs)) throw ArgumentError("bad user_home_bs");
      users.push_back(User{"u" + std::to_string(users.size() + 1), bs});
    }
  }

  std::string model = "uturn";
  if (auto it = kv.find("peer_delay_model"); it != kv.end()) model = it->second;
  if (model == "uturn") return Topology(std::move(edge), cdn, std::move(users));
  if (model != "explicit") throw ArgumentError("peer_delay_model must be uturn or explicit");
  std::vector<std::vector<double>> peer;
  for (const auto& row : detail::split(need("peer_delay_ms"), ';'))
    peer.push_back(detail::parse_double_list(row, "peer_delay_ms"));
  return Topology(std::move(edge), std::move(peer), cdn, std::move(users));
}

}  // namespace crancache
