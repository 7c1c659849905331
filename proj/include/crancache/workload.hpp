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

// Request workloads: CSV trace ingestion, Zipf popularity and synthetic
// request generation, empirical popularity estimation, user placement.
//
// Trace CSV: UTF-8, LF line endings, one `timestamp,user_id,content_id`
// record per line. A first line whose first field is not a number is a
// header. Content and user ids are opaque strings, interned to dense
// indices in order of first appearance.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "crancache/core.hpp"
#include "crancache/random.hpp"
#include "crancache/topology.hpp"

namespace crancache {

struct RequestEvent {
  double time = 0.0;  // seconds
  std::size_t user = 0;
  FileIndex file = 0;

  friend bool operator==(const RequestEvent&, const RequestEvent&) = default;
};

struct RequestTrace {
  std::vector<RequestEvent> events;   // stable-sorted by time
  std::vector<std::string> user_ids;  // index -> opaque id
  std::vector<std::string> content_ids;
  std::size_t malformed_lines = 0;

  std::size_t catalog_size() const { return content_ids.size(); }
  std::size_t size() const { return events.size(); }

  /// Same events and ids; the malformed tally is bookkeeping, not content.
  bool operator==(const RequestTrace& other) const {
    return events == other.events && user_ids == other.user_ids &&
           content_ids == other.content_ids;
  }
};

enum class TraceFormat { kCsv };

namespace detail {

inline bool looks_numeric(std::string_view field) {
  double v = 0.0;
  return parse_double(trim(field), v);
}

}  // namespace detail

/// Parses a trace. Lines that do not have exactly three fields, a finite
/// non-negative timestamp and non-empty ids are skipped and counted. Throws
/// TraceError on an empty result or when more than 10% of the data lines
/// are malformed.
///
/// Ids are interned in order of first appearance after the stable time
/// sort, so writing a parsed trace and parsing it again is exact.
inline RequestTrace parse_trace(std::istream& in, TraceFormat format = TraceFormat::kCsv) {
  if (format != TraceFormat::kCsv) throw ArgumentError("unsupported trace format");
  struct Raw {
    double time;
    std::string user, content;
  };
  std::vector<Raw> raw;
  RequestTrace trace;
  std::string line;
  std::size_t data_lines = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split(line, ',');
    if (first) {
      first = false;
      if (!detail::looks_numeric(fields[0])) continue;
    }
    ++data_lines;
    double time = 0.0;
    if (fields.size() != 3 || !parse_double(fields[0], time) || !std::isfinite(time) ||
        time < 0.0 || fields[1].empty() || fields[2].empty()) {
      ++trace.malformed_lines;
      continue;
    }
    raw.push_back({time, std::move(fields[1]), std::move(fields[2])});
  }
  if (raw.empty()) throw TraceError("trace contains no valid events");
  if (trace.malformed_lines * 10 > data_lines)
    throw TraceError("trace format error: " + std::to_string(trace.malformed_lines) + " of " +
                     std::to_string(data_lines) + " lines malformed");
  std::stable_sort(raw.begin(), raw.end(),
                   [](const Raw& a, const Raw& b) { return a.time < b.time; });

  std::unordered_map<std::string, std::size_t> users, contents;
  trace.events.reserve(raw.size());
  for (auto& r : raw) {
    auto [uit, new_user] = users.try_emplace(r.user, trace.user_ids.size());
    if (new_user) trace.user_ids.push_back(std::move(r.user));
    auto [cit, new_content] = contents.try_emplace(r.content, trace.content_ids.size());
    if (new_content) trace.content_ids.push_back(std::move(r.content));
    trace.events.push_back({r.time, uit->second, cit->second});
  }
  return trace;
}

inline void write_trace(const RequestTrace& trace, std::ostream& out) {
  out << "timestamp,user_id,content_id\n";
  for (const auto& e : trace.events)
    out << format_double(e.time) << ',' << trace.user_ids[e.user] << ','
        << trace.content_ids[e.file] << '\n';
}

/// P_k = k^-alpha / sum_{n=1..F} n^-alpha for rank k = 1..F (index k-1).
inline Popularity zipf_popularity(std::size_t num_files, double alpha) {
  if (num_files < 1) throw ArgumentError("zipf needs F >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ArgumentError("zipf alpha must be >= 0");
  std::vector<double> weights(num_files);
  for (std::size_t k = 0; k < num_files; ++k)
    weights[k] = std::pow(static_cast<double>(k + 1), -alpha);
  // Summing smallest-first keeps the normalizer accurate for large F.
  double norm = 0.0;
  for (std::size_t k = num_files; k-- > 0;) norm += weights[k];
  for (auto& w : weights) w /= norm;
  return Popularity(std::move(weights));
}

/// Synthetic trace: each event draws its file from `popularity` by inverse
/// CDF and its user uniformly. Timestamps are event indices. Content ids
/// are "f1".."fF" in popularity-index order; every file is in the catalog
/// whether requested or not.
inline RequestTrace generate_requests(const Popularity& popularity, std::size_t num_requests,
                                      const std::vector<std::string>& users, std::uint64_t seed) {
  if (users.empty()) throw ArgumentError("generate_requests needs at least one user");
  RequestTrace trace;
  trace.user_ids = users;
  trace.content_ids.reserve(popularity.size());
  for (std::size_t i = 0; i < popularity.size(); ++i)
    trace.content_ids.push_back("f" + std::to_string(i + 1));

  std::vector<double> cdf(popularity.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < popularity.size(); ++i) cdf[i] = acc += popularity[i];

  Rng rng(seed);
  trace.events.reserve(num_requests);
  for (std::size_t n = 0; n < num_requests; ++n) {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // Zero-probability files have a flat CDF step and are never drawn.
    const auto file = static_cast<FileIndex>(it - cdf.begin());
    const auto user = static_cast<std::size_t>(uniform_index(rng, users.size()));
    trace.events.push_back({static_cast<double>(n), user, file});
  }
  return trace;
}

inline std::vector<std::string> numbered_users(std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::size_t i = 0; i < count; ++i) ids.push_back("u" + std::to_string(i + 1));
  return ids;
}

/// Laplace-smoothed request frequencies over the first `window` events:
/// p_k = (count_k + smoothing) / (window + F * smoothing).
inline Popularity estimate_popularity(const RequestTrace& trace, std::size_t window,
                                      double smoothing = 1.0) {
  if (window > trace.size()) throw ArgumentError("estimation window longer than the trace");
  const std::size_t num_files = trace.catalog_size();
  if (num_files == 0) throw ArgumentError("trace has an empty catalog");
  if (!(smoothing > 0.0)) throw ArgumentError("smoothing must be positive");
  std::vector<double> counts(num_files, 0.0);
  for (std::size_t n = 0; n < window; ++n) counts[trace.events[n].file] += 1.0;
  const double norm = static_cast<double>(window) + smoothing * static_cast<double>(num_files);
  for (auto& c : counts) c = (c + smoothing) / norm;
  return Popularity(std::move(counts));
}

/// Home BS (1..R) for each user, i.i.d. uniform.
inline std::vector<std::size_t> assign_users(std::size_t num_users, std::size_t num_bs,
                                             std::uint64_t seed) {
  if (num_bs < 1) throw ArgumentError("assign_users needs at least one BS");
  Rng rng(seed);
  std::vector<std::size_t> home(num_users);
  for (auto& h : home) h = 1 + static_cast<std::size_t>(uniform_index(rng, num_bs));
  return home;
}

inline std::vector<User> make_users(const std::vector<std::string>& ids,
                                    const std::vector<std::size_t>& home_bs) {
  if (ids.size() != home_bs.size()) throw ArgumentError("one home BS per user required");
  std::vector<User> users;
  users.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) users.push_back({ids[i], home_bs[i]});
  return users;
}

}  // namespace crancache
