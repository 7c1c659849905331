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

// Shared vocabulary: error types, cache/file indices, request sources and
// the seeded random helpers every other header builds on.

#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace crancache {

// Files are indexed 0..F-1 internally and printed 1-based. Cache index 0 is
// the cloud cache at the CPU; cache r in 1..R is the edge cache of BS r.
using FileIndex = std::size_t;
using CacheIndex = std::size_t;

inline constexpr CacheIndex kCloud = 0;

/// Bad input to an operation: out-of-range index, duplicate element, etc.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An instance exceeds a documented combinatorial or capacity bound.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trace could not be read or failed the format contract.
class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One (file, cache) pair of the placement ground set.
struct Element {
  FileIndex file = 0;
  CacheIndex cache = 0;

  friend bool operator==(const Element&, const Element&) = default;
  friend auto operator<=>(const Element&, const Element&) = default;
};

/// Which caches a request may be served from.
enum class RoutingMode {
  kFull,           // local edge, cloud, neighbor edges, CDN
  kEdgeCloudOnly,  // local edge, cloud, CDN
  kEdgeOnly,       // local edge, CDN
};

enum class SourceKind { kLocalEdge, kCloud, kNeighborEdge, kCdn };

struct Source {
  SourceKind kind = SourceKind::kCdn;
  // Serving cache index; meaningless for kCdn.
  CacheIndex cache = 0;
  double delay_ms = 0.0;

  bool is_hit() const { return kind != SourceKind::kCdn; }
  friend bool operator==(const Source&, const Source&) = default;
};

inline std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kLocalEdge: return "local";
    case SourceKind::kCloud: return "cloud";
    case SourceKind::kNeighborEdge: return "neighbor";
    case SourceKind::kCdn: return "cdn";
  }
  return "?";
}

inline std::string_view to_string(RoutingMode mode) {
  switch (mode) {
    case RoutingMode::kFull: return "full";
    case RoutingMode::kEdgeCloudOnly: return "edge-cloud";
    case RoutingMode::kEdgeOnly: return "edge-only";
  }
  return "?";
}

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

// Full-string parse; false on trailing garbage or empty input.
inline bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && end == text.data() + text.size();
}

inline bool parse_size(std::string_view text, std::size_t& out) {
  if (text.empty()) return false;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && end == text.data() + text.size();
}

/// Byte count from text such as "0.4TB", "220MB" or "0". Suffixes B, KB,
/// MB, GB, TB (any case) are powers of ten; no suffix means bytes.
inline bool parse_bytes(std::string_view text, std::uint64_t& out) {
  static constexpr struct {
    std::string_view suffix;
    double scale;
  } kUnits[] = {{"TB", 1e12}, {"GB", 1e9}, {"MB", 1e6}, {"KB", 1e3}, {"B", 1.0}};
  double scale = 1.0;
  for (const auto& unit : kUnits) {
    if (text.size() < unit.suffix.size()) continue;
    const auto tail = text.substr(text.size() - unit.suffix.size());
    bool match = true;
    for (std::size_t i = 0; i < tail.size(); ++i)
      if ((tail[i] & ~0x20) != unit.suffix[i]) match = false;
    if (match) {
      scale = unit.scale;
      text.remove_suffix(unit.suffix.size());
      break;
    }
  }
  double value = 0.0;
  if (!parse_double(text, value) || !(value >= 0.0) || value * scale > 1.8e19) return false;
  out = static_cast<std::uint64_t>(value * scale + 0.5);
  return true;
}

}  // namespace crancache
