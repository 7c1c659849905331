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

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "crancache/core.hpp"
#include "crancache/topology.hpp"

namespace crancache {

/// A cache placement: one file set per cache, each within its capacity.
/// The same file may sit in several caches; a cache holds a file at most
/// once. Feasible placements are exactly the independent sets of the
/// partition matroid induced by the capacities.
class Placement {
 public:
  Placement() = default;
  Placement(CacheCapacities capacities, std::size_t num_files)
      : capacities_(std::move(capacities)),
        num_files_(num_files),
        member_(capacities_.num_caches(), std::vector<char>(num_files, 0)),
        count_(capacities_.num_caches(), 0) {}

  std::size_t num_caches() const { return member_.size(); }
  std::size_t num_files() const { return num_files_; }
  const CacheCapacities& capacities() const { return capacities_; }
  std::size_t capacity(CacheIndex c) const { return capacities_.at(c); }

  bool contains(FileIndex file, CacheIndex cache) const {
    return member_[cache][file] != 0;
  }
  bool contains(Element e) const { return contains(e.file, e.cache); }

  /// True when the file sits in at least one cache.
  bool cached_anywhere(FileIndex file) const {
    for (const auto& m : member_)
      if (m[file]) return true;
    return false;
  }

  std::size_t size(CacheIndex cache) const { return count_[cache]; }
  std::size_t total_size() const {
    std::size_t n = 0;
    for (auto c : count_) n += c;
    return n;
  }
  bool full(CacheIndex cache) const { return count_[cache] >= capacities_.at(cache); }

  void add(Element e) {
    check(e);
    if (contains(e)) throw ArgumentError("element already placed: " + describe(e));
    if (full(e.cache)) throw ArgumentError("cache " + std::to_string(e.cache) + " is full");
    member_[e.cache][e.file] = 1;
    ++count_[e.cache];
  }

  void remove(Element e) {
    check(e);
    if (!contains(e)) throw ArgumentError("element not placed: " + describe(e));
    member_[e.cache][e.file] = 0;
    --count_[e.cache];
  }

  /// Files held by one cache, ascending.
  std::vector<FileIndex> files_in(CacheIndex cache) const {
    std::vector<FileIndex> out;
    out.reserve(count_[cache]);
    for (FileIndex f = 0; f < num_files_; ++f)
      if (member_[cache][f]) out.push_back(f);
    return out;
  }

  /// All elements sorted by (cache, file).
  std::vector<Element> elements() const {
    std::vector<Element> out;
    out.reserve(total_size());
    for (CacheIndex c = 0; c < num_caches(); ++c)
      for (FileIndex f : files_in(c)) out.push_back({f, c});
    return out;
  }

  bool feasible() const {
    for (CacheIndex c = 0; c < num_caches(); ++c)
      if (count_[c] > capacities_.at(c)) return false;
    return true;
  }

  bool operator==(const Placement& other) const {
    return capacities_ == other.capacities_ && num_files_ == other.num_files_ &&
           member_ == other.member_;
  }

  static std::string describe(Element e) {
    return "(file " + std::to_string(e.file + 1) + ", cache " + std::to_string(e.cache) + ")";
  }

 private:
  void check(Element e) const {
    if (e.cache >= num_caches()) throw ArgumentError("cache index out of range");
    if (e.file >= num_files_) throw ArgumentError("file index out of range");
  }

  CacheCapacities capacities_;
  std::size_t num_files_ = 0;
  std::vector<std::vector<char>> member_;
  std::vector<std::size_t> count_;
};

/// Text form: one "cache_index<TAB>file_index" line per element, sorted by
/// cache then file. File indices are 1-based.
inline void write_placement(const Placement& placement, std::ostream& out) {
  for (const auto& e : placement.elements()) out << e.cache << '\t' << (e.file + 1) << '\n';
}

inline std::string placement_to_string(const Placement& placement) {
  std::ostringstream out;
  write_placement(placement, out);
  return out.str();
}

inline Placement read_placement(std::istream& in, const CacheCapacities& capacities,
                                std::size_t num_files) {
  Placement placement(capacities, num_files);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    std::size_t cache = 0, file = 0;
    if (tab == std::string::npos || !parse_size(std::string_view(line).substr(0, tab), cache) ||
        !parse_size(std::string_view(line).substr(tab + 1), file) || file == 0)
      throw ArgumentError("bad placement line: " + line);
    placement.add({file - 1, cache});
  }
  return placement;
}

}  // namespace crancache
