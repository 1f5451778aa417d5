// Copyright 2026 The overlap-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "overlap_forge/common.hpp"
#include "overlap_forge/interval_algebra.hpp"

namespace overlap_forge {

// Chunk tags.
inline constexpr std::string_view kTagHeader = "header";      // upper-layer header bytes
inline constexpr std::string_view kTagOverlap = "overlap";    // carries an overlap marker
inline constexpr std::string_view kTagContext = "context";    // filler between regions
inline constexpr std::string_view kTagTrigger = "trigger";    // completes reassembly
inline constexpr std::string_view kTagLastFragment = "last-fragment";  // IP: MF unset

/// A fragment or segment: where its bytes land, what they are and when it
/// arrived.
struct Chunk {
  ByteInterval interval;
  Bytes payload;
  std::size_t arrival_index = 0;
  std::vector<std::string> tags;

  bool has_tag(std::string_view tag) const {
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
  }

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct ChunkSequence {
  Protocol protocol = Protocol::kIpv4;
  std::vector<Chunk> chunks;
  std::map<std::string, std::string> metadata;

  /// Throws SchemaError when payload lengths or arrival order are broken.
  void validate() const {
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      const auto& c = chunks[i];
      if (c.payload.size() != c.interval.length())
        throw SchemaError("chunk " + std::to_string(c.arrival_index) +
                          ": payload length " +
                          std::to_string(c.payload.size()) +
                          " does not match interval length " +
                          std::to_string(c.interval.length()));
      if (i > 0 && chunks[i - 1].arrival_index >= c.arrival_index)
        throw SchemaError("chunks are not sorted strictly by arrival index");
    }
  }
};

inline std::optional<ByteInterval> overlap_region(const Chunk& a,
                                                  const Chunk& b) {
  return intersect(a.interval, b.interval);
}

struct RelationPair {
  std::size_t earlier;
  std::size_t later;
  AllenRelation relation;

  friend bool operator==(const RelationPair&, const RelationPair&) = default;
};

/// One entry per unordered pair, related as (earlier-arriving, later-arriving).
inline std::vector<RelationPair> relation_pairs(const ChunkSequence& seq) {
  std::vector<RelationPair> out;
  const auto& cs = seq.chunks;
  if (cs.size() < 2) return out;
  out.reserve(cs.size() * (cs.size() - 1) / 2);
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j)
      out.push_back({cs[i].arrival_index, cs[j].arrival_index,
                     relate(cs[i].interval, cs[j].interval)});
  return out;
}

// JSON

inline nlohmann::json chunk_to_json(const Chunk& c) {
  return {{"start", c.interval.start()},
          {"end", c.interval.end()},
          {"arrival", c.arrival_index},
          {"payload_hex", to_hex(c.payload)},
          {"tags", c.tags}};
}

namespace detail {

template <typename T>
T require(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("field '") + key + "' has the wrong type");
  }
}

inline Protocol require_protocol(const nlohmann::json& j) {
  auto s = require<std::string>(j, "protocol");
  auto p = parse_protocol(s);
  if (!p) throw SchemaError("unknown protocol '" + s + "'");
  return *p;
}

inline Mode require_mode(const nlohmann::json& j) {
  auto s = require<std::string>(j, "mode");
  auto m = parse_mode(s);
  if (!m) throw SchemaError("unknown mode '" + s + "'");
  return *m;
}

inline AllenRelation require_relation(const nlohmann::json& j,
                                      const char* key = "relation") {
  auto s = require<std::string>(j, key);
  auto r = parse_relation(s);
  if (!r) throw SchemaError("unknown relation '" + s + "'");
  return *r;
}

}  // namespace detail

inline Chunk chunk_from_json(const nlohmann::json& j) {
  auto start = detail::require<std::size_t>(j, "start");
  auto end = detail::require<std::size_t>(j, "end");
  if (start >= end) throw SchemaError("chunk interval is empty");
  Chunk c{ByteInterval(start, end),
          from_hex(detail::require<std::string>(j, "payload_hex")),
          detail::require<std::size_t>(j, "arrival"),
          {}};
  if (j.contains("tags")) c.tags = detail::require<std::vector<std::string>>(j, "tags");
  return c;
}

inline nlohmann::json sequence_to_json(const ChunkSequence& seq) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& c : seq.chunks) chunks.push_back(chunk_to_json(c));
  nlohmann::json j{{"protocol", to_string(seq.protocol)}, {"chunks", chunks}};
  if (!seq.metadata.empty()) j["metadata"] = seq.metadata;
  return j;
}

inline ChunkSequence sequence_from_json(const nlohmann::json& j) {
  ChunkSequence seq;
  seq.protocol = detail::require_protocol(j);
  auto chunks = detail::require<nlohmann::json>(j, "chunks");
  if (!chunks.is_array()) throw SchemaError("field 'chunks' must be an array");
  for (const auto& c : chunks) seq.chunks.push_back(chunk_from_json(c));
  if (j.contains("metadata"))
    seq.metadata = detail::require<std::map<std::string, std::string>>(j, "metadata");
  seq.validate();
  return seq;
}

}  // namespace overlap_forge
