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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "overlap_forge/chunk_model.hpp"
#include "overlap_forge/common.hpp"
#include "overlap_forge/interval_algebra.hpp"

namespace overlap_forge {

/// Identifies the composite layout produced by build_multiple. Bump when the
/// layout changes so multiple-mode results stay comparable across runs.
inline constexpr std::string_view kMultipleLayoutVersion = "multiple-v1";

/// Size of the ICMP/ICMPv6 echo header that opens every IP datagram.
inline constexpr std::size_t kEchoHeaderSize = 8;

struct GeneratorConfig {
  std::size_t unit = 8;
  std::size_t base = 8;
  std::uint8_t filler_byte = 'X';
  std::string marker_alphabet = "ABCD";

  static GeneratorConfig for_protocol(Protocol) { return {}; }

  void validate(Protocol protocol) const {
    if (unit < 2 || unit % 2 != 0)
      throw Error("unit must be an even byte count >= 2");
    if (base < unit || base % unit != 0)
      throw Error("base must be a multiple of unit and >= unit");
    if (is_ip(protocol)) {
      if (unit % 8 != 0) throw Error("IP chunk unit must be a multiple of 8");
      if (base < kEchoHeaderSize) throw Error("IP base must hold the echo header");
    }
    if (marker_alphabet.size() < 2)
      throw Error("marker alphabet needs at least two symbols");
  }

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

struct PayloadPattern {
  Bytes old_marker;
  Bytes new_marker;
};

/// Builds old/new markers as sequences of doubled alphabet symbols ("AA",
/// "BB", ...). The new marker is the old one with its 2-byte words in reverse
/// order, so both contribute the same ones'-complement sum.
inline PayloadPattern make_pattern(std::size_t region_length,
                                   std::string_view alphabet = "ABCD") {
  if (region_length % 2 != 0)
    throw Error("marker region length must be even, got " +
                std::to_string(region_length));
  if (region_length < 4)
    throw Error("marker region must be at least 4 bytes");
  if (alphabet.size() < 2) throw Error("marker alphabet needs two symbols");
  const std::size_t words = region_length / 2;
  std::vector<std::uint8_t> symbols(words);
  for (std::size_t i = 0; i < words; ++i)
    symbols[i] = static_cast<std::uint8_t>(alphabet[i % alphabet.size()]);
  PayloadPattern p;
  p.old_marker.reserve(region_length);
  p.new_marker.reserve(region_length);
  for (std::size_t i = 0; i < words; ++i) {
    p.old_marker.insert(p.old_marker.end(), 2, symbols[i]);
    p.new_marker.insert(p.new_marker.end(), 2, symbols[words - 1 - i]);
  }
  if (p.old_marker == p.new_marker)
    throw Error("marker alphabet yields indistinguishable markers");
  return p;
}

/// First-sent and second-sent intervals whose relation is `r`, aligned to
/// `unit` and starting at `base`. Spans at most three units.
inline std::pair<ByteInterval, ByteInterval> canonical_geometry(
    AllenRelation r, std::size_t unit, std::size_t base) {
  if (!is_overlapping(r)) throw Error("relation has no overlap test case");
  if (unit < 2) throw Error("unit must be >= 2");
  if (base < unit) throw Error("base must be >= unit");
  const auto b = base, u = unit;
  auto iv = [](std::size_t s, std::size_t e) { return ByteInterval(s, e); };
  using R = AllenRelation;
  switch (r) {
    case R::kF: return {iv(b + u, b + 2 * u), iv(b, b + 2 * u)};
    case R::kFi: return {iv(b, b + 2 * u), iv(b + u, b + 2 * u)};
    case R::kS: return {iv(b, b + u), iv(b, b + 2 * u)};
    case R::kSi: return {iv(b, b + 2 * u), iv(b, b + u)};
    case R::kO: return {iv(b, b + 2 * u), iv(b + u, b + 3 * u)};
    case R::kOi: return {iv(b + u, b + 3 * u), iv(b, b + 2 * u)};
    case R::kD: return {iv(b + u, b + 2 * u), iv(b, b + 3 * u)};
    case R::kDi: return {iv(b, b + 3 * u), iv(b + u, b + 2 * u)};
    case R::kEq: return {iv(b, b + 2 * u), iv(b, b + 2 * u)};
    default: break;
  }
  throw Error("relation has no overlap test case");
}

/// One diagnostic overlap: the bytes where the old and new chunk disagree.
struct OverlapRegion {
  AllenRelation relation;
  ByteInterval interval;
  Bytes old_marker;
  Bytes new_marker;
  std::size_t old_arrival = 0;
  std::size_t new_arrival = 0;

  friend bool operator==(const OverlapRegion&, const OverlapRegion&) = default;
};

struct TestCase {
  Protocol protocol = Protocol::kIpv4;
  Mode mode = Mode::kSingle;
  std::vector<AllenRelation> relations_under_test;
  ChunkSequence sequence;
  /// Expected reassembled payload when every overlap resolves to the key.
  /// IGNORE maps to std::nullopt (no reassembled output).
  std::map<Outcome, std::optional<Bytes>> expected_markers;
  std::vector<OverlapRegion> regions;
  std::string trigger_description;
  GeneratorConfig config;
  std::string layout_version;

  const std::optional<Bytes>& expected(Outcome o) const {
    return expected_markers.at(o);
  }
};

namespace detail {

struct Slot {
  AllenRelation relation;
  std::size_t start;
};

inline Bytes filled(std::size_t n, std::uint8_t filler) { return Bytes(n, filler); }

// Lays out overlap pairs, context filler, header and trigger chunks, and
// derives the expected payloads straight from the region markers.
inline TestCase assemble(Protocol protocol, Mode mode,
                         const std::vector<Slot>& slots,
                         const GeneratorConfig& cfg) {
  cfg.validate(protocol);
  const auto u = cfg.unit;
  TestCase tc;
  tc.protocol = protocol;
  tc.mode = mode;
  tc.config = cfg;
  tc.sequence.protocol = protocol;

  struct Pair {
    ByteInterval first, second;
    OverlapRegion region;
  };
  std::vector<Pair> pairs;
  std::size_t max_end = cfg.base;
  for (const auto& slot : slots) {
    auto [x, y] = canonical_geometry(slot.relation, u, slot.start);
    auto region = *intersect(x, y);
    auto pattern = make_pattern(region.length(), cfg.marker_alphabet);
    pairs.push_back({x, y,
                     OverlapRegion{slot.relation, region, pattern.old_marker,
                                   pattern.new_marker, 0, 0}});
    max_end = std::max({max_end, x.end(), y.end()});
    tc.relations_under_test.push_back(slot.relation);
  }

  // Bytes in [base, max_end) not covered by any overlap chunk become
  // context chunks.
  std::vector<bool> covered(max_end, false);
  for (const auto& p : pairs)
    for (const auto& iv : {p.first, p.second})
      std::fill(covered.begin() + iv.start(), covered.begin() + iv.end(), true);
  std::vector<ByteInterval> gaps;
  for (std::size_t i = cfg.base; i < max_end;) {
    if (covered[i]) { ++i; continue; }
    std::size_t j = i;
    while (j < max_end && !covered[j]) ++j;
    gaps.emplace_back(i, j);
    i = j;
  }

  auto& chunks = tc.sequence.chunks;
  auto push = [&](ByteInterval iv, Bytes payload,
                  std::vector<std::string> tags) -> std::size_t {
    std::size_t arrival = chunks.size();
    chunks.push_back(Chunk{iv, std::move(payload), arrival, std::move(tags)});
    return arrival;
  };

  if (is_ip(protocol)) {
    // The echo header is written by the wire encoder; zero placeholder here.
    Bytes header = filled(cfg.base, cfg.filler_byte);
    std::fill(header.begin(), header.begin() + kEchoHeaderSize, 0);
    push(ByteInterval(0, cfg.base), std::move(header), {std::string(kTagHeader)});
  }
  for (const auto& g : gaps)
    push(g, filled(g.length(), cfg.filler_byte), {std::string(kTagContext)});
  for (auto& p : pairs) {
    auto with_marker = [&](const ByteInterval& iv, const Bytes& marker) {
      Bytes b = filled(iv.length(), cfg.filler_byte);
      std::copy(marker.begin(), marker.end(),
                b.begin() + (p.region.interval.start() - iv.start()));
      return b;
    };
    p.region.old_arrival = push(p.first, with_marker(p.first, p.region.old_marker),
                                {std::string(kTagOverlap)});
    p.region.new_arrival = push(p.second, with_marker(p.second, p.region.new_marker),
                                {std::string(kTagOverlap)});
    tc.regions.push_back(p.region);
  }

  std::size_t total_end = max_end;
  if (is_ip(protocol)) {
    ByteInterval trig(max_end, max_end + u);
    push(trig, filled(u, cfg.filler_byte),
         {std::string(kTagTrigger), std::string(kTagLastFragment)});
    total_end = trig.end();
    tc.trigger_description =
        "rightmost-finishing fragment [" + std::to_string(trig.start()) + "," +
        std::to_string(trig.end()) + ") sent last with More Fragments unset";
  } else {
    ByteInterval trig(0, cfg.base);
    push(trig, filled(cfg.base, cfg.filler_byte), {std::string(kTagTrigger)});
    tc.trigger_description =
        "extra segment [0," + std::to_string(cfg.base) +
        ") at the byte-wise beginning of the stream sent after all overlap segments";
  }

  auto expected_with = [&](bool use_new) {
    Bytes out = filled(total_end, cfg.filler_byte);
    if (is_ip(protocol))
      std::fill(out.begin(), out.begin() + kEchoHeaderSize, 0);
    for (const auto& r : tc.regions) {
      const auto& m = use_new ? r.new_marker : r.old_marker;
      std::copy(m.begin(), m.end(), out.begin() + r.interval.start());
    }
    return out;
  };
  tc.expected_markers[Outcome::kOld] = expected_with(false);
  tc.expected_markers[Outcome::kNew] = expected_with(true);
  tc.expected_markers[Outcome::kIgnore] = std::nullopt;

  tc.sequence.metadata["mode"] = std::string(to_string(mode));
  tc.sequence.metadata["trigger"] = tc.trigger_description;
  if (mode == Mode::kMultiple) {
    tc.layout_version = std::string(kMultipleLayoutVersion);
    tc.sequence.metadata["layout_version"] = tc.layout_version;
  }
  return tc;
}

}  // namespace detail

/// One overlap pair per test case, plus header (IP) and trigger chunks.
inline TestCase build_single(Protocol protocol, AllenRelation r,
                             const GeneratorConfig& cfg = {}) {
  if (!is_overlapping(r))
    throw Error("relation " + std::string(to_string(r)) +
                " has no overlap test case");
  return detail::assemble(protocol, Mode::kSingle, {{r, cfg.base}}, cfg);
}

/// All nine overlapping relations in one sequence. Each relation owns a slot
/// of three units followed by a one-unit separator; every uncovered byte is
/// carried by a context chunk so the sequence can complete.
inline TestCase build_multiple(Protocol protocol,
                               const GeneratorConfig& cfg = {}) {
  std::vector<detail::Slot> slots;
  const auto stride = 4 * cfg.unit;
  for (std::size_t k = 0; k < kOverlappingRelations.size(); ++k)
    slots.push_back({kOverlappingRelations[k], cfg.base + k * stride});
  return detail::assemble(protocol, Mode::kMultiple, slots, cfg);
}

// JSON

inline nlohmann::json config_to_json(const GeneratorConfig& c) {
  return {{"unit", c.unit},
          {"base", c.base},
          {"filler_byte", c.filler_byte},
          {"marker_alphabet", c.marker_alphabet}};
}

inline GeneratorConfig config_from_json(const nlohmann::json& j) {
  GeneratorConfig c;
  if (j.contains("unit")) c.unit = detail::require<std::size_t>(j, "unit");
  if (j.contains("base")) c.base = detail::require<std::size_t>(j, "base");
  if (j.contains("filler_byte"))
    c.filler_byte = detail::require<std::uint8_t>(j, "filler_byte");
  if (j.contains("marker_alphabet"))
    c.marker_alphabet = detail::require<std::string>(j, "marker_alphabet");
  return c;
}

inline nlohmann::json testcase_to_json(const TestCase& tc) {
  auto j = sequence_to_json(tc.sequence);
  j["mode"] = to_string(tc.mode);
  nlohmann::json rels = nlohmann::json::array();
  for (auto r : tc.relations_under_test) rels.push_back(to_string(r));
  j["relations"] = rels;
  nlohmann::json expected = nlohmann::json::object();
  for (const auto& [o, bytes] : tc.expected_markers)
    expected[std::string(to_string(o))] =
        bytes ? nlohmann::json(to_hex(*bytes)) : nlohmann::json(nullptr);
  j["expected_markers"] = expected;
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& r : tc.regions)
    regions.push_back({{"relation", to_string(r.relation)},
                       {"start", r.interval.start()},
                       {"end", r.interval.end()},
                       {"old_hex", to_hex(r.old_marker)},
                       {"new_hex", to_hex(r.new_marker)},
                       {"old_arrival", r.old_arrival},
                       {"new_arrival", r.new_arrival}});
  j["regions"] = regions;
  j["trigger_description"] = tc.trigger_description;
  j["config"] = config_to_json(tc.config);
  if (!tc.layout_version.empty()) j["layout_version"] = tc.layout_version;
  return j;
}

inline TestCase testcase_from_json(const nlohmann::json& j) {
  TestCase tc;
  tc.sequence = sequence_from_json(j);
  tc.protocol = tc.sequence.protocol;
  tc.mode = detail::require_mode(j);
  for (const auto& s : detail::require<std::vector<std::string>>(j, "relations")) {
    auto r = parse_relation(s);
    if (!r) throw SchemaError("unknown relation '" + s + "'");
    tc.relations_under_test.push_back(*r);
  }
  auto expected = detail::require<nlohmann::json>(j, "expected_markers");
  for (auto o : kAllOutcomes) {
    auto key = std::string(to_string(o));
    if (!expected.contains(key) || expected[key].is_null())
      tc.expected_markers[o] = std::nullopt;
    else
      tc.expected_markers[o] = from_hex(detail::require<std::string>(expected, key.c_str()));
  }
  for (const auto& r : detail::require<nlohmann::json>(j, "regions")) {
    auto start = detail::require<std::size_t>(r, "start");
    auto end = detail::require<std::size_t>(r, "end");
    if (start >= end) throw SchemaError("region interval is empty");
    OverlapRegion region{detail::require_relation(r), ByteInterval(start, end),
                         from_hex(detail::require<std::string>(r, "old_hex")),
                         from_hex(detail::require<std::string>(r, "new_hex")),
                         detail::require<std::size_t>(r, "old_arrival"),
                         detail::require<std::size_t>(r, "new_arrival")};
    if (region.old_marker.size() != region.interval.length() ||
        region.new_marker.size() != region.interval.length())
      throw SchemaError("region marker length does not match its interval");
    tc.regions.push_back(std::move(region));
  }
  if (tc.regions.empty()) throw SchemaError("test case has no overlap regions");
  if (j.contains("trigger_description"))
    tc.trigger_description = detail::require<std::string>(j, "trigger_description");
  if (j.contains("config")) tc.config = config_from_json(j["config"]);
  if (j.contains("layout_version"))
    tc.layout_version = detail::require<std::string>(j, "layout_version");
  return tc;
}

}  // namespace overlap_forge
