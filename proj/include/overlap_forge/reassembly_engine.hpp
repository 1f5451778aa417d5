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

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "overlap_forge/chunk_model.hpp"
#include "overlap_forge/common.hpp"
#include "overlap_forge/interval_algebra.hpp"
#include "overlap_forge/testcase_generator.hpp"

namespace overlap_forge {

class PolicyGapError : public Error {
 public:
  PolicyGapError(Protocol p, Mode m, AllenRelation r)
      : Error("policy gap at (" + std::string(to_string(p)) + ", " +
              std::string(to_string(m)) + ", " + std::string(to_string(r)) +
              ")"),
        protocol(p), mode(m), relation(r) {}

  Protocol protocol;
  Mode mode;
  AllenRelation relation;
};

struct PolicyKey {
  Protocol protocol;
  Mode mode;
  AllenRelation relation;

  friend auto operator<=>(const PolicyKey&, const PolicyKey&) = default;
};

/// Outcome per (protocol, mode, overlapping relation).
class PolicyTable {
 public:
  PolicyTable() = default;
  explicit PolicyTable(std::string name) : name_(std::move(name)) {}

  /// Builds a complete table for one (protocol, mode) from nine outcomes in
  /// report column order (F, Fi, S, Si, O, Oi, D, Di, Eq).
  static PolicyTable from_row(std::string name, Protocol p, Mode m,
                              const std::array<Outcome, 9>& row) {
    PolicyTable t(std::move(name));
    t.set_row(p, m, row);
    return t;
  }

  static PolicyTable constant(Outcome o, Protocol p, Mode m) {
    std::array<Outcome, 9> row;
    row.fill(o);
    return from_row("constant-" + std::string(to_string(o)), p, m, row);
  }

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  void set(Protocol p, Mode m, AllenRelation r, Outcome o) {
    if (!is_overlapping(r))
      throw Error("policy keys are restricted to overlapping relations, got " +
                  std::string(to_string(r)));
    entries_[{p, m, r}] = o;
  }

  void set_row(Protocol p, Mode m, const std::array<Outcome, 9>& row) {
    for (std::size_t i = 0; i < row.size(); ++i)
      set(p, m, kOverlappingRelations[i], row[i]);
  }

  std::optional<Outcome> find(Protocol p, Mode m, AllenRelation r) const {
    auto it = entries_.find({p, m, r});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  Outcome outcome(Protocol p, Mode m, AllenRelation r) const {
    auto o = find(p, m, r);
    if (!o) throw PolicyGapError(p, m, r);
    return *o;
  }

  bool covers(Protocol p, Mode m) const {
    for (auto r : kOverlappingRelations)
      if (!find(p, m, r)) return false;
    return true;
  }

  /// Throws PolicyGapError for the first missing relation.
  void require_complete(Protocol p, Mode m) const {
    for (auto r : kOverlappingRelations) outcome(p, m, r);
  }

  std::array<Outcome, 9> row(Protocol p, Mode m) const {
    std::array<Outcome, 9> out{};
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = outcome(p, m, kOverlappingRelations[i]);
    return out;
  }

  /// (protocol, mode) combinations with at least one entry.
  std::vector<std::pair<Protocol, Mode>> combinations() const {
    std::vector<std::pair<Protocol, Mode>> out;
    for (const auto& [key, _] : entries_) {
      std::pair<Protocol, Mode> pm{key.protocol, key.mode};
      if (out.empty() || out.back() != pm) out.push_back(pm);
    }
    return out;
  }

  /// Copy restricted to one (protocol, mode).
  PolicyTable restricted(Protocol p, Mode m) const {
    PolicyTable t(name_);
    t.set_row(p, m, row(p, m));
    return t;
  }

  const std::map<PolicyKey, Outcome>& entries() const { return entries_; }

  /// Compares entries only; names are labels.
  bool same_entries(const PolicyTable& other) const {
    return entries_ == other.entries_;
  }

 private:
  std::string name_;
  std::map<PolicyKey, Outcome> entries_;
};

/// What IGNORE does to a sequence: abort drops the whole reassembly,
/// drop-new discards only the newer chunk's overlapping bytes.
enum class IgnoreSemantics { kAbort, kDropNew };

struct ResolutionEntry {
  AllenRelation relation;
  ByteInterval region;
  Outcome outcome;
  std::size_t old_arrival;
  std::size_t new_arrival;

  friend bool operator==(const ResolutionEntry&, const ResolutionEntry&) = default;
};

enum class ReassemblyStatus { kCompleted, kIgnored, kIncomplete };

inline std::string_view to_string(ReassemblyStatus s) {
  switch (s) {
    case ReassemblyStatus::kCompleted: return "completed";
    case ReassemblyStatus::kIgnored: return "ignored";
    case ReassemblyStatus::kIncomplete: return "incomplete";
  }
  return "?";
}

struct ReassemblyResult {
  ReassemblyStatus status = ReassemblyStatus::kIncomplete;
  std::optional<Bytes> payload;  // present iff completed
  /// Arrival index of the chunk that supplied each payload byte.
  std::vector<std::size_t> provenance;
  std::vector<ResolutionEntry> resolution_log;

  bool completed() const { return status == ReassemblyStatus::kCompleted; }

  friend bool operator==(const ReassemblyResult&, const ReassemblyResult&) = default;
};

/// Replays `seq` in arrival order against a per-byte buffer. Each byte
/// remembers the chunk that wrote it; when a new chunk lands on bytes owned
/// by an earlier chunk, the policy entry for relate(earlier, new) decides.
inline ReassemblyResult reassemble(const ChunkSequence& seq,
                                   const PolicyTable& policy, Mode mode,
                                   IgnoreSemantics ignore = IgnoreSemantics::kAbort) {
  if (seq.chunks.empty()) throw Error("cannot reassemble an empty chunk sequence");
  seq.validate();
  policy.require_complete(seq.protocol, mode);

  std::size_t max_end = 0;
  for (const auto& c : seq.chunks) max_end = std::max(max_end, c.interval.end());

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  Bytes buffer(max_end, 0);
  std::vector<std::size_t> owner(max_end, kNone);  // index into seq.chunks
  ReassemblyResult result;
  bool saw_last_fragment = false;

  for (std::size_t ci = 0; ci < seq.chunks.size(); ++ci) {
    const auto& chunk = seq.chunks[ci];
    if (chunk.has_tag(kTagLastFragment)) saw_last_fragment = true;
    const auto s = chunk.interval.start(), e = chunk.interval.end();

    // Runs of bytes sharing one earlier owner; owners are resolved in the
    // order their first byte appears.
    std::vector<std::pair<std::size_t, ByteInterval>> runs;
    for (std::size_t i = s; i < e;) {
      std::size_t j = i;
      while (j < e && owner[j] == owner[i]) ++j;
      if (owner[i] != kNone) runs.emplace_back(owner[i], ByteInterval(i, j));
      i = j;
    }

    std::vector<bool> keep_old(e - s, false);
    for (const auto& [prev, region] : runs) {
      const auto& earlier = seq.chunks[prev];
      auto r = relate(earlier.interval, chunk.interval);
      auto o = policy.outcome(seq.protocol, mode, r);
      result.resolution_log.push_back(
          {r, region, o, earlier.arrival_index, chunk.arrival_index});
      if (o == Outcome::kIgnore && ignore == IgnoreSemantics::kAbort) {
        result.status = ReassemblyStatus::kIgnored;
        return result;
      }
      if (o != Outcome::kNew)
        std::fill(keep_old.begin() + (region.start() - s),
                  keep_old.begin() + (region.end() - s), true);
    }
    for (std::size_t i = s; i < e; ++i) {
      if (keep_old[i - s]) continue;
      buffer[i] = chunk.payload[i - s];
      owner[i] = ci;
    }
  }

  bool contiguous = std::find(owner.begin(), owner.end(), kNone) == owner.end();
  bool trigger_ok = !is_ip(seq.protocol) || saw_last_fragment;
  if (!contiguous || !trigger_ok) {
    result.status = ReassemblyStatus::kIncomplete;
    return result;
  }
  result.status = ReassemblyStatus::kCompleted;
  result.payload = std::move(buffer);
  result.provenance.reserve(max_end);
  for (auto o : owner) result.provenance.push_back(seq.chunks[o].arrival_index);
  return result;
}

inline ReassemblyResult predict_outcome_payload(
    const TestCase& tc, const PolicyTable& policy,
    IgnoreSemantics ignore = IgnoreSemantics::kAbort) {
  return reassemble(tc.sequence, policy, tc.mode, ignore);
}

inline nlohmann::json result_to_json(const ReassemblyResult& r) {
  nlohmann::json log = nlohmann::json::array();
  for (const auto& e : r.resolution_log)
    log.push_back({{"relation", to_string(e.relation)},
                   {"start", e.region.start()},
                   {"end", e.region.end()},
                   {"outcome", to_string(e.outcome)}});
  return {{"status", to_string(r.status)},
          {"payload_hex", r.payload ? nlohmann::json(to_hex(*r.payload))
                                    : nlohmann::json(nullptr)},
          {"resolution_log", log}};
}

}  // namespace overlap_forge
