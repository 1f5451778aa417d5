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
#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "overlap_forge/common.hpp"
#include "overlap_forge/interval_algebra.hpp"
#include "overlap_forge/reassembly_engine.hpp"

namespace overlap_forge {

/// E1/E2 are evasions (host sees data the NIDS does not), I1/I2 insertions.
enum class Scenario : std::uint8_t { kE1 = 1, kE2 = 2, kI1 = 4, kI2 = 8 };

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::kE1: return "E1";
    case Scenario::kE2: return "E2";
    case Scenario::kI1: return "I1";
    case Scenario::kI2: return "I2";
  }
  return "?";
}

class ScenarioSet {
 public:
  constexpr ScenarioSet() = default;
  constexpr ScenarioSet(std::initializer_list<Scenario> s) {
    for (auto x : s) insert(x);
  }

  constexpr void insert(Scenario s) { bits_ |= static_cast<std::uint8_t>(s); }
  constexpr bool contains(Scenario s) const {
    return bits_ & static_cast<std::uint8_t>(s);
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool evasion() const { return contains(Scenario::kE1) || contains(Scenario::kE2); }
  constexpr bool insertion() const { return contains(Scenario::kI1) || contains(Scenario::kI2); }

  std::vector<Scenario> members() const {
    std::vector<Scenario> out;
    for (auto s : {Scenario::kE1, Scenario::kE2, Scenario::kI1, Scenario::kI2})
      if (contains(s)) out.push_back(s);
    return out;
  }

  /// "-" when consistent, otherwise labels joined with '/'.
  std::string label() const {
    if (empty()) return "-";
    std::string out;
    for (auto s : members()) {
      if (!out.empty()) out += "/";
      out += to_string(s);
    }
    return out;
  }

  friend constexpr bool operator==(ScenarioSet, ScenarioSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

inline ScenarioSet classify(Outcome host, Outcome nids) {
  if (host == nids) return {};
  if (nids == Outcome::kIgnore) return {Scenario::kE1};
  if (host == Outcome::kIgnore) return {Scenario::kI1};
  return {Scenario::kE2, Scenario::kI2};
}

struct AttackFinding {
  AllenRelation relation;
  Outcome host_outcome;
  Outcome nids_outcome;
  ScenarioSet scenarios;

  bool consistent() const { return scenarios.empty(); }
};

struct ConsistencyReport {
  Protocol protocol;
  Mode mode;
  std::string host_profile;
  std::string nids_profile;
  std::vector<AttackFinding> findings;
  std::size_t inconsistency_count = 0;
  bool evasion_possible = false;
  bool insertion_possible = false;

  std::vector<AllenRelation> inconsistent_relations() const {
    std::vector<AllenRelation> out;
    for (const auto& f : findings)
      if (!f.consistent()) out.push_back(f.relation);
    return out;
  }
};

inline ConsistencyReport compare(const PolicyTable& host, const PolicyTable& nids,
                                 Protocol protocol, Mode mode) {
  ConsistencyReport rep{protocol, mode, host.name(), nids.name(), {}, 0, false, false};
  for (auto r : kOverlappingRelations) {
    auto h = host.outcome(protocol, mode, r);
    auto n = nids.outcome(protocol, mode, r);
    AttackFinding f{r, h, n, classify(h, n)};
    if (!f.consistent()) ++rep.inconsistency_count;
    rep.evasion_possible |= f.scenarios.evasion();
    rep.insertion_possible |= f.scenarios.insertion();
    rep.findings.push_back(f);
  }
  return rep;
}

/// Integer percentage of `count` over 9 * os_count test cases, rounded half up.
inline unsigned percent_of(std::size_t count, std::size_t os_count) {
  if (os_count == 0) throw Error("empty OS set");
  const std::size_t denom = 9 * os_count;
  return static_cast<unsigned>((200 * count + denom) / (2 * denom));
}

struct NamedTable {
  std::string name;
  PolicyTable table;
};

struct SurfaceReport {
  Protocol protocol;
  Mode mode;
  std::vector<ConsistencyReport> per_os;
  std::size_t inconsistency_count = 0;
  unsigned percentage = 0;
  std::vector<std::string> evasion_targets;
  std::vector<std::string> insertion_targets;
};

/// Aggregates host/NIDS consistency over several hosts. `nids` holds, for
/// each host, the NIDS policy configured for that host.
inline SurfaceReport attack_surface(const std::vector<NamedTable>& hosts,
                                    const std::vector<NamedTable>& nids,
                                    Protocol protocol, Mode mode) {
  if (hosts.empty()) throw Error("empty OS set");
  if (hosts.size() != nids.size())
    throw Error("need one NIDS table per OS profile (" + std::to_string(hosts.size()) +
                " hosts, " + std::to_string(nids.size()) + " NIDS tables)");
  SurfaceReport s{protocol, mode, {}, 0, 0, {}, {}};
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    auto rep = compare(hosts[i].table, nids[i].table, protocol, mode);
    rep.host_profile = hosts[i].name;
    rep.nids_profile = nids[i].name;
    s.inconsistency_count += rep.inconsistency_count;
    if (rep.evasion_possible) s.evasion_targets.push_back(hosts[i].name);
    if (rep.insertion_possible) s.insertion_targets.push_back(hosts[i].name);
    s.per_os.push_back(std::move(rep));
  }
  s.percentage = percent_of(s.inconsistency_count, hosts.size());
  return s;
}

// Rendering

inline nlohmann::json report_to_json(const ConsistencyReport& r) {
  nlohmann::json findings = nlohmann::json::array();
  for (const auto& f : r.findings) {
    nlohmann::json sc = nlohmann::json::array();
    for (auto s : f.scenarios.members()) sc.push_back(to_string(s));
    findings.push_back({{"relation", to_string(f.relation)},
                        {"host", to_string(f.host_outcome)},
                        {"nids", to_string(f.nids_outcome)},
                        {"scenarios", sc}});
  }
  return {{"protocol", to_string(r.protocol)},
          {"mode", to_string(r.mode)},
          {"host_profile", r.host_profile},
          {"nids_profile", r.nids_profile},
          {"findings", findings},
          {"inconsistency_count", r.inconsistency_count},
          {"evasion_possible", r.evasion_possible},
          {"insertion_possible", r.insertion_possible}};
}

namespace detail {

// Terminal columns taken by a UTF-8 string (one per code point).
inline std::size_t display_width(std::string_view s) {
  std::size_t w = 0;
  for (unsigned char c : s)
    if ((c & 0xc0) != 0x80) ++w;
  return w;
}

inline std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  auto w = display_width(s);
  if (w < width) out.append(width - w, ' ');
  return out;
}

}  // namespace detail

/// Protocol/implementation rows against the nine relation columns; a
/// trailing row names the attack scenario of each inconsistent cell.
inline std::string render_table(const ConsistencyReport& r) {
  constexpr std::size_t kCol = 7;
  std::size_t name_w = std::max<std::size_t>(
      {14, detail::display_width(r.host_profile), detail::display_width(r.nids_profile)});
  name_w += 2;
  std::ostringstream os;
  os << detail::pad("protocol", 10) << detail::pad("implementation", name_w);
  std::string header;
  for (auto rel : kOverlappingRelations) header += detail::pad(to_string(rel), kCol);
  while (!header.empty() && header.back() == ' ') header.pop_back();
  os << header << "\n";
  auto row = [&](std::string_view proto, std::string_view name, auto cell) {
    os << detail::pad(proto, 10) << detail::pad(name, name_w);
    std::string line;
    for (const auto& f : r.findings) line += detail::pad(cell(f), kCol);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << "\n";
  };
  row(to_string(r.protocol), r.host_profile,
      [](const AttackFinding& f) { return std::string(to_symbol(f.host_outcome)); });
  row("", r.nids_profile, [](const AttackFinding& f) {
    std::string s(to_symbol(f.nids_outcome));
    return f.consistent() ? s : s + "*";
  });
  row("", "scenario", [](const AttackFinding& f) { return f.scenarios.label(); });
  os << "mode: " << to_string(r.mode) << "; inconsistencies: " << r.inconsistency_count
     << "/9; evasion possible: " << (r.evasion_possible ? "yes" : "no")
     << "; insertion possible: " << (r.insertion_possible ? "yes" : "no") << "\n";
  return os.str();
}

inline nlohmann::json surface_to_json(const SurfaceReport& s) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& r : s.per_os) per.push_back(report_to_json(r));
  return {{"protocol", to_string(s.protocol)},
          {"mode", to_string(s.mode)},
          {"inconsistency_count", s.inconsistency_count},
          {"percentage", s.percentage},
          {"evasion_targets", s.evasion_targets},
          {"insertion_targets", s.insertion_targets},
          {"per_os", per}};
}

}  // namespace overlap_forge
