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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "overlap_forge/common.hpp"
#include "overlap_forge/reassembly_engine.hpp"

namespace overlap_forge {

struct PolicyProfile {
  std::string name;
  std::string source;
  std::vector<std::string> aliases;
  PolicyTable table;

  bool answers_to(std::string_view n) const {
    if (name == n) return true;
    for (const auto& a : aliases)
      if (a == n) return true;
    return false;
  }
};

class UnknownProfileError : public Error {
 public:
  using Error::Error;
};

namespace fixtures {

constexpr Outcome o = Outcome::kOld;
constexpr Outcome n = Outcome::kNew;
constexpr Outcome x = Outcome::kIgnore;
using Row = std::array<Outcome, 9>;

// Columns: F, Fi, S, Si, O, Oi, D, Di, Eq.
constexpr Row kAllIgnore = {x, x, x, x, x, x, x, x, x};
constexpr Row kAllOld = {o, o, o, o, o, o, o, o, o};

// Windows 21h2/23h2 and Linux 4.9/6.1 fragment reassembly.
constexpr Row kWinLinuxIpSingle = {n, x, n, o, x, x, n, o, n};

constexpr Row kLinuxTcpMultiple = {n, o, o, o, o, n, n, o, o};
constexpr Row kLinuxTcpSingle = {n, o, n, o, o, n, n, o, o};

constexpr Row kSunosIpMultiple = {n, o, o, o, o, o, n, o, o};
constexpr Row kSunosIpSingle = {n, x, n, o, o, o, n, o, n};
constexpr Row kSunosTcpMultiple = {n, o, n, o, n, o, n, o, n};
constexpr Row kSunosTcpSingle = {n, o, n, o, n, o, n, o, o};

constexpr Row kFreebsdIpv4Multiple = {n, o, o, o, o, n, n, o, o};
constexpr Row kFreebsdIpv4Single = {n, x, n, o, o, n, n, o, n};
constexpr Row kFreebsdIpv6Single = {n, x, n, o, x, x, n, o, n};
constexpr Row kFreebsdTcp = {n, o, o, o, o, n, n, o, o};

// NIDS, single mode, bsd policy where configurable.
constexpr Row kSuricataIp = {n, o, n, o, o, o, n, o, n};
constexpr Row kSnortIp = {n, x, n, o, o, n, n, o, n};
constexpr Row kBsdTcp = {n, o, o, o, o, n, n, o, o};
constexpr Row kZeekIpv4 = {n, o, n, o, o, o, n, o, n};

inline PolicyProfile make(std::string name, std::string source,
                          std::vector<std::string> aliases) {
  PolicyProfile p{name, std::move(source), std::move(aliases), PolicyTable(name)};
  return p;
}

inline void both_modes(PolicyTable& t, Protocol p, const Row& row) {
  t.set_row(p, Mode::kSingle, row);
  t.set_row(p, Mode::kMultiple, row);
}

inline std::vector<PolicyProfile> builtin() {
  std::vector<PolicyProfile> out;
  const std::string os_src = "measured OS reassembly (IP and TCP tables)";
  const std::string nids_src = "measured NIDS reassembly, single mode";
  {
    auto p = make("windows-21h2", os_src, {"windows-23h2", "windows"});
    for (auto proto : {Protocol::kIpv4, Protocol::kIpv6}) {
      p.table.set_row(proto, Mode::kSingle, kWinLinuxIpSingle);
      p.table.set_row(proto, Mode::kMultiple, kAllIgnore);
    }
    both_modes(p.table, Protocol::kTcp, kAllOld);
    out.push_back(std::move(p));
  }
  {
    auto p = make("linux-6.1", os_src, {"linux-4.9", "linux"});
    for (auto proto : {Protocol::kIpv4, Protocol::kIpv6}) {
      p.table.set_row(proto, Mode::kSingle, kWinLinuxIpSingle);
      p.table.set_row(proto, Mode::kMultiple, kAllIgnore);
    }
    p.table.set_row(Protocol::kTcp, Mode::kSingle, kLinuxTcpSingle);
    p.table.set_row(Protocol::kTcp, Mode::kMultiple, kLinuxTcpMultiple);
    out.push_back(std::move(p));
  }
  {
    auto p = make("sunos-5.11", os_src, {"solaris-11.4", "sunos"});
    for (auto proto : {Protocol::kIpv4, Protocol::kIpv6}) {
      p.table.set_row(proto, Mode::kSingle, kSunosIpSingle);
      p.table.set_row(proto, Mode::kMultiple, kSunosIpMultiple);
    }
    p.table.set_row(Protocol::kTcp, Mode::kSingle, kSunosTcpSingle);
    p.table.set_row(Protocol::kTcp, Mode::kMultiple, kSunosTcpMultiple);
    out.push_back(std::move(p));
  }
  {
    // OpenBSD 6.0, 6.9 and 7.6 reassemble like FreeBSD.
    auto p = make("freebsd-14.1", os_src,
                  {"freebsd-10.2", "freebsd-12.1", "freebsd-14.2", "freebsd",
                   "openbsd-6.0", "openbsd-6.9", "openbsd-7.6", "openbsd"});
    p.table.set_row(Protocol::kIpv4, Mode::kSingle, kFreebsdIpv4Single);
    p.table.set_row(Protocol::kIpv4, Mode::kMultiple, kFreebsdIpv4Multiple);
    p.table.set_row(Protocol::kIpv6, Mode::kSingle, kFreebsdIpv6Single);
    p.table.set_row(Protocol::kIpv6, Mode::kMultiple, kAllIgnore);
    both_modes(p.table, Protocol::kTcp, kFreebsdTcp);
    out.push_back(std::move(p));
  }
  {
    auto p = make("suricata-7.0.4-bsd", nids_src, {"suricata-bsd"});
    p.table.set_row(Protocol::kIpv4, Mode::kSingle, kSuricataIp);
    p.table.set_row(Protocol::kIpv6, Mode::kSingle, kSuricataIp);
    p.table.set_row(Protocol::kTcp, Mode::kSingle, kBsdTcp);
    out.push_back(std::move(p));
  }
  {
    auto p = make("snort-3.1.83-bsd", nids_src, {"snort-bsd"});
    p.table.set_row(Protocol::kIpv4, Mode::kSingle, kSnortIp);
    p.table.set_row(Protocol::kIpv6, Mode::kSingle, kSnortIp);
    p.table.set_row(Protocol::kTcp, Mode::kSingle, kBsdTcp);
    out.push_back(std::move(p));
  }
  {
    auto p = make("zeek-6.2.0", nids_src, {"zeek"});
    p.table.set_row(Protocol::kIpv4, Mode::kSingle, kZeekIpv4);
    p.table.set_row(Protocol::kIpv6, Mode::kSingle, kAllOld);
    p.table.set_row(Protocol::kTcp, Mode::kSingle, kAllOld);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace fixtures

// JSON: {name, source, aliases?, entries: [{protocol, mode, relation, outcome}]}

inline nlohmann::json profile_to_json(const PolicyProfile& p) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [k, o] : p.table.entries())
    entries.push_back({{"protocol", to_string(k.protocol)},
                       {"mode", to_string(k.mode)},
                       {"relation", to_string(k.relation)},
                       {"outcome", to_string(o)}});
  nlohmann::json j{{"name", p.name}, {"source", p.source}, {"entries", entries}};
  if (!p.aliases.empty()) j["aliases"] = p.aliases;
  return j;
}

inline PolicyProfile load_profile(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("policy document must be an object");
  PolicyProfile p;
  p.name = detail::require<std::string>(doc, "name");
  p.source = doc.contains("source") ? detail::require<std::string>(doc, "source") : "";
  if (doc.contains("aliases"))
    p.aliases = detail::require<std::vector<std::string>>(doc, "aliases");
  p.table = PolicyTable(p.name);
  auto entries = detail::require<nlohmann::json>(doc, "entries");
  if (!entries.is_array()) throw SchemaError("field 'entries' must be an array");
  for (const auto& e : entries) {
    auto proto = detail::require_protocol(e);
    auto mode = detail::require_mode(e);
    auto rel = detail::require_relation(e);
    if (!is_overlapping(rel))
      throw SchemaError("relation '" + std::string(to_string(rel)) +
                        "' is not an overlapping relation");
    auto os = detail::require<std::string>(e, "outcome");
    auto outcome = parse_outcome(os);
    if (!outcome) throw SchemaError("unknown outcome '" + os + "'");
    if (p.table.find(proto, mode, rel))
      throw SchemaError("duplicate entry for (" + std::string(to_string(proto)) +
                        ", " + std::string(to_string(mode)) + ", " +
                        std::string(to_string(rel)) + ")");
    p.table.set(proto, mode, rel, *outcome);
  }
  for (auto [proto, mode] : p.table.combinations())
    p.table.require_complete(proto, mode);
  return p;
}

inline PolicyProfile load_profile_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open policy file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return load_profile(doc);
}

/// Built-in fixtures plus profiles loaded from files or search directories.
class PolicyRegistry {
 public:
  /// Environment variable holding extra profile directories (':'-separated).
  static constexpr const char* kProfileDirEnv = "OVERLAP_FORGE_PROFILE_DIR";

  PolicyRegistry() : profiles_(fixtures::builtin()) {}

  static const PolicyRegistry& builtin() {
    static const PolicyRegistry r;
    return r;
  }

  void add(PolicyProfile p) { profiles_.push_back(std::move(p)); }

  void add_search_dir(std::filesystem::path dir) { dirs_.push_back(std::move(dir)); }

  void add_search_dirs_from_env() {
    const char* env = std::getenv(kProfileDirEnv);
    if (!env) return;
    std::string_view rest(env);
    while (!rest.empty()) {
      auto pos = rest.find(':');
      auto part = rest.substr(0, pos);
      if (!part.empty()) dirs_.emplace_back(std::string(part));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
  }

  const std::vector<PolicyProfile>& profiles() const { return profiles_; }

  /// Resolves a profile by name or alias, then a `<name>.json` in the search
  /// directories, then a file path.
  PolicyProfile resolve(std::string_view name_or_path) const {
    for (const auto& p : profiles_)
      if (p.answers_to(name_or_path)) return p;
    for (const auto& d : dirs_) {
      auto candidate = d / (std::string(name_or_path) + ".json");
      if (std::filesystem::is_regular_file(candidate)) return load_profile_file(candidate);
    }
    std::filesystem::path path{std::string(name_or_path)};
    if (std::filesystem::is_regular_file(path)) return load_profile_file(path);
    throw UnknownProfileError("unknown profile '" + std::string(name_or_path) +
                              "'; available: " + available());
  }

  /// Complete nine-relation table for (protocol, mode).
  PolicyTable lookup(std::string_view name, Protocol protocol, Mode mode) const {
    auto p = resolve(name);
    if (!p.table.covers(protocol, mode)) {
      std::string combos;
      for (auto [pr, m] : p.table.combinations()) {
        if (!combos.empty()) combos += ", ";
        combos += std::string(to_string(pr)) + "/" + std::string(to_string(m));
      }
      throw UnknownProfileError("profile '" + p.name + "' does not cover " +
                                std::string(to_string(protocol)) + "/" +
                                std::string(to_string(mode)) +
                                "; available combinations: " + combos);
    }
    return p.table.restricted(protocol, mode);
  }

  std::string available() const {
    std::string out;
    for (const auto& p : profiles_) {
      if (!out.empty()) out += ", ";
      out += p.name;
    }
    return out;
  }

 private:
  std::vector<PolicyProfile> profiles_;
  std::vector<std::filesystem::path> dirs_;
};

inline PolicyTable lookup(std::string_view name, Protocol protocol, Mode mode) {
  return PolicyRegistry::builtin().lookup(name, protocol, mode);
}

}  // namespace overlap_forge
