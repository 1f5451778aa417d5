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

// Command-line front end. Kept in a header so tests can drive `run_cli`
// without spawning processes.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "overlap_forge.hpp"

namespace overlap_forge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFinding = 1;  // inconsistency, expectation or verify mismatch
inline constexpr int kExitUsage = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

// Flag-level NetConfig overrides; unset fields keep their defaults.
struct NetOverrides {
  std::string src_ip, dst_ip, src_mac, dst_mac;
  std::optional<std::uint16_t> sport, dport;
  std::optional<std::uint32_t> isn;

  void add_to(CLI::App& app) {
    app.add_option("--src-ip", src_ip, "source address (IPv4 or IPv6)");
    app.add_option("--dst-ip", dst_ip, "destination address (IPv4 or IPv6)");
    app.add_option("--src-mac", src_mac, "source MAC");
    app.add_option("--dst-mac", dst_mac, "destination MAC");
    app.add_option("--sport", sport, "TCP source port of the first case");
    app.add_option("--dport", dport, "TCP destination port");
    app.add_option("--isn", isn, "client initial sequence number");
  }

  // Fields present in `j` (campaign "net" object) fill in unset flags.
  void merge_json(const json& j) {
    auto str = [&](const char* key, std::string& field) {
      if (field.empty() && j.contains(key)) field = j.at(key).get<std::string>();
    };
    str("src_ip", src_ip);
    str("dst_ip", dst_ip);
    str("src_mac", src_mac);
    str("dst_mac", dst_mac);
    if (!sport && j.contains("sport")) sport = j.at("sport").get<std::uint16_t>();
    if (!dport && j.contains("dport")) dport = j.at("dport").get<std::uint16_t>();
    if (!isn && j.contains("isn")) isn = j.at("isn").get<std::uint32_t>();
  }

  NetConfig apply(NetConfig c = {}) const {
    auto ip = [](const std::string& s, Ipv4Address& v4, Ipv6Address& v6) {
      if (s.empty()) return;
      if (s.find(':') != std::string::npos)
        v6 = parse_ipv6(s);
      else
        v4 = parse_ipv4(s);
    };
    ip(src_ip, c.src_ip4, c.src_ip6);
    ip(dst_ip, c.dst_ip4, c.dst_ip6);
    if (!src_mac.empty()) c.src_mac = parse_mac(src_mac);
    if (!dst_mac.empty()) c.dst_mac = parse_mac(dst_mac);
    if (sport) c.sport = *sport;
    if (dport) c.dport = *dport;
    if (isn) c.isn = *isn;
    return c;
  }
};

inline Protocol protocol_arg(const std::string& s) {
  auto p = parse_protocol(s);
  if (!p) throw UsageError("unknown protocol '" + s + "' (expected ipv4, ipv6 or tcp)");
  return *p;
}

inline Mode mode_arg(const std::string& s) {
  auto m = parse_mode(s);
  if (!m) throw UsageError("unknown mode '" + s + "' (expected single or multiple)");
  return *m;
}

inline AllenRelation overlapping_relation_arg(const std::string& s) {
  auto r = parse_relation(s);
  if (!r) throw UsageError("unknown relation '" + s + "'");
  if (!is_overlapping(*r))
    throw UsageError("relation " + s + " does not overlap; no test case exists for it");
  return *r;
}

inline json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error("cannot write " + path.string());
}

inline PolicyRegistry make_registry() {
  PolicyRegistry r;
  r.add_search_dirs_from_env();
  return r;
}

// Campaign file:
// {protocols, modes, relations, hosts, nids, out, net}
// `nids` entries are a profile name (used for every host) or
// {"name": label, "per_host": [profile per host]} for target-based setups.
struct NidsEntry {
  std::string label;
  std::vector<std::string> per_host;
};

struct CampaignSpec {
  std::vector<Protocol> protocols{kAllProtocols.begin(), kAllProtocols.end()};
  std::vector<Mode> modes{kAllModes.begin(), kAllModes.end()};
  std::vector<AllenRelation> relations{kOverlappingRelations.begin(),
                                       kOverlappingRelations.end()};
  std::vector<std::string> hosts;
  std::vector<NidsEntry> nids;
  std::string out;
  json net = json::object();
};

inline CampaignSpec campaign_from_json(const json& j, const PolicyRegistry& reg) {
  if (!j.is_object()) throw SchemaError("campaign must be a JSON object");
  CampaignSpec c;
  try {
    if (j.contains("protocols")) {
      c.protocols.clear();
      for (const auto& p : j.at("protocols")) c.protocols.push_back(protocol_arg(p.get<std::string>()));
    }
    if (j.contains("modes")) {
      c.modes.clear();
      for (const auto& m : j.at("modes")) c.modes.push_back(mode_arg(m.get<std::string>()));
    }
    if (j.contains("relations")) {
      c.relations.clear();
      for (const auto& r : j.at("relations"))
        c.relations.push_back(overlapping_relation_arg(r.get<std::string>()));
    }
    if (j.contains("hosts")) c.hosts = j.at("hosts").get<std::vector<std::string>>();
    if (j.contains("nids")) {
      for (const auto& e : j.at("nids")) {
        if (e.is_string()) {
          auto name = e.get<std::string>();
          c.nids.push_back({name, std::vector<std::string>(c.hosts.size(), name)});
        } else {
          NidsEntry n{e.at("name").get<std::string>(),
                      e.at("per_host").get<std::vector<std::string>>()};
          if (n.per_host.size() != c.hosts.size())
            throw SchemaError("nids '" + n.label + "': per_host must list one profile per host");
          c.nids.push_back(std::move(n));
        }
      }
    }
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("net")) c.net = j.at("net");
  } catch (const json::exception& e) {
    throw SchemaError(std::string("campaign: ") + e.what());
  }
  // Resolve every name up front so a typo fails before any work is done.
  for (const auto& h : c.hosts) reg.resolve(h);
  for (const auto& n : c.nids)
    for (const auto& p : n.per_host) reg.resolve(p);
  return c;
}

inline std::string case_stem(const TestCase& tc) {
  std::string s = std::string(to_string(tc.protocol)) + "-" + std::string(to_string(tc.mode));
  if (tc.mode == Mode::kSingle) s += "-" + std::string(to_string(tc.relations_under_test.front()));
  return s;
}

// Observed outcome of a reassembly: IGNORE when nothing was produced,
// otherwise the common outcome of all regions (nullopt when they differ).
inline std::optional<Outcome> observed_outcome(const TestCase& tc, const ReassemblyResult& res) {
  if (!res.completed()) return Outcome::kIgnore;
  std::optional<Outcome> common;
  for (auto [r, o] : infer_regions(tc, res.payload)) {
    if (common && *common != o) return std::nullopt;
    common = o;
  }
  return common;
}

// Subcommands

struct GenerateArgs {
  std::vector<std::string> protocols, modes;
  std::string relation, out, campaign;
  bool hexdump = false;
  NetOverrides net;
};

inline int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  auto reg = make_registry();
  CampaignSpec plan;
  NetOverrides net = a.net;
  if (!a.campaign.empty()) {
    plan = campaign_from_json(read_json_file(a.campaign), reg);
    net.merge_json(plan.net);
  }
  if (!a.protocols.empty()) {
    plan.protocols.clear();
    for (const auto& p : a.protocols) plan.protocols.push_back(protocol_arg(p));
  }
  if (!a.relation.empty()) {
    plan.relations = {overlapping_relation_arg(a.relation)};
    plan.modes = {Mode::kSingle};
  }
  if (!a.modes.empty()) {
    plan.modes.clear();
    for (const auto& m : a.modes) plan.modes.push_back(mode_arg(m));
  }
  if (!a.out.empty()) plan.out = a.out;
  if (plan.out.empty()) plan.out = "out";
  const NetConfig base = net.apply();

  std::vector<TestCase> cases;
  for (auto p : plan.protocols)
    for (auto m : plan.modes) {
      if (m == Mode::kMultiple) {
        cases.push_back(build_multiple(p));
        continue;
      }
      for (auto r : plan.relations) cases.push_back(build_single(p, r));
    }

  fs::path dir(plan.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());

  json entries = json::array();
  for (const auto& tc : cases) {
    auto index = case_index(tc);
    auto cfg = net_config_for(base, index);
    auto frames = encode(tc, cfg);
    auto stem = case_stem(tc);
    write_text_file(dir / (stem + ".json"), testcase_to_json(tc).dump(2) + "\n");
    write_pcap_file(frames, dir / (stem + ".pcap"));
    if (a.hexdump) {
      std::string dump;
      for (std::size_t i = 0; i < frames.size(); ++i)
        dump += "# frame " + std::to_string(i) + "\n" + hexdump(frames[i]) + "\n";
      write_text_file(dir / (stem + ".hex"), dump);
    }
    json rels = json::array();
    for (auto r : tc.relations_under_test) rels.push_back(to_string(r));
    std::size_t handshake = tc.protocol == Protocol::kTcp ? 3 : 0;
    entries.push_back({{"testcase", stem + ".json"},
                       {"pcap", stem + ".pcap"},
                       {"protocol", to_string(tc.protocol)},
                       {"mode", to_string(tc.mode)},
                       {"relations", rels},
                       {"case_index", index},
                       {"chunks", tc.sequence.chunks.size()},
                       {"frames", frames.size()},
                       {"handshake_frames", handshake}});
  }
  json manifest{{"tool", "overlap-forge"},
                {"tool_version", kToolVersion},
                {"layout_version", kMultipleLayoutVersion},
                {"generator", config_to_json(GeneratorConfig{})},
                {"cases", entries}};
  auto text = manifest.dump(2) + "\n";
  write_text_file(dir / "manifest.json", text);
  out << text;
  return kExitOk;
}

struct SimulateArgs {
  std::string testcase, policy, expect, format = "table", ignore = "abort";
};

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  auto reg = make_registry();
  auto tc = testcase_from_json(read_json_file(a.testcase));
  auto table = reg.lookup(a.policy, tc.protocol, tc.mode);
  auto sem = a.ignore == "drop-new" ? IgnoreSemantics::kDropNew : IgnoreSemantics::kAbort;
  auto res = predict_outcome_payload(tc, table, sem);
  auto observed = observed_outcome(tc, res);

  if (a.format == "json") {
    auto j = result_to_json(res);
    j["policy"] = table.name();
    j["outcome"] = observed ? json(to_string(*observed)) : json("mixed");
    out << j.dump(2) << "\n";
  } else {
    out << "test case: " << case_stem(tc) << "\n"
        << "policy:    " << table.name() << " (" << to_string(tc.protocol) << "/"
        << to_string(tc.mode) << ")\n"
        << "status:    " << to_string(res.status) << "\n"
        << "outcome:   " << (observed ? std::string(to_string(*observed)) : "mixed") << "\n";
    if (res.payload) out << "payload:   " << to_hex(*res.payload) << "\n";
    for (const auto& e : res.resolution_log)
      out << "  " << to_string(e.relation) << " [" << e.region.start() << ","
          << e.region.end() << ") -> " << to_string(e.outcome) << "\n";
  }
  if (a.expect.empty()) return kExitOk;
  auto want = parse_outcome(a.expect);
  if (!want) throw UsageError("--expect takes old, new or ignore");
  if (observed != want) {
    err << "expectation failed: wanted " << a.expect << ", observed "
        << (observed ? std::string(to_string(*observed)) : "mixed") << "\n";
    return kExitFinding;
  }
  return kExitOk;
}

struct InferArgs {
  std::string observations, pcap, protocol, mode = "single", verify, name = "inferred", out;
  NetOverrides net;
};

inline int print_table_diff(const PolicyTable& got, const PolicyTable& want, Protocol p, Mode m,
                            std::ostream& err) {
  int mismatches = 0;
  for (auto r : kOverlappingRelations) {
    auto g = got.outcome(p, m, r), w = want.outcome(p, m, r);
    if (g == w) continue;
    ++mismatches;
    err << "verify: " << to_string(r) << " inferred " << to_string(g) << ", " << want.name()
        << " has " << to_string(w) << "\n";
  }
  return mismatches;
}

inline int cmd_infer(const InferArgs& a, std::ostream& out, std::ostream& err) {
  auto reg = make_registry();
  Protocol protocol;
  Mode mode = mode_arg(a.mode);
  PolicyTable table;
  if (!a.observations.empty()) {
    if (mode != Mode::kSingle) throw UsageError("observation files describe single mode");
    auto [p, obs] = observations_from_json(read_json_file(a.observations));
    protocol = p;
    std::map<AllenRelation, TestCase> tcs;
    for (auto r : kOverlappingRelations) tcs.emplace(r, build_single(p, r));
    table = infer_policy(obs, tcs, a.name);
  } else {
    if (a.pcap.empty() || a.protocol.empty())
      throw UsageError("infer needs an observations file or --pcap with --protocol");
    protocol = protocol_arg(a.protocol);
    auto replies = extract_replies(read_pcap_file(a.pcap), protocol, a.net.apply());
    auto payload_for = [&](std::size_t index) -> std::optional<Bytes> {
      auto it = replies.find(index);
      if (it == replies.end()) return std::nullopt;
      return it->second;
    };
    if (mode == Mode::kMultiple) {
      auto tc = build_multiple(protocol);
      table = infer_multiple_policy(tc, payload_for(case_index(tc)), a.name);
    } else {
      std::map<AllenRelation, Observation> obs;
      std::map<AllenRelation, TestCase> tcs;
      for (auto r : kOverlappingRelations) {
        auto tc = build_single(protocol, r);
        obs.emplace(r, Observation{r, payload_for(case_index(tc))});
        tcs.emplace(r, std::move(tc));
      }
      table = infer_policy(obs, tcs, a.name);
    }
  }
  auto doc = profile_to_json(PolicyProfile{a.name, "inferred", {}, table});
  if (a.out.empty())
    out << doc.dump(2) << "\n";
  else
    write_text_file(a.out, doc.dump(2) + "\n");

  if (a.verify.empty()) return kExitOk;
  auto fixture = reg.lookup(a.verify, protocol, mode);
  int mismatches = print_table_diff(table, fixture, protocol, mode, err);
  if (mismatches) return kExitFinding;
  err << "verify: matches " << fixture.name() << "\n";
  return kExitOk;
}

struct ObserveArgs {
  std::string policy, protocol, mode = "single", out, pcap;
  NetOverrides net;
};

inline int cmd_observe(const ObserveArgs& a, std::ostream& out) {
  auto reg = make_registry();
  auto protocol = protocol_arg(a.protocol);
  auto mode = mode_arg(a.mode);
  auto table = reg.lookup(a.policy, protocol, mode);
  std::vector<TestCase> cases;
  if (mode == Mode::kMultiple)
    cases.push_back(build_multiple(protocol));
  else
    for (auto r : kOverlappingRelations) cases.push_back(build_single(protocol, r));

  std::map<std::size_t, Bytes> outputs;
  std::map<AllenRelation, Observation> obs;
  for (const auto& tc : cases) {
    auto res = predict_outcome_payload(tc, table);
    if (res.completed()) outputs[case_index(tc)] = *res.payload;
    if (mode == Mode::kSingle) obs.emplace(tc.relations_under_test.front(), observe(tc, table));
  }
  if (!a.pcap.empty()) write_pcap_file(encode_replies(protocol, outputs, a.net.apply()), a.pcap);
  if (mode == Mode::kSingle) {
    auto text = observations_to_json(protocol, obs).dump(2) + "\n";
    if (a.out.empty())
      out << text;
    else
      write_text_file(a.out, text);
  }
  return kExitOk;
}

struct DiffArgs {
  std::string host, nids, protocol, mode = "single", format = "table";
};

inline int cmd_diff(const DiffArgs& a, std::ostream& out) {
  auto reg = make_registry();
  auto p = protocol_arg(a.protocol);
  auto m = mode_arg(a.mode);
  auto rep = compare(reg.lookup(a.host, p, m), reg.lookup(a.nids, p, m), p, m);
  if (a.format == "json")
    out << report_to_json(rep).dump(2) << "\n";
  else
    out << render_table(rep);
  return rep.inconsistency_count ? kExitFinding : kExitOk;
}

struct ReportArgs {
  std::string campaign, format = "table", mode = "single";
  std::vector<std::string> hosts, nids, protocols;
};

inline int cmd_report(const ReportArgs& a, std::ostream& out) {
  auto reg = make_registry();
  CampaignSpec plan;
  std::vector<Mode> modes{mode_arg(a.mode)};
  if (!a.campaign.empty()) {
    plan = campaign_from_json(read_json_file(a.campaign), reg);
    modes = plan.modes;
  } else {
    plan.hosts = a.hosts;
    if (a.nids.size() == 1 || (!a.hosts.empty() && a.nids.size() != a.hosts.size())) {
      for (const auto& n : a.nids) plan.nids.push_back({n, std::vector<std::string>(a.hosts.size(), n)});
    } else if (!a.nids.empty()) {
      plan.nids.push_back({"nids", a.nids});
    }
  }
  if (!a.protocols.empty()) {
    plan.protocols.clear();
    for (const auto& p : a.protocols) plan.protocols.push_back(protocol_arg(p));
  }
  if (plan.hosts.empty()) throw Error("empty OS set");
  if (plan.nids.empty()) throw UsageError("report needs at least one NIDS profile");

  json rows = json::array();
  std::ostringstream table;
  table << std::left;
  auto cell = [&](const std::string& s, int w) { table << std::setw(w) << s; };
  cell("nids", 22), cell("protocol", 10), cell("mode", 10), cell("count", 7), cell("percent", 9);
  table << "evasion / insertion\n";
  for (const auto& n : plan.nids)
    for (auto p : plan.protocols)
      for (auto m : modes) {
        bool covered = true;
        for (std::size_t i = 0; i < plan.hosts.size(); ++i)
          covered = covered && reg.resolve(plan.hosts[i]).table.covers(p, m) &&
                    reg.resolve(n.per_host[i]).table.covers(p, m);
        if (!covered) continue;  // e.g. NIDS fixtures exist for single mode only
        std::vector<NamedTable> hosts, nids;
        for (std::size_t i = 0; i < plan.hosts.size(); ++i) {
          hosts.push_back({plan.hosts[i], reg.lookup(plan.hosts[i], p, m)});
          nids.push_back({n.per_host[i], reg.lookup(n.per_host[i], p, m)});
        }
        auto s = attack_surface(hosts, nids, p, m);
        auto j = surface_to_json(s);
        j["nids"] = n.label;
        rows.push_back(j);
        auto join = [](const std::vector<std::string>& v) {
          std::string r;
          for (const auto& x : v) r += (r.empty() ? "" : ",") + x;
          return r.empty() ? std::string("-") : r;
        };
        cell(n.label, 22), cell(std::string(to_string(p)), 10),
            cell(std::string(to_string(m)), 10), cell(std::to_string(s.inconsistency_count), 7),
            cell(std::to_string(s.percentage) + "%", 9);
        table << join(s.evasion_targets) << " / " << join(s.insertion_targets) << "\n";
      }
  if (a.format == "json") {
    out << json{{"hosts", plan.hosts}, {"rows", rows}}.dump(2) << "\n";
  } else {
    out << "hosts: ";
    for (std::size_t i = 0; i < plan.hosts.size(); ++i) out << (i ? ", " : "") << plan.hosts[i];
    out << "\n" << table.str();
  }
  return kExitOk;
}

struct ProfilesArgs {
  std::string show, format = "table";
};

inline int cmd_profiles(const ProfilesArgs& a, std::ostream& out) {
  auto reg = make_registry();
  if (!a.show.empty()) {
    out << profile_to_json(reg.resolve(a.show)).dump(2) << "\n";
    return kExitOk;
  }
  json arr = json::array();
  for (const auto& p : reg.profiles()) {
    json combos = json::array();
    for (auto [pr, m] : p.table.combinations())
      combos.push_back(std::string(to_string(pr)) + "/" + std::string(to_string(m)));
    arr.push_back({{"name", p.name}, {"aliases", p.aliases}, {"combinations", combos}});
    if (a.format == "json") continue;
    out << p.name;
    if (!p.aliases.empty()) {
      out << " (";
      for (std::size_t i = 0; i < p.aliases.size(); ++i) out << (i ? ", " : "") << p.aliases[i];
      out << ")";
    }
    out << "\n   ";
    for (const auto& c : combos) out << " " << c.get<std::string>();
    out << "\n";
  }
  if (a.format == "json") out << arr.dump(2) << "\n";
  return kExitOk;
}

/// Parses `args` (without the program name) and runs one subcommand.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Overlap test-case generator, reassembly simulator and differential analyzer",
               "overlap-forge"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  const std::vector<std::string> formats{"table", "json"};

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write test cases, pcaps and a manifest");
  g->add_option("--protocol", gen.protocols, "ipv4, ipv6 or tcp (repeatable; default all)");
  g->add_option("--mode", gen.modes, "single or multiple (repeatable; default both)");
  g->add_option("--relation", gen.relation, "one overlapping relation (implies single mode)");
  g->add_option("--out", gen.out, "output directory (default ./out)");
  g->add_option("--campaign", gen.campaign, "campaign JSON file");
  g->add_flag("--hexdump", gen.hexdump, "also write a hex dump per case");
  gen.net.add_to(*g);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "reassemble a test case under a policy");
  s->add_option("testcase", sim.testcase, "test case JSON")->required();
  s->add_option("--policy", sim.policy, "profile name, alias or file")->required();
  s->add_option("--expect", sim.expect, "assert the outcome")
      ->check(CLI::IsMember({"old", "new", "ignore"}));
  s->add_option("--format", sim.format)->check(CLI::IsMember(formats));
  s->add_option("--ignore-semantics", sim.ignore, "abort (default) or drop-new")
      ->check(CLI::IsMember({"abort", "drop-new"}));

  InferArgs inf;
  auto* i = app.add_subcommand("infer", "recover a policy table from observations");
  i->add_option("observations", inf.observations, "observations JSON");
  i->add_option("--pcap", inf.pcap, "capture of echo replies");
  i->add_option("--protocol", inf.protocol, "protocol of the capture");
  i->add_option("--mode", inf.mode)->check(CLI::IsMember({"single", "multiple"}));
  i->add_option("--verify", inf.verify, "compare against a profile");
  i->add_option("--name", inf.name, "name of the inferred table");
  i->add_option("--out", inf.out, "write the table here instead of stdout");
  inf.net.add_to(*i);

  ObserveArgs obs;
  auto* o = app.add_subcommand("observe", "synthesize observations for a profile");
  o->add_option("--policy", obs.policy)->required();
  o->add_option("--protocol", obs.protocol)->required();
  o->add_option("--mode", obs.mode)->check(CLI::IsMember({"single", "multiple"}));
  o->add_option("--out", obs.out, "observations JSON path (default stdout)");
  o->add_option("--pcap", obs.pcap, "also write the echo replies as a capture");
  obs.net.add_to(*o);

  DiffArgs dif;
  auto* d = app.add_subcommand("diff", "compare a host policy with a NIDS policy");
  d->add_option("host", dif.host)->required();
  d->add_option("nids", dif.nids)->required();
  d->add_option("--protocol", dif.protocol)->required();
  d->add_option("--mode", dif.mode)->check(CLI::IsMember({"single", "multiple"}));
  d->add_option("--format", dif.format)->check(CLI::IsMember(formats));

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "aggregate inconsistencies over several hosts");
  r->add_option("--campaign", rep.campaign, "campaign JSON file");
  r->add_option("--host", rep.hosts, "host profile (repeatable)");
  r->add_option("--nids", rep.nids, "NIDS profile (one for all hosts, or one per host)");
  r->add_option("--protocol", rep.protocols, "restrict protocols (repeatable)");
  r->add_option("--mode", rep.mode)->check(CLI::IsMember({"single", "multiple"}));
  r->add_option("--format", rep.format)->check(CLI::IsMember(formats));

  ProfilesArgs prof;
  auto* pr = app.add_subcommand("profiles", "list known policy profiles");
  pr->add_option("--show", prof.show, "print one profile as JSON");
  pr->add_option("--format", prof.format)->check(CLI::IsMember(formats));

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*s) return cmd_simulate(sim, out, err);
    if (*i) return cmd_infer(inf, out, err);
    if (*o) return cmd_observe(obs, out);
    if (*d) return cmd_diff(dif, out);
    if (*r) return cmd_report(rep, out);
    if (*pr) return cmd_profiles(prof, out);
  } catch (const AnomalousObservation& e) {
    err << e.what() << "\n";
    return kExitFinding;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace overlap_forge::cli
