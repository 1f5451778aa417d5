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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "overlap_forge/common.hpp"
#include "overlap_forge/reassembly_engine.hpp"
#include "overlap_forge/testcase_generator.hpp"

namespace overlap_forge {

/// What a stack delivered for one test case: the reassembled payload in
/// generator byte space, or nothing at all.
struct Observation {
  AllenRelation test_relation;
  std::optional<Bytes> payload;

  static Observation no_output(AllenRelation r) { return {r, std::nullopt}; }
};

/// The observed bytes on an overlap region matched neither marker.
class AnomalousObservation : public Error {
 public:
  AnomalousObservation(AllenRelation r, ByteInterval region, Bytes observed)
      : Error("anomalous observation for " + std::string(to_string(r)) +
              " on [" + std::to_string(region.start()) + "," +
              std::to_string(region.end()) + "): " + to_hex(observed)),
        relation(r), region(region), observed(std::move(observed)) {}

  AllenRelation relation;
  ByteInterval region;
  Bytes observed;
};

inline Outcome infer_region(const OverlapRegion& region,
                            const std::optional<Bytes>& payload) {
  if (!payload) return Outcome::kIgnore;
  const auto& p = *payload;
  const auto s = region.interval.start(), e = region.interval.end();
  if (p.size() < e)
    throw AnomalousObservation(
        region.relation, region.interval,
        Bytes(p.begin() + std::min(s, p.size()), p.end()));
  Bytes seen(p.begin() + s, p.begin() + e);
  if (seen == region.old_marker) return Outcome::kOld;
  if (seen == region.new_marker) return Outcome::kNew;
  throw AnomalousObservation(region.relation, region.interval, std::move(seen));
}

inline Outcome infer_outcome(const TestCase& tc, const Observation& obs) {
  if (tc.mode != Mode::kSingle || tc.regions.size() != 1)
    throw Error("infer_outcome expects a single-mode test case");
  if (obs.test_relation != tc.relations_under_test.front())
    throw Error("observation relation " + std::string(to_string(obs.test_relation)) +
                " does not match test case relation " +
                std::string(to_string(tc.relations_under_test.front())));
  return infer_region(tc.regions.front(), obs.payload);
}

/// One outcome per region of a multiple-mode test case.
inline std::vector<std::pair<AllenRelation, Outcome>> infer_regions(
    const TestCase& tc, const std::optional<Bytes>& payload) {
  std::vector<std::pair<AllenRelation, Outcome>> out;
  for (const auto& r : tc.regions) out.emplace_back(r.relation, infer_region(r, payload));
  return out;
}

inline PolicyTable infer_policy(const std::map<AllenRelation, Observation>& observations,
                                const std::map<AllenRelation, TestCase>& tcs,
                                std::string name = "inferred") {
  std::optional<Protocol> protocol;
  PolicyTable table(std::move(name));
  for (auto r : kOverlappingRelations) {
    auto obs = observations.find(r);
    if (obs == observations.end())
      throw Error("missing relation " + std::string(to_string(r)) +
                  " in observations");
    auto tc = tcs.find(r);
    if (tc == tcs.end())
      throw Error("missing relation " + std::string(to_string(r)) + " in test cases");
    if (protocol && *protocol != tc->second.protocol)
      throw Error("test cases mix protocols");
    protocol = tc->second.protocol;
    table.set(*protocol, Mode::kSingle, r, infer_outcome(tc->second, obs->second));
  }
  return table;
}

inline PolicyTable infer_multiple_policy(const TestCase& tc,
                                         const std::optional<Bytes>& payload,
                                         std::string name = "inferred") {
  PolicyTable table(std::move(name));
  for (auto [r, o] : infer_regions(tc, payload)) table.set(tc.protocol, Mode::kMultiple, r, o);
  table.require_complete(tc.protocol, Mode::kMultiple);
  return table;
}

/// Observation produced by simulating `tc` under `policy`.
inline Observation observe(const TestCase& tc, const PolicyTable& policy) {
  auto res = predict_outcome_payload(tc, policy);
  return {tc.relations_under_test.front(),
          res.completed() ? res.payload : std::nullopt};
}

// JSON: {protocol, mode, observations: [{relation, payload_hex | null}]}

inline nlohmann::json observations_to_json(Protocol protocol,
                                           const std::map<AllenRelation, Observation>& obs) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto r : kOverlappingRelations) {
    auto it = obs.find(r);
    if (it == obs.end()) continue;
    arr.push_back({{"relation", to_string(r)},
                   {"payload_hex", it->second.payload
                                       ? nlohmann::json(to_hex(*it->second.payload))
                                       : nlohmann::json(nullptr)}});
  }
  return {{"protocol", to_string(protocol)}, {"mode", "single"}, {"observations", arr}};
}

inline std::pair<Protocol, std::map<AllenRelation, Observation>> observations_from_json(
    const nlohmann::json& j) {
  auto protocol = detail::require_protocol(j);
  std::map<AllenRelation, Observation> out;
  auto arr = detail::require<nlohmann::json>(j, "observations");
  if (!arr.is_array()) throw SchemaError("field 'observations' must be an array");
  for (const auto& e : arr) {
    auto r = detail::require_relation(e);
    if (!is_overlapping(r))
      throw SchemaError("observation relation must be overlapping");
    if (out.count(r)) throw SchemaError("duplicate observation for " + std::string(to_string(r)));
    Observation o{r, std::nullopt};
    if (e.contains("payload_hex") && !e["payload_hex"].is_null())
      o.payload = from_hex(detail::require<std::string>(e, "payload_hex"));
    out.emplace(r, std::move(o));
  }
  return {protocol, std::move(out)};
}

}  // namespace overlap_forge
