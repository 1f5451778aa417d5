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

#include "overlap_forge/reassembly_engine.hpp"

#include "gtest/gtest.h"
#include "overlap_forge/checksum.hpp"
#include "overlap_forge/policy_registry.hpp"

namespace overlap_forge {
namespace {

using R = AllenRelation;

PolicyTable single_entry(Protocol p, R r, Outcome o, Outcome rest = Outcome::kOld) {
  auto t = PolicyTable::constant(rest, p, Mode::kSingle);
  t.set(p, Mode::kSingle, r, o);
  return t;
}

std::string region_text(const ReassemblyResult& res, std::size_t s, std::size_t e) {
  return std::string(res.payload->begin() + s, res.payload->begin() + e);
}

TEST(Reassemble, EqNewTakesSecondMarker) {
  auto tc = build_single(Protocol::kIpv4, R::kEq);
  auto res = reassemble(tc.sequence, single_entry(Protocol::kIpv4, R::kEq, Outcome::kNew),
                        Mode::kSingle);
  ASSERT_TRUE(res.completed());
  EXPECT_EQ(region_text(res, 8, 24), "DDCCBBAADDCCBBAA");
}

TEST(Reassemble, FreebsdIpv4SingleFiIsIgnored) {
  auto tc = build_single(Protocol::kIpv4, R::kFi);
  auto res = reassemble(tc.sequence, lookup("freebsd-14.1", Protocol::kIpv4, Mode::kSingle),
                        Mode::kSingle);
  EXPECT_EQ(res.status, ReassemblyStatus::kIgnored);
  EXPECT_FALSE(res.payload.has_value());
}

TEST(Reassemble, FreebsdIpv4SingleOiTakesNew) {
  auto tc = build_single(Protocol::kIpv4, R::kOi);
  auto res = reassemble(tc.sequence, lookup("freebsd-14.1", Protocol::kIpv4, Mode::kSingle),
                        Mode::kSingle);
  ASSERT_TRUE(res.completed());
  // First chunk is [16,32), second [8,24); overlap [16,24).
  EXPECT_EQ(region_text(res, 16, 24), "DDCCBBAA");
  EXPECT_EQ(region_text(res, 24, 32), "XXXXXXXX");
  for (std::size_t i = 24; i < 32; ++i) EXPECT_EQ(res.provenance[i], 1u);
  for (std::size_t i = 16; i < 24; ++i) EXPECT_EQ(res.provenance[i], 2u);
  ASSERT_EQ(res.resolution_log.size(), 1u);
  EXPECT_EQ(res.resolution_log[0].relation, R::kOi);
  EXPECT_EQ(res.resolution_log[0].region, ByteInterval(16, 24));
  EXPECT_EQ(res.resolution_log[0].outcome, Outcome::kNew);
}

TEST(Reassemble, MissingLastFragmentNeverCompletes) {
  auto tc = build_single(Protocol::kIpv4, R::kO);
  for (auto& c : tc.sequence.chunks) c.tags.clear();
  for (auto o : {Outcome::kOld, Outcome::kNew}) {
    auto res = reassemble(tc.sequence, PolicyTable::constant(o, Protocol::kIpv4, Mode::kSingle),
                          Mode::kSingle);
    EXPECT_FALSE(res.completed());
    EXPECT_EQ(res.status, ReassemblyStatus::kIncomplete);
  }
}

TEST(Reassemble, TcpWithoutTriggerIsIncomplete) {
  auto tc = build_single(Protocol::kTcp, R::kS);
  tc.sequence.chunks.pop_back();
  auto res = reassemble(tc.sequence, PolicyTable::constant(Outcome::kOld, Protocol::kTcp,
                                                           Mode::kSingle),
                        Mode::kSingle);
  EXPECT_EQ(res.status, ReassemblyStatus::kIncomplete);
}

TEST(Reassemble, Errors) {
  auto tc = build_single(Protocol::kIpv4, R::kO);
  auto gap = PolicyTable::constant(Outcome::kOld, Protocol::kIpv4, Mode::kSingle);
  PolicyTable partial("partial");
  for (auto r : kOverlappingRelations)
    if (r != R::kEq) partial.set(Protocol::kIpv4, Mode::kSingle, r, Outcome::kOld);
  try {
    reassemble(tc.sequence, partial, Mode::kSingle);
    FAIL();
  } catch (const PolicyGapError& e) {
    EXPECT_STREQ(e.what(), "policy gap at (ipv4, single, Eq)");
  }
  EXPECT_THROW(reassemble(tc.sequence, gap, Mode::kMultiple), PolicyGapError);
  ChunkSequence empty{Protocol::kIpv4, {}, {}};
  EXPECT_THROW(reassemble(empty, gap, Mode::kSingle), Error);
}

TEST(PredictOutcome, ConstantPoliciesMatchExpectedMarkers) {
  for (auto p : kAllProtocols)
    for (auto r : kOverlappingRelations) {
      auto tc = build_single(p, r);
      for (auto o : kAllOutcomes) {
        auto res = predict_outcome_payload(tc, PolicyTable::constant(o, p, Mode::kSingle));
        if (o == Outcome::kIgnore) {
          EXPECT_EQ(res.status, ReassemblyStatus::kIgnored);
        } else {
          ASSERT_TRUE(res.completed());
          EXPECT_EQ(res.payload, tc.expected(o));
        }
      }
    }
}

TEST(PredictOutcome, OracleAgreementPerEntry) {
  // Only the entry under test may influence the outcome.
  for (auto p : kAllProtocols)
    for (auto r : kOverlappingRelations) {
      auto tc = build_single(p, r);
      for (auto o : kAllOutcomes)
        for (auto rest : kAllOutcomes) {
          auto res = predict_outcome_payload(tc, single_entry(p, r, o, rest));
          if (o == Outcome::kIgnore)
            EXPECT_EQ(res.status, ReassemblyStatus::kIgnored);
          else
            EXPECT_EQ(res.payload, tc.expected(o));
        }
    }
}

TEST(PredictOutcome, MultipleModeResolvesEachRegion) {
  auto tc = build_multiple(Protocol::kIpv4);
  auto policy = lookup("sunos-5.11", Protocol::kIpv4, Mode::kMultiple);
  auto res = predict_outcome_payload(tc, policy);
  ASSERT_TRUE(res.completed());
  for (const auto& region : tc.regions) {
    Bytes seen(res.payload->begin() + region.interval.start(),
               res.payload->begin() + region.interval.end());
    auto o = policy.outcome(Protocol::kIpv4, Mode::kMultiple, region.relation);
    EXPECT_EQ(seen, o == Outcome::kOld ? region.old_marker : region.new_marker)
        << to_string(region.relation);
  }
  EXPECT_EQ(res.resolution_log.size(), 9u);
  auto windows = lookup("windows-21h2", Protocol::kIpv4, Mode::kMultiple);
  EXPECT_EQ(predict_outcome_payload(tc, windows).status, ReassemblyStatus::kIgnored);
}

TEST(Reassemble, Determinism) {
  auto tc = build_multiple(Protocol::kTcp);
  auto policy = lookup("linux-6.1", Protocol::kTcp, Mode::kMultiple);
  EXPECT_EQ(predict_outcome_payload(tc, policy), predict_outcome_payload(tc, policy));
}

TEST(Reassemble, ByteConservationAndChecksumInvariance) {
  for (auto p : kAllProtocols)
    for (auto r : kOverlappingRelations) {
      auto tc = build_single(p, r);
      auto old_res = predict_outcome_payload(tc, PolicyTable::constant(Outcome::kOld, p, Mode::kSingle));
      auto new_res = predict_outcome_payload(tc, PolicyTable::constant(Outcome::kNew, p, Mode::kSingle));
      EXPECT_EQ(internet_checksum(*old_res.payload), internet_checksum(*new_res.payload));
      for (const auto* res : {&old_res, &new_res}) {
        ASSERT_EQ(res->provenance.size(), res->payload->size());
        for (std::size_t i = 0; i < res->payload->size(); ++i) {
          const auto& c = tc.sequence.chunks.at(res->provenance[i]);
          ASSERT_TRUE(i >= c.interval.start() && i < c.interval.end());
          EXPECT_EQ((*res->payload)[i], c.payload[i - c.interval.start()]);
        }
      }
    }
}

TEST(Reassemble, DropNewSemanticsKeepsOldData) {
  auto tc = build_single(Protocol::kIpv4, R::kFi);
  auto res = predict_outcome_payload(tc, lookup("freebsd-14.1", Protocol::kIpv4, Mode::kSingle),
                                     IgnoreSemantics::kDropNew);
  ASSERT_TRUE(res.completed());
  EXPECT_EQ(res.payload, tc.expected(Outcome::kOld));
}

TEST(Reassemble, NewChunkOverlappingTwoBufferedChunks) {
  // [0,8) and [8,16) buffered; [4,12) overlaps both (O with the first, Oi
  // with the second) and each intersection is resolved on its own.
  ChunkSequence seq{Protocol::kTcp,
                    {{ByteInterval(0, 8), Bytes(8, 'a'), 0, {}},
                     {ByteInterval(8, 16), Bytes(8, 'b'), 1, {}},
                     {ByteInterval(4, 12), Bytes(8, 'c'), 2, {}}},
                    {}};
  auto policy = PolicyTable::constant(Outcome::kOld, Protocol::kTcp, Mode::kSingle);
  policy.set(Protocol::kTcp, Mode::kSingle, R::kO, Outcome::kNew);
  auto res = reassemble(seq, policy, Mode::kSingle);
  ASSERT_TRUE(res.completed());
  EXPECT_EQ(std::string(res.payload->begin(), res.payload->end()), "aaaaccccbbbbbbbb");
  ASSERT_EQ(res.resolution_log.size(), 2u);
  EXPECT_EQ(res.resolution_log[0].relation, R::kO);
  EXPECT_EQ(res.resolution_log[0].outcome, Outcome::kNew);
  EXPECT_EQ(res.resolution_log[1].relation, R::kOi);
  EXPECT_EQ(res.resolution_log[1].outcome, Outcome::kOld);
}

TEST(ResultJson, Shape) {
  auto tc = build_single(Protocol::kIpv4, R::kO);
  auto j = result_to_json(predict_outcome_payload(
      tc, PolicyTable::constant(Outcome::kNew, Protocol::kIpv4, Mode::kSingle)));
  EXPECT_EQ(j["status"], "completed");
  EXPECT_EQ(j["resolution_log"][0]["relation"], "O");
  EXPECT_EQ(j["resolution_log"][0]["start"], 16);
  EXPECT_EQ(j["resolution_log"][0]["end"], 24);
  EXPECT_EQ(j["resolution_log"][0]["outcome"], "new");
}

}  // namespace
}  // namespace overlap_forge
