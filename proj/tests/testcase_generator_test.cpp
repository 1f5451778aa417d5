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

#include "overlap_forge/testcase_generator.hpp"

#include <set>

#include "gtest/gtest.h"
#include "overlap_forge/checksum.hpp"

namespace overlap_forge {
namespace {

using R = AllenRelation;

std::string str(const Bytes& b) { return std::string(b.begin(), b.end()); }

TEST(CanonicalGeometry, Examples) {
  auto g = [](R r) { return canonical_geometry(r, 8, 8); };
  EXPECT_EQ(g(R::kEq), std::make_pair(ByteInterval(8, 24), ByteInterval(8, 24)));
  EXPECT_EQ(g(R::kO), std::make_pair(ByteInterval(8, 24), ByteInterval(16, 32)));
  EXPECT_EQ(g(R::kOi), std::make_pair(ByteInterval(16, 32), ByteInterval(8, 24)));
  EXPECT_EQ(g(R::kD), std::make_pair(ByteInterval(16, 24), ByteInterval(8, 32)));
  EXPECT_EQ(g(R::kFi), std::make_pair(ByteInterval(8, 24), ByteInterval(16, 24)));
}

TEST(CanonicalGeometry, RoundTripsThroughRelate) {
  for (std::size_t unit : {2u, 4u, 8u, 16u})
    for (std::size_t base : {unit, 2 * unit, 5 * unit})
      for (auto r : kOverlappingRelations) {
        auto [x, y] = canonical_geometry(r, unit, base);
        EXPECT_EQ(relate(x, y), r);
        for (auto iv : {x, y}) {
          EXPECT_EQ(iv.start() % unit, 0u);
          EXPECT_EQ(iv.end() % unit, 0u);
          EXPECT_GE(iv.start(), base);
        }
      }
}

TEST(CanonicalGeometry, RejectsNonOverlapping) {
  for (auto r : {R::kM, R::kMi, R::kB, R::kBi}) {
    try {
      canonical_geometry(r, 8, 8);
      FAIL();
    } catch (const Error& e) {
      EXPECT_STREQ(e.what(), "relation has no overlap test case");
    }
  }
  EXPECT_THROW(canonical_geometry(R::kO, 8, 4), Error);
}

TEST(MakePattern, Examples) {
  auto p8 = make_pattern(8);
  EXPECT_EQ(str(p8.old_marker), "AABBCCDD");
  EXPECT_EQ(str(p8.new_marker), "DDCCBBAA");
  auto p4 = make_pattern(4);
  EXPECT_EQ(str(p4.old_marker), "AABB");
  EXPECT_EQ(str(p4.new_marker), "BBAA");
  EXPECT_EQ(internet_checksum(to_bytes("AABBCCDD")), internet_checksum(to_bytes("DDCCBBAA")));
}

TEST(MakePattern, Invariants) {
  for (std::size_t len = 4; len <= 64; len += 2) {
    auto p = make_pattern(len);
    EXPECT_EQ(p.old_marker.size(), len);
    EXPECT_EQ(p.new_marker.size(), len);
    EXPECT_NE(p.old_marker, p.new_marker);
    EXPECT_EQ(ones_complement_sum(p.old_marker), ones_complement_sum(p.new_marker));
  }
  EXPECT_THROW(make_pattern(7), Error);
  EXPECT_THROW(make_pattern(2), Error);
  EXPECT_THROW(make_pattern(8, "A"), Error);
}

TEST(BuildSingle, Ipv4Eq) {
  auto tc = build_single(Protocol::kIpv4, R::kEq);
  const auto& cs = tc.sequence.chunks;
  ASSERT_EQ(cs.size(), 4u);
  EXPECT_TRUE(cs[0].has_tag(kTagHeader));
  EXPECT_EQ(cs[0].interval, ByteInterval(0, 8));
  EXPECT_EQ(cs[1].interval, ByteInterval(8, 24));
  EXPECT_EQ(cs[2].interval, ByteInterval(8, 24));
  EXPECT_EQ(cs[3].interval, ByteInterval(24, 32));
  EXPECT_TRUE(cs[3].has_tag(kTagLastFragment));
  auto old_p = str(*tc.expected(Outcome::kOld));
  auto new_p = str(*tc.expected(Outcome::kNew));
  EXPECT_EQ(old_p.substr(8, 16), "AABBCCDDAABBCCDD");
  EXPECT_EQ(new_p.substr(8, 16), "DDCCBBAADDCCBBAA");
  EXPECT_FALSE(tc.expected(Outcome::kIgnore).has_value());
}

TEST(BuildSingle, TcpOverlap) {
  auto tc = build_single(Protocol::kTcp, R::kO);
  const auto& cs = tc.sequence.chunks;
  ASSERT_EQ(cs.size(), 3u);
  EXPECT_EQ(cs[0].interval, ByteInterval(8, 24));
  EXPECT_EQ(cs[1].interval, ByteInterval(16, 32));
  EXPECT_EQ(cs[2].interval, ByteInterval(0, 8));
  EXPECT_TRUE(cs[2].has_tag(kTagTrigger));
}

TEST(BuildSingle, RejectsNonOverlapping) {
  EXPECT_THROW(build_single(Protocol::kIpv4, R::kB), Error);
}

TEST(BuildSingle, PropertiesForAllCases) {
  for (auto p : kAllProtocols)
    for (auto r : kOverlappingRelations) {
      auto tc = build_single(p, r);
      ASSERT_EQ(tc.relations_under_test, std::vector<R>{r});
      ASSERT_EQ(tc.regions.size(), 1u);
      int overlap_chunks = 0;
      for (const auto& c : tc.sequence.chunks) {
        overlap_chunks += c.has_tag(kTagOverlap);
        if (is_ip(p)) {
          EXPECT_EQ(c.interval.start() % 8, 0u);
          EXPECT_EQ(c.interval.end() % 8, 0u);
        }
      }
      EXPECT_EQ(overlap_chunks, 2);
      // Exactly one overlapping pair, with the requested relation.
      int overlapping_pairs = 0;
      for (const auto& pr : relation_pairs(tc.sequence))
        if (is_overlapping(pr.relation)) {
          ++overlapping_pairs;
          EXPECT_EQ(pr.relation, r);
        }
      EXPECT_EQ(overlapping_pairs, 1);

      const auto& old_p = *tc.expected(Outcome::kOld);
      const auto& new_p = *tc.expected(Outcome::kNew);
      EXPECT_EQ(internet_checksum(old_p), internet_checksum(new_p));
      const auto& region = tc.regions.front().interval;
      for (std::size_t i = 0; i < old_p.size(); ++i) {
        bool in_region = i >= region.start() && i < region.end();
        EXPECT_EQ(old_p[i] != new_p[i], in_region) << "byte " << i;
      }

      if (is_ip(p)) {
        // Only the last-sent, rightmost-finishing fragment clears MF.
        std::size_t last = 0, max_end = 0;
        for (const auto& c : tc.sequence.chunks) {
          last += c.has_tag(kTagLastFragment);
          max_end = std::max(max_end, c.interval.end());
        }
        EXPECT_EQ(last, 1u);
        EXPECT_TRUE(tc.sequence.chunks.back().has_tag(kTagLastFragment));
        EXPECT_EQ(tc.sequence.chunks.back().interval.end(), max_end);
      } else {
        const auto& trig = tc.sequence.chunks.back();
        EXPECT_EQ(trig.interval.start(), 0u);
        EXPECT_TRUE(trig.has_tag(kTagTrigger));
      }
    }
}

TEST(BuildMultiple, CoversAllNineRelations) {
  for (auto p : kAllProtocols) {
    auto tc = build_multiple(p);
    EXPECT_EQ(tc.mode, Mode::kMultiple);
    EXPECT_EQ(tc.layout_version, kMultipleLayoutVersion);
    EXPECT_EQ(tc.regions.size(), 9u);
    std::set<R> seen;
    for (const auto& pr : relation_pairs(tc.sequence))
      if (is_overlapping(pr.relation)) seen.insert(pr.relation);
    EXPECT_EQ(seen.size(), 9u);
    for (const auto& c : tc.sequence.chunks) {
      EXPECT_EQ(c.interval.start() % 8, 0u);
      EXPECT_EQ(c.interval.end() % 8, 0u);
    }
    EXPECT_EQ(internet_checksum(*tc.expected(Outcome::kOld)),
              internet_checksum(*tc.expected(Outcome::kNew)));
  }
}

TEST(BuildMultiple, RegionsAreDisjoint) {
  auto tc = build_multiple(Protocol::kIpv4);
  for (std::size_t i = 1; i < tc.regions.size(); ++i)
    EXPECT_LT(tc.regions[i - 1].interval.end(), tc.regions[i].interval.start());
}

TEST(BuildSingle, TcpUnitFourIsSupported) {
  GeneratorConfig cfg;
  cfg.unit = 4;
  auto tc = build_single(Protocol::kTcp, R::kO, cfg);
  EXPECT_EQ(tc.sequence.chunks[0].interval, ByteInterval(8, 16));
  EXPECT_EQ(tc.sequence.chunks[1].interval, ByteInterval(12, 20));
  EXPECT_THROW(build_single(Protocol::kIpv4, R::kO, cfg), Error);
}

TEST(TestCaseJson, RoundTrip) {
  for (auto tc : {build_single(Protocol::kIpv6, R::kDi), build_multiple(Protocol::kTcp)}) {
    auto back = testcase_from_json(testcase_to_json(tc));
    EXPECT_EQ(back.sequence.chunks, tc.sequence.chunks);
    EXPECT_EQ(back.regions, tc.regions);
    EXPECT_EQ(back.expected_markers, tc.expected_markers);
    EXPECT_EQ(back.relations_under_test, tc.relations_under_test);
    EXPECT_EQ(back.mode, tc.mode);
    EXPECT_EQ(back.config, tc.config);
    EXPECT_EQ(back.layout_version, tc.layout_version);
  }
}

}  // namespace
}  // namespace overlap_forge
