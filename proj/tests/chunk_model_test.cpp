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

#include "overlap_forge/chunk_model.hpp"

#include <random>

#include "gtest/gtest.h"

namespace overlap_forge {
namespace {

Chunk chunk(std::size_t s, std::size_t e, std::size_t arrival) {
  return Chunk{ByteInterval(s, e), Bytes(e - s, 'X'), arrival, {}};
}

TEST(OverlapRegion, Intersections) {
  EXPECT_EQ(overlap_region(chunk(8, 24, 0), chunk(16, 32, 1)), ByteInterval(16, 24));
  EXPECT_FALSE(overlap_region(chunk(0, 8, 0), chunk(8, 16, 1)).has_value());
  EXPECT_EQ(overlap_region(chunk(8, 24, 0), chunk(8, 24, 1)), ByteInterval(8, 24));
}

TEST(RelationPairs, TwoChunks) {
  ChunkSequence seq{Protocol::kIpv4, {chunk(8, 24, 0), chunk(16, 32, 1)}, {}};
  EXPECT_EQ(relation_pairs(seq),
            (std::vector<RelationPair>{{0, 1, AllenRelation::kO}}));
  seq.chunks[1] = chunk(8, 24, 1);
  EXPECT_EQ(relation_pairs(seq),
            (std::vector<RelationPair>{{0, 1, AllenRelation::kEq}}));
}

TEST(RelationPairs, ContiguousChunksDoNotOverlap) {
  ChunkSequence seq{Protocol::kTcp, {chunk(0, 8, 0), chunk(16, 24, 1), chunk(8, 16, 2)}, {}};
  auto pairs = relation_pairs(seq);
  ASSERT_EQ(pairs.size(), 3u);
  for (const auto& p : pairs) EXPECT_FALSE(is_overlapping(p.relation));
}

TEST(RelationPairs, FewerThanTwoChunks) {
  ChunkSequence seq{Protocol::kTcp, {chunk(0, 8, 0)}, {}};
  EXPECT_TRUE(relation_pairs(seq).empty());
  seq.chunks.clear();
  EXPECT_TRUE(relation_pairs(seq).empty());
}

TEST(RelationPairs, CountAndSwapProperty) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pos(0, 40), len(1, 16), count(0, 8);
  for (int trial = 0; trial < 200; ++trial) {
    ChunkSequence seq{Protocol::kIpv4, {}, {}};
    std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
      auto s = pos(rng);
      seq.chunks.push_back(chunk(s, s + len(rng), i));
    }
    auto pairs = relation_pairs(seq);
    EXPECT_EQ(pairs.size(), n < 2 ? 0 : n * (n - 1) / 2);
    if (n < 2) continue;
    // Swap arrival of the first two chunks; their relation inverts.
    ChunkSequence swapped = seq;
    std::swap(swapped.chunks[0].interval, swapped.chunks[1].interval);
    std::swap(swapped.chunks[0].payload, swapped.chunks[1].payload);
    EXPECT_EQ(relation_pairs(swapped).front().relation, inverse(pairs.front().relation));
  }
}

TEST(ChunkSequence, ValidateRejectsBrokenInvariants) {
  ChunkSequence seq{Protocol::kIpv4, {chunk(0, 8, 1), chunk(8, 16, 1)}, {}};
  EXPECT_THROW(seq.validate(), SchemaError);
  seq.chunks[1].arrival_index = 2;
  EXPECT_NO_THROW(seq.validate());
  seq.chunks[0].payload.pop_back();
  EXPECT_THROW(seq.validate(), SchemaError);
}

TEST(ChunkSequence, JsonRoundTrip) {
  ChunkSequence seq{Protocol::kTcp, {chunk(0, 8, 0), chunk(4, 12, 1)}, {{"k", "v"}}};
  seq.chunks[1].tags = {"trigger"};
  seq.chunks[1].payload = {1, 2, 3, 4, 5, 6, 7, 0xff};
  auto j = sequence_to_json(seq);
  EXPECT_EQ(j["chunks"][1]["payload_hex"], "01020304050607ff");
  auto back = sequence_from_json(j);
  EXPECT_EQ(back.protocol, seq.protocol);
  EXPECT_EQ(back.chunks, seq.chunks);
  EXPECT_EQ(back.metadata, seq.metadata);
}

TEST(ChunkSequence, JsonErrors) {
  EXPECT_THROW(sequence_from_json({{"protocol", "ipx"}, {"chunks", nlohmann::json::array()}}),
               SchemaError);
  EXPECT_THROW(sequence_from_json({{"protocol", "tcp"}}), SchemaError);
  nlohmann::json bad_len = {{"protocol", "tcp"},
                            {"chunks", {{{"start", 0}, {"end", 4}, {"arrival", 0},
                                         {"payload_hex", "00"}}}}};
  EXPECT_THROW(sequence_from_json(bad_len), SchemaError);
}

}  // namespace
}  // namespace overlap_forge
