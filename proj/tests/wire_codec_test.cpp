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

#include "overlap_forge/wire_codec.hpp"

#include <sstream>

#include "gtest/gtest.h"
#include "overlap_forge/policy_registry.hpp"

namespace overlap_forge {
namespace {

using R = AllenRelation;

// Textbook checksum, written independently of the library.
std::uint16_t oracle_checksum(const Bytes& b) {
  std::uint32_t s = 0;
  for (std::size_t i = 0; i < b.size(); i += 2) {
    std::uint32_t w = b[i] << 8;
    if (i + 1 < b.size()) w |= b[i + 1];
    s += w;
    s = (s & 0xffff) + (s >> 16);
  }
  return static_cast<std::uint16_t>(~s & 0xffff);
}

TEST(Checksum, KnownValues) {
  EXPECT_EQ(internet_checksum(Bytes{}), 0xffff);
  // RFC 1071 example words: 0001 f203 f4f5 f6f7 -> sum ddf2.
  Bytes rfc{0x00, 0x01, 0xf2, 0x03, 0xf4, 0xf5, 0xf6, 0xf7};
  EXPECT_EQ(ones_complement_sum(rfc), 0xddf2);
  EXPECT_EQ(internet_checksum(rfc), 0x220d);
}

TEST(Checksum, AgreesWithOracle) {
  std::uint32_t x = 7;
  for (std::size_t len = 0; len < 64; ++len) {
    Bytes b(len);
    for (auto& v : b) v = static_cast<std::uint8_t>((x = x * 1103515245u + 12345u) >> 16);
    EXPECT_EQ(internet_checksum(b), oracle_checksum(b)) << len;
    // Appending the checksum makes the whole sum verify (even lengths).
    if (len % 2 == 0) {
      auto c = internet_checksum(b);
      b.push_back(c >> 8);
      b.push_back(c & 0xff);
      EXPECT_EQ(ones_complement_sum(b), 0xffff);
    }
  }
}

TEST(Codec, RoundTripsEveryCase) {
  NetConfig cfg;
  for (auto p : kAllProtocols) {
    std::vector<TestCase> cases;
    for (auto r : kOverlappingRelations) cases.push_back(build_single(p, r));
    cases.push_back(build_multiple(p));
    for (const auto& tc : cases) {
      auto frames = encode(tc, cfg);
      auto dec = decode(frames, p);
      EXPECT_TRUE(dec.checksums_ok);
      ASSERT_EQ(dec.sequence.chunks.size(), tc.sequence.chunks.size());
      for (std::size_t i = 0; i < tc.sequence.chunks.size(); ++i) {
        const auto& a = tc.sequence.chunks[i];
        const auto& b = dec.sequence.chunks[i];
        EXPECT_EQ(a.interval, b.interval);
        EXPECT_EQ(a.payload, b.payload);
        EXPECT_EQ(a.arrival_index, b.arrival_index);
      }
    }
  }
}

TEST(Codec, Ipv4FragmentFlags) {
  auto tc = build_single(Protocol::kIpv4, R::kEq);
  auto frames = encode(tc, NetConfig{});
  ASSERT_EQ(frames.size(), tc.sequence.chunks.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    auto p = parse_packet(frames[i]);
    const auto& c = tc.sequence.chunks[i];
    EXPECT_EQ(p.upper_protocol, kProtoIcmp);
    EXPECT_TRUE(p.header_checksum_ok);
    EXPECT_EQ(p.fragment_offset, c.interval.start());
    EXPECT_EQ(p.more_fragments, !c.has_tag(kTagLastFragment));
    EXPECT_EQ(p.identification, 0x4f46u);
    EXPECT_EQ(p.payload.size(), c.interval.length());
  }
  for (std::size_t i = 1; i < frames.size(); ++i)
    EXPECT_EQ(frames[i].timestamp_us - frames[i - 1].timestamp_us, 1000u);
}

TEST(Codec, Ipv6FragmentHeaderChain) {
  auto tc = build_single(Protocol::kIpv6, R::kO);
  for (const auto& f : encode(tc, NetConfig{})) {
    ASSERT_GT(f.data.size(), kEthHeader + kIpv6Header);
    EXPECT_EQ(f.data[kEthHeader + 6], kProtoFragment);
    EXPECT_EQ(f.data[kEthHeader + kIpv6Header], kProtoIcmpv6);
    auto p = parse_packet(f);
    EXPECT_TRUE(p.fragmented);
  }
}

TEST(Codec, EchoChecksumNeutralAcrossOutcomes) {
  NetConfig cfg;
  for (auto p : {Protocol::kIpv4, Protocol::kIpv6})
    for (auto r : kOverlappingRelations) {
      auto tc = build_single(p, r);
      auto old_msg = echo_message(tc, Outcome::kOld, cfg);
      auto new_msg = echo_message(tc, Outcome::kNew, cfg);
      EXPECT_NE(old_msg, new_msg);
      EXPECT_EQ(detail::get16(old_msg, 2), detail::get16(new_msg, 2));
      EXPECT_TRUE(verify_echo_checksum(old_msg, p, cfg));
      EXPECT_TRUE(verify_echo_checksum(new_msg, p, cfg));
    }
}

TEST(Codec, TcpHandshakeAndSequenceNumbers) {
  NetConfig cfg;
  auto tc = build_single(Protocol::kTcp, R::kS);
  auto frames = encode(tc, cfg);
  ASSERT_EQ(frames.size(), 3 + tc.sequence.chunks.size());
  std::vector<std::uint8_t> flags;
  for (const auto& f : frames) {
    auto p = parse_packet(f);
    EXPECT_EQ(p.upper_protocol, kProtoTcp);
    flags.push_back(p.payload[13]);
  }
  EXPECT_EQ(flags[0], kTcpSyn);
  EXPECT_EQ(flags[1], kTcpSyn | kTcpAck);
  EXPECT_EQ(flags[2], kTcpAck);
  for (std::size_t i = 0; i < tc.sequence.chunks.size(); ++i) {
    auto p = parse_packet(frames[3 + i]);
    auto seq = detail::get32(p.payload, 4);
    EXPECT_EQ(seq - (cfg.isn + 1), tc.sequence.chunks[i].interval.start());
  }
  auto dec = decode(frames, Protocol::kTcp);
  EXPECT_EQ(dec.handshake_frames, 3u);
  EXPECT_EQ(dec.client_isn, cfg.isn);
  EXPECT_TRUE(dec.checksums_ok);
}

TEST(Codec, CorruptedTcpChecksumDetected) {
  auto tc = build_single(Protocol::kTcp, R::kO);
  auto frames = encode(tc, NetConfig{});
  frames.back().data.back() ^= 0x01;
  EXPECT_FALSE(decode(frames, Protocol::kTcp).checksums_ok);
}

TEST(Pcap, RoundTrip) {
  auto frames = encode(build_multiple(Protocol::kIpv6), NetConfig{});
  std::stringstream ss;
  write_pcap(frames, ss);
  auto back = read_pcap(ss);
  ASSERT_EQ(back.size(), frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(back[i].data, frames[i].data);
    EXPECT_EQ(back[i].timestamp_us, frames[i].timestamp_us);
  }
}

TEST(Pcap, EmptyCaptureIsGlobalHeaderOnly) {
  std::stringstream ss;
  write_pcap(std::vector<Frame>{}, ss);
  auto s = ss.str();
  ASSERT_EQ(s.size(), 24u);
  EXPECT_EQ(static_cast<unsigned char>(s[0]), 0xd4);
  EXPECT_EQ(static_cast<unsigned char>(s[3]), 0xa1);
  EXPECT_EQ(static_cast<unsigned char>(s[20]), 1);
  EXPECT_TRUE(read_pcap(ss).empty());
}

// Swap every header field of a little-endian capture to big-endian.
std::string to_big_endian(const std::string& le) {
  std::string be = le;
  auto swap = [&](std::size_t at, std::size_t n) { std::reverse(be.begin() + at, be.begin() + at + n); };
  swap(0, 4);
  swap(4, 2);
  swap(6, 2);
  for (std::size_t at : {8u, 12u, 16u, 20u}) swap(at, 4);
  std::size_t pos = 24;
  while (pos < le.size()) {
    std::uint32_t incl = 0;
    for (int i = 3; i >= 0; --i) incl = incl << 8 | static_cast<unsigned char>(le[pos + 8 + i]);
    for (std::size_t k = 0; k < 4; ++k) swap(pos + 4 * k, 4);
    pos += 16 + incl;
  }
  return be;
}

TEST(Pcap, ReadsBigEndianCaptures) {
  auto frames = encode(build_single(Protocol::kIpv4, R::kD), NetConfig{});
  std::stringstream le;
  write_pcap(frames, le);
  std::stringstream be(to_big_endian(le.str()));
  auto back = read_pcap(be);
  ASSERT_EQ(back.size(), frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(back[i].data, frames[i].data);
    EXPECT_EQ(back[i].timestamp_us, frames[i].timestamp_us);
  }
}

TEST(Pcap, RejectsBadInput) {
  auto frames = encode(build_single(Protocol::kIpv4, R::kD), NetConfig{});
  std::stringstream ss;
  write_pcap(frames, ss);
  auto s = ss.str();
  std::stringstream truncated(s.substr(0, s.size() - 3));
  EXPECT_THROW(read_pcap(truncated), PcapError);
  std::string bad = s;
  bad[0] = 0x00;
  std::stringstream bad_magic(bad);
  EXPECT_THROW(read_pcap(bad_magic), PcapError);
  std::stringstream tiny(s.substr(0, 10));
  EXPECT_THROW(read_pcap(tiny), PcapError);
}

TEST(Replies, RoundTripThroughReplyFrames) {
  NetConfig cfg;
  for (auto p : kAllProtocols) {
    std::map<std::size_t, Bytes> outputs;
    auto linux_table = lookup("linux-6.1", p, Mode::kSingle);
    for (auto r : kOverlappingRelations) {
      auto tc = build_single(p, r);
      auto res = predict_outcome_payload(tc, linux_table);
      if (res.completed()) outputs[case_index(tc)] = *res.payload;
    }
    // Request frames mixed in must be ignored.
    auto frames = encode(build_single(p, R::kO), net_config_for(cfg, 4));
    auto replies = encode_replies(p, outputs, cfg);
    frames.insert(frames.end(), replies.begin(), replies.end());
    EXPECT_EQ(extract_replies(frames, p, cfg), outputs) << to_string(p);
  }
}

TEST(Addresses, Parse) {
  EXPECT_EQ(parse_ipv4("10.0.0.7"), (Ipv4Address{10, 0, 0, 7}));
  EXPECT_EQ(parse_ipv6("fd00::2"), NetConfig{}.dst_ip6);
  EXPECT_EQ(parse_mac("02:00:00:00:00:01"), NetConfig{}.src_mac);
  EXPECT_THROW(parse_ipv4("10.0.0"), CodecError);
  EXPECT_THROW(parse_ipv6("zz::"), CodecError);
  EXPECT_THROW(parse_mac("02:00:00"), CodecError);
}

}  // namespace
}  // namespace overlap_forge
