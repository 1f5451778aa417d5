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

#include <arpa/inet.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "overlap_forge/checksum.hpp"
#include "overlap_forge/chunk_model.hpp"
#include "overlap_forge/common.hpp"
#include "overlap_forge/interval_algebra.hpp"
#include "overlap_forge/pcap.hpp"
#include "overlap_forge/testcase_generator.hpp"

namespace overlap_forge {

class CodecError : public Error {
 public:
  using Error::Error;
};

using Ipv4Address = std::array<std::uint8_t, 4>;
using Ipv6Address = std::array<std::uint8_t, 16>;
using MacAddress = std::array<std::uint8_t, 6>;

inline Ipv4Address parse_ipv4(const std::string& s) {
  Ipv4Address a{};
  if (inet_pton(AF_INET, s.c_str(), a.data()) != 1)
    throw CodecError("invalid IPv4 address '" + s + "'");
  return a;
}

inline Ipv6Address parse_ipv6(const std::string& s) {
  Ipv6Address a{};
  if (inet_pton(AF_INET6, s.c_str(), a.data()) != 1)
    throw CodecError("invalid IPv6 address '" + s + "'");
  return a;
}

inline MacAddress parse_mac(const std::string& s) {
  MacAddress m{};
  unsigned v[6];
  char tail;
  if (std::sscanf(s.c_str(), "%x:%x:%x:%x:%x:%x%c", &v[0], &v[1], &v[2], &v[3],
                  &v[4], &v[5], &tail) != 6)
    throw CodecError("invalid MAC address '" + s + "'");
  for (int i = 0; i < 6; ++i) {
    if (v[i] > 0xff) throw CodecError("invalid MAC address '" + s + "'");
    m[i] = static_cast<std::uint8_t>(v[i]);
  }
  return m;
}

/// Addressing for encoded test cases. IPv4 addresses serve the ipv4 and tcp
/// cases, IPv6 addresses the ipv6 case.
struct NetConfig {
  Ipv4Address src_ip4{192, 168, 0, 1};
  Ipv4Address dst_ip4{192, 168, 0, 2};
  Ipv6Address src_ip6{0xfd, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
  Ipv6Address dst_ip6{0xfd, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2};
  MacAddress src_mac{0x02, 0, 0, 0, 0, 0x01};
  MacAddress dst_mac{0x02, 0, 0, 0, 0, 0x02};
  std::uint32_t ip_id = 0x4f46;
  std::uint16_t sport = 40000;
  std::uint16_t dport = 7;
  std::uint32_t isn = 1000;
  std::uint32_t server_isn = 500000;
  std::uint16_t echo_id = 0x4f46;
  std::uint16_t echo_seq = 1;
  std::uint64_t start_time_us = 1'700'000'000'000'000;
  std::uint64_t stride_us = 1000;
};

/// Campaign-wide index of a test case: the relation's column for single
/// mode, 9 for the composite case. Keeps echo sequence numbers and TCP
/// ports distinct per case.
inline std::size_t case_index(const TestCase& tc) {
  if (tc.mode == Mode::kMultiple) return kOverlappingRelations.size();
  return overlap_index(tc.relations_under_test.front());
}

inline NetConfig net_config_for(const NetConfig& base, std::size_t index) {
  NetConfig c = base;
  c.ip_id = base.ip_id + static_cast<std::uint32_t>(index);
  c.echo_seq = static_cast<std::uint16_t>(base.echo_seq + index);
  c.sport = static_cast<std::uint16_t>(base.sport + index);
  return c;
}

inline constexpr std::uint16_t kEtherIpv4 = 0x0800;
inline constexpr std::uint16_t kEtherIpv6 = 0x86dd;
inline constexpr std::uint8_t kProtoIcmp = 1;
inline constexpr std::uint8_t kProtoTcp = 6;
inline constexpr std::uint8_t kProtoFragment = 44;
inline constexpr std::uint8_t kProtoIcmpv6 = 58;
inline constexpr std::uint8_t kIcmpEchoRequest = 8;
inline constexpr std::uint8_t kIcmpEchoReply = 0;
inline constexpr std::uint8_t kIcmpv6EchoRequest = 128;
inline constexpr std::uint8_t kIcmpv6EchoReply = 129;
inline constexpr std::uint8_t kTcpFin = 0x01, kTcpSyn = 0x02, kTcpPsh = 0x08,
                              kTcpAck = 0x10;
inline constexpr std::size_t kEthHeader = 14, kIpv4Header = 20, kIpv6Header = 40,
                             kFragHeader = 8, kTcpHeader = 20;

namespace detail {

inline void put16(Bytes& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v >> 8));
  b.push_back(static_cast<std::uint8_t>(v));
}

inline void put32(Bytes& b, std::uint32_t v) {
  put16(b, static_cast<std::uint16_t>(v >> 16));
  put16(b, static_cast<std::uint16_t>(v));
}

inline void set16(Bytes& b, std::size_t at, std::uint16_t v) {
  b[at] = static_cast<std::uint8_t>(v >> 8);
  b[at + 1] = static_cast<std::uint8_t>(v);
}

inline std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] << 8 | b[at + 1]);
}

inline std::uint32_t get32(std::span<const std::uint8_t> b, std::size_t at) {
  return std::uint32_t{get16(b, at)} << 16 | get16(b, at + 2);
}

template <std::size_t N>
void append(Bytes& b, const std::array<std::uint8_t, N>& a) {
  b.insert(b.end(), a.begin(), a.end());
}

inline Bytes ethernet(const MacAddress& dst, const MacAddress& src, std::uint16_t type) {
  Bytes b;
  append(b, dst);
  append(b, src);
  put16(b, type);
  return b;
}

inline Bytes ipv4_header(const Ipv4Address& src, const Ipv4Address& dst,
                         std::uint8_t proto, std::uint16_t id,
                         std::uint16_t flags_offset, std::size_t payload_len) {
  Bytes h;
  h.push_back(0x45);
  h.push_back(0);
  put16(h, static_cast<std::uint16_t>(kIpv4Header + payload_len));
  put16(h, id);
  put16(h, flags_offset);
  h.push_back(64);
  h.push_back(proto);
  put16(h, 0);
  append(h, src);
  append(h, dst);
  set16(h, 10, internet_checksum(h));
  return h;
}

inline Bytes ipv6_header(const Ipv6Address& src, const Ipv6Address& dst,
                         std::uint8_t next, std::size_t payload_len) {
  Bytes h;
  put32(h, 0x60000000);
  put16(h, static_cast<std::uint16_t>(payload_len));
  h.push_back(next);
  h.push_back(64);
  append(h, src);
  append(h, dst);
  return h;
}

inline std::uint32_t pseudo_sum_v4(const Ipv4Address& src, const Ipv4Address& dst,
                                   std::uint8_t proto, std::size_t len) {
  Bytes p;
  append(p, src);
  append(p, dst);
  p.push_back(0);
  p.push_back(proto);
  put16(p, static_cast<std::uint16_t>(len));
  return ones_complement_sum(p);
}

inline std::uint32_t pseudo_sum_v6(const Ipv6Address& src, const Ipv6Address& dst,
                                   std::uint8_t next, std::size_t len) {
  Bytes p;
  append(p, src);
  append(p, dst);
  put32(p, static_cast<std::uint32_t>(len));
  p.insert(p.end(), {0, 0, 0});
  p.push_back(next);
  return ones_complement_sum(p);
}

inline Bytes concat(Bytes a, std::span<const std::uint8_t> b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace detail

/// Fields of an ICMP/ICMPv6 echo header.
struct EchoHeader {
  std::uint8_t type = 0;
  std::uint8_t code = 0;
  std::uint16_t checksum = 0;
  std::uint16_t identifier = 0;
  std::uint16_t sequence = 0;

  friend bool operator==(const EchoHeader&, const EchoHeader&) = default;
};

/// Full upper-layer echo request message of an IP test case when every
/// overlap resolves to `outcome` (OLD or NEW): the expected payload with the
/// echo header written over its placeholder.
inline Bytes echo_message(const TestCase& tc, Outcome outcome, const NetConfig& cfg) {
  if (!is_ip(tc.protocol)) throw CodecError("echo messages exist only for IP test cases");
  const auto& expected = tc.expected_markers.at(outcome);
  if (!expected) throw CodecError("test case has no expected payload for this outcome");
  Bytes msg = *expected;
  if (msg.size() < kEchoHeaderSize) throw CodecError("datagram shorter than echo header");
  msg[0] = tc.protocol == Protocol::kIpv4 ? kIcmpEchoRequest : kIcmpv6EchoRequest;
  msg[1] = 0;
  detail::set16(msg, 2, 0);
  detail::set16(msg, 4, cfg.echo_id);
  detail::set16(msg, 6, cfg.echo_seq);
  std::uint32_t pseudo =
      tc.protocol == Protocol::kIpv6
          ? detail::pseudo_sum_v6(cfg.src_ip6, cfg.dst_ip6, kProtoIcmpv6, msg.size())
          : 0;
  detail::set16(msg, 2, internet_checksum(msg, pseudo));
  return msg;
}

namespace detail {

inline void check_ip_alignment(const TestCase& tc) {
  std::size_t last_fragments = 0;
  for (const auto& c : tc.sequence.chunks) {
    bool last = c.has_tag(kTagLastFragment);
    last_fragments += last;
    if (c.interval.start() % 8 != 0 || (!last && c.interval.length() % 8 != 0))
      throw CodecError("chunk [" + std::to_string(c.interval.start()) + "," +
                       std::to_string(c.interval.end()) +
                       ") is not aligned to 8-byte fragment units");
  }
  if (last_fragments != 1)
    throw CodecError("IP test case needs exactly one last fragment, found " +
                     std::to_string(last_fragments));
}

// Chunk bytes as sent: the echo header replaces its placeholder.
inline Bytes wire_payload(const Chunk& c, const Bytes& message) {
  Bytes p = c.payload;
  for (std::size_t i = c.interval.start(); i < std::min(c.interval.end(), kEchoHeaderSize); ++i)
    p[i - c.interval.start()] = message[i];
  return p;
}

inline std::vector<Frame> stamp(std::vector<Bytes> datas, const NetConfig& cfg) {
  std::vector<Frame> out;
  for (std::size_t i = 0; i < datas.size(); ++i)
    out.push_back({std::move(datas[i]), cfg.start_time_us + i * cfg.stride_us});
  return out;
}

}  // namespace detail

/// One Ethernet/IPv4 fragment per chunk, in arrival order.
inline std::vector<Frame> encode_ipv4(const TestCase& tc, const NetConfig& cfg) {
  if (tc.protocol != Protocol::kIpv4) throw CodecError("encode_ipv4 needs an ipv4 test case");
  detail::check_ip_alignment(tc);
  std::size_t total = 0;
  for (const auto& c : tc.sequence.chunks) total = std::max(total, c.interval.end());
  if (total + kIpv4Header > 65535) throw CodecError("datagram exceeds 65535 bytes");
  auto message = echo_message(tc, Outcome::kOld, cfg);
  std::vector<Bytes> frames;
  for (const auto& c : tc.sequence.chunks) {
    auto payload = detail::wire_payload(c, message);
    std::uint16_t fo = static_cast<std::uint16_t>(c.interval.start() / 8);
    if (!c.has_tag(kTagLastFragment)) fo |= 0x2000;
    auto f = detail::ethernet(cfg.dst_mac, cfg.src_mac, kEtherIpv4);
    f = detail::concat(std::move(f),
                       detail::ipv4_header(cfg.src_ip4, cfg.dst_ip4, kProtoIcmp,
                                           static_cast<std::uint16_t>(cfg.ip_id), fo,
                                           payload.size()));
    frames.push_back(detail::concat(std::move(f), payload));
  }
  return detail::stamp(std::move(frames), cfg);
}

/// One Ethernet/IPv6/Fragment-header packet per chunk, in arrival order.
inline std::vector<Frame> encode_ipv6(const TestCase& tc, const NetConfig& cfg) {
  if (tc.protocol != Protocol::kIpv6) throw CodecError("encode_ipv6 needs an ipv6 test case");
  detail::check_ip_alignment(tc);
  std::size_t total = 0;
  for (const auto& c : tc.sequence.chunks) total = std::max(total, c.interval.end());
  if (total > 65535) throw CodecError("datagram exceeds 65535 bytes");
  auto message = echo_message(tc, Outcome::kOld, cfg);
  std::vector<Bytes> frames;
  for (const auto& c : tc.sequence.chunks) {
    auto payload = detail::wire_payload(c, message);
    auto f = detail::ethernet(cfg.dst_mac, cfg.src_mac, kEtherIpv6);
    f = detail::concat(std::move(f), detail::ipv6_header(cfg.src_ip6, cfg.dst_ip6,
                                                         kProtoFragment,
                                                         kFragHeader + payload.size()));
    Bytes frag;
    frag.push_back(kProtoIcmpv6);
    frag.push_back(0);
    std::uint16_t off = static_cast<std::uint16_t>((c.interval.start() / 8) << 3);
    if (!c.has_tag(kTagLastFragment)) off |= 1;
    detail::put16(frag, off);
    detail::put32(frag, cfg.ip_id);
    f = detail::concat(std::move(f), frag);
    frames.push_back(detail::concat(std::move(f), payload));
  }
  return detail::stamp(std::move(frames), cfg);
}

namespace detail {

struct TcpEndpoint {
  Ipv4Address ip;
  std::uint16_t port;
};

inline Bytes tcp_frame(const MacAddress& dmac, const MacAddress& smac, TcpEndpoint src,
                       TcpEndpoint dst, std::uint16_t ip_id, std::uint32_t seq,
                       std::uint32_t ack, std::uint8_t flags,
                       std::span<const std::uint8_t> data) {
  Bytes seg;
  put16(seg, src.port);
  put16(seg, dst.port);
  put32(seg, seq);
  put32(seg, ack);
  seg.push_back(5 << 4);
  seg.push_back(flags);
  put16(seg, 65535);
  put16(seg, 0);
  put16(seg, 0);
  seg.insert(seg.end(), data.begin(), data.end());
  set16(seg, 16,
        internet_checksum(seg, pseudo_sum_v4(src.ip, dst.ip, kProtoTcp, seg.size())));
  auto f = ethernet(dmac, smac, kEtherIpv4);
  f = concat(std::move(f), ipv4_header(src.ip, dst.ip, kProtoTcp, ip_id, 0x4000, seg.size()));
  return concat(std::move(f), seg);
}

}  // namespace detail

/// Handshake (SYN, SYN-ACK, ACK) then one data segment per chunk in arrival
/// order, with sequence number ISN + 1 + chunk start.
inline std::vector<Frame> encode_tcp(const TestCase& tc, const NetConfig& cfg) {
  if (tc.protocol != Protocol::kTcp) throw CodecError("encode_tcp needs a tcp test case");
  std::uint64_t stream_len = 0;
  for (const auto& c : tc.sequence.chunks)
    stream_len = std::max<std::uint64_t>(stream_len, c.interval.end());
  if (std::uint64_t{cfg.isn} + 1 + stream_len > 0xffffffffULL)
    throw CodecError("sequence space wraparound is not supported");
  detail::TcpEndpoint client{cfg.src_ip4, cfg.sport}, server{cfg.dst_ip4, cfg.dport};
  auto id = static_cast<std::uint16_t>(cfg.ip_id);
  std::vector<Bytes> frames;
  frames.push_back(detail::tcp_frame(cfg.dst_mac, cfg.src_mac, client, server, id++, cfg.isn,
                                     0, kTcpSyn, {}));
  frames.push_back(detail::tcp_frame(cfg.src_mac, cfg.dst_mac, server, client, id++,
                                     cfg.server_isn, cfg.isn + 1, kTcpSyn | kTcpAck, {}));
  frames.push_back(detail::tcp_frame(cfg.dst_mac, cfg.src_mac, client, server, id++,
                                     cfg.isn + 1, cfg.server_isn + 1, kTcpAck, {}));
  for (const auto& c : tc.sequence.chunks)
    frames.push_back(detail::tcp_frame(
        cfg.dst_mac, cfg.src_mac, client, server, id++,
        cfg.isn + 1 + static_cast<std::uint32_t>(c.interval.start()), cfg.server_isn + 1,
        kTcpPsh | kTcpAck, c.payload));
  return detail::stamp(std::move(frames), cfg);
}

inline std::vector<Frame> encode(const TestCase& tc, const NetConfig& cfg) {
  switch (tc.protocol) {
    case Protocol::kIpv4: return encode_ipv4(tc, cfg);
    case Protocol::kIpv6: return encode_ipv6(tc, cfg);
    case Protocol::kTcp: return encode_tcp(tc, cfg);
  }
  throw CodecError("unknown protocol");
}

// Parsing

/// Network-layer view of one frame.
struct ParsedPacket {
  std::uint16_t ethertype = 0;
  std::uint8_t upper_protocol = 0;  // after the Fragment header for IPv6
  bool fragmented = false;          // carried a fragment header / offset or MF
  std::size_t fragment_offset = 0;  // bytes
  bool more_fragments = false;
  std::uint32_t identification = 0;
  bool header_checksum_ok = true;   // IPv4 header checksum
  Ipv4Address src4{}, dst4{};
  Ipv6Address src6{}, dst6{};
  Bytes payload;                    // bytes after the IP (and fragment) header
};

inline ParsedPacket parse_packet(const Frame& frame) {
  std::span<const std::uint8_t> d(frame.data);
  if (d.size() < kEthHeader) throw CodecError("frame shorter than Ethernet header");
  ParsedPacket p;
  p.ethertype = detail::get16(d, 12);
  auto ip = d.subspan(kEthHeader);
  if (p.ethertype == kEtherIpv4) {
    if (ip.size() < kIpv4Header || (ip[0] >> 4) != 4) throw CodecError("bad IPv4 header");
    std::size_t ihl = (ip[0] & 0x0f) * 4u;
    std::size_t total = detail::get16(ip, 2);
    if (ihl < kIpv4Header || total < ihl || total > ip.size())
      throw CodecError("inconsistent IPv4 lengths");
    p.header_checksum_ok = ones_complement_sum(ip.first(ihl)) == 0xffff;
    p.identification = detail::get16(ip, 4);
    auto fo = detail::get16(ip, 6);
    p.more_fragments = fo & 0x2000;
    p.fragment_offset = (fo & 0x1fffu) * 8u;
    p.fragmented = p.more_fragments || p.fragment_offset != 0;
    p.upper_protocol = ip[9];
    std::copy(ip.begin() + 12, ip.begin() + 16, p.src4.begin());
    std::copy(ip.begin() + 16, ip.begin() + 20, p.dst4.begin());
    p.payload.assign(ip.begin() + ihl, ip.begin() + total);
  } else if (p.ethertype == kEtherIpv6) {
    if (ip.size() < kIpv6Header || (ip[0] >> 4) != 6) throw CodecError("bad IPv6 header");
    std::size_t plen = detail::get16(ip, 4);
    if (kIpv6Header + plen > ip.size()) throw CodecError("inconsistent IPv6 length");
    std::copy(ip.begin() + 8, ip.begin() + 24, p.src6.begin());
    std::copy(ip.begin() + 24, ip.begin() + 40, p.dst6.begin());
    auto rest = ip.subspan(kIpv6Header, plen);
    p.upper_protocol = ip[6];
    if (p.upper_protocol == kProtoFragment) {
      if (rest.size() < kFragHeader) throw CodecError("truncated fragment header");
      p.upper_protocol = rest[0];
      auto off = detail::get16(rest, 2);
      p.fragment_offset = (off >> 3) * 8u;
      p.more_fragments = off & 1;
      p.identification = detail::get32(rest, 4);
      p.fragmented = true;
      rest = rest.subspan(kFragHeader);
    }
    p.payload.assign(rest.begin(), rest.end());
  } else {
    throw CodecError("unsupported ethertype");
  }
  return p;
}

/// Result of decoding an encoded test case back into chunks. The echo header
/// is stripped back to its zero placeholder and reported separately.
struct DecodedCapture {
  ChunkSequence sequence;
  std::optional<EchoHeader> echo;
  std::uint32_t identification = 0;
  std::optional<std::uint32_t> client_isn;
  std::size_t handshake_frames = 0;
  bool checksums_ok = true;
};

namespace detail {

inline DecodedCapture decode_ip(std::span<const Frame> frames, Protocol protocol) {
  DecodedCapture out;
  out.sequence.protocol = protocol;
  std::optional<std::uint32_t> id;
  for (const auto& f : frames) {
    auto p = parse_packet(f);
    out.checksums_ok &= p.header_checksum_ok;
    if (id && *id != p.identification)
      throw CodecError("fragments carry different identifications");
    id = p.identification;
    if (p.payload.empty()) throw CodecError("empty fragment");
    Chunk c{ByteInterval(p.fragment_offset, p.fragment_offset + p.payload.size()),
            std::move(p.payload), out.sequence.chunks.size(), {}};
    if (!p.more_fragments) c.tags.emplace_back(kTagLastFragment);
    if (c.interval.start() == 0) {
      if (c.payload.size() < kEchoHeaderSize) throw CodecError("first fragment lacks echo header");
      out.echo = EchoHeader{c.payload[0], c.payload[1], get16(c.payload, 2),
                            get16(c.payload, 4), get16(c.payload, 6)};
      std::fill(c.payload.begin(), c.payload.begin() + kEchoHeaderSize, 0);
    }
    out.sequence.chunks.push_back(std::move(c));
  }
  out.identification = id.value_or(0);
  return out;
}

inline bool tcp_checksum_ok(const ParsedPacket& p) {
  return ones_complement_sum(p.payload, pseudo_sum_v4(p.src4, p.dst4, kProtoTcp,
                                                      p.payload.size())) == 0xffff;
}

inline DecodedCapture decode_tcp(std::span<const Frame> frames) {
  DecodedCapture out;
  out.sequence.protocol = Protocol::kTcp;
  std::optional<std::uint16_t> client_port;
  for (const auto& f : frames) {
    auto p = parse_packet(f);
    out.checksums_ok &= p.header_checksum_ok;
    if (p.upper_protocol != kProtoTcp || p.payload.size() < kTcpHeader)
      throw CodecError("expected a TCP segment");
    out.checksums_ok &= tcp_checksum_ok(p);
    auto sport = get16(p.payload, 0);
    auto seq = get32(p.payload, 4);
    auto flags = p.payload[13];
    std::size_t hl = (p.payload[12] >> 4) * 4u;
    if (hl < kTcpHeader || hl > p.payload.size()) throw CodecError("bad TCP data offset");
    if ((flags & kTcpSyn) && !(flags & kTcpAck)) {
      out.client_isn = seq;
      client_port = sport;
      ++out.handshake_frames;
      continue;
    }
    if (!client_port || sport != *client_port || p.payload.size() == hl) {
      ++out.handshake_frames;
      continue;
    }
    if (!out.client_isn) throw CodecError("data segment before SYN");
    std::uint32_t rel = seq - (*out.client_isn + 1);
    Bytes data(p.payload.begin() + hl, p.payload.end());
    Chunk c{ByteInterval(rel, rel + data.size()), std::move(data),
            out.sequence.chunks.size(), {}};
    out.sequence.chunks.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

/// Inverse of encode: recovers chunk geometry, arrival order and payloads.
inline DecodedCapture decode(std::span<const Frame> frames, Protocol protocol) {
  if (protocol == Protocol::kTcp) return detail::decode_tcp(frames);
  return detail::decode_ip(frames, protocol);
}

/// True when the echo message (with pseudo-header for ICMPv6) sums to 0xffff.
inline bool verify_echo_checksum(std::span<const std::uint8_t> message, Protocol protocol,
                                 const NetConfig& cfg) {
  std::uint32_t pseudo =
      protocol == Protocol::kIpv6
          ? detail::pseudo_sum_v6(cfg.src_ip6, cfg.dst_ip6, kProtoIcmpv6, message.size())
          : 0;
  return ones_complement_sum(message, pseudo) == 0xffff;
}

// Echo replies: what a target returns for each reassembled test case.

/// Reply frames for the reassembled payloads in `outputs` (case index ->
/// payload in generator byte space). Cases without output send nothing.
inline std::vector<Frame> encode_replies(Protocol protocol,
                                         const std::map<std::size_t, Bytes>& outputs,
                                         const NetConfig& base) {
  std::vector<Bytes> frames;
  for (const auto& [index, payload] : outputs) {
    auto cfg = net_config_for(base, index);
    if (protocol == Protocol::kTcp) {
      detail::TcpEndpoint client{cfg.src_ip4, cfg.sport}, server{cfg.dst_ip4, cfg.dport};
      frames.push_back(detail::tcp_frame(cfg.src_mac, cfg.dst_mac, server, client,
                                         static_cast<std::uint16_t>(cfg.ip_id),
                                         cfg.server_isn + 1,
                                         cfg.isn + 1 + static_cast<std::uint32_t>(payload.size()),
                                         kTcpPsh | kTcpAck, payload));
      continue;
    }
    if (payload.size() < kEchoHeaderSize) throw CodecError("reply payload too short");
    Bytes msg = payload;
    msg[0] = protocol == Protocol::kIpv4 ? kIcmpEchoReply : kIcmpv6EchoReply;
    msg[1] = 0;
    detail::set16(msg, 2, 0);
    detail::set16(msg, 4, cfg.echo_id);
    detail::set16(msg, 6, cfg.echo_seq);
    auto f = detail::ethernet(cfg.src_mac, cfg.dst_mac,
                              protocol == Protocol::kIpv4 ? kEtherIpv4 : kEtherIpv6);
    if (protocol == Protocol::kIpv4) {
      detail::set16(msg, 2, internet_checksum(msg));
      f = detail::concat(std::move(f),
                         detail::ipv4_header(cfg.dst_ip4, cfg.src_ip4, kProtoIcmp,
                                             static_cast<std::uint16_t>(cfg.ip_id), 0,
                                             msg.size()));
    } else {
      detail::set16(msg, 2,
                    internet_checksum(msg, detail::pseudo_sum_v6(cfg.dst_ip6, cfg.src_ip6,
                                                                 kProtoIcmpv6, msg.size())));
      f = detail::concat(std::move(f), detail::ipv6_header(cfg.dst_ip6, cfg.src_ip6,
                                                           kProtoIcmpv6, msg.size()));
    }
    frames.push_back(detail::concat(std::move(f), msg));
  }
  return detail::stamp(std::move(frames), base);
}

/// Recovers reassembled payloads (case index -> generator byte space) from
/// captured echo replies. Frames that are not replies are skipped.
inline std::map<std::size_t, Bytes> extract_replies(std::span<const Frame> frames,
                                                    Protocol protocol,
                                                    const NetConfig& base) {
  std::map<std::size_t, Bytes> out;
  for (const auto& f : frames) {
    ParsedPacket p;
    try {
      p = parse_packet(f);
    } catch (const CodecError&) {
      continue;
    }
    if (protocol == Protocol::kTcp) {
      if (p.ethertype != kEtherIpv4 || p.upper_protocol != kProtoTcp ||
          p.payload.size() < kTcpHeader)
        continue;
      auto sport = detail::get16(p.payload, 0), dport = detail::get16(p.payload, 2);
      std::size_t hl = (p.payload[12] >> 4) * 4u;
      if (sport != base.dport || dport < base.sport || hl > p.payload.size()) continue;
      std::size_t index = dport - base.sport;
      auto cfg = net_config_for(base, index);
      std::size_t len = p.payload.size() - hl;
      if (len == 0) continue;  // handshake / pure ACK
      std::uint32_t at = detail::get32(p.payload, 4) - (cfg.server_isn + 1);
      if (at > 0xffff) continue;  // outside any plausible reply stream
      auto& buf = out[index];
      if (buf.size() < at + len) buf.resize(at + len, 0);
      std::copy(p.payload.begin() + hl, p.payload.end(), buf.begin() + at);
      continue;
    }
    bool v4 = protocol == Protocol::kIpv4;
    if (p.ethertype != (v4 ? kEtherIpv4 : kEtherIpv6) || p.fragmented) continue;
    if (p.upper_protocol != (v4 ? kProtoIcmp : kProtoIcmpv6)) continue;
    if (p.payload.size() < kEchoHeaderSize) continue;
    if (p.payload[0] != (v4 ? kIcmpEchoReply : kIcmpv6EchoReply)) continue;
    if (detail::get16(p.payload, 4) != base.echo_id) continue;
    std::uint16_t seq = detail::get16(p.payload, 6);
    std::size_t index = static_cast<std::uint16_t>(seq - base.echo_seq);
    Bytes payload = p.payload;
    std::fill(payload.begin(), payload.begin() + kEchoHeaderSize, 0);
    out[index] = std::move(payload);
  }
  return out;
}

/// Offset/hex/ASCII dump, 16 bytes per line.
inline std::string hexdump(const Frame& f) {
  std::string out;
  char line[96];
  for (std::size_t i = 0; i < f.data.size(); i += 16) {
    int n = std::snprintf(line, sizeof line, "%04zx ", i);
    out.append(line, static_cast<std::size_t>(n));
    std::string ascii;
    for (std::size_t j = i; j < i + 16; ++j) {
      if (j < f.data.size()) {
        n = std::snprintf(line, sizeof line, " %02x", f.data[j]);
        out.append(line, static_cast<std::size_t>(n));
        auto c = f.data[j];
        ascii.push_back(c >= 0x20 && c < 0x7f ? static_cast<char>(c) : '.');
      } else {
        out += "   ";
      }
    }
    out += "  " + ascii + "\n";
  }
  return out;
}

}  // namespace overlap_forge
