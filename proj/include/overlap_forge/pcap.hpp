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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "overlap_forge/common.hpp"

namespace overlap_forge {

/// One link-layer frame and its capture time in microseconds.
struct Frame {
  Bytes data;
  std::uint64_t timestamp_us = 0;

  friend bool operator==(const Frame&, const Frame&) = default;
};

class PcapError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint32_t kPcapMagic = 0xa1b2c3d4;
inline constexpr std::uint32_t kPcapMagicSwapped = 0xd4c3b2a1;
inline constexpr std::uint32_t kLinkTypeEthernet = 1;
inline constexpr std::uint32_t kPcapSnapLen = 65535;

namespace detail {

inline void put_le16(std::ostream& os, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

inline void put_le32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline std::uint32_t load32(const unsigned char* p, bool big_endian) {
  if (big_endian)
    return std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 |
           std::uint32_t{p[2]} << 8 | p[3];
  return std::uint32_t{p[3]} << 24 | std::uint32_t{p[2]} << 16 |
         std::uint32_t{p[1]} << 8 | p[0];
}

inline std::uint16_t load16(const unsigned char* p, bool big_endian) {
  return big_endian ? static_cast<std::uint16_t>(p[0] << 8 | p[1])
                    : static_cast<std::uint16_t>(p[1] << 8 | p[0]);
}

}  // namespace detail

/// Classic little-endian pcap, version 2.4, Ethernet link type.
inline void write_pcap(std::span<const Frame> frames, std::ostream& os) {
  detail::put_le32(os, kPcapMagic);
  detail::put_le16(os, 2);
  detail::put_le16(os, 4);
  detail::put_le32(os, 0);  // thiszone
  detail::put_le32(os, 0);  // sigfigs
  detail::put_le32(os, kPcapSnapLen);
  detail::put_le32(os, kLinkTypeEthernet);
  for (const auto& f : frames) {
    detail::put_le32(os, static_cast<std::uint32_t>(f.timestamp_us / 1'000'000));
    detail::put_le32(os, static_cast<std::uint32_t>(f.timestamp_us % 1'000'000));
    detail::put_le32(os, static_cast<std::uint32_t>(f.data.size()));
    detail::put_le32(os, static_cast<std::uint32_t>(f.data.size()));
    os.write(reinterpret_cast<const char*>(f.data.data()),
             static_cast<std::streamsize>(f.data.size()));
  }
  if (!os) throw PcapError("failed to write pcap stream");
}

inline void write_pcap_file(std::span<const Frame> frames,
                            const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw PcapError("cannot open " + path.string() + " for writing");
  write_pcap(frames, os);
}

/// Reads either byte order of the classic format.
inline std::vector<Frame> read_pcap(std::istream& is) {
  unsigned char gh[24];
  if (!is.read(reinterpret_cast<char*>(gh), sizeof gh))
    throw PcapError("truncated pcap global header");
  bool big;
  if (detail::load32(gh, false) == kPcapMagic)
    big = false;
  else if (detail::load32(gh, true) == kPcapMagic)
    big = true;
  else
    throw PcapError("unknown pcap magic");
  auto major = detail::load16(gh + 4, big);
  if (major != 2) throw PcapError("unsupported pcap version " + std::to_string(major));
  auto link = detail::load32(gh + 20, big);
  if (link != kLinkTypeEthernet)
    throw PcapError("unsupported link type " + std::to_string(link));

  std::vector<Frame> frames;
  unsigned char rh[16];
  while (true) {
    is.read(reinterpret_cast<char*>(rh), sizeof rh);
    if (is.gcount() == 0) break;
    if (is.gcount() != sizeof rh) throw PcapError("truncated pcap record header");
    auto sec = detail::load32(rh, big);
    auto usec = detail::load32(rh + 4, big);
    auto incl = detail::load32(rh + 8, big);
    if (incl > kPcapSnapLen) throw PcapError("pcap record larger than snaplen");
    Frame f;
    f.timestamp_us = std::uint64_t{sec} * 1'000'000 + usec;
    f.data.resize(incl);
    if (!is.read(reinterpret_cast<char*>(f.data.data()), incl))
      throw PcapError("truncated pcap record data");
    frames.push_back(std::move(f));
  }
  return frames;
}

inline std::vector<Frame> read_pcap_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PcapError("cannot open " + path.string());
  return read_pcap(is);
}

}  // namespace overlap_forge
