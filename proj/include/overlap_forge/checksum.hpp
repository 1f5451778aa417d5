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
#include <span>

namespace overlap_forge {

/// Ones'-complement sum of big-endian 16-bit words, folded to 16 bits. An odd
/// trailing byte is padded with zero. `initial` lets callers chain a
/// pseudo-header sum.
inline std::uint16_t ones_complement_sum(std::span<const std::uint8_t> data,
                                         std::uint32_t initial = 0) {
  std::uint64_t sum = initial;
  std::size_t i = 0;
  for (; i + 1 < data.size(); i += 2)
    sum += static_cast<std::uint32_t>(data[i]) << 8 | data[i + 1];
  if (i < data.size()) sum += static_cast<std::uint32_t>(data[i]) << 8;
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(sum);
}

/// RFC 1071 internet checksum.
inline std::uint16_t internet_checksum(std::span<const std::uint8_t> data,
                                       std::uint32_t initial = 0) {
  return static_cast<std::uint16_t>(~ones_complement_sum(data, initial));
}

}  // namespace overlap_forge
