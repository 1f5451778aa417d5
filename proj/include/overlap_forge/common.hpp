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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace overlap_forge {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON schema, hex, enum strings).
class SchemaError : public Error {
 public:
  using Error::Error;
};

enum class Protocol { kIpv4, kIpv6, kTcp };
enum class Mode { kSingle, kMultiple };

/// How an implementation resolves the data of two overlapping chunks.
enum class Outcome { kOld, kNew, kIgnore };

inline constexpr std::array<Protocol, 3> kAllProtocols = {
    Protocol::kIpv4, Protocol::kIpv6, Protocol::kTcp};
inline constexpr std::array<Mode, 2> kAllModes = {Mode::kSingle,
                                                  Mode::kMultiple};
inline constexpr std::array<Outcome, 3> kAllOutcomes = {
    Outcome::kOld, Outcome::kNew, Outcome::kIgnore};

inline bool is_ip(Protocol p) { return p != Protocol::kTcp; }

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::kIpv4: return "ipv4";
    case Protocol::kIpv6: return "ipv6";
    case Protocol::kTcp: return "tcp";
  }
  return "?";
}

inline std::string_view to_string(Mode m) {
  return m == Mode::kSingle ? "single" : "multiple";
}

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kOld: return "old";
    case Outcome::kNew: return "new";
    case Outcome::kIgnore: return "ignore";
  }
  return "?";
}

/// One-glyph form used in tables: o, n and the empty-set sign.
inline std::string_view to_symbol(Outcome o) {
  switch (o) {
    case Outcome::kOld: return "o";
    case Outcome::kNew: return "n";
    case Outcome::kIgnore: return "∅";
  }
  return "?";
}

inline std::optional<Protocol> parse_protocol(std::string_view s) {
  for (auto p : kAllProtocols)
    if (to_string(p) == s) return p;
  return std::nullopt;
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  for (auto m : kAllModes)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

inline std::optional<Outcome> parse_outcome(std::string_view s) {
  for (auto o : kAllOutcomes)
    if (to_string(o) == s) return o;
  return std::nullopt;
}

inline std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [&](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw SchemaError("invalid hex digit '" + std::string(1, c) + "'");
  };
  if (hex.size() % 2 != 0) throw SchemaError("hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 |
                                       nibble(hex[2 * i + 1]));
  return out;
}

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

}  // namespace overlap_forge
