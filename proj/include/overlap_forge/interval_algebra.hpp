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
#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace overlap_forge {

/// Non-empty half-open byte range [start, end).
class ByteInterval {
 public:
  ByteInterval(std::size_t start, std::size_t end) : start_(start), end_(end) {
    if (start >= end)
      throw std::invalid_argument("empty interval [" + std::to_string(start) +
                                  "," + std::to_string(end) + ")");
  }

  std::size_t start() const { return start_; }
  std::size_t end() const { return end_; }
  std::size_t length() const { return end_ - start_; }

  friend bool operator==(const ByteInterval&, const ByteInterval&) = default;

 private:
  std::size_t start_;
  std::size_t end_;
};

/// Allen's thirteen relations. `relate(x, y) == kO` reads "x overlaps y".
enum class AllenRelation { kM, kMi, kB, kBi, kEq, kO, kOi, kS, kSi, kD, kDi, kF, kFi };

inline constexpr std::array<AllenRelation, 13> kAllRelations = {
    AllenRelation::kM,  AllenRelation::kMi, AllenRelation::kB,
    AllenRelation::kBi, AllenRelation::kEq, AllenRelation::kO,
    AllenRelation::kOi, AllenRelation::kS,  AllenRelation::kSi,
    AllenRelation::kD,  AllenRelation::kDi, AllenRelation::kF,
    AllenRelation::kFi};

/// The nine overlapping relations in report column order.
inline constexpr std::array<AllenRelation, 9> kOverlappingRelations = {
    AllenRelation::kF,  AllenRelation::kFi, AllenRelation::kS,
    AllenRelation::kSi, AllenRelation::kO,  AllenRelation::kOi,
    AllenRelation::kD,  AllenRelation::kDi, AllenRelation::kEq};

inline constexpr std::array<AllenRelation, 9> enumerate_overlapping() {
  return kOverlappingRelations;
}

inline constexpr bool is_overlapping(AllenRelation r) {
  switch (r) {
    case AllenRelation::kM:
    case AllenRelation::kMi:
    case AllenRelation::kB:
    case AllenRelation::kBi:
      return false;
    default:
      return true;
  }
}

/// Position of an overlapping relation in kOverlappingRelations.
inline std::size_t overlap_index(AllenRelation r) {
  for (std::size_t i = 0; i < kOverlappingRelations.size(); ++i)
    if (kOverlappingRelations[i] == r) return i;
  throw std::invalid_argument("relation is not overlapping");
}

inline constexpr AllenRelation inverse(AllenRelation r) {
  using R = AllenRelation;
  switch (r) {
    case R::kM: return R::kMi;
    case R::kMi: return R::kM;
    case R::kB: return R::kBi;
    case R::kBi: return R::kB;
    case R::kEq: return R::kEq;
    case R::kO: return R::kOi;
    case R::kOi: return R::kO;
    case R::kS: return R::kSi;
    case R::kSi: return R::kS;
    case R::kD: return R::kDi;
    case R::kDi: return R::kD;
    case R::kF: return R::kFi;
    case R::kFi: return R::kF;
  }
  return r;
}

inline AllenRelation relate(const ByteInterval& x, const ByteInterval& y) {
  using R = AllenRelation;
  if (x.end() < y.start()) return R::kB;
  if (x.end() == y.start()) return R::kM;
  if (y.end() < x.start()) return R::kBi;
  if (y.end() == x.start()) return R::kMi;
  // The intervals share at least one byte from here on.
  if (x.start() == y.start()) {
    if (x.end() == y.end()) return R::kEq;
    return x.end() < y.end() ? R::kS : R::kSi;
  }
  if (x.end() == y.end()) return x.start() > y.start() ? R::kF : R::kFi;
  if (x.start() < y.start()) return x.end() < y.end() ? R::kO : R::kDi;
  return x.end() > y.end() ? R::kOi : R::kD;
}

inline std::string_view to_string(AllenRelation r) {
  using R = AllenRelation;
  switch (r) {
    case R::kM: return "M";
    case R::kMi: return "Mi";
    case R::kB: return "B";
    case R::kBi: return "Bi";
    case R::kEq: return "Eq";
    case R::kO: return "O";
    case R::kOi: return "Oi";
    case R::kS: return "S";
    case R::kSi: return "Si";
    case R::kD: return "D";
    case R::kDi: return "Di";
    case R::kF: return "F";
    case R::kFi: return "Fi";
  }
  return "?";
}

inline std::optional<AllenRelation> parse_relation(std::string_view s) {
  for (auto r : kAllRelations)
    if (to_string(r) == s) return r;
  return std::nullopt;
}

inline std::optional<ByteInterval> intersect(const ByteInterval& a,
                                             const ByteInterval& b) {
  auto lo = std::max(a.start(), b.start());
  auto hi = std::min(a.end(), b.end());
  if (lo >= hi) return std::nullopt;
  return ByteInterval(lo, hi);
}

}  // namespace overlap_forge
