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

// Builds the Oi test case, reassembles it as FreeBSD and as Suricata (bsd
// policy) would, and prints what each one sees.

#include <iostream>

#include "overlap_forge.hpp"

using namespace overlap_forge;

int main() {
  const auto proto = Protocol::kIpv4;
  auto tc = build_single(proto, AllenRelation::kOi);

  for (const char* name : {"freebsd-14.1", "suricata-7.0.4-bsd"}) {
    auto policy = lookup(name, proto, Mode::kSingle);
    auto res = predict_outcome_payload(tc, policy);
    std::cout << name << ": " << to_string(res.status);
    if (res.payload) {
      auto o = infer_outcome(tc, {AllenRelation::kOi, res.payload});
      std::cout << ", keeps " << to_string(o) << " data";
    }
    std::cout << "\n";
  }

  auto report = compare(lookup("freebsd-14.1", proto, Mode::kSingle),
                        lookup("suricata-7.0.4-bsd", proto, Mode::kSingle), proto, Mode::kSingle);
  std::cout << "\n" << render_table(report);

  auto frames = encode(tc, NetConfig{});
  write_pcap_file(frames, "ipv4-single-Oi.pcap");
  std::cout << "\nwrote ipv4-single-Oi.pcap (" << frames.size() << " frames)\n";
}
