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

#include "overlap_forge/checksum.hpp"
#include "overlap_forge/chunk_model.hpp"
#include "overlap_forge/common.hpp"
#include "overlap_forge/differential_analyzer.hpp"
#include "overlap_forge/inference_engine.hpp"
#include "overlap_forge/interval_algebra.hpp"
#include "overlap_forge/pcap.hpp"
#include "overlap_forge/policy_registry.hpp"
#include "overlap_forge/reassembly_engine.hpp"
#include "overlap_forge/testcase_generator.hpp"
#include "overlap_forge/wire_codec.hpp"
