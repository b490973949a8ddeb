// SPDX-License-Identifier: Apache-2.0
//
// cellfree-sim: downlink rate simulator for cell-free massive MIMO
// Copyright (C) 2026 cellfree-sim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cellfree {

// Outcome of one self-check; `detail` carries the measured numbers.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    std::uint64_t base_seed = 1;
    int fadings = 100000;         // MC draws for the oracle comparisons
    int estimator_draws = 100000; // channel-estimate draws for moment checks
    int algebra_instances = 100;  // random instances for exact identities
};

// Deterministic self-check suite tying the independent computation paths
// together: closed-form identities (DS ratio, BU gap, denominator
// rearrangement, power-constraint saturation), channel-estimator moments, and
// Monte Carlo estimates against the closed forms they must reproduce.  Every
// check is reproducible for a fixed seed, so a passing seed never flakes.
std::vector<CheckResult> oracle_equivalence_suite(const ValidationOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& checks);

} // namespace cellfree
