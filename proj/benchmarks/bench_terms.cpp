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

#include <benchmark/benchmark.h>

#include "cellfree/montecarlo.hpp"
#include "cellfree/precoding.hpp"

using namespace cellfree;

namespace {

// Closed-form rate assembly (DS/BU/UI/SINR/rate) at the default figure size.
// The interference matrix dominates: O(K^2 M) with an O(M) inner reduction.
void bm_rate_closed_form(benchmark::State& state) {
    const SystemConfig cfg =
        resolve_config({{"num_aps", std::to_string(state.range(0))},
                        {"num_users", std::to_string(state.range(1))}});
    const Snapshot snap = make_snapshot(cfg, 1, 0);
    for (auto _ : state) {
        const RateBreakdown out = rate_closed_form(snap.net.beta, snap.stats.gamma,
                                                   snap.plan.gram_sq, snap.alloc_st,
                                                   cfg.rho_d);
        benchmark::DoNotOptimize(out.rate.memptr());
    }
}

// Snapshot construction: placement, shadowing, pilot assignment, estimation
// statistics, and both power allocations.
void bm_make_snapshot(benchmark::State& state) {
    const SystemConfig cfg =
        resolve_config({{"num_aps", std::to_string(state.range(0))},
                        {"num_users", std::to_string(state.range(1))}});
    std::uint64_t seed = 1;
    for (auto _ : state) {
        const Snapshot snap = make_snapshot(cfg, seed++, 0);
        benchmark::DoNotOptimize(snap.stats.gamma.memptr());
    }
}

} // namespace

BENCHMARK(bm_rate_closed_form)->Args({100, 40})->Args({50, 10})->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_make_snapshot)->Args({100, 40})->Unit(benchmark::kMicrosecond);
