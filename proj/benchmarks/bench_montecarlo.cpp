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

using namespace cellfree;

namespace {

// Monte Carlo engine cost, reported per fading draw.  One draw costs a
// channel generation + estimation (O(M K)) and a gain reduction (O(M K^2)).
void bm_mc_effective_gains(benchmark::State& state) {
    const SystemConfig cfg =
        resolve_config({{"num_aps", std::to_string(state.range(0))},
                        {"num_users", std::to_string(state.range(1))}});
    const Snapshot snap = make_snapshot(cfg, 1, 0);
    TrialPlan plan;
    plan.num_fadings = static_cast<int>(state.range(2));
    for (auto _ : state) {
        const McEstimate mc = mc_effective_gains(cfg, snap, snap.alloc_st, plan, 0);
        benchmark::DoNotOptimize(mc.rate.memptr());
    }
    state.SetItemsProcessed(state.iterations() * plan.num_fadings);
}

} // namespace

BENCHMARK(bm_mc_effective_gains)
    ->Args({32, 8, 1000})
    ->Args({100, 40, 100})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
