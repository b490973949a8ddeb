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
#include <optional>
#include <utility>
#include <vector>

#include <armadillo>

#include "cellfree/config.hpp"
#include "cellfree/precoding.hpp"
#include "cellfree/rng.hpp"
#include "cellfree/topology.hpp"
#include "cellfree/training.hpp"

namespace cellfree {

// Sizing of a simulation run.  Identical plans produce bit-identical random
// streams regardless of worker count: every random quantity is seeded by
// (base_seed, snapshot index, stream id), and fading draws come in fixed-size
// blocks with their own stream ids, reduced in block order.
struct TrialPlan {
    int num_snapshots = 200;  // independent network realizations
    int num_fadings = 10000;  // small-scale fading draws per validated snapshot
    std::uint64_t base_seed = 1;
    int mc_snapshots = 0;     // leading snapshots that also run the MC engine
};

// How users pick their pilot sequences.
enum class PilotMode {
    random_assignment, // i.i.d. uniform over the book (with replacement)
    forced_orthogonal  // round-robin distinct pilots; requires K <= tau_up
};

// Everything that stays fixed while small-scale fading varies: one network
// realization with its pilot plan, estimation statistics, and the full-power
// allocations of both schemes.
struct Snapshot {
    NetworkRealization net;
    PilotPlan plan;
    EstimationStats stats;
    PowerAllocation alloc_st; // normalized scheme (eta)
    PowerAllocation alloc_lt; // conventional scheme (mu)
};

// Builds snapshot `index` of a run: placement, shadowing, pilot assignment,
// estimation statistics, and full-power coefficients, each from its own
// substream of `base_seed`.
Snapshot make_snapshot(const SystemConfig& config, std::uint64_t base_seed, int index,
                       PilotMode mode = PilotMode::random_assignment);

// Monte Carlo estimate of the per-user rate terms from raw channel draws.
// The effective gain of stream k' at user k for one fading draw is
//   a_kk' = sum_m sqrt(coeff_mk') g_mk conj(g_hat_mk') / |g_hat_mk'|  (normalized)
//   a_kk' = sum_m sqrt(coeff_mk') g_mk conj(g_hat_mk')                (conventional)
// and the terms are assembled without any closed-form shortcut:
//   ds_sq = rho_d |E a_kk|^2, bu = rho_d Var(a_kk) (unbiased),
//   ui(k,k') = rho_d E|a_kk'|^2, sinr = ds_sq / (bu + sum_{k' != k} ui + 1).
// Standard errors come from the accumulated first/second moments via the
// delta method; rate_se propagates them treating the terms as independent.
struct McEstimate {
    arma::cx_mat mean_gain;  // K x K, sample mean of a_kk'
    arma::mat mean_sq_gain;  // K x K, sample mean of |a_kk'|^2
    arma::vec ds_sq, ds_sq_se;
    arma::vec bu, bu_se;
    arma::mat ui, ui_se;     // zero diagonal
    arma::vec sinr;
    arma::vec rate, rate_se; // bits/s/Hz per channel use
    long long num_fadings = 0;
};

// Runs plan.num_fadings channel draws on one snapshot for the scheme of
// `alloc`.  Both schemes see identical draws for a given (plan, index).
// Throws std::invalid_argument when plan.num_fadings < 2 (variance undefined).
McEstimate mc_effective_gains(const SystemConfig& config, const Snapshot& snap,
                              const PowerAllocation& alloc, const TrialPlan& plan,
                              int snapshot_index);

// One (victim, interferer) interference comparison: MC-estimated value
// against the closed-form approximation.
struct UiGapSample {
    int user = 0;       // victim k
    int interferer = 0; // stream k'
    double actual = 0;  // rho_d E|a_kk'|^2 from the MC engine
    double approx = 0;  // closed-form ui entry
    double gap = 0;     // |actual - approx|
    bool shared_pilot = false;
};

// Pairs the MC interference estimates of the normalized scheme with the
// closed-form approximation for every ordered user pair (k != k').
std::vector<UiGapSample> ui_gap_from_estimate(const Snapshot& snap, const McEstimate& mc,
                                              double rho_d);

// Convenience wrapper: runs the MC engine for the normalized scheme on one
// snapshot, then compares against the closed form.
std::vector<UiGapSample> mc_ui_approximation_gap(const SystemConfig& config,
                                                 const Snapshot& snap,
                                                 const TrialPlan& plan, int snapshot_index);

// Sorted (value, probability) points with probability (i+1)/N; ties kept.
// Throws std::invalid_argument on empty input.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples);

// Per-snapshot output of a full run.
struct SnapshotResult {
    RateBreakdown closed_st;
    RateBreakdown closed_lt;
    std::optional<McEstimate> mc_st;
    std::optional<McEstimate> mc_lt;
    std::vector<UiGapSample> ui_gap;
};

struct TrialResults {
    std::vector<SnapshotResult> snapshots;
};

// What run_trials should compute beyond the closed forms.
struct RunOptions {
    PilotMode pilot_mode = PilotMode::random_assignment;
    int workers = 1;             // snapshot-level threads; never affects results
    bool mc_normalized = false;  // MC validation of the normalized scheme
    bool mc_conventional = false; // MC validation of the conventional scheme
    bool ui_gap = false;         // per-pair UI comparison (implies mc_normalized data)
};

// Runs every snapshot of the plan: closed-form rates for both schemes always;
// MC validation and UI-gap samples on the leading plan.mc_snapshots snapshots
// when requested.  Snapshots are distributed over opts.workers threads and
// stored by index, so results are identical for any worker count.
TrialResults run_trials(const SystemConfig& config, const TrialPlan& plan,
                        const RunOptions& opts = {});

} // namespace cellfree
