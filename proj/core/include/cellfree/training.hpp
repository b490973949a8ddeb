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

#ifndef CELLFREE_TRAINING_HPP
#define CELLFREE_TRAINING_HPP

#include <armadillo>
#include <vector>

#include "cellfree/rng.hpp"

namespace cellfree {

// Orthonormal pilot book layouts. Only the pairwise inner products of the
// assigned sequences enter the rate expressions, so the basis is free;
// `canonical` (coordinate basis) is the default, `fourier` is a fully mixed
// unitary alternative.
enum class PilotBookKind { canonical, fourier };

// tau_up mutually orthonormal complex sequences of length tau_up, one per
// column.
arma::cx_mat build_pilot_book(int tau_up, PilotBookKind kind = PilotBookKind::canonical);

// Pilot sequences of all K users plus the pairwise inner products the
// estimator and rate formulas consume.
struct PilotPlan {
    arma::cx_mat book;           // tau_up x n_pilots; empty for arbitrary plans
    std::vector<int> assignment; // user k -> pilot index; empty for arbitrary plans
    arma::cx_mat seq;            // tau_up x K, column k = phi_k, unit norm
    arma::cx_mat gram;           // K x K, gram(k,k') = phi_k^H phi_k'
    arma::mat gram_sq;           // K x K, |gram|^2; unit diagonal
    bool canonical = false;      // book is the coordinate basis

    // Arbitrary (not necessarily orthogonal) pilots. Columns are normalized
    // to unit norm; the gram matrix is computed numerically.
    static PilotPlan from_sequences(const arma::cx_mat& sequences);
};

// Assigns each of K users an independently uniform pilot index from the
// book (with replacement, so collisions occur whenever K > 1). The gram
// matrix is exact 0/1 from assignment equality, which is the infinite-
// precision inner product of any orthonormal book.
PilotPlan assign_pilots_random(int num_users, const arma::cx_mat& book, Rng& rng);

// Distinct pilots k -> k, requires num_users <= book size. Gives a
// contamination-free baseline.
PilotPlan assign_pilots_round_robin(int num_users, const arma::cx_mat& book);

// Linear MMSE estimation statistics. For every AP/user pair:
//   c_mk     = sqrt(tau_up rho_up) beta_mk /
//              (tau_up rho_up sum_k' beta_mk' |phi_k^H phi_k'|^2 + 1)
//   gamma_mk = sqrt(tau_up rho_up) beta_mk c_mk   (variance of g_hat_mk)
// gamma_mk <= beta_mk, with equality only for perfect estimation.
struct EstimationStats {
    arma::mat c;     // M x K
    arma::mat gamma; // M x K
};

EstimationStats estimation_stats(const arma::mat& beta, const PilotPlan& plan, int tau_up,
                                 double rho_up);

// One coherence interval: true channels, their LMMSE estimates, and the
// estimation errors. g = g_hat + g_tilde holds identically.
struct ChannelDraw {
    arma::cx_mat g;       // M x K
    arma::cx_mat g_hat;   // M x K
    arma::cx_mat g_tilde; // M x K
};

// Draws g_mk = sqrt(beta_mk) h_mk with h i.i.d. CN(0,1). Elements are drawn
// in column-major order (all APs of user 0, then user 1, ...).
arma::cx_mat draw_channel(const arma::mat& beta, Rng& rng);

// Simulates the uplink training phase for one coherence interval: every AP
// receives the superposition of all K pilots plus unit-variance noise,
// projects onto each user's sequence, and scales by c_mk. Noise is drawn in
// column-major order of a tau_up x M matrix (AP-by-AP).
ChannelDraw estimate_channel(const arma::cx_mat& g, const PilotPlan& plan, int tau_up,
                             double rho_up, const EstimationStats& stats, Rng& rng);

// Same with caller-provided noise (tau_up x M, column m = AP m's noise).
// Pass zeros to probe the noise-free limit.
ChannelDraw estimate_channel_with_noise(const arma::cx_mat& g, const PilotPlan& plan,
                                        int tau_up, double rho_up,
                                        const EstimationStats& stats,
                                        const arma::cx_mat& noise_up);

} // namespace cellfree

#endif
