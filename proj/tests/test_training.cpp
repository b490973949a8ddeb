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

#include <cmath>

#include <doctest.h>

#include "cellfree/training.hpp"

using namespace cellfree;

namespace {

// Shared-pilot plan for K users on one length-1 sequence.
PilotPlan all_shared_plan(int num_users)
{
    arma::cx_mat seqs(1, static_cast<arma::uword>(num_users));
    seqs.fill(arma::cx_double(1.0, 0.0));
    return PilotPlan::from_sequences(seqs);
}

} // namespace

TEST_SUITE("training") {

TEST_CASE("pilot books are orthonormal") {
    const arma::cx_mat canon = build_pilot_book(4);
    CHECK(arma::norm(canon - arma::cx_mat(arma::eye(4, 4), arma::zeros(4, 4)), "fro") == 0.0);

    const arma::cx_mat fourier = build_pilot_book(5, PilotBookKind::fourier);
    REQUIRE(fourier.n_rows == 5);
    REQUIRE(fourier.n_cols == 5);
    for (arma::uword t = 0; t < 5; ++t)
        for (arma::uword p = 0; p < 5; ++p)
            CHECK(std::abs(fourier(t, p)) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
    const arma::cx_mat gram = fourier.t() * fourier;
    CHECK(arma::norm(gram - arma::cx_mat(arma::eye(5, 5), arma::zeros(5, 5)), "fro") < 1e-12);
}

TEST_CASE("assignment-based plans carry an exact 0/1 gram") {
    const arma::cx_mat book = build_pilot_book(2);
    Rng rng(substream_seed(5, 0, 2));
    const PilotPlan plan = assign_pilots_random(6, book, rng);
    REQUIRE(plan.assignment.size() == 6);
    CHECK(plan.canonical);
    for (arma::uword k = 0; k < 6; ++k) {
        CHECK(plan.gram_sq(k, k) == 1.0);
        for (arma::uword j = 0; j < 6; ++j) {
            const double expected = plan.assignment[k] == plan.assignment[j] ? 1.0 : 0.0;
            CHECK(plan.gram_sq(k, j) == expected);
        }
    }
    // 6 users on 2 pilots: the pigeonhole forces at least one collision.
    double off_diag_hits = arma::accu(plan.gram_sq) - 6.0;
    CHECK(off_diag_hits > 0.0);
}

TEST_CASE("round-robin assignment is distinct or refuses") {
    const arma::cx_mat book = build_pilot_book(4);
    const PilotPlan plan = assign_pilots_round_robin(3, book);
    CHECK(plan.assignment == std::vector<int>{0, 1, 2});
    CHECK(arma::accu(plan.gram_sq) == 3.0); // identity: no pilot reuse
    CHECK_THROWS_AS((void)assign_pilots_round_robin(5, book), std::invalid_argument);
}

TEST_CASE("arbitrary sequences are normalized and validated") {
    arma::cx_mat seqs(2, 2, arma::fill::zeros);
    seqs(0, 0) = arma::cx_double(2.0, 0.0);                        // not unit norm
    seqs(0, 1) = seqs(1, 1) = arma::cx_double(0.0, 3.0);           // 45-degree overlap
    const PilotPlan plan = PilotPlan::from_sequences(seqs);
    CHECK(plan.gram_sq(0, 0) == 1.0);
    CHECK(plan.gram_sq(1, 1) == 1.0);
    CHECK(plan.gram_sq(0, 1) == doctest::Approx(0.5).epsilon(1e-12));

    arma::cx_mat with_zero(2, 1, arma::fill::zeros);
    CHECK_THROWS_AS((void)PilotPlan::from_sequences(with_zero), std::invalid_argument);
}

TEST_CASE("estimation statistics match the hand formula") {
    // Single AP/user, tau*rho = 1, beta = 1: c = 1/2, gamma = 1/2.
    arma::mat beta(1, 1, arma::fill::ones);
    const PilotPlan plan = all_shared_plan(1);
    const EstimationStats stats = estimation_stats(beta, plan, 1, 1.0);
    CHECK(stats.c(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(stats.gamma(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

    // Two users sharing the pilot contaminate each other's denominator:
    // c_mk = sqrt(tr) b_k / (tr (b_1 + b_2) + 1).
    arma::mat beta2(1, 2);
    beta2(0, 0) = 1.0;
    beta2(0, 1) = 3.0;
    const PilotPlan shared = all_shared_plan(2);
    const EstimationStats s2 = estimation_stats(beta2, shared, 1, 1.0);
    CHECK(s2.c(0, 0) == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
    CHECK(s2.gamma(0, 0) == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
    CHECK(s2.gamma(0, 1) == doctest::Approx(9.0 / 5.0).epsilon(1e-15));
}

TEST_CASE("gamma never exceeds beta and approaches it at high pilot power") {
    arma::mat beta(3, 2);
    beta(0, 0) = 0.3; beta(1, 0) = 2.0; beta(2, 0) = 1e-4;
    beta(0, 1) = 0.7; beta(1, 1) = 0.1; beta(2, 1) = 5.0;
    const PilotPlan plan = assign_pilots_round_robin(2, build_pilot_book(2));
    const EstimationStats low = estimation_stats(beta, plan, 2, 0.3);
    const EstimationStats high = estimation_stats(beta, plan, 2, 1e12);
    for (arma::uword m = 0; m < beta.n_rows; ++m) {
        for (arma::uword k = 0; k < beta.n_cols; ++k) {
            CHECK(low.gamma(m, k) <= beta(m, k));
            CHECK(high.gamma(m, k) <= beta(m, k));
            CHECK(high.gamma(m, k) == doctest::Approx(beta(m, k)).epsilon(1e-6));
        }
    }
}

TEST_CASE("channel draws have the requested large-scale variance") {
    arma::mat beta(2, 1);
    beta(0, 0) = 0.5;
    beta(1, 0) = 4.0;
    Rng rng(substream_seed(9, 0, 16));
    const int draws = 20000;
    arma::vec acc(2, arma::fill::zeros);
    for (int i = 0; i < draws; ++i) {
        const arma::cx_mat g = draw_channel(beta, rng);
        acc(0) += std::norm(g(0, 0));
        acc(1) += std::norm(g(1, 0));
    }
    // Fixed seed: deterministic. |g|^2 has variance beta^2, so the sample
    // mean sits within ~3 beta / sqrt(N) of beta.
    const double bound = 3.0 / std::sqrt(static_cast<double>(draws));
    CHECK(std::abs(acc(0) / draws - 0.5) < 0.5 * bound * 1.5);
    CHECK(std::abs(acc(1) / draws - 4.0) < 4.0 * bound * 1.5);
}

TEST_CASE("noise-free training recovers the scaled pilot projection") {
    // With zero uplink noise, g_hat_mk = c_mk sqrt(tau rho) sum_{j sharing} g_mj.
    arma::mat beta(2, 3);
    beta.fill(1.0);
    beta(0, 2) = 2.0;
    // users 0 and 2 share pilot 0, user 1 gets pilot 1
    const arma::cx_mat book = build_pilot_book(2);
    const PilotPlan plan = PilotPlan::from_sequences(
        arma::join_rows(arma::join_rows(book.col(0), book.col(1)), book.col(0)));
    const int tau_up = 2;
    const double rho_up = 0.7;
    const EstimationStats stats = estimation_stats(beta, plan, tau_up, rho_up);
    Rng draw_rng(substream_seed(1, 0, 17));
    const arma::cx_mat g = draw_channel(beta, draw_rng);
    const arma::cx_mat zeros(tau_up, 2, arma::fill::zeros);
    const ChannelDraw draw = estimate_channel_with_noise(g, plan, tau_up, rho_up, stats, zeros);
    const double sqrt_tr = std::sqrt(tau_up * rho_up);
    for (arma::uword m = 0; m < 2; ++m) {
        const arma::cx_double shared = g(m, 0) + g(m, 2);
        CHECK(std::abs(draw.g_hat(m, 0) - stats.c(m, 0) * sqrt_tr * shared) < 1e-12);
        CHECK(std::abs(draw.g_hat(m, 1) - stats.c(m, 1) * sqrt_tr * g(m, 1)) < 1e-12);
        CHECK(std::abs(draw.g_hat(m, 2) - stats.c(m, 2) * sqrt_tr * shared) < 1e-12);
    }
    CHECK(arma::norm(draw.g - draw.g_hat - draw.g_tilde, "fro") == 0.0);
}

TEST_CASE("estimates are unbiased with variance gamma") {
    arma::mat beta(1, 2);
    beta(0, 0) = 1.0;
    beta(0, 1) = 2.5;
    const PilotPlan plan = all_shared_plan(2);
    const int tau_up = 1;
    const double rho_up = 2.0;
    const EstimationStats stats = estimation_stats(beta, plan, tau_up, rho_up);
    Rng rng(substream_seed(21, 0, 16));
    const int draws = 40000;
    arma::cx_vec mean(2, arma::fill::zeros);
    arma::vec second(2, arma::fill::zeros);
    for (int i = 0; i < draws; ++i) {
        const arma::cx_mat g = draw_channel(beta, rng);
        const ChannelDraw draw = estimate_channel(g, plan, tau_up, rho_up, stats, rng);
        for (arma::uword k = 0; k < 2; ++k) {
            mean(k) += draw.g_hat(0, k);
            second(k) += std::norm(draw.g_hat(0, k));
        }
    }
    for (arma::uword k = 0; k < 2; ++k) {
        const double var = second(k) / draws;
        CHECK(std::abs(mean(k) / static_cast<double>(draws)) <
              4.0 * std::sqrt(stats.gamma(0, k) / draws));
        CHECK(var == doctest::Approx(stats.gamma(0, k)).epsilon(0.03));
    }
}

} // TEST_SUITE
