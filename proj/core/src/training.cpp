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

#include "cellfree/training.hpp"

#include <cmath>
#include <stdexcept>

namespace cellfree {

namespace {

PilotPlan plan_from_assignment(const arma::cx_mat& book, std::vector<int> assignment,
                               bool canonical) {
    const int num_users = static_cast<int>(assignment.size());
    PilotPlan plan;
    plan.book = book;
    plan.assignment = std::move(assignment);
    plan.canonical = canonical;
    plan.seq.set_size(book.n_rows, num_users);
    for (int k = 0; k < num_users; ++k)
        plan.seq.col(k) = book.col(plan.assignment[k]);
    // Exact 0/1 gram: the book is orthonormal by construction, so the
    // infinite-precision inner product depends only on index equality.
    plan.gram.zeros(num_users, num_users);
    plan.gram_sq.zeros(num_users, num_users);
    for (int k = 0; k < num_users; ++k) {
        for (int j = 0; j < num_users; ++j) {
            if (plan.assignment[k] == plan.assignment[j]) {
                plan.gram(k, j) = 1.0;
                plan.gram_sq(k, j) = 1.0;
            }
        }
    }
    return plan;
}

} // namespace

arma::cx_mat build_pilot_book(int tau_up, PilotBookKind kind) {
    if (tau_up < 1)
        throw std::invalid_argument("build_pilot_book: tau_up must be >= 1");
    if (kind == PilotBookKind::canonical)
        return arma::cx_mat(arma::eye(tau_up, tau_up), arma::zeros(tau_up, tau_up));

    arma::cx_mat book(tau_up, tau_up);
    const double scale = 1.0 / std::sqrt(static_cast<double>(tau_up));
    for (int p = 0; p < tau_up; ++p)
        for (int t = 0; t < tau_up; ++t) {
            const double phase = -2.0 * M_PI * t * p / tau_up;
            book(t, p) = std::complex<double>(std::cos(phase), std::sin(phase)) * scale;
        }
    return book;
}

PilotPlan PilotPlan::from_sequences(const arma::cx_mat& sequences) {
    if (sequences.n_cols == 0 || sequences.n_rows == 0)
        throw std::invalid_argument("PilotPlan::from_sequences: empty sequence matrix");
    PilotPlan plan;
    plan.seq = sequences;
    for (arma::uword k = 0; k < plan.seq.n_cols; ++k) {
        const double norm = arma::norm(plan.seq.col(k));
        if (norm == 0.0)
            throw std::invalid_argument("PilotPlan::from_sequences: zero-norm sequence");
        plan.seq.col(k) /= norm;
    }
    const arma::uword num_users = plan.seq.n_cols;
    plan.gram.set_size(num_users, num_users);
    for (arma::uword k = 0; k < num_users; ++k) {
        plan.gram(k, k) = 1.0; // ||phi_k||^2 = 1 by the normalization above
        for (arma::uword j = k + 1; j < num_users; ++j) {
            plan.gram(k, j) = arma::cdot(plan.seq.col(k), plan.seq.col(j));
            plan.gram(j, k) = std::conj(plan.gram(k, j));
        }
    }
    plan.gram_sq = arma::square(arma::abs(plan.gram));
    return plan;
}

PilotPlan assign_pilots_random(int num_users, const arma::cx_mat& book, Rng& rng) {
    const int num_pilots = static_cast<int>(book.n_cols);
    std::vector<int> assignment(num_users);
    for (int k = 0; k < num_users; ++k)
        assignment[k] = rng.uniform_int(num_pilots);
    const bool canonical = arma::approx_equal(
        book, arma::cx_mat(arma::eye(book.n_rows, book.n_cols), arma::zeros(book.n_rows, book.n_cols)),
        "absdiff", 0.0);
    return plan_from_assignment(book, std::move(assignment), canonical);
}

PilotPlan assign_pilots_round_robin(int num_users, const arma::cx_mat& book) {
    if (num_users > static_cast<int>(book.n_cols))
        throw std::invalid_argument(
            "assign_pilots_round_robin: more users than pilots, assignment cannot be distinct");
    std::vector<int> assignment(num_users);
    for (int k = 0; k < num_users; ++k)
        assignment[k] = k;
    const bool canonical = arma::approx_equal(
        book, arma::cx_mat(arma::eye(book.n_rows, book.n_cols), arma::zeros(book.n_rows, book.n_cols)),
        "absdiff", 0.0);
    return plan_from_assignment(book, std::move(assignment), canonical);
}

EstimationStats estimation_stats(const arma::mat& beta, const PilotPlan& plan, int tau_up,
                                 double rho_up) {
    const int num_aps = static_cast<int>(beta.n_rows);
    const int num_users = static_cast<int>(beta.n_cols);
    if (static_cast<int>(plan.gram_sq.n_rows) != num_users)
        throw std::invalid_argument("estimation_stats: pilot plan size does not match beta");

    const double tr = tau_up * rho_up;
    const double sqrt_tr = std::sqrt(tr);

    EstimationStats stats;
    stats.c.set_size(num_aps, num_users);
    stats.gamma.set_size(num_aps, num_users);
    for (int k = 0; k < num_users; ++k) {
        for (int m = 0; m < num_aps; ++m) {
            double contaminated = 0.0;
            for (int j = 0; j < num_users; ++j)
                contaminated += beta(m, j) * plan.gram_sq(k, j);
            const double c = sqrt_tr * beta(m, k) / (tr * contaminated + 1.0);
            stats.c(m, k) = c;
            stats.gamma(m, k) = sqrt_tr * beta(m, k) * c;
        }
    }
    return stats;
}

arma::cx_mat draw_channel(const arma::mat& beta, Rng& rng) {
    arma::cx_mat g(beta.n_rows, beta.n_cols);
    for (arma::uword k = 0; k < beta.n_cols; ++k)
        for (arma::uword m = 0; m < beta.n_rows; ++m)
            g(m, k) = std::sqrt(beta(m, k)) * rng.cnormal();
    return g;
}

ChannelDraw estimate_channel(const arma::cx_mat& g, const PilotPlan& plan, int tau_up,
                             double rho_up, const EstimationStats& stats, Rng& rng) {
    arma::cx_mat noise_up(tau_up, g.n_rows);
    for (arma::uword m = 0; m < noise_up.n_cols; ++m)
        for (int t = 0; t < tau_up; ++t)
            noise_up(t, m) = rng.cnormal();
    return estimate_channel_with_noise(g, plan, tau_up, rho_up, stats, noise_up);
}

ChannelDraw estimate_channel_with_noise(const arma::cx_mat& g, const PilotPlan& plan,
                                        int tau_up, double rho_up,
                                        const EstimationStats& stats,
                                        const arma::cx_mat& noise_up) {
    const arma::uword num_aps = g.n_rows;
    const arma::uword num_users = g.n_cols;
    if (noise_up.n_rows != static_cast<arma::uword>(tau_up) || noise_up.n_cols != num_aps)
        throw std::invalid_argument("estimate_channel_with_noise: noise must be tau_up x M");

    const double sqrt_tr = std::sqrt(tau_up * rho_up);

    // Projected pilot observation, Eq.-(3) shape:
    //   y_mk = sqrt(tau rho) sum_k' (phi_k^H phi_k') g_mk' + phi_k^H w_m
    arma::cx_mat projected(num_aps, num_users);
    if (plan.canonical && !plan.assignment.empty()) {
        // Coordinate-basis book: the projection picks one noise row per
        // pilot and the signal part reduces to per-pilot group sums.
        arma::cx_mat group(num_aps, plan.book.n_cols, arma::fill::zeros);
        for (arma::uword k = 0; k < num_users; ++k)
            group.col(plan.assignment[k]) += g.col(k);
        const arma::cx_mat noise_t = noise_up.st(); // M x tau_up
        for (arma::uword k = 0; k < num_users; ++k)
            projected.col(k) =
                sqrt_tr * group.col(plan.assignment[k]) + noise_t.col(plan.assignment[k]);
    } else {
        projected = sqrt_tr * g * plan.gram.st() + (plan.seq.t() * noise_up).st();
    }

    ChannelDraw draw;
    draw.g = g;
    draw.g_hat.set_size(num_aps, num_users);
    for (arma::uword k = 0; k < num_users; ++k)
        for (arma::uword m = 0; m < num_aps; ++m)
            draw.g_hat(m, k) = stats.c(m, k) * projected(m, k);
    draw.g_tilde = draw.g - draw.g_hat;
    return draw;
}

} // namespace cellfree
