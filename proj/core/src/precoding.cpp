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

#include "cellfree/precoding.hpp"

#include <cmath>
#include <stdexcept>

namespace cellfree {

namespace {

constexpr double kQuarterPi = M_PI / 4.0;    // pi/4
constexpr double kFourOverPi = 4.0 / M_PI;   // 4/pi

void check_dims(const PowerAllocation& alloc, const arma::mat& gamma) {
    if (alloc.coeffs.n_rows != gamma.n_rows || alloc.coeffs.n_cols != gamma.n_cols)
        throw std::invalid_argument("power coefficients and gamma have mismatched sizes");
}

} // namespace

const char* scheme_label(Scheme scheme) {
    return scheme == Scheme::normalized ? "st" : "lt";
}

PowerAllocation full_power_coeffs(const arma::mat& gamma, Scheme scheme) {
    PowerAllocation alloc;
    alloc.scheme = scheme;
    alloc.coeffs.set_size(gamma.n_rows, gamma.n_cols);
    for (arma::uword m = 0; m < gamma.n_rows; ++m) {
        const double row_sum = arma::accu(gamma.row(m));
        if (!(row_sum > 0.0))
            throw std::invalid_argument(
                "full_power_coeffs: AP row of gamma sums to zero, coefficients undefined");
        for (arma::uword k = 0; k < gamma.n_cols; ++k)
            alloc.coeffs(m, k) =
                scheme == Scheme::normalized ? gamma(m, k) / row_sum : 1.0 / row_sum;
    }
    return alloc;
}

arma::vec ds_term(const PowerAllocation& alloc, const arma::mat& gamma, double rho_d) {
    check_dims(alloc, gamma);
    const arma::uword num_users = gamma.n_cols;
    arma::vec out(num_users);
    for (arma::uword k = 0; k < num_users; ++k) {
        double s = 0.0;
        if (alloc.scheme == Scheme::normalized) {
            for (arma::uword m = 0; m < gamma.n_rows; ++m)
                s += std::sqrt(alloc.coeffs(m, k) * gamma(m, k));
            out(k) = rho_d * kQuarterPi * s * s;
        } else {
            for (arma::uword m = 0; m < gamma.n_rows; ++m)
                s += std::sqrt(alloc.coeffs(m, k)) * gamma(m, k);
            out(k) = rho_d * s * s;
        }
    }
    return out;
}

arma::vec bu_term(const PowerAllocation& alloc, const arma::mat& beta,
                  const arma::mat& gamma, double rho_d) {
    check_dims(alloc, gamma);
    const arma::uword num_users = gamma.n_cols;
    arma::vec out(num_users);
    for (arma::uword k = 0; k < num_users; ++k) {
        double s = 0.0;
        if (alloc.scheme == Scheme::normalized) {
            for (arma::uword m = 0; m < gamma.n_rows; ++m)
                s += alloc.coeffs(m, k) * (beta(m, k) - kQuarterPi * gamma(m, k));
        } else {
            for (arma::uword m = 0; m < gamma.n_rows; ++m)
                s += alloc.coeffs(m, k) * beta(m, k) * gamma(m, k);
        }
        out(k) = rho_d * s;
    }
    return out;
}

arma::mat ui_term(const PowerAllocation& alloc, const arma::mat& beta,
                  const arma::mat& gamma, const arma::mat& gram_sq, double rho_d) {
    check_dims(alloc, gamma);
    const arma::uword num_aps = gamma.n_rows;
    const arma::uword num_users = gamma.n_cols;
    if (gram_sq.n_rows != num_users || gram_sq.n_cols != num_users)
        throw std::invalid_argument("ui_term: gram_sq must be K x K");

    arma::mat out(num_users, num_users, arma::fill::zeros);
    arma::vec t(num_aps);
    for (arma::uword kp = 0; kp < num_users; ++kp) { // interferer stream
        // Per-AP coherent factors depend only on the interferer column.
        double coh_sum = 0.0;
        double coh_sq = 0.0;
        for (arma::uword m = 0; m < num_aps; ++m) {
            t(m) = alloc.scheme == Scheme::normalized
                       ? std::sqrt(alloc.coeffs(m, kp) * gamma(m, kp)) / beta(m, kp)
                       : std::sqrt(alloc.coeffs(m, kp)) * gamma(m, kp) / beta(m, kp);
        }
        for (arma::uword k = 0; k < num_users; ++k) { // victim user
            if (k == kp)
                continue;
            coh_sum = 0.0;
            coh_sq = 0.0;
            double noncoh = 0.0;
            for (arma::uword m = 0; m < num_aps; ++m) {
                const double tm = t(m) * beta(m, k);
                coh_sum += tm;
                coh_sq += tm * tm;
                noncoh += alloc.coeffs(m, kp) * beta(m, k) *
                          (alloc.scheme == Scheme::normalized ? 1.0 : gamma(m, kp));
            }
            if (alloc.scheme == Scheme::normalized) {
                // sum_m sum_{n != m} t_m t_n = (sum t)^2 - sum t^2
                out(k, kp) = rho_d * kFourOverPi * gram_sq(k, kp) *
                                 (coh_sum * coh_sum - coh_sq) +
                             rho_d * noncoh;
            } else {
                out(k, kp) = rho_d * gram_sq(k, kp) * coh_sum * coh_sum + rho_d * noncoh;
            }
        }
    }
    return out;
}

RateBreakdown rate_closed_form(const arma::mat& beta, const arma::mat& gamma,
                               const arma::mat& gram_sq, const PowerAllocation& alloc,
                               double rho_d) {
    RateBreakdown r;
    r.ds_sq = ds_term(alloc, gamma, rho_d);
    r.bu = bu_term(alloc, beta, gamma, rho_d);
    r.ui = ui_term(alloc, beta, gamma, gram_sq, rho_d);
    const arma::uword num_users = gamma.n_cols;
    r.sinr.set_size(num_users);
    r.rate.set_size(num_users);
    for (arma::uword k = 0; k < num_users; ++k) {
        const double denom = r.bu(k) + arma::accu(r.ui.row(k)) + 1.0;
        r.sinr(k) = r.ds_sq(k) / denom;
        r.rate(k) = std::log2(1.0 + r.sinr(k));
    }
    return r;
}

arma::vec expanded_denominator(const arma::mat& beta, const arma::mat& gamma,
                               const arma::mat& gram_sq, const PowerAllocation& alloc,
                               double rho_d) {
    check_dims(alloc, gamma);
    const arma::uword num_aps = gamma.n_rows;
    const arma::uword num_users = gamma.n_cols;
    arma::vec out(num_users);
    for (arma::uword k = 0; k < num_users; ++k) {
        // Coherent cross terms over all interferer streams k' != k.
        double coherent = 0.0;
        for (arma::uword kp = 0; kp < num_users; ++kp) {
            if (kp == k)
                continue;
            double coh_sum = 0.0;
            double coh_sq = 0.0;
            for (arma::uword m = 0; m < num_aps; ++m) {
                const double tm =
                    (alloc.scheme == Scheme::normalized
                         ? std::sqrt(alloc.coeffs(m, kp) * gamma(m, kp))
                         : std::sqrt(alloc.coeffs(m, kp)) * gamma(m, kp)) *
                    beta(m, k) / beta(m, kp);
                coh_sum += tm;
                coh_sq += tm * tm;
            }
            if (alloc.scheme == Scheme::normalized)
                coherent += gram_sq(k, kp) * (coh_sum * coh_sum - coh_sq);
            else
                coherent += gram_sq(k, kp) * coh_sum * coh_sum;
        }
        // Noncoherent part summed over every stream, self included.
        double noncoh = 0.0;
        for (arma::uword kp = 0; kp < num_users; ++kp)
            for (arma::uword m = 0; m < num_aps; ++m)
                noncoh += alloc.coeffs(m, kp) * beta(m, k) *
                          (alloc.scheme == Scheme::normalized ? 1.0 : gamma(m, kp));
        if (alloc.scheme == Scheme::normalized) {
            // The full noncoherent sum overcounts the self stream by the
            // coherent gain, which the direct expansion subtracts back.
            double self_coh = 0.0;
            for (arma::uword m = 0; m < num_aps; ++m)
                self_coh += alloc.coeffs(m, k) * gamma(m, k);
            out(k) = rho_d * kFourOverPi * coherent + rho_d * noncoh -
                     rho_d * kQuarterPi * self_coh + 1.0;
        } else {
            out(k) = rho_d * coherent + rho_d * noncoh + 1.0;
        }
    }
    return out;
}

} // namespace cellfree
