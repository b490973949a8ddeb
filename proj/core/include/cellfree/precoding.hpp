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

#include <armadillo>

namespace cellfree {

// Downlink conjugate-beamforming variants.
//   normalized   ("st"): precoding factor g_hat* / |g_hat| (phase only); each AP
//                        meets a short-term power constraint sum_k eta_mk <= 1.
//   conventional ("lt"): precoding factor g_hat*; each AP meets a long-term
//                        power constraint sum_k mu_mk gamma_mk <= 1.
enum class Scheme { normalized, conventional };

// Stable labels used in emitted tables: "st" / "lt".
const char* scheme_label(Scheme scheme);

// Per-AP, per-user downlink power coefficients (eta for the normalized scheme,
// mu for the conventional one).
struct PowerAllocation {
    Scheme scheme = Scheme::normalized;
    arma::mat coeffs; // M x K, all entries >= 0
};

// Full-power coefficients that saturate each AP's power constraint exactly:
//   normalized:   eta_mk = gamma_mk / sum_k' gamma_mk'
//   conventional: mu_mk  = 1 / sum_k' gamma_mk'
// Per-user spent powers then coincide across schemes (eta_mk = mu_mk gamma_mk).
// Throws std::invalid_argument if some AP row of gamma sums to zero.
PowerAllocation full_power_coeffs(const arma::mat& gamma, Scheme scheme);

// Coherent beamforming gain |DS_k|^2, one entry per user.
//   normalized:   rho_d (pi/4) (sum_m sqrt(eta_mk gamma_mk))^2
//   conventional: rho_d (sum_m sqrt(mu_mk) gamma_mk)^2
arma::vec ds_term(const PowerAllocation& alloc, const arma::mat& gamma, double rho_d);

// Beamforming gain uncertainty E{|BU_k|^2}, one entry per user.
//   normalized:   rho_d sum_m eta_mk (beta_mk - (pi/4) gamma_mk)
//   conventional: rho_d sum_m mu_mk beta_mk gamma_mk
arma::vec bu_term(const PowerAllocation& alloc, const arma::mat& beta,
                  const arma::mat& gamma, double rho_d);

// Inter-user interference E{|UI_kk'|^2} as a K x K matrix; row k is the
// victim user, column k' the interfering data stream; the diagonal is zero.
//   normalized:   rho_d (4/pi) |phi_k'^H phi_k|^2
//                   sum_m sum_{n != m} sqrt(eta_mk' eta_nk' gamma_mk' gamma_nk')
//                                        beta_mk beta_nk / (beta_mk' beta_nk')
//                 + rho_d sum_m eta_mk' beta_mk
//   conventional: rho_d |phi_k'^H phi_k|^2 (sum_m sqrt(mu_mk') gamma_mk' beta_mk / beta_mk')^2
//                 + rho_d sum_m mu_mk' beta_mk gamma_mk'
// The normalized coherent part uses the first-order approximation
// E{g ghat*/|ghat|} ~ E{g ghat*} / E{|ghat|}; the conventional form is exact.
arma::mat ui_term(const PowerAllocation& alloc, const arma::mat& beta,
                  const arma::mat& gamma, const arma::mat& gram_sq, double rho_d);

// Closed-form per-user rate terms; rates are bits/s/Hz per channel use, with
// no training-overhead prefactor.
struct RateBreakdown {
    arma::vec ds_sq; // K, coherent gain |DS_k|^2
    arma::vec bu;    // K, gain uncertainty E{|BU_k|^2}
    arma::mat ui;    // K x K, E{|UI_kk'|^2}, zero diagonal
    arma::vec sinr;  // K, ds_sq / (bu + sum_{k' != k} ui + 1)
    arma::vec rate;  // K, log2(1 + sinr)
};

// Assembles ds/bu/ui terms into SINR and rate for every user.
RateBreakdown rate_closed_form(const arma::mat& beta, const arma::mat& gamma,
                               const arma::mat& gram_sq, const PowerAllocation& alloc,
                               double rho_d);

// SINR denominator computed by direct expansion: the interference sum runs
// over all users and the normalized scheme subtracts the coherent self-term
//   rho_d (pi/4) sum_m eta_mk gamma_mk
// instead of excluding k' = k term by term.  Algebraically identical to
// bu + sum_{k' != k} ui + 1; kept as an independent code path so tests can
// cross-check the rearrangement.
arma::vec expanded_denominator(const arma::mat& beta, const arma::mat& gamma,
                               const arma::mat& gram_sq, const PowerAllocation& alloc,
                               double rho_d);

} // namespace cellfree
