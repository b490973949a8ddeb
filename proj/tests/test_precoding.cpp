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

#include "cellfree/montecarlo.hpp"
#include "cellfree/precoding.hpp"

using namespace cellfree;

namespace {

constexpr double kPi = 3.14159265358979323846;

// A reproducible random mid-size instance from the real pipeline.
Snapshot random_instance(std::uint64_t seed)
{
    const SystemConfig cfg = resolve_config({{"num_aps", "12"}, {"num_users", "5"}});
    return make_snapshot(cfg, seed, 0);
}

} // namespace

TEST_SUITE("precoding") {

TEST_CASE("full-power coefficients saturate both constraints exactly") {
    arma::mat gamma(1, 2);
    gamma(0, 0) = 0.2;
    gamma(0, 1) = 0.3;

    const PowerAllocation st = full_power_coeffs(gamma, Scheme::normalized);
    CHECK(st.coeffs(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(st.coeffs(0, 1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(arma::accu(st.coeffs.row(0)) == 1.0);

    const PowerAllocation lt = full_power_coeffs(gamma, Scheme::conventional);
    CHECK(lt.coeffs(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lt.coeffs(0, 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(arma::accu(lt.coeffs.row(0) % gamma.row(0)) == doctest::Approx(1.0).epsilon(1e-15));

    // per-user spent power matches across schemes: eta = mu * gamma
    CHECK(arma::norm(st.coeffs - lt.coeffs % gamma, "fro") < 1e-15);

    arma::mat dead(1, 2, arma::fill::zeros);
    CHECK_THROWS_AS((void)full_power_coeffs(dead, Scheme::normalized), std::invalid_argument);
}

TEST_CASE("signal term matches hand substitutions") {
    arma::mat gamma(1, 1, arma::fill::ones);
    PowerAllocation alloc{Scheme::normalized, arma::mat(1, 1, arma::fill::ones)};
    CHECK(ds_term(alloc, gamma, 1.0)(0) == doctest::Approx(kPi / 4.0).epsilon(1e-15));

    arma::mat gamma2(2, 1, arma::fill::ones);
    PowerAllocation half{Scheme::normalized, arma::mat(2, 1)};
    half.coeffs.fill(0.5);
    CHECK(ds_term(half, gamma2, 1.0)(0) == doctest::Approx(kPi / 2.0).epsilon(1e-14));

    PowerAllocation conv{Scheme::conventional, arma::mat(1, 1, arma::fill::ones)};
    CHECK(ds_term(conv, gamma, 1.0)(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gain-uncertainty term matches hand substitutions") {
    arma::mat ones(1, 1, arma::fill::ones);
    PowerAllocation alloc{Scheme::normalized, ones};
    // perfect CSI: beta = gamma = 1
    CHECK(bu_term(alloc, ones, ones, 1.0)(0) == doctest::Approx(1.0 - kPi / 4.0).epsilon(1e-15));
    // no CSI: gamma = 0 leaves the full channel power
    arma::mat zero(1, 1, arma::fill::zeros);
    CHECK(bu_term(alloc, ones, zero, 1.0)(0) == doctest::Approx(1.0).epsilon(1e-15));

    PowerAllocation conv{Scheme::conventional, ones};
    CHECK(bu_term(conv, ones, ones, 1.0)(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interference term: overlap structure and hand value") {
    // M=2, K=2, shared pilot, all beta = gamma = 1, eta = 1/2:
    // coherent (4/pi)*2*(1/2) + noncoherent 1.
    arma::mat ones22(2, 2, arma::fill::ones);
    arma::mat half(2, 2);
    half.fill(0.5);
    arma::mat shared(2, 2, arma::fill::ones); // |phi^H phi|^2 = 1 everywhere
    PowerAllocation st{Scheme::normalized, half};
    const arma::mat ui = ui_term(st, ones22, ones22, shared, 1.0);
    CHECK(ui(0, 0) == 0.0); // zero diagonal
    CHECK(ui(1, 1) == 0.0);
    CHECK(ui(0, 1) == doctest::Approx(4.0 / kPi + 1.0).epsilon(1e-14));
    CHECK(ui(1, 0) == doctest::Approx(4.0 / kPi + 1.0).epsilon(1e-14));

    // orthogonal pilots: only the noncoherent part survives
    arma::mat ortho(2, 2, arma::fill::eye);
    const arma::mat ui_o = ui_term(st, ones22, ones22, ortho, 1.0);
    CHECK(ui_o(0, 1) == doctest::Approx(1.0).epsilon(1e-15)); // sum_m eta * beta = 1
    CHECK(ui_o(1, 0) == doctest::Approx(1.0).epsilon(1e-15));

    // single AP: the pairwise double sum is empty
    arma::mat ones12(1, 2, arma::fill::ones);
    arma::mat half12(1, 2);
    half12.fill(0.5);
    PowerAllocation st1{Scheme::normalized, half12};
    CHECK(ui_term(st1, ones12, ones12, shared, 1.0)(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("interference grows with the victim's large-scale gain") {
    const Snapshot snap = random_instance(31);
    const double rho_d = 1.0;
    const arma::mat base =
        ui_term(snap.alloc_st, snap.net.beta, snap.stats.gamma, snap.plan.gram_sq, rho_d);
    arma::mat bumped_beta = snap.net.beta;
    bumped_beta(3, 2) *= 1.5; // victim k=2 hears AP 3 better
    const arma::mat bumped =
        ui_term(snap.alloc_st, bumped_beta, snap.stats.gamma, snap.plan.gram_sq, rho_d);
    for (arma::uword kp = 0; kp < base.n_cols; ++kp) {
        if (kp == 2) continue;
        CHECK(bumped(2, kp) >= base(2, kp)); // victim row grows
    }
}

TEST_CASE("closed-form rates match the single-link hand values") {
    arma::mat ones(1, 1, arma::fill::ones);
    PowerAllocation st{Scheme::normalized, ones};
    const RateBreakdown rb = rate_closed_form(ones, ones, ones, st, 1.0);
    const double sinr = (kPi / 4.0) / (2.0 - kPi / 4.0);
    CHECK(rb.sinr(0) == doctest::Approx(0.6466301463814189).epsilon(1e-14));
    CHECK(rb.sinr(0) == doctest::Approx(sinr).epsilon(1e-14));
    CHECK(rb.rate(0) == doctest::Approx(0.7195165441948563).epsilon(1e-14));

    PowerAllocation lt{Scheme::conventional, ones};
    const RateBreakdown rb_lt = rate_closed_form(ones, ones, ones, lt, 1.0);
    CHECK(rb_lt.sinr(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rb_lt.rate(0) == doctest::Approx(0.5849625007211562).epsilon(1e-14));
}

TEST_CASE("vanishing downlink power gives vanishing rate") {
    const Snapshot snap = random_instance(17);
    const RateBreakdown rb = rate_closed_form(snap.net.beta, snap.stats.gamma,
                                              snap.plan.gram_sq, snap.alloc_st, 0.0);
    CHECK(arma::accu(rb.rate) == 0.0);
}

TEST_CASE("terms scale linearly in downlink power") {
    const Snapshot snap = random_instance(23);
    const double rho_d = 3.25;
    const RateBreakdown a = rate_closed_form(snap.net.beta, snap.stats.gamma, snap.plan.gram_sq,
                                             snap.alloc_st, rho_d);
    const RateBreakdown b = rate_closed_form(snap.net.beta, snap.stats.gamma, snap.plan.gram_sq,
                                             snap.alloc_st, 2.0 * rho_d);
    CHECK(arma::norm(b.ds_sq - 2.0 * a.ds_sq, "inf") == 0.0);
    CHECK(arma::norm(b.bu - 2.0 * a.bu, "inf") == 0.0);
    CHECK(arma::norm(b.ui - 2.0 * a.ui, "inf") == 0.0);
}

TEST_CASE("assembled denominator equals its printed rearrangement") {
    for (std::uint64_t seed : {2ULL, 3ULL, 4ULL}) {
        const Snapshot snap = random_instance(seed);
        const SystemConfig cfg = resolve_config({{"num_aps", "12"}, {"num_users", "5"}});
        for (const PowerAllocation* alloc : {&snap.alloc_st, &snap.alloc_lt}) {
            const RateBreakdown rb = rate_closed_form(snap.net.beta, snap.stats.gamma,
                                                      snap.plan.gram_sq, *alloc, cfg.rho_d);
            const arma::vec printed = expanded_denominator(snap.net.beta, snap.stats.gamma,
                                                           snap.plan.gram_sq, *alloc, cfg.rho_d);
            for (arma::uword k = 0; k < rb.sinr.n_elem; ++k) {
                const double assembled = rb.ds_sq(k) / rb.sinr(k);
                CHECK(assembled == doctest::Approx(printed(k)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("rate breakdown entries are nonnegative and consistent") {
    const Snapshot snap = random_instance(41);
    const SystemConfig cfg = resolve_config({{"num_aps", "12"}, {"num_users", "5"}});
    const RateBreakdown rb = rate_closed_form(snap.net.beta, snap.stats.gamma, snap.plan.gram_sq,
                                              snap.alloc_st, cfg.rho_d);
    for (arma::uword k = 0; k < rb.rate.n_elem; ++k) {
        CHECK(rb.ds_sq(k) >= 0.0);
        CHECK(rb.bu(k) >= 0.0);
        CHECK(rb.rate(k) == doctest::Approx(std::log2(1.0 + rb.sinr(k))).epsilon(1e-15));
        const double denom = rb.bu(k) + arma::accu(rb.ui.row(k)) + 1.0;
        CHECK(rb.sinr(k) == doctest::Approx(rb.ds_sq(k) / denom).epsilon(1e-15));
    }
}

} // TEST_SUITE
