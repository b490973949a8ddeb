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

#include "cellfree/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace cellfree {

namespace {

// Stream ids under (base_seed, snapshot index); fading blocks get their own
// ids so other streams never shift when the fading count changes.
constexpr std::uint64_t kStreamPlacement = 0;
constexpr std::uint64_t kStreamShadowing = 1;
constexpr std::uint64_t kStreamPilots = 2;
constexpr std::uint64_t kStreamFadingBase = 16; // + block index

// Fading draws per seed block; raising num_fadings appends blocks without
// disturbing earlier draws.
constexpr int kFadingBlock = 4096;

// Floor on |g_hat| before division in the phase-only precoding factor; the
// zero event has probability zero but would poison a whole run.
constexpr double kMagnitudeFloor = 1e-30;

} // namespace

Snapshot make_snapshot(const SystemConfig& config, std::uint64_t base_seed, int index,
                       PilotMode mode) {
    Snapshot snap;
    {
        Rng rng(substream_seed(base_seed, index, kStreamPlacement));
        snap.net = place_network(config, rng);
    }
    {
        Rng rng(substream_seed(base_seed, index, kStreamShadowing));
        large_scale_fading(snap.net, config, rng);
    }
    const arma::cx_mat book = build_pilot_book(config.training_len, PilotBookKind::canonical);
    if (mode == PilotMode::random_assignment) {
        Rng rng(substream_seed(base_seed, index, kStreamPilots));
        snap.plan = assign_pilots_random(config.num_users, book, rng);
    } else {
        snap.plan = assign_pilots_round_robin(config.num_users, book);
    }
    snap.stats = estimation_stats(snap.net.beta, snap.plan, config.training_len, config.rho_up);
    snap.alloc_st = full_power_coeffs(snap.stats.gamma, Scheme::normalized);
    snap.alloc_lt = full_power_coeffs(snap.stats.gamma, Scheme::conventional);
    return snap;
}

McEstimate mc_effective_gains(const SystemConfig& config, const Snapshot& snap,
                              const PowerAllocation& alloc, const TrialPlan& plan,
                              int snapshot_index) {
    if (plan.num_fadings < 2)
        throw std::invalid_argument(
            "mc_effective_gains: at least 2 fading draws needed for a variance estimate");

    const int num_aps = static_cast<int>(snap.net.beta.n_rows);
    const int num_users = static_cast<int>(snap.net.beta.n_cols);
    const int tau_up = config.training_len;
    const double rho_d = config.rho_d;
    const double sqrt_tr = std::sqrt(tau_up * config.rho_up);
    const bool normalized = alloc.scheme == Scheme::normalized;

    const arma::mat sqrt_beta = arma::sqrt(snap.net.beta);
    const arma::mat sqrt_coeff = arma::sqrt(alloc.coeffs);

    // Moment totals over all draws, reduced in block order.
    arma::cx_mat sum_a(num_users, num_users, arma::fill::zeros);
    arma::mat sum_s(num_users, num_users, arma::fill::zeros);  // |a|^2
    arma::mat sum_s2(num_users, num_users, arma::fill::zeros); // |a|^4
    arma::vec diag_xx(num_users, arma::fill::zeros);           // (Re a_kk)^2
    arma::vec diag_yy(num_users, arma::fill::zeros);           // (Im a_kk)^2
    arma::vec diag_xy(num_users, arma::fill::zeros);           // Re * Im
    arma::vec diag_sx(num_users, arma::fill::zeros);           // |a|^2 Re
    arma::vec diag_sy(num_users, arma::fill::zeros);           // |a|^2 Im

    // Per-block partials and per-draw workspaces.
    arma::cx_mat blk_a(num_users, num_users);
    arma::mat blk_s(num_users, num_users), blk_s2(num_users, num_users);
    arma::vec blk_xx(num_users), blk_yy(num_users), blk_xy(num_users);
    arma::vec blk_sx(num_users), blk_sy(num_users);
    arma::cx_mat g(num_aps, num_users);     // channel draw
    arma::cx_mat noise(tau_up, num_aps);    // uplink pilot noise
    arma::cx_mat proj(num_aps, num_users);  // projected pilot observation
    arma::cx_mat prec(num_aps, num_users);  // sqrt(coeff) * precoding factor
    arma::cx_mat group;                     // per-pilot channel sums (fast path)
    if (snap.plan.canonical)
        group.set_size(num_aps, snap.plan.book.n_cols);

    const int num_blocks = (plan.num_fadings + kFadingBlock - 1) / kFadingBlock;
    int remaining = plan.num_fadings;
    for (int b = 0; b < num_blocks; ++b) {
        Rng rng(substream_seed(plan.base_seed, static_cast<std::uint64_t>(snapshot_index),
                               kStreamFadingBase + static_cast<std::uint64_t>(b)));
        const int block_n = std::min(kFadingBlock, remaining);
        remaining -= block_n;
        blk_a.zeros();
        blk_s.zeros();
        blk_s2.zeros();
        blk_xx.zeros();
        blk_yy.zeros();
        blk_xy.zeros();
        blk_sx.zeros();
        blk_sy.zeros();

        for (int it = 0; it < block_n; ++it) {
            // Channel draw, column-major order (matches draw_channel).
            for (int k = 0; k < num_users; ++k) {
                std::complex<double>* gc = g.colptr(k);
                const double* sb = sqrt_beta.colptr(k);
                for (int m = 0; m < num_aps; ++m)
                    gc[m] = sb[m] * rng.cnormal();
            }
            // Pilot noise, column-major order of a tau_up x M matrix.
            for (int m = 0; m < num_aps; ++m) {
                std::complex<double>* nc = noise.colptr(m);
                for (int t = 0; t < tau_up; ++t)
                    nc[t] = rng.cnormal();
            }
            // Projected pilot observation (same contract as the training
            // module; re-derived here with reusable workspaces).
            if (snap.plan.canonical) {
                group.zeros();
                for (int k = 0; k < num_users; ++k) {
                    std::complex<double>* gp = group.colptr(snap.plan.assignment[k]);
                    const std::complex<double>* gc = g.colptr(k);
                    for (int m = 0; m < num_aps; ++m)
                        gp[m] += gc[m];
                }
                const std::complex<double>* nbase = noise.memptr();
                for (int k = 0; k < num_users; ++k) {
                    const int p = snap.plan.assignment[k];
                    const std::complex<double>* gp = group.colptr(p);
                    std::complex<double>* pj = proj.colptr(k);
                    for (int m = 0; m < num_aps; ++m)
                        pj[m] = sqrt_tr * gp[m] + nbase[p + m * tau_up];
                }
            } else {
                proj = sqrt_tr * g * snap.plan.gram.st() + (snap.plan.seq.t() * noise).st();
            }
            // LMMSE estimate and scaled conjugate precoder.
            for (int k = 0; k < num_users; ++k) {
                const double* cc = snap.stats.c.colptr(k);
                const double* sc = sqrt_coeff.colptr(k);
                const std::complex<double>* pj = proj.colptr(k);
                std::complex<double>* pr = prec.colptr(k);
                if (normalized) {
                    for (int m = 0; m < num_aps; ++m) {
                        const std::complex<double> ghat = cc[m] * pj[m];
                        const double mag = std::max(std::abs(ghat), kMagnitudeFloor);
                        pr[m] = (sc[m] / mag) * std::conj(ghat);
                    }
                } else {
                    for (int m = 0; m < num_aps; ++m)
                        pr[m] = sc[m] * std::conj(cc[m] * pj[m]);
                }
            }
            // Effective gains a_kk' = g_col(k) . prec_col(k') and moments.
            for (int kp = 0; kp < num_users; ++kp) {
                const std::complex<double>* pc = prec.colptr(kp);
                for (int k = 0; k < num_users; ++k) {
                    const std::complex<double>* gc = g.colptr(k);
                    double ar = 0.0, ai = 0.0;
                    for (int m = 0; m < num_aps; ++m) {
                        const double gr = gc[m].real(), gi = gc[m].imag();
                        const double pr = pc[m].real(), pi = pc[m].imag();
                        ar += gr * pr - gi * pi;
                        ai += gr * pi + gi * pr;
                    }
                    const double s = ar * ar + ai * ai;
                    blk_a(k, kp) += std::complex<double>(ar, ai);
                    blk_s(k, kp) += s;
                    blk_s2(k, kp) += s * s;
                    if (k == kp) {
                        blk_xx(k) += ar * ar;
                        blk_yy(k) += ai * ai;
                        blk_xy(k) += ar * ai;
                        blk_sx(k) += s * ar;
                        blk_sy(k) += s * ai;
                    }
                }
            }
        }

        sum_a += blk_a;
        sum_s += blk_s;
        sum_s2 += blk_s2;
        diag_xx += blk_xx;
        diag_yy += blk_yy;
        diag_xy += blk_xy;
        diag_sx += blk_sx;
        diag_sy += blk_sy;
    }

    const double n = static_cast<double>(plan.num_fadings);
    McEstimate est;
    est.num_fadings = plan.num_fadings;
    est.mean_gain = sum_a / n;
    est.mean_sq_gain = sum_s / n;
    est.ds_sq.set_size(num_users);
    est.ds_sq_se.set_size(num_users);
    est.bu.set_size(num_users);
    est.bu_se.set_size(num_users);
    est.ui.zeros(num_users, num_users);
    est.ui_se.zeros(num_users, num_users);
    est.sinr.set_size(num_users);
    est.rate.set_size(num_users);
    est.rate_se.set_size(num_users);

    for (int kp = 0; kp < num_users; ++kp) {
        for (int k = 0; k < num_users; ++k) {
            if (k == kp)
                continue;
            const double mean_s = sum_s(k, kp) / n;
            const double var_s = std::max(sum_s2(k, kp) - n * mean_s * mean_s, 0.0) / (n - 1.0);
            est.ui(k, kp) = rho_d * mean_s;
            est.ui_se(k, kp) = rho_d * std::sqrt(var_s / n);
        }
    }

    for (int k = 0; k < num_users; ++k) {
        const double xbar = sum_a(k, k).real() / n;
        const double ybar = sum_a(k, k).imag() / n;
        const double sbar = sum_s(k, k) / n;
        // Unbiased sample (co)variances of x = Re a_kk, y = Im a_kk, s = |a_kk|^2.
        const double vx = std::max(diag_xx(k) - n * xbar * xbar, 0.0) / (n - 1.0);
        const double vy = std::max(diag_yy(k) - n * ybar * ybar, 0.0) / (n - 1.0);
        const double cxy = (diag_xy(k) - n * xbar * ybar) / (n - 1.0);
        const double vs = std::max(sum_s2(k, k) - n * sbar * sbar, 0.0) / (n - 1.0);
        const double csx = (diag_sx(k) - n * sbar * xbar) / (n - 1.0);
        const double csy = (diag_sy(k) - n * sbar * ybar) / (n - 1.0);

        est.ds_sq(k) = rho_d * (xbar * xbar + ybar * ybar);
        // Delta method for |mean|^2, gradient (2 xbar, 2 ybar).
        const double v_ds =
            (4.0 * xbar * xbar * vx + 4.0 * ybar * ybar * vy + 8.0 * xbar * ybar * cxy) / n;
        est.ds_sq_se(k) = rho_d * std::sqrt(std::max(v_ds, 0.0));

        // Unbiased variance of a_kk.
        est.bu(k) = rho_d * (sbar - xbar * xbar - ybar * ybar) * n / (n - 1.0);
        // Delta method for sbar - xbar^2 - ybar^2, gradient (1, -2 xbar, -2 ybar).
        const double v_bu = (vs + 4.0 * xbar * xbar * vx + 4.0 * ybar * ybar * vy -
                             4.0 * xbar * csx - 4.0 * ybar * csy + 8.0 * xbar * ybar * cxy) /
                            n;
        est.bu_se(k) = rho_d * std::sqrt(std::max(v_bu, 0.0));
    }

    for (int k = 0; k < num_users; ++k) {
        double ui_sum = 0.0, ui_var = 0.0;
        for (int kp = 0; kp < num_users; ++kp) {
            ui_sum += est.ui(k, kp);
            ui_var += est.ui_se(k, kp) * est.ui_se(k, kp);
        }
        const double denom = est.bu(k) + ui_sum + 1.0;
        const double sinr = est.ds_sq(k) / denom;
        est.sinr(k) = sinr;
        est.rate(k) = std::log2(1.0 + sinr);
        // First-order propagation treating the term errors as independent.
        const double se_sq = est.ds_sq_se(k) * est.ds_sq_se(k) +
                             sinr * sinr * (est.bu_se(k) * est.bu_se(k) + ui_var);
        est.rate_se(k) = std::sqrt(se_sq) / (denom * (1.0 + sinr) * M_LN2);
    }
    return est;
}

std::vector<UiGapSample> ui_gap_from_estimate(const Snapshot& snap, const McEstimate& mc,
                                              double rho_d) {
    const arma::mat approx =
        ui_term(snap.alloc_st, snap.net.beta, snap.stats.gamma, snap.plan.gram_sq, rho_d);
    const int num_users = static_cast<int>(approx.n_rows);
    std::vector<UiGapSample> out;
    out.reserve(static_cast<std::size_t>(num_users) * (num_users - 1));
    for (int k = 0; k < num_users; ++k) {
        for (int kp = 0; kp < num_users; ++kp) {
            if (k == kp)
                continue;
            UiGapSample s;
            s.user = k;
            s.interferer = kp;
            s.actual = mc.ui(k, kp);
            s.approx = approx(k, kp);
            s.gap = std::abs(s.actual - s.approx);
            s.shared_pilot = snap.plan.gram_sq(k, kp) > 0.0;
            out.push_back(s);
        }
    }
    return out;
}

std::vector<UiGapSample> mc_ui_approximation_gap(const SystemConfig& config,
                                                 const Snapshot& snap, const TrialPlan& plan,
                                                 int snapshot_index) {
    const McEstimate mc = mc_effective_gains(config, snap, snap.alloc_st, plan, snapshot_index);
    return ui_gap_from_estimate(snap, mc, config.rho_d);
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples) {
    if (samples.empty())
        throw std::invalid_argument("empirical_cdf: empty sample list");
    std::sort(samples.begin(), samples.end());
    std::vector<std::pair<double, double>> out;
    out.reserve(samples.size());
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        out.emplace_back(samples[i], static_cast<double>(i + 1) / n);
    return out;
}

TrialResults run_trials(const SystemConfig& config, const TrialPlan& plan,
                        const RunOptions& opts) {
    if (plan.num_snapshots < 1)
        throw std::invalid_argument("run_trials: num_snapshots must be >= 1");

    const int n = plan.num_snapshots;
    const int mc_count = std::min(plan.mc_snapshots, n);
    const bool want_mc_st = opts.mc_normalized || opts.ui_gap;
    const bool want_mc_lt = opts.mc_conventional;

    TrialResults results;
    results.snapshots.resize(n);

    auto run_one = [&](int i) {
        const Snapshot snap = make_snapshot(config, plan.base_seed, i, opts.pilot_mode);
        SnapshotResult& r = results.snapshots[static_cast<std::size_t>(i)];
        r.closed_st = rate_closed_form(snap.net.beta, snap.stats.gamma, snap.plan.gram_sq,
                                       snap.alloc_st, config.rho_d);
        r.closed_lt = rate_closed_form(snap.net.beta, snap.stats.gamma, snap.plan.gram_sq,
                                       snap.alloc_lt, config.rho_d);
        if (i < mc_count) {
            if (want_mc_st) {
                r.mc_st = mc_effective_gains(config, snap, snap.alloc_st, plan, i);
                if (opts.ui_gap)
                    r.ui_gap = ui_gap_from_estimate(snap, *r.mc_st, config.rho_d);
            }
            if (want_mc_lt)
                r.mc_lt = mc_effective_gains(config, snap, snap.alloc_lt, plan, i);
        }
    };

    const int workers = std::max(1, std::min(opts.workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i)
            run_one(i);
        return results;
    }

    std::atomic<int> next{0};
    std::atomic<bool> stop{false};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (!stop.load(std::memory_order_relaxed)) {
                const int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n)
                    return;
                try {
                    run_one(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    stop.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
    return results;
}

} // namespace cellfree
