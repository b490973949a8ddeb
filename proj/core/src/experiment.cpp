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

#include "cellfree/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cellfree/precoding.hpp"

namespace cellfree {

namespace {

std::string strf(const char* fmt, ...)
{
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return std::string(buf);
}

[[noreturn]] void fail(std::string message)
{
    throw validation_error({std::move(message)});
}

// Strict scalar parsers for settings-file values; the key names the culprit.
long long parse_ll(const std::string& key, const std::string& value)
{
    errno = 0;
    char* end = nullptr;
    long long parsed = std::strtoll(value.c_str(), &end, 10);
    if (errno != 0 || end == value.c_str() || *end != '\0')
        fail(strf("%s: expected an integer, got \"%s\"", key.c_str(), value.c_str()));
    return parsed;
}

int parse_int(const std::string& key, const std::string& value)
{
    long long parsed = parse_ll(key, value);
    if (parsed < INT_MIN || parsed > INT_MAX)
        fail(strf("%s: out of range: \"%s\"", key.c_str(), value.c_str()));
    return static_cast<int>(parsed);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value)
{
    errno = 0;
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(value.c_str(), &end, 10);
    if (errno != 0 || end == value.c_str() || *end != '\0' || value[0] == '-')
        fail(strf("%s: expected an unsigned integer, got \"%s\"", key.c_str(), value.c_str()));
    return static_cast<std::uint64_t>(parsed);
}

bool parse_flag(const std::string& key, const std::string& value)
{
    if (value == "0" || value == "false") return false;
    if (value == "1" || value == "true") return true;
    fail(strf("%s: expected 0/1/true/false, got \"%s\"", key.c_str(), value.c_str()));
}

PilotMode parse_pilot_mode(const std::string& value)
{
    if (value == "random") return PilotMode::random_assignment;
    if (value == "orthogonal") return PilotMode::forced_orthogonal;
    fail(strf("pilot_mode: expected random or orthogonal, got \"%s\"", value.c_str()));
}

const char* pilot_mode_name(PilotMode mode)
{
    return mode == PilotMode::forced_orthogonal ? "orthogonal" : "random";
}

std::string utc_timestamp()
{
    std::time_t now = std::time(nullptr);
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &parts);
    return std::string(buf);
}

// Appends one sample row; keeps call sites to a single line each.
void push(std::vector<SampleRow>& rows, long long snapshot, int user, const char* scheme,
          const char* quantity, double value)
{
    rows.push_back(SampleRow{snapshot, user, scheme, quantity, value});
}

// Groups sample values by (scheme, quantity) in first-appearance order and
// replaces them with empirical CDF points.
std::vector<CdfRow> to_cdf_rows(const std::vector<SampleRow>& samples)
{
    std::vector<std::pair<std::string, std::string>> keys;
    std::vector<std::vector<double>> pools;
    for (const SampleRow& row : samples) {
        std::pair<std::string, std::string> key(row.scheme, row.quantity);
        auto it = std::find(keys.begin(), keys.end(), key);
        std::size_t idx;
        if (it == keys.end()) {
            keys.push_back(key);
            pools.emplace_back();
            idx = keys.size() - 1;
        } else {
            idx = static_cast<std::size_t>(it - keys.begin());
        }
        pools[idx].push_back(row.value);
    }

    std::vector<CdfRow> rows;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        for (const auto& [value, probability] : empirical_cdf(pools[i]))
            rows.push_back(CdfRow{keys[i].first, keys[i].second, value, probability});
    }
    return rows;
}

// Median of |mc - closed| / closed over the validated users of one scheme.
void collect_rel_errors(const TrialResults& results, bool use_lt, std::vector<double>& out)
{
    for (const SnapshotResult& snap : results.snapshots) {
        const auto& mc = use_lt ? snap.mc_lt : snap.mc_st;
        if (!mc) continue;
        const arma::vec& closed = use_lt ? snap.closed_lt.rate : snap.closed_st.rate;
        for (arma::uword k = 0; k < closed.n_elem; ++k)
            out.push_back(std::abs(mc->rate(k) - closed(k)) / closed(k));
    }
}

} // namespace

const char* figure_name(FigureKind figure)
{
    switch (figure) {
    case FigureKind::ui_gap: return "ui-gap";
    case FigureKind::term_comparison: return "term-comparison";
    case FigureKind::rate_cdf: return "rate-cdf";
    case FigureKind::rates_only: return "rates";
    }
    return "rates";
}

FigureKind parse_figure_name(const std::string& name)
{
    if (name == "ui-gap") return FigureKind::ui_gap;
    if (name == "term-comparison") return FigureKind::term_comparison;
    if (name == "rate-cdf") return FigureKind::rate_cdf;
    if (name == "rates") return FigureKind::rates_only;
    throw std::invalid_argument("unknown figure: " + name);
}

int default_mc_snapshots(FigureKind figure, int num_snapshots)
{
    switch (figure) {
    case FigureKind::ui_gap: return std::min(5, num_snapshots);
    case FigureKind::rate_cdf: return std::min(50, num_snapshots);
    default: return 0;
    }
}

const std::vector<std::string>& experiment_keys()
{
    static const std::vector<std::string> keys = {
        "figure", "seed",  "snapshots",         "fadings", "mc_snapshots",
        "pilot_mode", "overhead_adjusted", "cdf", "format",  "timestamp",
    };
    return keys;
}

LoadedSettings partition_settings(const ConfigOverrides& entries)
{
    const std::vector<std::string>& cfg_keys = config_keys();
    const std::vector<std::string>& exp_keys = experiment_keys();

    LoadedSettings out;
    std::vector<std::string> unknown;
    for (const auto& [key, value] : entries) {
        if (std::find(cfg_keys.begin(), cfg_keys.end(), key) != cfg_keys.end())
            out.config[key] = value;
        else if (std::find(exp_keys.begin(), exp_keys.end(), key) != exp_keys.end())
            out.experiment[key] = value;
        else
            unknown.push_back(strf("unknown settings key: %s", key.c_str()));
    }
    if (!unknown.empty()) throw validation_error(std::move(unknown));
    return out;
}

LoadedSettings load_settings_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(strf("cannot read settings file: %s", path.c_str()));
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& err) {
            fail(strf("%s: %s", path.c_str(), err.what()));
        }
        ConfigOverrides entries;
        auto flatten = [&entries](const nlohmann::json& obj) {
            for (const auto& [key, value] : obj.items())
                entries[key] = value.is_string() ? value.get<std::string>() : value.dump();
        };
        if (doc.contains("config") || doc.contains("experiment")) {
            if (doc.contains("config")) flatten(doc.at("config"));
            if (doc.contains("experiment")) flatten(doc.at("experiment"));
        } else {
            flatten(doc);
        }
        return partition_settings(entries);
    }
    return partition_settings(parse_config_text(text));
}

void apply_experiment_settings(ExperimentSpec& spec,
                               const std::map<std::string, std::string>& entries)
{
    for (const auto& [key, value] : entries) {
        if (key == "figure") {
            try {
                spec.figure = parse_figure_name(value);
            } catch (const std::invalid_argument& err) {
                fail(err.what());
            }
        } else if (key == "seed") {
            spec.plan.base_seed = parse_u64(key, value);
        } else if (key == "snapshots") {
            spec.plan.num_snapshots = parse_int(key, value);
        } else if (key == "fadings") {
            spec.plan.num_fadings = parse_int(key, value);
        } else if (key == "mc_snapshots") {
            spec.plan.mc_snapshots = parse_int(key, value);
        } else if (key == "pilot_mode") {
            spec.pilot_mode = parse_pilot_mode(value);
        } else if (key == "overhead_adjusted") {
            spec.overhead_adjusted = parse_flag(key, value);
        } else if (key == "cdf") {
            spec.cdf_layout = parse_flag(key, value);
        } else if (key == "format") {
            try {
                spec.format = parse_output_format(value);
            } catch (const std::invalid_argument& err) {
                fail(err.what());
            }
        } else if (key == "timestamp") {
            // informational only; never read back
        } else {
            fail(strf("unknown experiment key: %s", key.c_str()));
        }
    }
}

double median_of(std::vector<double> samples)
{
    return percentile_of(std::move(samples), 0.5);
}

double percentile_of(std::vector<double> samples, double p)
{
    if (samples.empty()) throw std::invalid_argument("percentile_of: no samples");
    if (!(p >= 0.0) || !(p <= 1.0)) throw std::invalid_argument("percentile_of: p outside [0, 1]");
    std::sort(samples.begin(), samples.end());
    const double scaled = p * static_cast<double>(samples.size());
    std::size_t idx = static_cast<std::size_t>(std::ceil(scaled));
    if (idx > 0) --idx; // smallest i with (i + 1) / N >= p
    if (idx >= samples.size()) idx = samples.size() - 1;
    return samples[idx];
}

EmitPayload run_figure(const ExperimentSpec& spec, std::ostream& summary)
{
    // Plan-level validation: user input errors, not runtime failures.
    std::vector<std::string> violations;
    if (spec.out_path.empty()) violations.push_back("out: output path must not be empty");
    if (spec.plan.num_snapshots < 1) violations.push_back("snapshots: must be >= 1");
    if (spec.plan.mc_snapshots < 0) violations.push_back("mc_snapshots: must be >= 0");
    if (spec.workers < 1) violations.push_back("workers: must be >= 1");
    if (!violations.empty()) throw validation_error(std::move(violations));

    const SystemConfig cfg = resolve_config(spec.overrides);
    if (spec.pilot_mode == PilotMode::forced_orthogonal && cfg.num_users > cfg.training_len)
        fail("pilot_mode: orthogonal pilots need num_users <= training_len");

    TrialPlan plan = spec.plan;
    plan.mc_snapshots = std::min(plan.mc_snapshots, plan.num_snapshots);

    RunOptions opts;
    opts.pilot_mode = spec.pilot_mode;
    opts.workers = spec.workers;
    switch (spec.figure) {
    case FigureKind::rate_cdf:
        opts.mc_normalized = plan.mc_snapshots > 0;
        break;
    case FigureKind::ui_gap:
        if (plan.mc_snapshots < 1) fail("mc_snapshots: ui-gap needs at least 1");
        opts.ui_gap = true;
        break;
    case FigureKind::term_comparison:
    case FigureKind::rates_only:
        plan.mc_snapshots = 0; // closed forms only
        break;
    }
    if (plan.mc_snapshots > 0 && plan.num_fadings < 2)
        fail("fadings: must be >= 2 when Monte Carlo snapshots run");

    const TrialResults results = run_trials(cfg, plan, opts);

    const int num_users = cfg.num_users;
    const double overhead =
        1.0 - static_cast<double>(cfg.training_len) / static_cast<double>(cfg.coherence_len);

    EmitPayload payload;
    payload.cdf_layout = spec.cdf_layout;
    for (int s = 0; s < plan.num_snapshots; ++s) {
        const SnapshotResult& snap = results.snapshots[static_cast<std::size_t>(s)];
        switch (spec.figure) {
        case FigureKind::rate_cdf:
        case FigureKind::rates_only:
            for (int k = 0; k < num_users; ++k) {
                const double st = snap.closed_st.rate(static_cast<arma::uword>(k));
                const double lt = snap.closed_lt.rate(static_cast<arma::uword>(k));
                push(payload.samples, s, k, "st", "rate_closed", st);
                push(payload.samples, s, k, "lt", "rate_closed", lt);
                if (snap.mc_st)
                    push(payload.samples, s, k, "st", "rate_mc",
                         snap.mc_st->rate(static_cast<arma::uword>(k)));
                if (spec.overhead_adjusted) {
                    push(payload.samples, s, k, "st", "rate_closed_overhead", overhead * st);
                    push(payload.samples, s, k, "lt", "rate_closed_overhead", overhead * lt);
                }
            }
            break;
        case FigureKind::term_comparison:
            for (int k = 0; k < num_users; ++k) {
                const arma::uword u = static_cast<arma::uword>(k);
                const double ds_st = snap.closed_st.ds_sq(u);
                const double ds_lt = snap.closed_lt.ds_sq(u);
                const double bu_st = snap.closed_st.bu(u);
                const double bu_lt = snap.closed_lt.bu(u);
                push(payload.samples, s, k, "st", "ds_sq", ds_st);
                push(payload.samples, s, k, "lt", "ds_sq", ds_lt);
                push(payload.samples, s, k, "st", "bu", bu_st);
                push(payload.samples, s, k, "lt", "bu", bu_lt);
                push(payload.samples, s, k, "st", "ui_sum", arma::accu(snap.closed_st.ui.row(u)));
                push(payload.samples, s, k, "lt", "ui_sum", arma::accu(snap.closed_lt.ui.row(u)));
                push(payload.samples, s, k, "ratio", "ds_ratio", ds_st / ds_lt);
                push(payload.samples, s, k, "ratio", "bu_ratio", (bu_lt - bu_st) / bu_lt);
            }
            break;
        case FigureKind::ui_gap:
            for (const UiGapSample& pair : snap.ui_gap) {
                push(payload.samples, s, pair.user, "st", "ui_actual", pair.actual);
                push(payload.samples, s, pair.user, "st", "ui_approx", pair.approx);
                push(payload.samples, s, pair.user, "st", "ui_gap", pair.gap);
            }
            break;
        }
    }
    if (spec.cdf_layout) {
        payload.cdf = to_cdf_rows(payload.samples);
        payload.samples.clear();
    }

    payload.config = config_items(cfg);
    payload.experiment.emplace_back("figure", figure_name(spec.figure));
    payload.experiment.emplace_back("seed", std::to_string(plan.base_seed));
    payload.experiment.emplace_back("snapshots", format_full(plan.num_snapshots));
    payload.experiment.emplace_back("fadings", format_full(plan.num_fadings));
    payload.experiment.emplace_back("mc_snapshots", format_full(plan.mc_snapshots));
    payload.experiment.emplace_back("pilot_mode", pilot_mode_name(spec.pilot_mode));
    payload.experiment.emplace_back("overhead_adjusted", spec.overhead_adjusted ? "1" : "0");
    payload.experiment.emplace_back("cdf", spec.cdf_layout ? "1" : "0");
    payload.experiment.emplace_back("format", output_format_name(spec.format));
    if (spec.with_timestamp) payload.experiment.emplace_back("timestamp", utc_timestamp());

    write_payload_file(spec.out_path, payload, spec.format);

    // Human summary on stdout; the full data lives in the output file.
    const std::size_t rows = spec.cdf_layout ? payload.cdf.size() : payload.samples.size();
    summary << strf("%s: wrote %zu %s rows to %s\n", figure_name(spec.figure), rows,
                    spec.cdf_layout ? "cdf" : "sample", spec.out_path.c_str());
    summary << strf("M=%d K=%d tau_up=%d, snapshots=%d (mc on %d), fadings=%d, seed=%s\n",
                    cfg.num_aps, cfg.num_users, cfg.training_len, plan.num_snapshots,
                    plan.mc_snapshots, plan.num_fadings, std::to_string(plan.base_seed).c_str());

    std::vector<double> st_rates, lt_rates;
    for (const SnapshotResult& snap : results.snapshots) {
        for (arma::uword k = 0; k < snap.closed_st.rate.n_elem; ++k) {
            st_rates.push_back(snap.closed_st.rate(k));
            lt_rates.push_back(snap.closed_lt.rate(k));
        }
    }
    summary << strf("closed-form rate, bits/s/Hz: st median %.4f, p5 %.4f | lt median %.4f, p5 %.4f\n",
                    median_of(st_rates), percentile_of(st_rates, 0.05), median_of(lt_rates),
                    percentile_of(lt_rates, 0.05));

    if (spec.figure == FigureKind::term_comparison) {
        std::vector<double> ds_ratio, bu_ratio;
        for (const SnapshotResult& snap : results.snapshots) {
            for (arma::uword k = 0; k < snap.closed_st.ds_sq.n_elem; ++k) {
                ds_ratio.push_back(snap.closed_st.ds_sq(k) / snap.closed_lt.ds_sq(k));
                bu_ratio.push_back((snap.closed_lt.bu(k) - snap.closed_st.bu(k)) /
                                   snap.closed_lt.bu(k));
            }
        }
        summary << strf("term ratios: median ds st/lt %.6f (pi/4 = %.6f), median bu relief %.4f\n",
                        median_of(ds_ratio), std::acos(-1.0) / 4.0, median_of(bu_ratio));
    }

    std::vector<double> rel_err;
    collect_rel_errors(results, false, rel_err);
    if (!rel_err.empty())
        summary << strf("mc check (st): median |mc-closed|/closed = %.4f over %zu user-snapshots\n",
                        median_of(rel_err), rel_err.size());

    if (spec.figure == FigureKind::ui_gap) {
        std::vector<double> shared_rel, all_actual;
        std::size_t shared = 0, total = 0;
        for (const SnapshotResult& snap : results.snapshots) {
            for (const UiGapSample& pair : snap.ui_gap) {
                ++total;
                all_actual.push_back(pair.actual);
                if (pair.shared_pilot && pair.actual > 0.0) {
                    ++shared;
                    shared_rel.push_back(pair.gap / pair.actual);
                }
            }
        }
        if (total > 0)
            summary << strf("ui pairs: %zu total, %zu shared-pilot; median actual %.6g\n", total,
                            shared, median_of(all_actual));
        if (!shared_rel.empty())
            summary << strf("shared-pilot pairs: median gap/actual = %.4f\n", median_of(shared_rel));
    }

    return payload;
}

} // namespace cellfree
