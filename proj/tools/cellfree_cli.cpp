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

// Command-line front end.  Settings are layered: built-in defaults, then an
// optional settings file (--config; emitted outputs parse back directly),
// then explicit flags.  Exit codes: 0 success, 2 invalid input, 1 runtime
// failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cellfree/experiment.hpp"
#include "cellfree/validate.hpp"

namespace {

using namespace cellfree;

// One flag set shared by the data-producing subcommands; CLI11 option
// handles let us detect which flags the user actually passed.
struct FlagBag {
    int aps = 0, users = 0, snapshots = 0, fadings = 0, mc_snapshots = 0, workers = 1;
    std::uint64_t seed = 1;
    double area_m = 0.0;
    std::string figure_arg, out, format = "csv", config_path;
    bool overhead = false, orthogonal = false, cdf = false, timestamp = false;

    CLI::Option *o_aps = nullptr, *o_users = nullptr, *o_snapshots = nullptr;
    CLI::Option *o_fadings = nullptr, *o_mc = nullptr, *o_workers = nullptr;
    CLI::Option *o_seed = nullptr, *o_area = nullptr, *o_out = nullptr;
    CLI::Option *o_format = nullptr, *o_config = nullptr;
};

void add_common_flags(CLI::App* cmd, FlagBag& bag)
{
    bag.o_aps = cmd->add_option("--aps", bag.aps, "number of access points M");
    bag.o_users = cmd->add_option("--users", bag.users, "number of users K");
    bag.o_snapshots = cmd->add_option("--snapshots", bag.snapshots,
                                      "independent network realizations");
    bag.o_fadings = cmd->add_option("--fadings", bag.fadings,
                                    "fading draws per Monte Carlo snapshot");
    bag.o_mc = cmd->add_option("--mc-snapshots", bag.mc_snapshots,
                               "leading snapshots that also run the Monte Carlo engine");
    bag.o_seed = cmd->add_option("--seed", bag.seed, "base seed of the run");
    bag.o_area = cmd->add_option("--area-m", bag.area_m, "side of the wrap-around square, m");
    bag.o_workers = cmd->add_option("--workers", bag.workers,
                                    "snapshot-level threads (never affects results)");
    bag.o_out = cmd->add_option("--out", bag.out, "output path (default <figure>.<format>)");
    bag.o_format = cmd->add_option("--format", bag.format, "output format")
                       ->check(CLI::IsMember({"csv", "json"}));
    bag.o_config = cmd->add_option("--config", bag.config_path,
                                   "settings file: key=value text (emitted files work) or JSON");
    cmd->add_flag("--overhead-adjusted", bag.overhead,
                  "also emit rates scaled by the training overhead");
    cmd->add_flag("--forced-orthogonal", bag.orthogonal,
                  "round-robin orthogonal pilots instead of random assignment");
    cmd->add_flag("--cdf", bag.cdf, "emit empirical CDF points instead of raw samples");
    cmd->add_flag("--timestamp", bag.timestamp,
                  "stamp outputs with the wall clock (breaks byte-stable reruns)");
}

// Layers defaults, the settings file, and flags into a full ExperimentSpec.
// `forced_figure` pins the figure for the `rates` subcommand.
ExperimentSpec build_spec(const FlagBag& bag, const FigureKind* forced_figure)
{
    ExperimentSpec spec;
    bool figure_known = false;
    bool mc_set = false;

    if (bag.o_config->count() > 0) {
        LoadedSettings loaded = load_settings_file(bag.config_path);
        spec.overrides = loaded.config;
        apply_experiment_settings(spec, loaded.experiment);
        figure_known = loaded.experiment.count("figure") > 0;
        mc_set = loaded.experiment.count("mc_snapshots") > 0;
    }

    if (forced_figure != nullptr) {
        spec.figure = *forced_figure;
        figure_known = true;
    } else if (!bag.figure_arg.empty()) {
        spec.figure = parse_figure_name(bag.figure_arg);
        figure_known = true;
    }
    if (!figure_known)
        throw validation_error({"figure: pass one of ui-gap / term-comparison / rate-cdf "
                                "or a settings file that names one"});

    if (bag.o_aps->count()) spec.overrides["num_aps"] = format_full(bag.aps);
    if (bag.o_users->count()) spec.overrides["num_users"] = format_full(bag.users);
    if (bag.o_area->count()) spec.overrides["area_side"] = format_full(bag.area_m);

    if (bag.o_seed->count()) spec.plan.base_seed = bag.seed;
    if (bag.o_snapshots->count()) spec.plan.num_snapshots = bag.snapshots;
    if (bag.o_fadings->count()) spec.plan.num_fadings = bag.fadings;
    if (bag.o_mc->count()) {
        spec.plan.mc_snapshots = bag.mc_snapshots;
        mc_set = true;
    }
    if (!mc_set)
        spec.plan.mc_snapshots = default_mc_snapshots(spec.figure, spec.plan.num_snapshots);

    if (bag.o_workers->count()) spec.workers = bag.workers;
    if (bag.o_format->count()) spec.format = parse_output_format(bag.format);
    if (bag.overhead) spec.overhead_adjusted = true;
    if (bag.orthogonal) spec.pilot_mode = PilotMode::forced_orthogonal;
    if (bag.cdf) spec.cdf_layout = true;
    if (bag.timestamp) spec.with_timestamp = true;

    spec.out_path = bag.o_out->count() ? bag.out
                                       : std::string(figure_name(spec.figure)) + "." +
                                             output_format_name(spec.format);
    return spec;
}

int run_validate(const ValidationOptions& opts)
{
    const std::vector<CheckResult> checks = oracle_equivalence_suite(opts);
    for (const CheckResult& check : checks)
        std::printf("[%s] %s: %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                    check.detail.c_str());
    return all_passed(checks) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"downlink rate simulator for cell-free massive MIMO"};
    app.require_subcommand(1);

    FlagBag fig_bag;
    CLI::App* fig_cmd = app.add_subcommand("figure", "produce one figure-style dataset");
    fig_cmd->add_option("kind", fig_bag.figure_arg, "ui-gap, term-comparison, or rate-cdf")
        ->check(CLI::IsMember({"ui-gap", "term-comparison", "rate-cdf"}));
    add_common_flags(fig_cmd, fig_bag);

    FlagBag rates_bag;
    CLI::App* rates_cmd =
        app.add_subcommand("rates", "closed-form per-user rates for both schemes");
    add_common_flags(rates_cmd, rates_bag);

    ValidationOptions val_opts;
    CLI::App* val_cmd =
        app.add_subcommand("validate", "run the oracle and Monte Carlo equivalence suite");
    val_cmd->add_option("--seed", val_opts.base_seed, "base seed of the suite");
    val_cmd->add_option("--fadings", val_opts.fadings, "fading draws for the MC checks");
    val_cmd->add_option("--draws", val_opts.estimator_draws, "draws for the estimator checks");
    val_cmd->add_option("--instances", val_opts.algebra_instances,
                        "random instances for the identity checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForAllHelp& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    }

    try {
        if (*val_cmd) return run_validate(val_opts);
        const bool use_rates = rates_cmd->parsed();
        const FigureKind rates_kind = FigureKind::rates_only;
        const FlagBag& bag = use_rates ? rates_bag : fig_bag;
        const ExperimentSpec spec = build_spec(bag, use_rates ? &rates_kind : nullptr);
        run_figure(spec, std::cout);
        return 0;
    } catch (const validation_error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
}
