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

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "cellfree/config.hpp"
#include "cellfree/emit.hpp"
#include "cellfree/montecarlo.hpp"

namespace cellfree {

// The data products, one per figure-style experiment:
//   ui_gap:          MC-actual vs closed-form interference per user pair
//   term_comparison: DS/BU/interference terms and their st/lt ratios
//   rate_cdf:        closed-form rates for both schemes + MC rates (st)
//   rates_only:      closed-form rates for both schemes, no MC
enum class FigureKind { ui_gap, term_comparison, rate_cdf, rates_only };

const char* figure_name(FigureKind figure); // "ui-gap", "term-comparison", ...
FigureKind parse_figure_name(const std::string& name); // throws std::invalid_argument

// Experiment snapshots that also run the MC engine when the user does not say.
int default_mc_snapshots(FigureKind figure, int num_snapshots);

// A fully-specified experiment; the CLI builds one from defaults, an optional
// settings file, and command-line flags (in that order of precedence).
struct ExperimentSpec {
    FigureKind figure = FigureKind::rate_cdf;
    ConfigOverrides overrides; // onto the default SystemConfig
    TrialPlan plan;
    PilotMode pilot_mode = PilotMode::random_assignment;
    int workers = 1;                // never recorded in outputs
    bool overhead_adjusted = false; // add rate_closed_overhead samples
    bool cdf_layout = false;        // emit sorted CDF points instead of raw samples
    bool with_timestamp = false;    // stamp outputs (off by default: byte-stable reruns)
    std::string out_path;           // must be non-empty
    OutputFormat format = OutputFormat::csv;
};

// Keys the experiment layer may read from a settings file and embeds in
// output metadata (beyond the SystemConfig keys).
const std::vector<std::string>& experiment_keys();

// A settings file split into config overrides and experiment entries.
// Unknown keys are rejected, not ignored.
struct LoadedSettings {
    ConfigOverrides config;
    std::map<std::string, std::string> experiment;
};
LoadedSettings partition_settings(const ConfigOverrides& entries);

// Reads key=value text (emitted CSV headers parse directly) or, when the
// first non-space byte is '{', JSON with optional "config"/"experiment"
// objects.  Throws validation_error on unreadable files or unknown keys.
LoadedSettings load_settings_file(const std::string& path);

// Applies experiment-level entries (figure, seed, snapshots, fadings,
// mc_snapshots, pilot_mode, overhead_adjusted, cdf, format; timestamp is
// ignored) onto the spec.  Throws validation_error on malformed values.
void apply_experiment_settings(ExperimentSpec& spec,
                               const std::map<std::string, std::string>& entries);

// Runs the experiment end to end: resolves the config, simulates, writes
// spec.out_path in spec.format, prints a short human summary to `summary`,
// and returns the payload that was written.
EmitPayload run_figure(const ExperimentSpec& spec, std::ostream& summary);

// Order statistics on a copy of the sample list; both throw
// std::invalid_argument on empty input.  percentile_of uses the smallest
// sample whose empirical CDF reaches p (p in [0, 1]).
double median_of(std::vector<double> samples);
double percentile_of(std::vector<double> samples, double p);

} // namespace cellfree
