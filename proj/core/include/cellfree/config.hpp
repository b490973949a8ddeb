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

#ifndef CELLFREE_CONFIG_HPP
#define CELLFREE_CONFIG_HPP

#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cellfree {

// Thrown by resolve_config / validate_config. Carries every violation found,
// not just the first one.
class validation_error : public std::runtime_error {
  public:
    explicit validation_error(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

  private:
    std::vector<std::string> violations_;
};

// Full scenario description. Defaults reproduce the standard simulation
// setup: M = 100 single-antenna APs and K = 40 users on a 1x1 km wrapped
// square, 1.9 GHz carrier, 20 MHz bandwidth, tau = 200 symbol coherence
// interval, 9 dB noise figure, 200 mW AP / 100 mW user radiated power.
//
// Fields marked "derived" are filled by resolve_config when left at their
// sentinel (0 or NaN) and can be pinned explicitly through overrides.
struct SystemConfig {
    int num_aps = 100;       // M
    int num_users = 40;      // K, must satisfy M > K >= 1
    int coherence_len = 200; // tau, symbols per coherence interval
    int training_len = 0;    // tau_up, symbols of uplink training; 0 = ceil(K/2)

    double area_side = 1000.0;    // side of the wrap-around square, m
    double carrier_freq = 1.9e9;  // Hz
    double bandwidth = 20e6;      // Hz
    double ap_height = 15.0;      // m
    double user_height = 1.65;    // m
    double ap_gain_dbi = 0.0;
    double user_gain_dbi = 0.0;
    double noise_figure_db = 9.0;
    double ap_power_w = 0.2;
    double user_power_w = 0.1;
    double shadow_sigma_db = 8.0; // sigma_sh

    double pathloss_d0 = 10.0; // m, lower three-slope breakpoint
    double pathloss_d1 = 50.0; // m, upper three-slope breakpoint

    // Fixed attenuation of the three-slope model, dB, referenced to d in
    // meters. Derived from the COST231-Hata form minus 105 dB (the km -> m
    // re-referencing of the 35 log10(d) slope) minus the antenna gains.
    double pathloss_fixed_db = std::numeric_limits<double>::quiet_NaN();

    // Normalized SNRs: radiated power over thermal noise power
    // bandwidth * k_B * 290 K * 10^(NF/10). Derived unless overridden.
    double rho_d = 0.0;  // downlink data
    double rho_up = 0.0; // uplink pilot
};

// Flat key -> value overrides; keys are SystemConfig field names.
using ConfigOverrides = std::map<std::string, std::string>;

// COST231-Hata fixed attenuation for the config's RF parameters, dB,
// referenced to distance in meters (antenna gains folded in).
double fixed_attenuation_db(const SystemConfig& config);

// Thermal noise power in watts: bandwidth * k_B * 290 K * noise figure.
double noise_power_w(const SystemConfig& config);

// Applies overrides onto the given defaults, fills the derived fields
// (training_len, pathloss_fixed_db, rho_d, rho_up), and validates.
// Unknown keys and malformed values are rejected. Throws validation_error
// listing every violation.
SystemConfig resolve_config(const SystemConfig& defaults, const ConfigOverrides& overrides);
SystemConfig resolve_config(const ConfigOverrides& overrides = {});

// Checks invariants (M > K >= 1, tau_up < tau, positivity). Throws
// validation_error listing every violation.
void validate_config(const SystemConfig& config);

// Resolved config as ordered (key, value) pairs, full round-trip precision.
// Feeding these back through resolve_config reproduces the config exactly.
std::vector<std::pair<std::string, std::string>> config_items(const SystemConfig& config);

// Parses flat key=value text. Ignores blank lines, comment lines, and any
// line without a key=value shape; a leading "# " is stripped first, so the
// metadata header of an emitted CSV file is directly reusable as a config
// file. Keys are not validated here (resolve_config rejects unknown ones).
ConfigOverrides parse_config_text(const std::string& text);
ConfigOverrides parse_config_file(const std::string& path);

// Set of keys resolve_config accepts, in canonical order.
const std::vector<std::string>& config_keys();

// Full-precision number formatting shared by every emitter ("%.17g" shape,
// round-trips exactly through strtod).
std::string format_full(double value);
std::string format_full(int value);

} // namespace cellfree

#endif
