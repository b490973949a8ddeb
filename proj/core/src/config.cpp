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

#include "cellfree/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace cellfree {

namespace {

constexpr double kBoltzmann = 1.380649e-23; // J/K
constexpr double kNoiseTempK = 290.0;

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0)
            out += sep;
        out += parts[i];
    }
    return out;
}

struct FieldBinding {
    std::string key;
    std::function<void(SystemConfig&, const std::string&)> set;
    std::function<std::string(const SystemConfig&)> get;
};

double parse_double(const std::string& key, const std::string& value,
                    std::vector<std::string>& errors) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double parsed = std::strtod(begin, &end);
    while (end != nullptr && (*end == ' ' || *end == '\t'))
        ++end;
    if (end == begin || end == nullptr || *end != '\0' || !std::isfinite(parsed)) {
        errors.push_back(key + ": not a finite number: '" + value + "'");
        return 0.0;
    }
    return parsed;
}

int parse_int(const std::string& key, const std::string& value,
              std::vector<std::string>& errors) {
    const size_t before = errors.size();
    const double parsed = parse_double(key, value, errors);
    if (errors.size() != before)
        return 0;
    if (parsed != std::floor(parsed) || std::abs(parsed) > 1e9) {
        errors.push_back(key + ": not an integer: '" + value + "'");
        return 0;
    }
    return static_cast<int>(parsed);
}

const std::vector<FieldBinding>& bindings() {
    auto bind_int = [](std::string key, int SystemConfig::* field) {
        return FieldBinding{
            key,
            [key, field](SystemConfig& c, const std::string& v) {
                std::vector<std::string> errs;
                const int parsed = parse_int(key, v, errs);
                if (!errs.empty())
                    throw validation_error(errs);
                c.*field = parsed;
            },
            [field](const SystemConfig& c) { return format_full(c.*field); }};
    };
    auto bind_double = [](std::string key, double SystemConfig::* field) {
        return FieldBinding{
            key,
            [key, field](SystemConfig& c, const std::string& v) {
                std::vector<std::string> errs;
                const double parsed = parse_double(key, v, errs);
                if (!errs.empty())
                    throw validation_error(errs);
                c.*field = parsed;
            },
            [field](const SystemConfig& c) { return format_full(c.*field); }};
    };
    static const std::vector<FieldBinding> table = {
        bind_int("num_aps", &SystemConfig::num_aps),
        bind_int("num_users", &SystemConfig::num_users),
        bind_int("coherence_len", &SystemConfig::coherence_len),
        bind_int("training_len", &SystemConfig::training_len),
        bind_double("area_side", &SystemConfig::area_side),
        bind_double("carrier_freq", &SystemConfig::carrier_freq),
        bind_double("bandwidth", &SystemConfig::bandwidth),
        bind_double("ap_height", &SystemConfig::ap_height),
        bind_double("user_height", &SystemConfig::user_height),
        bind_double("ap_gain_dbi", &SystemConfig::ap_gain_dbi),
        bind_double("user_gain_dbi", &SystemConfig::user_gain_dbi),
        bind_double("noise_figure_db", &SystemConfig::noise_figure_db),
        bind_double("ap_power_w", &SystemConfig::ap_power_w),
        bind_double("user_power_w", &SystemConfig::user_power_w),
        bind_double("shadow_sigma_db", &SystemConfig::shadow_sigma_db),
        bind_double("pathloss_d0", &SystemConfig::pathloss_d0),
        bind_double("pathloss_d1", &SystemConfig::pathloss_d1),
        bind_double("pathloss_fixed_db", &SystemConfig::pathloss_fixed_db),
        bind_double("rho_d", &SystemConfig::rho_d),
        bind_double("rho_up", &SystemConfig::rho_up),
    };
    return table;
}

} // namespace

validation_error::validation_error(std::vector<std::string> violations)
    : std::runtime_error("invalid configuration: " + join(violations, "; ")),
      violations_(std::move(violations)) {}

double fixed_attenuation_db(const SystemConfig& config) {
    const double f_mhz = config.carrier_freq / 1e6;
    const double lf = std::log10(f_mhz);
    // COST231-Hata (d in km, f in MHz), re-referenced to d in meters by the
    // -105 dB term (35 dB/decade over three decades).
    const double hata = 46.3 + 33.9 * lf - 13.82 * std::log10(config.ap_height) -
                        (1.1 * lf - 0.7) * config.user_height + (1.56 * lf - 0.8);
    return hata - 105.0 - config.ap_gain_dbi - config.user_gain_dbi;
}

double noise_power_w(const SystemConfig& config) {
    return config.bandwidth * kBoltzmann * kNoiseTempK *
           std::pow(10.0, config.noise_figure_db / 10.0);
}

SystemConfig resolve_config(const SystemConfig& defaults, const ConfigOverrides& overrides) {
    SystemConfig config = defaults;
    std::vector<std::string> errors;

    for (const auto& [key, value] : overrides) {
        bool known = false;
        for (const auto& binding : bindings()) {
            if (binding.key == key) {
                known = true;
                try {
                    binding.set(config, value);
                } catch (const validation_error& e) {
                    for (const auto& v : e.violations())
                        errors.push_back(v);
                }
                break;
            }
        }
        if (!known)
            errors.push_back("unknown configuration key: '" + key + "'");
    }
    if (!errors.empty())
        throw validation_error(errors);

    if (config.training_len == 0)
        config.training_len = (config.num_users + 1) / 2; // tau_up = K/2, rounded up
    if (std::isnan(config.pathloss_fixed_db))
        config.pathloss_fixed_db = fixed_attenuation_db(config);
    const double noise_w = noise_power_w(config);
    if (config.rho_d == 0.0 && noise_w > 0.0)
        config.rho_d = config.ap_power_w / noise_w;
    if (config.rho_up == 0.0 && noise_w > 0.0)
        config.rho_up = config.user_power_w / noise_w;

    validate_config(config);
    return config;
}

SystemConfig resolve_config(const ConfigOverrides& overrides) {
    return resolve_config(SystemConfig{}, overrides);
}

void validate_config(const SystemConfig& config) {
    std::vector<std::string> errors;
    auto require = [&errors](bool ok, const std::string& message) {
        if (!ok)
            errors.push_back(message);
    };

    require(config.num_users >= 1, "num_users must be >= 1");
    require(config.num_aps > config.num_users,
            "num_aps must exceed num_users (M > K), got M=" + format_full(config.num_aps) +
                " K=" + format_full(config.num_users));
    require(config.coherence_len >= 1, "coherence_len must be >= 1");
    require(config.training_len >= 1, "training_len must be >= 1");
    require(config.training_len < config.coherence_len,
            "training_len must be < coherence_len, got tau_up=" +
                format_full(config.training_len) + " tau=" + format_full(config.coherence_len));
    require(config.area_side > 0.0, "area_side must be positive");
    require(config.carrier_freq > 0.0, "carrier_freq must be positive");
    require(config.bandwidth > 0.0, "bandwidth must be positive");
    require(config.ap_height > 0.0, "ap_height must be positive");
    require(config.user_height > 0.0, "user_height must be positive");
    require(config.ap_power_w > 0.0, "ap_power_w must be positive");
    require(config.user_power_w > 0.0, "user_power_w must be positive");
    require(config.shadow_sigma_db >= 0.0, "shadow_sigma_db must be >= 0");
    require(config.pathloss_d0 > 0.0, "pathloss_d0 must be positive");
    require(config.pathloss_d1 > config.pathloss_d0, "pathloss_d1 must exceed pathloss_d0");
    require(config.rho_d > 0.0, "rho_d must be positive");
    require(config.rho_up > 0.0, "rho_up must be positive");

    if (!errors.empty())
        throw validation_error(errors);
}

std::vector<std::pair<std::string, std::string>> config_items(const SystemConfig& config) {
    std::vector<std::pair<std::string, std::string>> items;
    items.reserve(bindings().size());
    for (const auto& binding : bindings())
        items.emplace_back(binding.key, binding.get(config));
    return items;
}

ConfigOverrides parse_config_text(const std::string& text) {
    ConfigOverrides overrides;
    std::istringstream stream(text);
    std::string line;
    auto trim = [](std::string s) {
        const auto begin = s.find_first_not_of(" \t\r");
        if (begin == std::string::npos)
            return std::string();
        const auto end = s.find_last_not_of(" \t\r");
        return s.substr(begin, end - begin + 1);
    };
    auto looks_like_key = [](const std::string& s) {
        if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_'))
            return false;
        for (const char ch : s)
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
                return false;
        return true;
    };
    while (std::getline(stream, line)) {
        std::string stripped = trim(line);
        if (stripped.rfind("#", 0) == 0)
            stripped = trim(stripped.substr(1));
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            continue;
        const std::string key = trim(stripped.substr(0, eq));
        if (!looks_like_key(key))
            continue;
        overrides[key] = trim(stripped.substr(eq + 1));
    }
    return overrides;
}

ConfigOverrides parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& binding : bindings())
            out.push_back(binding.key);
        return out;
    }();
    return keys;
}

std::string format_full(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string format_full(int value) {
    return std::to_string(value);
}

} // namespace cellfree
