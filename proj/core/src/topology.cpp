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

#include "cellfree/topology.hpp"

#include <cmath>
#include <stdexcept>

namespace cellfree {

NetworkRealization place_network(const SystemConfig& config, Rng& rng) {
    NetworkRealization net;
    net.ap_positions.reserve(config.num_aps);
    for (int m = 0; m < config.num_aps; ++m)
        net.ap_positions.push_back({rng.uniform(0.0, config.area_side),
                                    rng.uniform(0.0, config.area_side)});
    net.user_positions.reserve(config.num_users);
    for (int k = 0; k < config.num_users; ++k)
        net.user_positions.push_back({rng.uniform(0.0, config.area_side),
                                      rng.uniform(0.0, config.area_side)});
    return net;
}

double wrap_distance(const Point& p, const Point& q, double area_side) {
    auto inside = [area_side](const Point& pt) {
        return pt.x >= 0.0 && pt.x < area_side && pt.y >= 0.0 && pt.y < area_side;
    };
    if (!inside(p) || !inside(q))
        throw std::invalid_argument("wrap_distance: point outside [0, area_side)^2");

    double best = std::numeric_limits<double>::infinity();
    for (int ix = -1; ix <= 1; ++ix) {
        for (int iy = -1; iy <= 1; ++iy) {
            const double dx = p.x - (q.x + ix * area_side);
            const double dy = p.y - (q.y + iy * area_side);
            const double d2 = dx * dx + dy * dy;
            if (d2 < best)
                best = d2;
        }
    }
    return std::sqrt(best);
}

double path_loss_db(double d, const SystemConfig& config) {
    const double L = config.pathloss_fixed_db;
    const double d0 = config.pathloss_d0;
    const double d1 = config.pathloss_d1;
    d = std::max(d, 1.0); // floor; the dB value would diverge at d -> 0
    if (d > d1)
        return -L - 35.0 * std::log10(d);
    if (d > d0)
        return -L - 15.0 * std::log10(d1) - 20.0 * std::log10(d);
    return -L - 15.0 * std::log10(d1) - 20.0 * std::log10(d0);
}

void large_scale_fading(NetworkRealization& net, const SystemConfig& config, Rng& rng) {
    const int num_aps = static_cast<int>(net.ap_positions.size());
    const int num_users = static_cast<int>(net.user_positions.size());
    net.pathloss_db.set_size(num_aps, num_users);
    net.shadow_db.set_size(num_aps, num_users);
    net.beta.set_size(num_aps, num_users);

    for (int k = 0; k < num_users; ++k) {
        for (int m = 0; m < num_aps; ++m) {
            const double d =
                wrap_distance(net.ap_positions[m], net.user_positions[k], config.area_side);
            net.pathloss_db(m, k) = path_loss_db(d, config);
            net.shadow_db(m, k) = config.shadow_sigma_db * rng.normal();
            net.beta(m, k) =
                std::pow(10.0, (net.pathloss_db(m, k) + net.shadow_db(m, k)) / 10.0);
        }
    }
}

} // namespace cellfree
