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

#ifndef CELLFREE_TOPOLOGY_HPP
#define CELLFREE_TOPOLOGY_HPP

#include <armadillo>
#include <vector>

#include "cellfree/config.hpp"
#include "cellfree/rng.hpp"

namespace cellfree {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// One network realization: geometry plus the M x K large-scale fading
// matrix. Immutable once filled; safe to share read-only across workers.
// Large-scale coefficients stay fixed for all coherence intervals of an
// experiment on this realization.
struct NetworkRealization {
    std::vector<Point> ap_positions;   // M
    std::vector<Point> user_positions; // K
    arma::mat pathloss_db;             // M x K, three-slope path loss, dB
    arma::mat shadow_db;               // M x K, sigma_sh * z_mk, dB
    arma::mat beta;                    // M x K, linear, 10^((PL+shadow)/10)
};

// Drops M APs and K users i.i.d. uniform over [0, area_side)^2.
// Only positions are filled; the fading matrices stay empty.
NetworkRealization place_network(const SystemConfig& config, Rng& rng);

// Shortest distance between p and q on the wrapped square: minimum over the
// original square and its eight neighbor replicas. Both points must lie in
// [0, area_side)^2; the result never exceeds area_side / sqrt(2).
double wrap_distance(const Point& p, const Point& q, double area_side);

// Three-slope path loss, dB (negative). 35 dB/decade beyond d1, 20 dB/decade
// between d0 and d1, constant below d0; continuous at both breakpoints.
// d is clamped to 1 m from below.
double path_loss_db(double d, const SystemConfig& config);

// Fills pathloss_db, shadow_db (sigma_sh * z_mk, z i.i.d. standard normal)
// and beta for already-placed positions. One shadowing draw per realization.
void large_scale_fading(NetworkRealization& net, const SystemConfig& config, Rng& rng);

} // namespace cellfree

#endif
