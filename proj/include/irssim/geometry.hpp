// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "irssim/config.hpp"

namespace irssim {

struct NodeLayout {
    Eigen::Vector2d ap;
    Eigen::Vector2d irs;
    std::vector<Eigen::Vector2d> users;  // K
    std::vector<Eigen::Vector2d> eves;   // J (index 0 orbits the AP when J >= 1)
};

// AP at the origin; users uniformly on a circle of radius r around the cluster
// center (d0, 0); J-1 eavesdroppers on radius r_e2 around the same center and
// one on radius r_e1 around the AP; IRS at (d, d_y).
NodeLayout place_nodes(const SystemConfig& cfg, std::uint64_t seed);

}  // namespace irssim
