// SPDX-License-Identifier: Apache-2.0
#include "irssim/geometry.hpp"

#include "irssim/rng.hpp"

namespace irssim {

NodeLayout place_nodes(const SystemConfig& cfg, std::uint64_t seed) {
    if (cfg.d0_m <= 0.0 || cfg.d_m <= 0.0)
        throw std::invalid_argument("place_nodes: geometry fields must be positive");

    Rng rng = Rng(seed).fork(0x6e6f6465);  // "node"
    NodeLayout layout;
    layout.ap = Eigen::Vector2d::Zero();
    layout.irs = Eigen::Vector2d(cfg.d_m, cfg.d_y_m);

    const Eigen::Vector2d center(cfg.d0_m, 0.0);
    layout.users.reserve(cfg.k_users);
    for (int k = 0; k < cfg.k_users; ++k) {
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        layout.users.push_back(center + cfg.r_m * Eigen::Vector2d(std::cos(phi), std::sin(phi)));
    }
    layout.eves.reserve(cfg.j_eves);
    if (cfg.j_eves >= 1) {
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        layout.eves.push_back(cfg.r_e1_m * Eigen::Vector2d(std::cos(phi), std::sin(phi)));
    }
    for (int j = 1; j < cfg.j_eves; ++j) {
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        layout.eves.push_back(center + cfg.r_e2_m * Eigen::Vector2d(std::cos(phi), std::sin(phi)));
    }
    return layout;
}

}  // namespace irssim
