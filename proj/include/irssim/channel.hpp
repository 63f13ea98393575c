// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "irssim/config.hpp"
#include "irssim/geometry.hpp"

namespace irssim {

// True channels of one realization plus the derived cascades
// g_cu[k] = diag(h_r[k]^H) G and g_ce[j] = diag(h_re[j]^H) G.
struct ChannelSet {
    Eigen::MatrixXcd g;                   // AP-IRS, N x M_t
    std::vector<Eigen::VectorXcd> h_d;    // AP-user, M_t each
    std::vector<Eigen::VectorXcd> h_r;    // IRS-user, N each
    std::vector<Eigen::VectorXcd> h_ed;   // AP-Eve, M_t each
    std::vector<Eigen::VectorXcd> h_re;   // IRS-Eve, N each
    std::vector<Eigen::MatrixXcd> g_cu;   // cascades, N x M_t each
    std::vector<Eigen::MatrixXcd> g_ce;
};

// Bounded-error estimates: each true channel lies within the stated
// Frobenius/Euclidean ball around its estimate.
struct CsiEstimate {
    Eigen::MatrixXcd ghat;                 // N x M_t
    std::vector<Eigen::MatrixXcd> ghat_cu; // N x M_t each
    std::vector<Eigen::VectorXcd> hhat_d;  // M_t each
    std::vector<Eigen::MatrixXcd> ghat_ce;
    std::vector<Eigen::VectorXcd> hhat_ed;
    double rho_g = 0.0;
    std::vector<double> rho_cu, rho_d, rho_ce, rho_ed;
};

// Distance-dependent gain with 10 m reference: G_ref * (d/10)^(-exponent),
// G_ref = free-space gain at 10 m at carrier_hz plus the configured antenna
// gains (passed in dBi).
double path_gain(double dist_m, double exponent, const SystemConfig& cfg, double gains_dbi);

// Link-class helpers used by the synthesizer (exposed for tests).
double link_gain_ap_user(const SystemConfig& cfg, double dist_m);
double link_gain_ap_irs(const SystemConfig& cfg, double dist_m);
double link_gain_irs_user(const SystemConfig& cfg, double dist_m);

// Rician fading: h = sqrt(gain) (sqrt(b/(1+b)) h_los + sqrt(1/(1+b)) h_nlos),
// ULA LoS responses with half-wavelength spacing, NLoS entries iid CN(0,1).
ChannelSet synthesize_channels(const SystemConfig& cfg, const NodeLayout& nodes, std::uint64_t seed);

// Estimate = truth - error, error uniform over the ball of radius
// kappa * ||truth||; rho_g clamped so rho_cu[k] >= rho_g always holds.
CsiEstimate synthesize_estimate(const ChannelSet& truth, double kappa, std::uint64_t seed);

}  // namespace irssim
