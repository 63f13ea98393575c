// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "irssim/channel.hpp"
#include "irssim/config.hpp"

namespace irssim {

// A finished design: beamformers, AN covariance, per-element mode and
// discrete phase index. Reflection amplitude is fixed at 1.
struct DesignSolution {
    std::vector<Eigen::VectorXcd> w;  // K precoders, M_t each
    Eigen::MatrixXcd z_cov;           // M_t x M_t Hermitian PSD
    std::vector<int> mode;            // length N, 1 = reflect
    std::vector<int> theta;           // phase indices into {2 pi i / B}

    int n_reflect() const;
    std::vector<int> harvest_mask() const;  // 1 where harvesting
    double total_power() const;             // sum ||w_k||^2 + Tr(Z)
    // diag(mode_n * e^{j theta_n dtheta}) reflection coefficients
    Eigen::VectorXcd reflection_coeffs(int b_bits) const;
};

struct AuditReport {
    double worst_sum_rate = 0.0;
    double worst_secrecy_rate = 0.0;
    Eigen::MatrixXd max_eve_capacity;  // K x J
    double c3_margin_w = 0.0;
    bool feasible = false;
    int samples_used = 0;
};

// Which constraint families an audit enforces; schemes that drop C3 or C5 by
// construction are audited accordingly.
struct AuditPolicy {
    bool check_c3 = true;
    bool check_c5 = true;
    double tol = 1e-6;
};

// h_d^H + h_r^H Theta G as a row vector.
Eigen::RowVectorXcd effective_channel(const Eigen::VectorXcd& h_d, const Eigen::VectorXcd& h_r,
                                      const Eigen::MatrixXcd& g, const DesignSolution& sol,
                                      int b_bits);

double sinr_user(int k, const ChannelSet& ch, const DesignSolution& sol,
                 const SystemConfig& cfg);

// Worst-case eavesdropper: multiuser interference cancelled, only AN remains.
double eve_capacity(int k, int j, const ChannelSet& ch, const DesignSolution& sol,
                    const SystemConfig& cfg);

// (sum rate, sum secrecy rate) in bits/s/Hz on the given channels.
std::pair<double, double> secrecy_rate(const ChannelSet& ch, const DesignSolution& sol,
                                       const SystemConfig& cfg);

// Samples adversarial channels inside the CSI balls (interior, boundary and
// the zero error) and reports the worst constraint margins and rates.
AuditReport audit(const DesignSolution& sol, const CsiEstimate& est, const SystemConfig& cfg,
                  int n_samples, std::uint64_t seed = 0, const AuditPolicy& policy = {});

}  // namespace irssim
