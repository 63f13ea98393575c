// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "irssim/config.hpp"

namespace irssim {

struct IrsPowerBudget {
    int n_reflect = 0;     // reflection-mode element count
    double p_irs_w = 0.0;  // per-element reflection power
    double p_c_w = 0.0;    // conversion-circuit power
};

// Expected RF power collected by the harvesting elements:
//   sum_{n: mask} row_n(G) (sum_k W_k + Z) row_n(G)^H + sigma_a^2 * |mask|
// where W_k = w_k w_k^H. Throws if z_cov is not PSD.
double received_rf_power(const Eigen::MatrixXcd& g,
                         const std::vector<Eigen::VectorXcd>& w,
                         const Eigen::MatrixXcd& z_cov,
                         const std::vector<int>& harvest_mask, double sigma_a2);

// Sigmoidal non-linear harvesting model; exact 0 at zero input, saturates at
// m_p. Throws on negative input.
double harvested_power(double p_pr_w, const EhParams& eh);

// C3 balance: n_reflect * P_IRS(b) + P_c <= harvested power.
bool sustainability_ok(const IrsPowerBudget& budget, double p_ph_w);

}  // namespace irssim
