// SPDX-License-Identifier: Apache-2.0
#include "irssim/energy.hpp"

#include <stdexcept>

namespace irssim {

namespace {
// Keep exp() inside IEEE double range.
double safe_exp(double x) { return std::exp(std::clamp(x, -700.0, 700.0)); }
}  // namespace

double received_rf_power(const Eigen::MatrixXcd& g,
                         const std::vector<Eigen::VectorXcd>& w,
                         const Eigen::MatrixXcd& z_cov,
                         const std::vector<int>& harvest_mask, double sigma_a2) {
    const int n = static_cast<int>(g.rows());
    const int m = static_cast<int>(g.cols());
    if (static_cast<int>(harvest_mask.size()) != n)
        throw std::invalid_argument("received_rf_power: mask length mismatch");
    if (z_cov.rows() != m || z_cov.cols() != m)
        throw std::invalid_argument("received_rf_power: z_cov shape mismatch");
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(z_cov);
        const double scale = std::max(1.0, z_cov.norm());
        if (es.eigenvalues().minCoeff() < -1e-9 * scale)
            throw std::domain_error("received_rf_power: z_cov is not PSD");
    }

    Eigen::MatrixXcd q = z_cov;
    for (const auto& wk : w) q += wk * wk.adjoint();

    double total = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
        if (harvest_mask[i] == 0) continue;
        if (harvest_mask[i] != 1)
            throw std::invalid_argument("received_rf_power: mask entries must be 0/1");
        const Eigen::RowVectorXcd row = g.row(i);
        total += std::real((row * q * row.adjoint())(0, 0));
        ++count;
    }
    return total + sigma_a2 * count;
}

double harvested_power(double p_pr_w, const EhParams& eh) {
    if (p_pr_w < 0.0) throw std::domain_error("harvested_power: input power must be >= 0");
    const double omega = 1.0 / (1.0 + safe_exp(eh.a * eh.q_w));
    const double sig = 1.0 / (1.0 + safe_exp(-eh.a * (p_pr_w - eh.q_w)));
    // sig == omega bitwise at zero input, so the output is exactly 0 there
    return eh.m_p_w * (sig - omega) / (1.0 - omega);
}

bool sustainability_ok(const IrsPowerBudget& budget, double p_ph_w) {
    return budget.n_reflect * budget.p_irs_w + budget.p_c_w <= p_ph_w;
}

}  // namespace irssim
