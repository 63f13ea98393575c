// SPDX-License-Identifier: Apache-2.0
#include "irssim/metrics.hpp"

#include <limits>

#include "irssim/energy.hpp"
#include "irssim/rng.hpp"

namespace irssim {

int DesignSolution::n_reflect() const {
    int c = 0;
    for (int m : mode) c += (m != 0);
    return c;
}

std::vector<int> DesignSolution::harvest_mask() const {
    std::vector<int> mask(mode.size());
    for (size_t i = 0; i < mode.size(); ++i) mask[i] = mode[i] ? 0 : 1;
    return mask;
}

double DesignSolution::total_power() const {
    double p = std::real(z_cov.trace());
    for (const auto& wk : w) p += wk.squaredNorm();
    return p;
}

Eigen::VectorXcd DesignSolution::reflection_coeffs(int b_bits) const {
    const int n = static_cast<int>(mode.size());
    const double dtheta = 2.0 * M_PI / (1 << b_bits);
    Eigen::VectorXcd coeffs(n);
    for (int i = 0; i < n; ++i)
        coeffs(i) = mode[i] ? std::polar(1.0, theta[i] * dtheta) : 0.0;
    return coeffs;
}

namespace {

// h_d^H + coeffs^T G_cu  (the reflection coefficients applied to the cascade)
Eigen::RowVectorXcd effective_row(const Eigen::VectorXcd& h_d, const Eigen::MatrixXcd& g_cu,
                                  const Eigen::VectorXcd& coeffs) {
    return h_d.adjoint() + coeffs.transpose() * g_cu;
}

double sinr_of_row(const Eigen::RowVectorXcd& row, int k, const DesignSolution& sol,
                   double sigma2) {
    const double sig = std::norm((row * sol.w[k])(0));
    double denom = sigma2 + std::real((row * sol.z_cov * row.adjoint())(0));
    for (size_t i = 0; i < sol.w.size(); ++i) {
        if (static_cast<int>(i) == k) continue;
        denom += std::norm((row * sol.w[i])(0));
    }
    return sig / denom;
}

double eve_cap_of_row(const Eigen::RowVectorXcd& row, int k, const DesignSolution& sol,
                      double sigma2) {
    const double sig = std::norm((row * sol.w[k])(0));
    const double denom = sigma2 + std::real((row * sol.z_cov * row.adjoint())(0));
    return std::log2(1.0 + sig / denom);
}

}  // namespace

Eigen::RowVectorXcd effective_channel(const Eigen::VectorXcd& h_d, const Eigen::VectorXcd& h_r,
                                      const Eigen::MatrixXcd& g, const DesignSolution& sol,
                                      int b_bits) {
    const Eigen::MatrixXcd g_cu = h_r.conjugate().asDiagonal() * g;
    return effective_row(h_d, g_cu, sol.reflection_coeffs(b_bits));
}

double sinr_user(int k, const ChannelSet& ch, const DesignSolution& sol,
                 const SystemConfig& cfg) {
    const Eigen::RowVectorXcd row =
        effective_row(ch.h_d[k], ch.g_cu[k], sol.reflection_coeffs(cfg.b_bits));
    return sinr_of_row(row, k, sol, cfg.noise_user_w());
}

double eve_capacity(int k, int j, const ChannelSet& ch, const DesignSolution& sol,
                    const SystemConfig& cfg) {
    const Eigen::RowVectorXcd row =
        effective_row(ch.h_ed[j], ch.g_ce[j], sol.reflection_coeffs(cfg.b_bits));
    return eve_cap_of_row(row, k, sol, cfg.noise_eve_w());
}

std::pair<double, double> secrecy_rate(const ChannelSet& ch, const DesignSolution& sol,
                                       const SystemConfig& cfg) {
    const int k_users = static_cast<int>(ch.h_d.size());
    const int j_eves = static_cast<int>(ch.h_ed.size());
    double sum_rate = 0.0, sum_secrecy = 0.0;
    for (int k = 0; k < k_users; ++k) {
        const double rk = std::log2(1.0 + sinr_user(k, ch, sol, cfg));
        double worst_eve = 0.0;
        for (int j = 0; j < j_eves; ++j)
            worst_eve = std::max(worst_eve, eve_capacity(k, j, ch, sol, cfg));
        sum_rate += rk;
        sum_secrecy += std::max(0.0, rk - worst_eve);
    }
    return {sum_rate, sum_secrecy};
}

AuditReport audit(const DesignSolution& sol, const CsiEstimate& est, const SystemConfig& cfg,
                  int n_samples, std::uint64_t seed, const AuditPolicy& policy) {
    if (n_samples < 1) throw std::invalid_argument("audit: n_samples must be >= 1");
    Rng rng = Rng(seed).fork(0x61756474);  // "audt"

    const int k_users = cfg.k_users;
    const int j_eves = cfg.j_eves;
    const int n = cfg.n_irs;
    const int m = cfg.m_t;
    const Eigen::VectorXcd coeffs = sol.reflection_coeffs(cfg.b_bits);

    Eigen::MatrixXcd q_total = sol.z_cov;
    for (const auto& wk : sol.w) q_total += wk * wk.adjoint();

    const std::vector<int> mask = sol.harvest_mask();
    const double consumption = sol.n_reflect() * cfg.p_irs_w() + cfg.p_c_w();

    AuditReport rep;
    rep.samples_used = n_samples;
    rep.max_eve_capacity = Eigen::MatrixXd::Zero(std::max(1, k_users), std::max(1, j_eves));
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> worst_user_rate(k_users, inf);
    double worst_c3 = inf;
    double worst_sum_secrecy = inf;

    for (int t = 0; t < n_samples; ++t) {
        const bool zero_err = (t == 0);
        const bool boundary = (t % 4 == 1);

        auto draw_mat = [&](int rows, int cols, double rho) -> Eigen::MatrixXcd {
            if (zero_err || rho == 0.0) return Eigen::MatrixXcd::Zero(rows, cols);
            return boundary ? rng.sphere_matrix(rows, cols, rho) : rng.ball_matrix(rows, cols, rho);
        };

        // user rates
        std::vector<double> rate_k(k_users);
        for (int k = 0; k < k_users; ++k) {
            const Eigen::MatrixXcd g_cu = est.ghat_cu[k] + draw_mat(n, m, est.rho_cu[k]);
            const Eigen::VectorXcd h_d = est.hhat_d[k] + draw_mat(m, 1, est.rho_d[k]).col(0);
            const Eigen::RowVectorXcd row = effective_row(h_d, g_cu, coeffs);
            rate_k[k] = std::log2(1.0 + sinr_of_row(row, k, sol, cfg.noise_user_w()));
            worst_user_rate[k] = std::min(worst_user_rate[k], rate_k[k]);
        }

        // eavesdropper capacities
        double sec_sum = 0.0;
        std::vector<double> eve_best(k_users, 0.0);
        for (int j = 0; j < j_eves; ++j) {
            const Eigen::MatrixXcd g_ce = est.ghat_ce[j] + draw_mat(n, m, est.rho_ce[j]);
            const Eigen::VectorXcd h_ed = est.hhat_ed[j] + draw_mat(m, 1, est.rho_ed[j]).col(0);
            const Eigen::RowVectorXcd row = effective_row(h_ed, g_ce, coeffs);
            for (int k = 0; k < k_users; ++k) {
                const double c = eve_cap_of_row(row, k, sol, cfg.noise_eve_w());
                rep.max_eve_capacity(k, j) = std::max(rep.max_eve_capacity(k, j), c);
                eve_best[k] = std::max(eve_best[k], c);
            }
        }
        for (int k = 0; k < k_users; ++k) sec_sum += std::max(0.0, rate_k[k] - eve_best[k]);
        worst_sum_secrecy = std::min(worst_sum_secrecy, sec_sum);

        // energy balance: the AP-IRS uncertainty acts per element with the
        // split radius rho_G / sqrt(N), which is the set the design defends
        if (policy.check_c3 && n > 0) {
            Eigen::MatrixXcd g = est.ghat;
            if (!zero_err && est.rho_g > 0.0) {
                const double row_rho = est.rho_g / std::sqrt(static_cast<double>(n));
                for (int i = 0; i < cfg.n_irs; ++i)
                    g.row(i) += draw_mat(1, m, row_rho).row(0);
            }
            double received = 0.0;
            int cnt = 0;
            for (int i = 0; i < cfg.n_irs; ++i) {
                if (!mask[i]) continue;
                received += std::real((g.row(i) * q_total * g.row(i).adjoint())(0, 0));
                ++cnt;
            }
            received += cfg.noise_irs_w() * cnt;
            const double harvested = harvested_power(received, cfg.eh);
            worst_c3 = std::min(worst_c3, harvested - consumption);
        }
    }

    rep.worst_sum_rate = 0.0;
    for (double r : worst_user_rate) rep.worst_sum_rate += r;
    rep.worst_secrecy_rate = worst_sum_secrecy;
    rep.c3_margin_w = (policy.check_c3 && n > 0) ? worst_c3 : 0.0;

    bool ok = sol.total_power() <= cfg.p_max_w() * (1.0 + 1e-9) + policy.tol;
    if (policy.check_c5) {
        for (int k = 0; k < k_users; ++k)
            for (int j = 0; j < j_eves; ++j)
                ok = ok && rep.max_eve_capacity(k, j) <= cfg.tau + policy.tol;
    }
    if (policy.check_c3 && n > 0) ok = ok && rep.c3_margin_w >= -policy.tol;
    rep.feasible = ok;
    return rep;
}

}  // namespace irssim
