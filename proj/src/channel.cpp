// SPDX-License-Identifier: Apache-2.0
#include "irssim/channel.hpp"

#include "irssim/rng.hpp"

namespace irssim {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

// ULA response with half-wavelength spacing for a ray at azimuth phi.
Eigen::VectorXcd ula_response(int n, double phi) {
    Eigen::VectorXcd a(n);
    const double psi = M_PI * std::sin(phi);
    for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, psi * i);
    return a;
}

double azimuth(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
    return std::atan2(to.y() - from.y(), to.x() - from.x());
}

Eigen::VectorXcd rician_vector(Rng& rng, double gain, double beta,
                               const Eigen::VectorXcd& los) {
    const Eigen::VectorXcd nlos = rng.cgaussian_vector(static_cast<int>(los.size()));
    const double c_los = std::sqrt(beta / (1.0 + beta));
    const double c_nlos = std::sqrt(1.0 / (1.0 + beta));
    return std::sqrt(gain) * (c_los * los + c_nlos * nlos);
}

Eigen::MatrixXcd rician_matrix(Rng& rng, double gain, double beta,
                               const Eigen::MatrixXcd& los) {
    const Eigen::MatrixXcd nlos =
        rng.cgaussian_matrix(static_cast<int>(los.rows()), static_cast<int>(los.cols()));
    const double c_los = std::sqrt(beta / (1.0 + beta));
    const double c_nlos = std::sqrt(1.0 / (1.0 + beta));
    return std::sqrt(gain) * (c_los * los + c_nlos * nlos);
}

}  // namespace

double path_gain(double dist_m, double exponent, const SystemConfig& cfg, double gains_dbi) {
    if (dist_m <= 0.0) throw std::domain_error("path_gain: distance must be positive");
    const double lambda = kSpeedOfLight / cfg.carrier_hz;
    const double fspl_10m = std::pow(lambda / (4.0 * M_PI * 10.0), 2.0);
    const double g_ref = fspl_10m * db_to_linear(gains_dbi);
    return g_ref * std::pow(dist_m / 10.0, -exponent);
}

double link_gain_ap_user(const SystemConfig& cfg, double dist_m) {
    return path_gain(dist_m, cfg.alpha_direct, cfg, cfg.gain_ap_dbi + cfg.gain_rx_dbi);
}

double link_gain_ap_irs(const SystemConfig& cfg, double dist_m) {
    return path_gain(dist_m, cfg.alpha_irs, cfg, cfg.gain_ap_dbi + cfg.gain_irs_dbi);
}

double link_gain_irs_user(const SystemConfig& cfg, double dist_m) {
    return path_gain(dist_m, cfg.alpha_irs, cfg, cfg.gain_irs_dbi + cfg.gain_rx_dbi);
}

ChannelSet synthesize_channels(const SystemConfig& cfg, const NodeLayout& nodes,
                               std::uint64_t seed) {
    Rng rng = Rng(seed).fork(0x6368616e);  // "chan"
    ChannelSet ch;
    const int n = cfg.n_irs;
    const int m = cfg.m_t;

    // AP-IRS matrix: rank-one LoS from the ULA responses at both ends.
    {
        const double dist = (nodes.irs - nodes.ap).norm();
        const double gain = link_gain_ap_irs(cfg, dist);
        const Eigen::VectorXcd a_irs = ula_response(n, azimuth(nodes.irs, nodes.ap));
        const Eigen::VectorXcd a_ap = ula_response(m, azimuth(nodes.ap, nodes.irs));
        const Eigen::MatrixXcd los = a_irs * a_ap.adjoint();
        ch.g = rician_matrix(rng, gain, cfg.rician_irs, los);
    }

    auto draw_rx = [&](const Eigen::Vector2d& pos) {
        const double d_ap = (pos - nodes.ap).norm();
        const double d_irs = (pos - nodes.irs).norm();
        const double g_direct = link_gain_ap_user(cfg, d_ap);
        const double g_irs = link_gain_irs_user(cfg, d_irs);
        const Eigen::VectorXcd los_d = ula_response(m, azimuth(nodes.ap, pos));
        const Eigen::VectorXcd los_r = ula_response(n, azimuth(nodes.irs, pos));
        Eigen::VectorXcd hd = rician_vector(rng, g_direct, cfg.rician_direct, los_d);
        Eigen::VectorXcd hr = rician_vector(rng, g_irs, cfg.rician_irs, los_r);
        return std::make_pair(std::move(hd), std::move(hr));
    };

    for (int k = 0; k < cfg.k_users; ++k) {
        auto [hd, hr] = draw_rx(nodes.users[k]);
        ch.h_d.push_back(std::move(hd));
        ch.h_r.push_back(std::move(hr));
    }
    for (int j = 0; j < cfg.j_eves; ++j) {
        auto [hd, hr] = draw_rx(nodes.eves[j]);
        ch.h_ed.push_back(std::move(hd));
        ch.h_re.push_back(std::move(hr));
    }

    for (int k = 0; k < cfg.k_users; ++k)
        ch.g_cu.push_back(ch.h_r[k].conjugate().asDiagonal() * ch.g);
    for (int j = 0; j < cfg.j_eves; ++j)
        ch.g_ce.push_back(ch.h_re[j].conjugate().asDiagonal() * ch.g);
    return ch;
}

CsiEstimate synthesize_estimate(const ChannelSet& truth, double kappa, std::uint64_t seed) {
    if (kappa < 0.0) throw std::invalid_argument("synthesize_estimate: kappa must be >= 0");
    Rng rng = Rng(seed).fork(0x63736965);  // "csie"
    CsiEstimate est;
    const int k_users = static_cast<int>(truth.h_d.size());
    const int j_eves = static_cast<int>(truth.h_ed.size());
    const int n = static_cast<int>(truth.g.rows());
    const int m = static_cast<int>(truth.g.cols());

    // Radii first: rho_g is clamped below every cascade radius so the declared
    // ordering rho_cu[k] >= rho_g (and rho_ce[j] >= rho_g) holds by construction.
    for (int k = 0; k < k_users; ++k) est.rho_cu.push_back(kappa * truth.g_cu[k].norm());
    for (int k = 0; k < k_users; ++k) est.rho_d.push_back(kappa * truth.h_d[k].norm());
    for (int j = 0; j < j_eves; ++j) est.rho_ce.push_back(kappa * truth.g_ce[j].norm());
    for (int j = 0; j < j_eves; ++j) est.rho_ed.push_back(kappa * truth.h_ed[j].norm());
    est.rho_g = kappa * truth.g.norm();
    for (double r : est.rho_cu) est.rho_g = std::min(est.rho_g, r);
    for (double r : est.rho_ce) est.rho_g = std::min(est.rho_g, r);

    est.ghat = truth.g - rng.ball_matrix(n, m, est.rho_g);
    for (int k = 0; k < k_users; ++k)
        est.ghat_cu.push_back(truth.g_cu[k] - rng.ball_matrix(n, m, est.rho_cu[k]));
    for (int k = 0; k < k_users; ++k)
        est.hhat_d.push_back(truth.h_d[k] - rng.ball_vector(m, est.rho_d[k]));
    for (int j = 0; j < j_eves; ++j)
        est.ghat_ce.push_back(truth.g_ce[j] - rng.ball_matrix(n, m, est.rho_ce[j]));
    for (int j = 0; j < j_eves; ++j)
        est.hhat_ed.push_back(truth.h_ed[j] - rng.ball_vector(m, est.rho_ed[j]));
    return est;
}

}  // namespace irssim
