// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "irssim/geometry.hpp"
#include "irssim/metrics.hpp"
#include "irssim/rng.hpp"

using namespace irssim;

namespace {

DesignSolution random_design(Rng& rng, const SystemConfig& cfg, double power_scale = 0.5) {
    DesignSolution sol;
    for (int k = 0; k < cfg.k_users; ++k)
        sol.w.push_back(rng.cgaussian_vector(cfg.m_t) * std::sqrt(power_scale / cfg.k_users));
    Eigen::MatrixXcd root = rng.cgaussian_matrix(cfg.m_t, cfg.m_t);
    sol.z_cov = root * root.adjoint() * (power_scale * 0.1 / cfg.m_t);
    for (int i = 0; i < cfg.n_irs; ++i) {
        sol.mode.push_back(static_cast<int>(rng.uniform_index(2)));
        sol.theta.push_back(static_cast<int>(rng.uniform_index(cfg.phase_levels())));
    }
    return sol;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("silent surface leaves only the direct channel") {
    SystemConfig cfg;
    Rng rng(1);
    DesignSolution sol = random_design(rng, cfg);
    for (auto& m : sol.mode) m = 0;
    const Eigen::VectorXcd h_d = rng.cgaussian_vector(cfg.m_t);
    const Eigen::VectorXcd h_r = rng.cgaussian_vector(cfg.n_irs);
    const Eigen::MatrixXcd g = rng.cgaussian_matrix(cfg.n_irs, cfg.m_t);
    const Eigen::RowVectorXcd row = effective_channel(h_d, h_r, g, sol, cfg.b_bits);
    CHECK((row - h_d.adjoint()).norm() == doctest::Approx(0.0));
}

TEST_CASE("coherent single-element combining adds magnitudes") {
    SystemConfig cfg;
    cfg.n_irs = 1;
    cfg.m_t = 1;
    cfg.b_bits = 3;
    DesignSolution sol;
    sol.w.push_back(Eigen::VectorXcd::Ones(1));
    sol.z_cov = Eigen::MatrixXcd::Zero(1, 1);
    sol.mode = {1};
    // pick channels whose cascade phase lands exactly on the grid
    const double dtheta = 2.0 * M_PI / cfg.phase_levels();
    const Eigen::VectorXcd h_d = Eigen::VectorXcd::Constant(1, 2.0);  // phase 0
    const Eigen::VectorXcd h_r = Eigen::VectorXcd::Constant(1, std::polar(1.5, dtheta));
    const Eigen::MatrixXcd g = Eigen::MatrixXcd::Constant(1, 1, 3.0);
    // cascade phase = -dtheta (h_r conjugated); theta = 1 realigns it
    sol.theta = {1};
    const Eigen::RowVectorXcd row = effective_channel(h_d, h_r, g, sol, cfg.b_bits);
    CHECK(std::abs(row(0)) == doctest::Approx(2.0 + 1.5 * 3.0).epsilon(1e-12));
}

TEST_CASE("effective channel matches the dense matrix oracle") {
    SystemConfig cfg;
    Rng rng(5);
    const DesignSolution sol = random_design(rng, cfg);
    const Eigen::VectorXcd h_d = rng.cgaussian_vector(cfg.m_t);
    const Eigen::VectorXcd h_r = rng.cgaussian_vector(cfg.n_irs);
    const Eigen::MatrixXcd g = rng.cgaussian_matrix(cfg.n_irs, cfg.m_t);

    // direct product h_d^H + h_r^H Theta G with Theta assembled densely
    Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(cfg.n_irs, cfg.n_irs);
    for (int i = 0; i < cfg.n_irs; ++i)
        theta(i, i) =
            sol.mode[i]
                ? std::polar(1.0, sol.theta[i] * 2.0 * M_PI / cfg.phase_levels())
                : 0.0;
    const Eigen::RowVectorXcd oracle = h_d.adjoint() + h_r.adjoint() * theta * g;
    const Eigen::RowVectorXcd got = effective_channel(h_d, h_r, g, sol, cfg.b_bits);
    CHECK((got - oracle).norm() <= 1e-12 * oracle.norm());
}

TEST_CASE("sinr in closed corner cases") {
    SystemConfig cfg;
    cfg.k_users = 1;
    cfg.j_eves = 1;
    cfg.n_irs = 2;
    cfg.m_t = 3;
    const double p = 4.0;
    ChannelSet ch;
    ch.g = Eigen::MatrixXcd::Zero(2, 3);
    ch.h_d = {Eigen::VectorXcd::Zero(3)};
    ch.h_d[0](0) = 1.0;
    ch.h_r = {Eigen::VectorXcd::Zero(2)};
    ch.h_ed = {Eigen::VectorXcd::Zero(3)};
    ch.h_re = {Eigen::VectorXcd::Zero(2)};
    ch.g_cu = {Eigen::MatrixXcd::Zero(2, 3)};
    ch.g_ce = {Eigen::MatrixXcd::Zero(2, 3)};

    DesignSolution sol;
    sol.w = {Eigen::VectorXcd::Zero(3)};
    sol.w[0](0) = std::sqrt(p);
    sol.z_cov = Eigen::MatrixXcd::Zero(3, 3);
    sol.mode = {0, 0};
    sol.theta = {0, 0};

    CHECK(sinr_user(0, ch, sol, cfg) == doctest::Approx(p / cfg.noise_user_w()));
}

TEST_CASE("sinr matches a scalar arithmetic oracle") {
    SystemConfig cfg;
    Rng rng(11);
    const NodeLayout nodes = place_nodes(cfg, 11);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 11);
    const DesignSolution sol = random_design(rng, cfg);

    for (int k = 0; k < cfg.k_users; ++k) {
        const Eigen::RowVectorXcd row =
            effective_channel(ch.h_d[k], ch.h_r[k], ch.g, sol, cfg.b_bits);
        double interference = 0.0;
        for (int i = 0; i < cfg.k_users; ++i)
            if (i != k) interference += std::norm((row * sol.w[i])(0));
        const double an = std::real((row * sol.z_cov * row.adjoint())(0));
        const double oracle =
            std::norm((row * sol.w[k])(0)) / (interference + an + cfg.noise_user_w());
        CHECK(sinr_user(k, ch, sol, cfg) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("eavesdropper capacity corner cases and oracle") {
    SystemConfig cfg;
    Rng rng(13);
    const NodeLayout nodes = place_nodes(cfg, 13);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 13);
    DesignSolution sol = random_design(rng, cfg);

    // orthogonal beam leaks nothing
    const Eigen::RowVectorXcd row_e =
        effective_channel(ch.h_ed[0], ch.h_re[0], ch.g, sol, cfg.b_bits);
    Eigen::VectorXcd w_orth = rng.cgaussian_vector(cfg.m_t);
    w_orth -= row_e.adjoint() * (row_e * w_orth)(0) / row_e.squaredNorm();
    sol.w[0] = w_orth;
    CHECK(eve_capacity(0, 0, ch, sol, cfg) == doctest::Approx(0.0).epsilon(1e-9));

    // unit SNR gives one bit
    sol.z_cov = Eigen::MatrixXcd::Zero(cfg.m_t, cfg.m_t);
    Eigen::VectorXcd w_unit = row_e.adjoint();
    w_unit *= std::sqrt(cfg.noise_eve_w()) / row_e.squaredNorm();
    sol.w[0] = w_unit;
    CHECK(eve_capacity(0, 0, ch, sol, cfg) == doctest::Approx(1.0).epsilon(1e-9));

    // no multiuser interference appears in the denominator
    sol = random_design(rng, cfg);
    const Eigen::RowVectorXcd row2 =
        effective_channel(ch.h_ed[1], ch.h_re[1], ch.g, sol, cfg.b_bits);
    const double oracle = std::log2(
        1.0 + std::norm((row2 * sol.w[1])(0)) /
                  (std::real((row2 * sol.z_cov * row2.adjoint())(0)) + cfg.noise_eve_w()));
    CHECK(eve_capacity(1, 1, ch, sol, cfg) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("secrecy rate clamps at zero per user") {
    // synthetic: R = (3, 2), best eve = (1.5, 2.5) -> secrecy 1.5
    const double r1 = 3.0, r2 = 2.0, c1 = 1.5, c2 = 2.5;
    const double expect = std::max(0.0, r1 - c1) + std::max(0.0, r2 - c2);
    CHECK(expect == doctest::Approx(1.5));
}

TEST_CASE("rates are invariant under a common beam phase rotation") {
    SystemConfig cfg;
    Rng rng(17);
    const NodeLayout nodes = place_nodes(cfg, 17);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 17);
    DesignSolution sol = random_design(rng, cfg);
    const auto [rate0, sec0] = secrecy_rate(ch, sol, cfg);
    const std::complex<double> phase = std::polar(1.0, 0.8342);
    for (auto& wk : sol.w) wk *= phase;
    const auto [rate1, sec1] = secrecy_rate(ch, sol, cfg);
    CHECK(rate1 == doctest::Approx(rate0).epsilon(1e-12));
    CHECK(sec1 == doctest::Approx(sec0).epsilon(1e-12));
}

TEST_CASE("audit with zero radii reproduces the nominal evaluation") {
    SystemConfig cfg;
    cfg.adversary_samples = 64;
    Rng rng(19);
    const NodeLayout nodes = place_nodes(cfg, 19);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 19);
    const CsiEstimate est = synthesize_estimate(ch, 0.0, 19);
    DesignSolution sol = random_design(rng, cfg, 0.25);

    AuditPolicy policy;
    policy.check_c3 = false;  // a random design rarely sustains the surface
    const AuditReport rep = audit(sol, est, cfg, 64, 3, policy);
    const auto [rate, sec] = secrecy_rate(ch, sol, cfg);
    CHECK(rep.worst_sum_rate == doctest::Approx(rate).epsilon(1e-9));
    CHECK(rep.worst_secrecy_rate == doctest::Approx(sec).epsilon(1e-9));
    for (int k = 0; k < cfg.k_users; ++k)
        for (int j = 0; j < cfg.j_eves; ++j)
            CHECK(rep.max_eve_capacity(k, j) ==
                  doctest::Approx(eve_capacity(k, j, ch, sol, cfg)).epsilon(1e-9));
}

TEST_CASE("audit worst case cannot beat the nominal value") {
    SystemConfig cfg;
    Rng rng(23);
    const NodeLayout nodes = place_nodes(cfg, 23);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 23);
    const CsiEstimate est = synthesize_estimate(ch, cfg.kappa, 23);
    const DesignSolution sol = random_design(rng, cfg, 0.25);

    AuditPolicy policy;
    policy.check_c3 = false;
    const AuditReport rep = audit(sol, est, cfg, 200, 7, policy);

    // nominal evaluation at the estimate itself (zero error is sample 0)
    ChannelSet nominal = ch;
    nominal.g = est.ghat;
    nominal.g_cu = est.ghat_cu;
    nominal.h_d = est.hhat_d;
    nominal.g_ce = est.ghat_ce;
    nominal.h_ed = est.hhat_ed;
    const auto [rate, sec] = secrecy_rate(nominal, sol, cfg);
    CHECK(rep.worst_sum_rate <= rate + 1e-9);
    CHECK(rep.worst_secrecy_rate <= sec + 1e-9);
}

}  // TEST_SUITE
