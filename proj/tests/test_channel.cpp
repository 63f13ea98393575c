// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "irssim/channel.hpp"
#include "irssim/geometry.hpp"
#include "irssim/units.hpp"

using namespace irssim;

TEST_SUITE("channel") {

TEST_CASE("degenerate user circle collapses to the cluster center") {
    SystemConfig cfg;
    cfg.r_m = 0.0;
    const NodeLayout nodes = place_nodes(cfg, 3);
    for (const auto& u : nodes.users) {
        CHECK(u.x() == doctest::Approx(cfg.d0_m));
        CHECK(u.y() == doctest::Approx(0.0));
    }
}

TEST_CASE("AP-IRS distance from the offsets") {
    SystemConfig cfg;
    cfg.d_m = 60.0;
    cfg.d_y_m = 1.0;
    const NodeLayout nodes = place_nodes(cfg, 1);
    CHECK((nodes.irs - nodes.ap).norm() == doctest::Approx(std::sqrt(60.0 * 60.0 + 1.0)));
}

TEST_CASE("users land on the configured ring") {
    SystemConfig cfg;  // d0 = 60, r = 1
    for (std::uint64_t seed : {1ull, 7ull, 42ull}) {
        const NodeLayout nodes = place_nodes(cfg, seed);
        REQUIRE(nodes.users.size() == 2);
        for (const auto& u : nodes.users) {
            const double dist = (u - nodes.ap).norm();
            CHECK(dist >= 59.0);
            CHECK(dist <= 61.0);
        }
        // one eavesdropper on the AP circle, the rest around the user center
        CHECK((nodes.eves[0] - nodes.ap).norm() == doctest::Approx(cfg.r_e1_m));
        CHECK((nodes.eves[1] - Eigen::Vector2d(cfg.d0_m, 0)).norm() == doctest::Approx(cfg.r_e2_m));
    }
}

TEST_CASE("path gain reference distance and decade scaling") {
    SystemConfig cfg;
    const double g_ref = path_gain(10.0, 2.2, cfg, 0.0);
    CHECK(path_gain(100.0, 2.2, cfg, 0.0) == doctest::Approx(g_ref * std::pow(10.0, -2.2)));
    // free-space component at 10 m, 2.4 GHz is about -60.05 dB
    CHECK(linear_to_db(g_ref) == doctest::Approx(-60.05).epsilon(0.001));
    CHECK_THROWS_AS(path_gain(0.0, 2.2, cfg, 0.0), std::domain_error);
    // antenna gains enter linearly in dB
    CHECK(linear_to_db(path_gain(10.0, 2.2, cfg, 20.0)) == doctest::Approx(-40.05).epsilon(0.001));
}

TEST_CASE("rayleigh limit: per-entry variance matches the link gain") {
    SystemConfig cfg;
    cfg.rician_direct = 0.0;
    cfg.k_users = 1;
    cfg.j_eves = 1;
    const NodeLayout nodes = place_nodes(cfg, 5);
    const double gain = link_gain_ap_user(cfg, (nodes.users[0] - nodes.ap).norm());

    double acc = 0.0;
    int count = 0;
    for (std::uint64_t s = 0; s < 2500; ++s) {
        const ChannelSet ch = synthesize_channels(cfg, nodes, 1000 + s);
        acc += ch.h_d[0].squaredNorm();
        count += static_cast<int>(ch.h_d[0].size());
    }
    CHECK(acc / count == doctest::Approx(gain).epsilon(0.05));
}

TEST_CASE("infinite rician factor reduces to the LoS ray") {
    SystemConfig cfg;
    cfg.rician_irs = 1e30;
    const NodeLayout nodes = place_nodes(cfg, 9);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 11);
    // rank-one LoS: all singular values beyond the first vanish
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ch.g);
    CHECK(svd.singularValues()(1) <= 1e-10 * svd.singularValues()(0));
    // every entry has the LoS magnitude sqrt(gain)
    const double gain = link_gain_ap_irs(cfg, (nodes.irs - nodes.ap).norm());
    CHECK(std::abs(ch.g(0, 0)) == doctest::Approx(std::sqrt(gain)).epsilon(1e-6));
}

TEST_CASE("cascade identity holds exactly") {
    SystemConfig cfg;
    const NodeLayout nodes = place_nodes(cfg, 2);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 2);
    for (int k = 0; k < cfg.k_users; ++k) {
        const Eigen::MatrixXcd expect = ch.h_r[k].conjugate().asDiagonal() * ch.g;
        CHECK((ch.g_cu[k] - expect).norm() == 0.0);
    }
    for (int j = 0; j < cfg.j_eves; ++j) {
        const Eigen::MatrixXcd expect = ch.h_re[j].conjugate().asDiagonal() * ch.g;
        CHECK((ch.g_ce[j] - expect).norm() == 0.0);
    }
}

TEST_CASE("seeded determinism is bit exact") {
    SystemConfig cfg;
    const NodeLayout nodes = place_nodes(cfg, 77);
    const ChannelSet a = synthesize_channels(cfg, nodes, 123);
    const ChannelSet b = synthesize_channels(cfg, nodes, 123);
    CHECK(a.g == b.g);
    CHECK(a.h_d[0] == b.h_d[0]);
    const CsiEstimate ea = synthesize_estimate(a, cfg.kappa, 5);
    const CsiEstimate eb = synthesize_estimate(b, cfg.kappa, 5);
    CHECK(ea.ghat == eb.ghat);
    CHECK(ea.rho_cu == eb.rho_cu);
}

TEST_CASE("perfect csi at kappa zero") {
    SystemConfig cfg;
    const NodeLayout nodes = place_nodes(cfg, 4);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 4);
    const CsiEstimate est = synthesize_estimate(ch, 0.0, 4);
    CHECK((est.ghat - ch.g).norm() == 0.0);
    CHECK(est.rho_g == 0.0);
    for (double r : est.rho_cu) CHECK(r == 0.0);
}

TEST_CASE("error containment and ball statistics") {
    SystemConfig cfg;
    cfg.k_users = 1;
    cfg.j_eves = 1;
    const NodeLayout nodes = place_nodes(cfg, 6);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 6);

    const double kappa = 0.3;
    double max_norm = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const CsiEstimate est = synthesize_estimate(ch, kappa, 900 + s);
        // containment of every ball, every draw
        CHECK((ch.g - est.ghat).norm() <= est.rho_g * (1 + 1e-12));
        CHECK((ch.g_cu[0] - est.ghat_cu[0]).norm() <= est.rho_cu[0] * (1 + 1e-12));
        CHECK((ch.h_d[0] - est.hhat_d[0]).norm() <= est.rho_d[0] * (1 + 1e-12));
        CHECK((ch.g_ce[0] - est.ghat_ce[0]).norm() <= est.rho_ce[0] * (1 + 1e-12));
        CHECK((ch.h_ed[0] - est.hhat_ed[0]).norm() <= est.rho_ed[0] * (1 + 1e-12));
        // declared ordering
        CHECK(est.rho_cu[0] >= est.rho_g);
        CHECK(est.rho_ce[0] >= est.rho_g);
        max_norm = std::max(max_norm, (ch.g_cu[0] - est.ghat_cu[0]).norm() / ch.g_cu[0].norm());
    }
    CHECK(max_norm <= kappa);
    CHECK(max_norm > 0.29 * 0.999);  // ball sampling reaches near the boundary
}

TEST_CASE("normalized error never exceeds kappa") {
    SystemConfig cfg;
    const NodeLayout nodes = place_nodes(cfg, 8);
    const ChannelSet ch = synthesize_channels(cfg, nodes, 8);
    const double kappa = std::sqrt(0.1);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const CsiEstimate est = synthesize_estimate(ch, kappa, s);
        for (int k = 0; k < cfg.k_users; ++k)
            CHECK((ch.g_cu[k] - est.ghat_cu[k]).norm() / ch.g_cu[k].norm() <=
                  kappa * (1 + 1e-12));
    }
}

}  // TEST_SUITE
