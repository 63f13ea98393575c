// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "irssim/energy.hpp"
#include "irssim/rng.hpp"

using namespace irssim;

TEST_SUITE("energy") {

TEST_CASE("received power is zero with no harvesting elements") {
    Rng rng(1);
    const Eigen::MatrixXcd g = rng.cgaussian_matrix(4, 2);
    const std::vector<Eigen::VectorXcd> w = {rng.cgaussian_vector(2)};
    const Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2, 2);
    CHECK(received_rf_power(g, w, z, {0, 0, 0, 0}, 0.5) == 0.0);
}

TEST_CASE("unit column channel forwards the beam power") {
    const double p = 2.75;
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(4, 2);
    g(0, 0) = std::sqrt(0.5);
    g(1, 0) = std::polar(std::sqrt(0.5), 1.1);
    std::vector<Eigen::VectorXcd> w = {Eigen::VectorXcd::Zero(2)};
    w[0](0) = std::sqrt(p);
    const Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2, 2);
    CHECK(received_rf_power(g, w, z, {1, 1, 1, 1}, 0.0) == doctest::Approx(p));
}

TEST_CASE("monte carlo oracle confirms the expectation form") {
    // independent oracle: draw symbols and noise, average the received power
    Rng rng(7);
    const int n = 4, m = 2, k = 2;
    const Eigen::MatrixXcd g = rng.cgaussian_matrix(n, m);
    std::vector<Eigen::VectorXcd> w;
    for (int i = 0; i < k; ++i) w.push_back(rng.cgaussian_vector(m));
    Eigen::MatrixXcd zroot = rng.cgaussian_matrix(m, m);
    const Eigen::MatrixXcd z = zroot * zroot.adjoint() / m;
    const std::vector<int> mask = {1, 0, 1, 0};
    const double sigma_a2 = 0.3;

    const double closed = received_rf_power(g, w, z, mask, sigma_a2);

    Eigen::LLT<Eigen::MatrixXcd> llt(z);
    const Eigen::MatrixXcd l = llt.matrixL();
    double acc = 0.0;
    const int draws = 100000;
    Rng sim(99);
    for (int t = 0; t < draws; ++t) {
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(m);
        for (int i = 0; i < k; ++i) x += w[i] * sim.cgaussian();
        x += l * sim.cgaussian_vector(m);
        Eigen::VectorXcd y = g * x + sim.cgaussian_vector(n) * std::sqrt(sigma_a2);
        for (int i = 0; i < n; ++i)
            if (mask[i]) acc += std::norm(y(i));
    }
    CHECK(acc / draws == doctest::Approx(closed).epsilon(0.01));
}

TEST_CASE("received power rejects a non-psd covariance") {
    Rng rng(3);
    const Eigen::MatrixXcd g = rng.cgaussian_matrix(2, 2);
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(2, 2);
    z(0, 0) = -1.0;
    CHECK_THROWS_AS(received_rf_power(g, {}, z, {1, 1}, 0.0), std::domain_error);
}

TEST_CASE("harvested power closed forms") {
    EhParams eh;  // table constants: 80 mW, 1500, 0.0022
    CHECK(harvested_power(0.0, eh) == 0.0);  // exact zero
    // at the sensitivity point the sigmoid sits at half of M_P
    CHECK(harvested_power(0.0022, eh) == doctest::Approx(0.03853).epsilon(2e-4));
    // saturation
    CHECK(harvested_power(10.0, eh) == doctest::Approx(eh.m_p_w).epsilon(1e-9));
    CHECK_THROWS_AS(harvested_power(-1e-9, eh), std::domain_error);
}

TEST_CASE("harvested power is monotone and bounded") {
    EhParams eh;
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double p = 0.25 * i / 1000.0;
        const double h = harvested_power(p, eh);
        CHECK(h >= prev);
        CHECK(h >= 0.0);
        CHECK(h <= eh.m_p_w + 1e-15);
        prev = h;
    }
}

TEST_CASE("sustainability threshold") {
    IrsPowerBudget budget;
    budget.p_irs_w = 1.5e-3;
    budget.p_c_w = 2.1e-6;
    const double p_ph = 0.03853;
    // max sustainable reflecting elements at the nominal harvest
    budget.n_reflect = 25;
    CHECK(sustainability_ok(budget, p_ph));
    budget.n_reflect = 26;
    CHECK_FALSE(sustainability_ok(budget, p_ph));
    budget.n_reflect = 50;
    CHECK_FALSE(sustainability_ok(budget, p_ph));
    budget.n_reflect = 0;
    CHECK(sustainability_ok(budget, 2.1e-6));
    // monotone in harvested power
    budget.n_reflect = 10;
    CHECK_FALSE(sustainability_ok(budget, 0.010));
    CHECK(sustainability_ok(budget, 0.020));
}

}  // TEST_SUITE
