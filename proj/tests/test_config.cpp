// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "irssim/config.hpp"

using namespace irssim;

TEST_SUITE("config") {

TEST_CASE("defaults follow the system parameter table") {
    SystemConfig cfg;
    cfg.validate();
    CHECK(cfg.p_irs_w(3) == doctest::Approx(1.5e-3));
    CHECK(cfg.p_irs_w(4) == doctest::Approx(4.5e-3));
    CHECK(cfg.p_irs_w(5) == doctest::Approx(6.0e-3));
    CHECK(cfg.p_irs_w(6) == doctest::Approx(7.8e-3));
    CHECK(cfg.p_max_w() == doctest::Approx(1.0));
    CHECK(cfg.noise_user_w() == doctest::Approx(1e-12));
    CHECK(cfg.p_c_w() == doctest::Approx(2.1e-6));
    CHECK(cfg.kappa * cfg.kappa == doctest::Approx(0.1));
    CHECK(cfg.phase_levels() == 8);
}

TEST_CASE("file parse and overrides") {
    const char* path = "test_config_tmp.cfg";
    {
        std::ofstream f(path);
        f << "# comment\n";
        f << "m_t = 6\n";
        f << "tau = 3.0   # inline comment\n";
        f << "p_max_dbm = 36\n";
    }
    SystemConfig cfg = load_config_file(path);
    CHECK(cfg.m_t == 6);
    CHECK(cfg.tau == doctest::Approx(3.0));
    CHECK(cfg.p_max_dbm == doctest::Approx(36.0));

    apply_override(cfg, "n_irs", "12");
    CHECK(cfg.n_irs == 12);
    CHECK_THROWS(apply_override(cfg, "no_such_key", "1"));
    std::remove(path);
}

TEST_CASE("echo round-trips through the parser") {
    SystemConfig cfg;
    cfg.tau = 0.625;
    cfg.n_irs = 5;
    const std::string text = config_to_string(cfg);
    const char* path = "test_config_echo.cfg";
    {
        std::ofstream f(path);
        f << text;
    }
    SystemConfig back = load_config_file(path);
    CHECK(back.tau == cfg.tau);
    CHECK(back.n_irs == cfg.n_irs);
    CHECK(back.kappa == cfg.kappa);
    std::remove(path);
}

TEST_CASE("validation rejects bad values") {
    SystemConfig cfg;
    cfg.m_t = 2;
    cfg.j_eves = 2;  // violates m_t > j_eves
    CHECK_THROWS(cfg.validate());
    cfg = SystemConfig{};
    cfg.b_bits = 7;
    CHECK_THROWS(cfg.validate());
    cfg = SystemConfig{};
    cfg.kappa = -0.1;
    CHECK_THROWS(cfg.validate());
    cfg = SystemConfig{};
    cfg.t_max = 0;
    CHECK_THROWS(cfg.validate());
}

}  // TEST_SUITE
