// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "irssim/units.hpp"

namespace irssim {

// Non-linear energy harvesting circuit constants. Omega is derived, not stored.
struct EhParams {
    double m_p_w = 0.080;  // maximum harvestable power [W]
    double a = 1500.0;     // slope constant [1/W]
    double q_w = 0.0022;   // sensitivity constant [W]

    double omega() const { return 1.0 / (1.0 + std::exp(a * q_w)); }
    void validate() const;
};

// All physical and algorithmic constants. Values not overridden by a config
// file or CLI flags follow the paper's system-parameter table, scaled down to
// desk size (M_t=4, N=8, P_max=30 dBm) where noted in README.
struct SystemConfig {
    // node / array counts
    int m_t = 4;      // AP antennas
    int n_irs = 8;    // IRS elements N
    int k_users = 2;  // K
    int j_eves = 2;   // J
    int b_bits = 3;   // phase resolution b, B = 2^b levels

    // powers (config-facing units are dBm; use the _w() accessors internally)
    double p_max_dbm = 30.0;
    double noise_user_dbm = -90.0;
    double noise_eve_dbm = -90.0;
    double noise_irs_dbm = -90.0;

    // per-element reflection power map P_IRS(b) [mW], b in 3..6
    std::map<int, double> p_irs_mw = {{3, 1.5}, {4, 4.5}, {5, 6.0}, {6, 7.8}};
    double p_c_uw = 2.1;  // conversion-circuit power P_c [uW]

    EhParams eh;

    double tau = 1.5;                   // secrecy cap tau_{k,j} [bits/s/Hz]
    double kappa = 0.31622776601683794; // normalized CSI error level, kappa^2 = 0.1

    // geometry [m]
    double d0_m = 60.0;   // AP to user-cluster center
    double d_m = 10.0;    // AP to IRS, horizontal
    double d_y_m = 1.0;   // AP-IRS vertical offset
    double r_m = 1.0;     // user circle radius
    double r_e1_m = 80.0; // lone eavesdropper circle around AP
    double r_e2_m = 20.0; // eavesdropper circle around user center

    // path-loss exponents and Rician factors per link class
    double alpha_direct = 3.6;  // AP-user, AP-Eve
    double alpha_irs = 2.2;     // AP-IRS, IRS-user, IRS-Eve
    double rician_direct = 0.0;
    double rician_irs = 3.0;

    // antenna gains [dBi]
    double gain_ap_dbi = 20.0;
    double gain_irs_dbi = 0.0;
    double gain_rx_dbi = 0.0;

    double carrier_hz = 2.4e9;

    // algorithm constants
    int t_max = 30;
    double convergence_tol = 1e-4;  // relative objective change
    double m_big = 0.0;             // 0 -> automatic (see sca builder)
    int adversary_samples = 1000;
    double chi_s = 10.0;  // binary-selector penalty weight
    double chi_y = 10.0;  // rank-one penalty weight

    // footnote fallback: drop C3 and silence the IRS cascade
    bool ignore_c3 = false;

    // derived accessors (watts)
    double p_max_w() const { return dbm_to_watts(p_max_dbm); }
    double noise_user_w() const { return dbm_to_watts(noise_user_dbm); }
    double noise_eve_w() const { return dbm_to_watts(noise_eve_dbm); }
    double noise_irs_w() const { return dbm_to_watts(noise_irs_dbm); }
    double p_c_w() const { return p_c_uw * 1e-6; }
    double p_irs_w() const { return p_irs_w(b_bits); }
    double p_irs_w(int b) const;
    int phase_levels() const { return 1 << b_bits; }

    void validate() const;
};

// Flat `key = value` config file. Unknown keys are an error; '#' starts a
// comment. Returns the default config updated with the file's entries.
SystemConfig load_config_file(const std::string& path);

// Apply `key=value` overrides (same keys as the file format).
void apply_override(SystemConfig& cfg, const std::string& key, const std::string& value);

// Echo the full configuration in file format (used for CSV run headers).
std::string config_to_string(const SystemConfig& cfg);

}  // namespace irssim
