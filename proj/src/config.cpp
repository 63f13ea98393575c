// SPDX-License-Identifier: Apache-2.0
#include "irssim/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace irssim {

void EhParams::validate() const {
    if (m_p_w < 0.0) throw std::invalid_argument("eh_m_p_w must be >= 0");
    if (a <= 0.0) throw std::invalid_argument("eh_a must be > 0");
    if (q_w <= 0.0) throw std::invalid_argument("eh_q_w must be > 0");
}

double SystemConfig::p_irs_w(int b) const {
    auto it = p_irs_mw.find(b);
    if (it != p_irs_mw.end()) return it->second * 1e-3;
    // The paper quotes phase-shifter powers only for b = 3..6. Clamp to the
    // nearest tabulated resolution for other values.
    if (b < p_irs_mw.begin()->first) return p_irs_mw.begin()->second * 1e-3;
    return p_irs_mw.rbegin()->second * 1e-3;
}

void SystemConfig::validate() const {
    if (m_t <= j_eves)
        throw std::invalid_argument("m_t must exceed j_eves (security assumption)");
    if (m_t < 1 || n_irs < 0 || k_users < 1 || j_eves < 0)
        throw std::invalid_argument("node counts out of range");
    if (b_bits < 1 || b_bits > 6) throw std::invalid_argument("b_bits must be in 1..6");
    if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
    if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
    if (p_max_w() <= 0.0 || noise_user_w() <= 0.0 || noise_eve_w() <= 0.0 ||
        noise_irs_w() <= 0.0 || p_c_w() <= 0.0)
        throw std::invalid_argument("powers must be positive");
    if (d0_m <= 0.0 || d_m <= 0.0 || r_m < 0.0 || r_e1_m < 0.0 || r_e2_m < 0.0)
        throw std::invalid_argument("geometry fields must be positive");
    if (carrier_hz <= 0.0) throw std::invalid_argument("carrier_hz must be positive");
    if (adversary_samples < 1) throw std::invalid_argument("adversary_samples must be >= 1");
    eh.validate();
}

namespace {

struct Field {
    std::function<std::string(const SystemConfig&)> get;
    std::function<void(SystemConfig&, const std::string&)> set;
};

double parse_double(const std::string& v) {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
    if (pos != v.size()) throw std::invalid_argument("trailing junk in number: " + v);
    return x;
}

int parse_int(const std::string& v) {
    size_t pos = 0;
    int x = std::stoi(v, &pos);
    while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
    if (pos != v.size()) throw std::invalid_argument("trailing junk in integer: " + v);
    return x;
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw std::invalid_argument("expected boolean, got: " + v);
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

#define DOUBLE_FIELD(name)                                                      \
    {#name, Field{[](const SystemConfig& c) { return fmt(c.name); },            \
                  [](SystemConfig& c, const std::string& v) { c.name = parse_double(v); }}}
#define INT_FIELD(name)                                                         \
    {#name, Field{[](const SystemConfig& c) { return std::to_string(c.name); }, \
                  [](SystemConfig& c, const std::string& v) { c.name = parse_int(v); }}}
#define BOOL_FIELD(name)                                                        \
    {#name, Field{[](const SystemConfig& c) { return c.name ? "1" : "0"; },     \
                  [](SystemConfig& c, const std::string& v) { c.name = parse_bool(v); }}}

const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> table = {
        INT_FIELD(m_t),
        INT_FIELD(n_irs),
        INT_FIELD(k_users),
        INT_FIELD(j_eves),
        INT_FIELD(b_bits),
        DOUBLE_FIELD(p_max_dbm),
        DOUBLE_FIELD(noise_user_dbm),
        DOUBLE_FIELD(noise_eve_dbm),
        DOUBLE_FIELD(noise_irs_dbm),
        {"p_irs_mw_b3", Field{[](const SystemConfig& c) { return fmt(c.p_irs_mw.at(3)); },
                              [](SystemConfig& c, const std::string& v) { c.p_irs_mw[3] = parse_double(v); }}},
        {"p_irs_mw_b4", Field{[](const SystemConfig& c) { return fmt(c.p_irs_mw.at(4)); },
                              [](SystemConfig& c, const std::string& v) { c.p_irs_mw[4] = parse_double(v); }}},
        {"p_irs_mw_b5", Field{[](const SystemConfig& c) { return fmt(c.p_irs_mw.at(5)); },
                              [](SystemConfig& c, const std::string& v) { c.p_irs_mw[5] = parse_double(v); }}},
        {"p_irs_mw_b6", Field{[](const SystemConfig& c) { return fmt(c.p_irs_mw.at(6)); },
                              [](SystemConfig& c, const std::string& v) { c.p_irs_mw[6] = parse_double(v); }}},
        DOUBLE_FIELD(p_c_uw),
        {"eh_m_p_w", Field{[](const SystemConfig& c) { return fmt(c.eh.m_p_w); },
                           [](SystemConfig& c, const std::string& v) { c.eh.m_p_w = parse_double(v); }}},
        {"eh_a", Field{[](const SystemConfig& c) { return fmt(c.eh.a); },
                       [](SystemConfig& c, const std::string& v) { c.eh.a = parse_double(v); }}},
        {"eh_q_w", Field{[](const SystemConfig& c) { return fmt(c.eh.q_w); },
                         [](SystemConfig& c, const std::string& v) { c.eh.q_w = parse_double(v); }}},
        DOUBLE_FIELD(tau),
        DOUBLE_FIELD(kappa),
        DOUBLE_FIELD(d0_m),
        DOUBLE_FIELD(d_m),
        DOUBLE_FIELD(d_y_m),
        DOUBLE_FIELD(r_m),
        DOUBLE_FIELD(r_e1_m),
        DOUBLE_FIELD(r_e2_m),
        DOUBLE_FIELD(alpha_direct),
        DOUBLE_FIELD(alpha_irs),
        DOUBLE_FIELD(rician_direct),
        DOUBLE_FIELD(rician_irs),
        DOUBLE_FIELD(gain_ap_dbi),
        DOUBLE_FIELD(gain_irs_dbi),
        DOUBLE_FIELD(gain_rx_dbi),
        DOUBLE_FIELD(carrier_hz),
        INT_FIELD(t_max),
        DOUBLE_FIELD(convergence_tol),
        DOUBLE_FIELD(m_big),
        INT_FIELD(adversary_samples),
        DOUBLE_FIELD(chi_s),
        DOUBLE_FIELD(chi_y),
        BOOL_FIELD(ignore_c3),
    };
    return table;
}

#undef DOUBLE_FIELD
#undef INT_FIELD
#undef BOOL_FIELD

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void apply_override(SystemConfig& cfg, const std::string& key, const std::string& value) {
    auto it = field_table().find(key);
    if (it == field_table().end()) throw std::invalid_argument("unknown config key: " + key);
    it->second.set(cfg, trim(value));
}

SystemConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    SystemConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::string config_to_string(const SystemConfig& cfg) {
    std::ostringstream os;
    for (const auto& [key, field] : field_table()) os << key << " = " << field.get(cfg) << "\n";
    return os.str();
}

}  // namespace irssim
