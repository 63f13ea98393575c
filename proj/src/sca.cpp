// SPDX-License-Identifier: Apache-2.0
#include "irssim/sca.hpp"

#include <cmath>

namespace irssim {

using conic::CMatExpr;
using conic::ConicProblem;
using conic::HermitianVar;
using conic::LinExpr;
using conic::VarId;

bool IterationState::has_nan() const {
    auto bad_mat = [](const Eigen::MatrixXcd& m) { return !m.allFinite(); };
    for (const auto& m : w_mat)
        if (bad_mat(m)) return true;
    if (bad_mat(z_mat) || (y_mat.size() > 0 && bad_mat(y_mat))) return true;
    for (const auto& m : psi_c9)
        if (bad_mat(m)) return true;
    for (const auto& m : psi_c10)
        if (bad_mat(m)) return true;
    for (const auto& m : psi_eve)
        if (bad_mat(m)) return true;
    for (const auto& m : psi_eve_an)
        if (bad_mat(m)) return true;
    for (double v : xi)
        if (!std::isfinite(v)) return true;
    for (double v : iota)
        if (!std::isfinite(v)) return true;
    if (!std::isfinite(beta_pr)) return true;
    if (s.size() > 0 && !s.allFinite()) return true;
    return false;
}

CMatExpr MatVar::expr(const ConicProblem& p) const {
    if (!scaled) return p.expr_of(herm);
    CMatExpr e(static_cast<int>(dir.rows()), static_cast<int>(dir.cols()));
    e.add_term(scale, dir);
    return e;
}

LinExpr MatVar::trace_with(const ConicProblem& p, const Eigen::MatrixXcd& a) const {
    if (!scaled) return p.trace_product(a, herm);
    LinExpr e;
    e.add(scale, std::real((a * dir).trace()));
    return e;
}

Eigen::MatrixXcd MatVar::value(const ConicProblem& p, const Eigen::VectorXd& x) const {
    if (!scaled) return p.hermitian_value(herm, x);
    const double v = p.is_fixed(scale) ? p.fixed_value(scale) : x(scale);
    return v * dir;
}

std::pair<std::vector<Eigen::MatrixXcd>, std::vector<Eigen::MatrixXcd>> build_f_matrices(
    const CsiEstimate& est) {
    std::vector<Eigen::MatrixXcd> f_user, f_eve;
    const int m_t = static_cast<int>(est.hhat_d.empty()
                                         ? (est.hhat_ed.empty() ? 0 : est.hhat_ed[0].size())
                                         : est.hhat_d[0].size());
    const int n = static_cast<int>(est.ghat.rows());
    for (size_t k = 0; k < est.hhat_d.size(); ++k) {
        Eigen::MatrixXcd f(m_t, n + 1);
        if (n > 0) f.leftCols(n) = est.ghat_cu[k].adjoint();
        f.col(n) = est.hhat_d[k];
        f_user.push_back(std::move(f));
    }
    for (size_t j = 0; j < est.hhat_ed.size(); ++j) {
        Eigen::MatrixXcd f(m_t, n + 1);
        if (n > 0) f.leftCols(n) = est.ghat_ce[j].adjoint();
        f.col(n) = est.hhat_ed[j];
        f_eve.push_back(std::move(f));
    }
    return {std::move(f_user), std::move(f_eve)};
}

UnitScale make_unit_scale(const CsiEstimate& est, const SystemConfig& cfg) {
    UnitScale u;
    u.power = cfg.p_max_w();
    double acc = 0.0;
    int cnt = 0;
    for (const auto& h : est.hhat_d) {
        acc += h.squaredNorm();
        cnt += static_cast<int>(h.size());
    }
    u.chan2 = (cnt > 0 && acc > 0.0) ? acc / cnt : 1.0;
    double gbar = 1.0;
    if (est.ghat.size() > 0) {
        const double g2 = est.ghat.squaredNorm() / u.chan2;
        if (g2 > 0.0) gbar = g2 / static_cast<double>(est.ghat.rows());
    }
    u.eh = u.power * u.chan2 * gbar;
    return u;
}

namespace {

Eigen::MatrixXcd psd_project(const Eigen::MatrixXcd& m) {
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

struct Ctx {
    const IterationState& st;
    const CsiEstimate& est;
    const SystemConfig& cfg;
    const BuildOptions& opts;
    Subproblem& sp;
    UnitScale u;

    double chan_s = 1.0;  // sqrt(chan2)

    // scaled linearization-point quantities
    std::vector<Eigen::MatrixXcd> w_t, psi9_t, psi10_t, psie_t, psiean_t;
    Eigen::MatrixXcd z_t;
    std::vector<double> xi_t, iota_t;
    double beta_t = 0.0;

    ConicProblem& P() { return sp.problem; }
    SubproblemHandles& H() { return sp.h; }
    void tag(const std::string& t) { ++sp.h.tag_count[t]; }
};

// trace of the product of two Hermitian matrices
double herm_dot(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return std::real((a * b).trace());
}

void make_variables(Ctx& c) {
    auto& p = c.P();
    auto& h = c.H();
    const SystemConfig& cfg = c.cfg;
    const int m_t = cfg.m_t, n = cfg.n_irs;
    const int b_tot = cfg.phase_levels();

    h.k_users = cfg.k_users;
    h.j_eves = cfg.j_eves;
    h.n_irs = n;
    h.b_levels = b_tot;
    h.m_t = m_t;
    h.scale = c.u;
    h.use_y = (n > 0);

    for (int k = 0; k < cfg.k_users; ++k) {
        MatVar w;
        if (c.opts.mrt_directions) {
            w.scaled = true;
            w.dir = c.opts.mrt_outer.at(k);
            w.scale = p.add_var("p_w" + std::to_string(k), 0.0);
        } else {
            w.herm = p.add_hermitian("W" + std::to_string(k), m_t);
        }
        h.w.push_back(std::move(w));
    }
    if (c.opts.z_isotropic) {
        h.z.scaled = true;
        h.z.dir = Eigen::MatrixXcd::Identity(m_t, m_t) / m_t;
        h.z.scale = p.add_var("p_z", 0.0);
    } else {
        h.z.herm = p.add_hermitian("Z", m_t);
    }

    if (h.use_y) h.y = p.add_hermitian("Y", n + 2);

    for (int k = 0; k < cfg.k_users; ++k) {
        h.psi_c9.push_back(p.add_hermitian("PsiC9_" + std::to_string(k), m_t));
        h.psi_c10.push_back(p.add_hermitian("PsiC10_" + std::to_string(k), m_t));
        h.xi.push_back(p.add_var("xi" + std::to_string(k), 0.0));
        h.iota.push_back(p.add_var("iota" + std::to_string(k), 0.0));
        h.eta.push_back(p.add_var("eta" + std::to_string(k)));
        h.sigma_k2_scaled.push_back(cfg.noise_user_w() / (c.u.power * c.u.chan2));
    }
    if (c.opts.include_c5) {
        for (int j = 0; j < cfg.j_eves; ++j) {
            h.psi_eve.push_back(p.add_hermitian("PsiEve_" + std::to_string(j), m_t));
            h.psi_eve_an.push_back(p.add_hermitian("PsiEveAn_" + std::to_string(j), m_t));
        }
    }

    if (c.opts.include_c3 && n > 0) {
        h.beta_pr = p.add_var("beta_pr", 0.0);
        const double e_cap = 2.0 * std::exp(cfg.eh.a * cfg.eh.q_w);
        h.t_exp = p.add_var("t_exp", 0.0, e_cap);
        for (int i = 0; i < n; ++i) {
            h.u_es.push_back(p.add_var("u_es" + std::to_string(i), 0.0));
            h.u_bs.push_back(p.add_var("u_bs" + std::to_string(i), 0.0));
        }
    }

    if (c.opts.mode_selection && n > 0) {
        h.s.assign(b_tot + 1, {});
        h.zeta_s.assign(b_tot + 1, {});
        for (int i = 0; i <= b_tot; ++i) {
            for (int e = 0; e < n; ++e) {
                h.s[i].push_back(
                    p.add_var("s" + std::to_string(i) + "_" + std::to_string(e), 0.0, 1.0));
                h.zeta_s[i].push_back(
                    p.add_var("zs" + std::to_string(i) + "_" + std::to_string(e), 0.0));
            }
        }
    }
    if (h.use_y) h.zeta_y = p.add_var("zeta_y", 0.0);

    // pinned groups fold into constants from here on
    if (c.opts.fix_beamforming) {
        for (int k = 0; k < cfg.k_users; ++k) {
            if (h.w[k].scaled)
                p.fix_var(h.w[k].scale, std::real(c.st.w_mat[k].trace()) / c.u.power);
            else
                p.fix_hermitian(h.w[k].herm, c.st.w_mat[k] / c.u.power);
        }
        if (h.z.scaled)
            p.fix_var(h.z.scale, std::real(c.st.z_mat.trace()) / c.u.power);
        else
            p.fix_hermitian(h.z.herm, c.st.z_mat / c.u.power);
    }
    if (c.opts.fix_reflection) {
        if (h.use_y) {
            p.fix_hermitian(h.y, c.st.y_mat);
            p.fix_var(h.zeta_y, 0.0);
        }
        for (int i = 0; i < static_cast<int>(h.s.size()); ++i)
            for (int e = 0; e < n; ++e) p.fix_var(h.s[i][e], c.st.s(i, e));
    }
}

// expression for V (the (N+1) x (N+1) leading block of Y, or the constant 1)
CMatExpr v_expr(Ctx& c) {
    const int n = c.cfg.n_irs;
    if (!c.H().use_y) {
        CMatExpr e(1, 1);
        e.add_const(Eigen::MatrixXcd::Ones(1, 1));
        return e;
    }
    Eigen::MatrixXcd pv = Eigen::MatrixXcd::Zero(n + 1, n + 2);
    pv.leftCols(n + 1).setIdentity();
    return c.P().expr_of(c.H().y).left_right(pv, pv.adjoint());
}

void add_objective(Ctx& c) {
    auto& p = c.P();
    auto& h = c.H();
    LinExpr obj;
    const double ln2 = std::log(2.0);
    for (int k = 0; k < c.cfg.k_users; ++k) {
        obj.add(h.eta[k], 1.0);
        const double s2 = h.sigma_k2_scaled[k];
        const double grad = 1.0 / (ln2 * (s2 + c.iota_t[k]));
        obj.add(h.iota[k], -grad);
        obj.constant += grad * c.iota_t[k] - std::log2(c.iota_t[k] + s2);
    }
    if (!h.s.empty()) {
        for (size_t i = 0; i < h.s.size(); ++i)
            for (size_t e = 0; e < h.s[i].size(); ++e) obj.add(h.zeta_s[i][e], -c.cfg.chi_s);
    }
    if (h.use_y) obj.add(h.zeta_y, -c.cfg.chi_y);
    p.set_objective(std::move(obj));

    for (int k = 0; k < c.cfg.k_users; ++k) {
        const double u_t = c.xi_t[k] + c.iota_t[k];
        for (double f : c.opts.objective_cut_factors) add_objective_cut(c.sp, k, u_t * f);
    }
}

void add_power_and_cones(Ctx& c) {
    auto& p = c.P();
    auto& h = c.H();
    LinExpr power;
    for (int k = 0; k < c.cfg.k_users; ++k)
        power.add(h.w[k].trace_with(p, Eigen::MatrixXcd::Identity(h.m_t, h.m_t)));
    power.add(h.z.trace_with(p, Eigen::MatrixXcd::Identity(h.m_t, h.m_t)));
    p.add_ineq(std::move(power), 1.0, "C1");
    c.tag("C1");

    if (!h.z.scaled) {
        p.add_lmi(h.z.expr(p), "C6");
        c.tag("C6");
    }
    for (int k = 0; k < c.cfg.k_users; ++k) {
        if (!h.w[k].scaled) {
            p.add_lmi(h.w[k].expr(p), "C7");
            c.tag("C7");
        }
    }
}

void add_energy_family(Ctx& c) {
    if (!(c.opts.include_c3 && c.cfg.n_irs > 0)) return;
    auto& p = c.P();
    auto& h = c.H();
    const SystemConfig& cfg = c.cfg;
    const int n = cfg.n_irs;
    const double p_irs = cfg.p_irs_w();
    const double p_c = cfg.p_c_w();
    const EhParams& eh = cfg.eh;
    const double omega = eh.omega();

    const double a_s = eh.a * c.u.eh;          // slope in scaled beta units
    const double e_t = std::exp(-eh.a * (c.st.beta_pr - eh.q_w));  // scale-free

    // C3a: -sum_n s_1n + Cbr * t_exp - sum_n u_es <= rhs, with
    // t_exp >= exp(-a(beta - q)) via the rational over-estimator LMI
    {
        const double cbr = n + p_c / p_irs + eh.m_p_w * omega / ((1.0 - omega) * p_irs);
        const double rhs = (eh.m_p_w - p_c - p_irs * n) / p_irs;
        LinExpr row;
        if (!h.s.empty())
            for (int i = 0; i < n; ++i) row.add(h.s[0][i], -1.0);
        row.add(h.t_exp, cbr);
        for (int i = 0; i < n; ++i) row.add(h.u_es[i], -1.0);
        p.add_ineq(std::move(row), rhs, "C3a");
        c.tag("C3a");

        // [[t, sqrt(Et)], [sqrt(Et), 1 + a'(beta - beta_t)]] >= 0
        Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(2, 2);
        f0(0, 1) = f0(1, 0) = std::sqrt(e_t);
        f0(1, 1) = 1.0 - a_s * (c.beta_t);
        Eigen::MatrixXd ft = Eigen::MatrixXd::Zero(2, 2);
        ft(0, 0) = 1.0;
        Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(2, 2);
        fb(1, 1) = a_s;
        p.add_lmi_real(f0, {{h.t_exp, ft}, {h.beta_pr, fb}}, "C3exp");
        c.tag("C3exp");
    }

    // C3b: beta <= sum u_bs + sigma_a^2 sum s_1n
    {
        LinExpr row(h.beta_pr);
        for (int i = 0; i < n; ++i) row.add(h.u_bs[i], -1.0);
        const double sig_a = cfg.noise_irs_w() / c.u.eh;
        if (!h.s.empty())
            for (int i = 0; i < n; ++i) row.add(h.s[0][i], -sig_a);
        p.add_ineq(std::move(row), 0.0, "C3b");
        c.tag("C3b");
    }

    // C3c: u_es <= tangent of exp at beta_t (per element, as written)
    for (int i = 0; i < n; ++i) {
        LinExpr row(h.u_es[i]);
        row.add(h.beta_pr, a_s * e_t);
        p.add_ineq(std::move(row), e_t * (1.0 + a_s * c.beta_t), "C3c");
        c.tag("C3c");
    }

    // big-M couplings C3e / C3h (C3d, C3g are the variable bounds)
    const double kpa = cfg.kappa;
    // scaled rows: ghat_n' = ghat_n / sqrt(eh/power), so that
    // ghat'^H (W/power) ghat' carries the received power in EH units
    const double row_scale = std::sqrt(c.u.eh / c.u.power);
    double g2_scaled = 0.0;
    std::vector<Eigen::VectorXcd> ghat_rows;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXcd g = c.est.ghat.row(i).adjoint() / row_scale;
        g2_scaled += g.squaredNorm();
        ghat_rows.push_back(std::move(g));
    }
    const double m_bs = (cfg.m_big > 0.0) ? cfg.m_big : 10.0 * (1.0 + kpa) * (1.0 + kpa) *
                                                            std::max(1.0, g2_scaled);
    const double m_es = std::max(m_bs, 2.0 * std::exp(eh.a * eh.q_w));
    if (!h.s.empty()) {
        for (int i = 0; i < n; ++i) {
            LinExpr row_e(h.u_es[i]);
            row_e.add(h.s[0][i], -m_es);
            p.add_ineq(std::move(row_e), 0.0, "C3e");
            c.tag("C3e");
            LinExpr row_h(h.u_bs[i]);
            row_h.add(h.s[0][i], -m_bs);
            p.add_ineq(std::move(row_h), 0.0, "C3h");
            c.tag("C3h");
        }
    }

    // C3f: per-element S-procedure certificates for the received power
    const double rho_g2 =
        c.opts.robust ? (c.est.rho_g * c.est.rho_g) / (row_scale * row_scale) : 0.0;
    CMatExpr q_expr(h.m_t, h.m_t);
    for (int k = 0; k < cfg.k_users; ++k) q_expr.add(h.w[k].expr(p));
    q_expr.add(h.z.expr(p));

    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXcd& g = ghat_rows[i];
        const Eigen::MatrixXcd gg = g * g.adjoint();
        if (rho_g2 > 0.0) {
            CMatExpr b2 = q_expr.left_right(Eigen::MatrixXcd::Identity(h.m_t, h.m_t), g);
            LinExpr c2;
            for (int k = 0; k < cfg.k_users; ++k) c2.add(h.w[k].trace_with(p, gg));
            c2.add(h.z.trace_with(p, gg));
            c2.add(h.u_bs[i], -1.0);
            const auto res =
                conic::sproc_lmi(p, -Eigen::MatrixXcd::Identity(h.m_t, h.m_t),
                                 Eigen::VectorXcd::Zero(h.m_t), rho_g2 / n, q_expr, b2, c2,
                                 "C3fa");
            h.eps_c3f.push_back(res.eps);
            c.tag("C3fa");
        } else {
            LinExpr row(h.u_bs[i]);
            LinExpr quad;
            for (int k = 0; k < cfg.k_users; ++k) quad.add(h.w[k].trace_with(p, gg));
            quad.add(h.z.trace_with(p, gg));
            row.add(quad, -1.0);
            p.add_ineq(std::move(row), 0.0, "C3fa");
            c.tag("C3fa");
        }
    }
}

void add_mode_family(Ctx& c) {
    auto& p = c.P();
    auto& h = c.H();
    const int n = c.cfg.n_irs;
    if (n == 0 || !h.use_y) return;
    const int b_tot = c.cfg.phase_levels();

    if (c.opts.continuous_phases || (!c.opts.mode_selection && !c.opts.fix_reflection)) {
        for (int e = 0; e < n; ++e) {
            p.add_ineq(LinExpr(h.y.diag(e)), 1.0, "Vdiag");
            c.tag("Vdiag");
        }
        return;
    }
    if (h.s.empty()) return;

    for (int e = 0; e < n; ++e) {
        // C4a: sum_i s_ie <= 1
        LinExpr row;
        for (int i = 0; i <= b_tot; ++i) row.add(h.s[i][e], 1.0);
        p.add_ineq(std::move(row), 1.0, "C4a");
        c.tag("C4a");

        // C4b: v_e = sum_i s_ie conj(f_i); v_e = Y(e, N+1)
        // stored parameter (r=N+1, c=e) holds conj(Y(e, N+1))
        LinExpr re_row(h.y.re(n + 1, e));
        LinExpr im_row(h.y.im(n + 1, e));
        for (int i = 1; i <= b_tot; ++i) {
            const double ang = 2.0 * M_PI * (i - 1) / b_tot;
            re_row.add(h.s[i][e], -std::cos(ang));
            im_row.add(h.s[i][e], -std::sin(ang));
        }
        p.add_eq(std::move(re_row), 0.0, "C4b");
        p.add_eq(std::move(im_row), 0.0, "C4b");
        c.tag("C4b");

        // diagonal box on V (implied by C4 at binary points)
        p.add_ineq(LinExpr(h.y.diag(e)), 1.0, "Vdiag");
        c.tag("Vdiag");

        // C4d with exact-penalty slack: (1 - 2 s_t) s - zeta <= -(s_t)^2
        for (int i = 0; i <= b_tot; ++i) {
            const double st = c.st.s(i, e);
            LinExpr row4(h.s[i][e], 1.0 - 2.0 * st);
            row4.add(h.zeta_s[i][e], -1.0);
            p.add_ineq(std::move(row4), -st * st, "C4d");
            c.tag("C4d");
        }
    }
}

void add_rank_one_family(Ctx& c) {
    auto& p = c.P();
    auto& h = c.H();
    if (!h.use_y) return;
    const int n = c.cfg.n_irs;

    p.add_lmi(p.expr_of(h.y), "C11a");
    c.tag("C11a");
    p.add_eq(LinExpr(h.y.diag(n)), 1.0, "C11a_anchor");
    p.add_eq(LinExpr(h.y.diag(n + 1)), 1.0, "C11a_anchor");
    c.tag("C11a_anchor");

    // C11b: Tr(Y) - lin ||Y||_2 <= zeta_y around the state's top eigenvector
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c.st.y_mat);
    const int top = static_cast<int>(es.eigenvalues().size()) - 1;
    const double lmax = es.eigenvalues()(top);
    const Eigen::VectorXcd u = es.eigenvectors().col(top);
    const Eigen::MatrixXcd uu = u * u.adjoint();
    LinExpr row = p.trace_product(Eigen::MatrixXcd::Identity(n + 2, n + 2), h.y);
    row.add(p.trace_product(uu, h.y), -1.0);
    row.add(h.zeta_y, -1.0);
    p.add_ineq(std::move(row), lmax - herm_dot(uu, c.st.y_mat), "C11b");
    c.tag("C11b");
}

void add_signal_families(Ctx& c) {
    auto& p = c.P();
    auto& h = c.H();
    const SystemConfig& cfg = c.cfg;
    const int m_t = h.m_t;

    auto [f_user_raw, f_eve_raw] = build_f_matrices(c.est);
    std::vector<Eigen::MatrixXcd> f_user, f_eve;
    for (auto& f : f_user_raw) f_user.push_back(f / c.chan_s);
    for (auto& f : f_eve_raw) f_eve.push_back(f / c.chan_s);

    const CMatExpr v = v_expr(c);

    // C12 / C13 and the C9 / C10 rows per user
    for (int k = 0; k < cfg.k_users; ++k) {
        const Eigen::MatrixXcd& f = f_user[k];
        const double rho2 =
            c.opts.robust
                ? (c.est.rho_cu[k] * c.est.rho_cu[k] + c.est.rho_d[k] * c.est.rho_d[k]) /
                      c.u.chan2
                : 0.0;
        const CMatExpr fvf = v.left_right(f, f.adjoint());

        if (rho2 > 0.0) {
            // C12: Psi_C9 below F V F^H over the joint ball
            CMatExpr e12 = fvf;
            e12.add(p.expr_of(h.psi_c9[k]), -1.0);
            const CMatExpr b12 = v.left_right(Eigen::MatrixXcd::Identity(f.cols(), f.cols()),
                                              f.adjoint());
            const auto r12 = conic::gsproc_lmi(
                p, v, b12, e12,
                Eigen::MatrixXcd::Identity(f.cols(), f.cols()) / rho2, "C12a");
            h.eps_c12.push_back(r12.eps);
            c.tag("C12a");

            // C13: Psi_C10 above F V F^H over the joint ball
            CMatExpr e13 = p.expr_of(h.psi_c10[k]);
            e13.add(fvf, -1.0);
            CMatExpr d13 = v;
            CMatExpr b13(static_cast<int>(f.cols()), m_t);
            b13.add(v.left_right(Eigen::MatrixXcd::Identity(f.cols(), f.cols()), f.adjoint()),
                    -1.0);
            CMatExpr d13n(static_cast<int>(f.cols()), static_cast<int>(f.cols()));
            d13n.add(v, -1.0);
            const auto r13 = conic::gsproc_lmi(
                p, d13n, b13, e13,
                Eigen::MatrixXcd::Identity(f.cols(), f.cols()) / rho2, "C13a");
            h.eps_c13.push_back(r13.eps);
            c.tag("C13a");
        } else {
            CMatExpr e12 = fvf;
            e12.add(p.expr_of(h.psi_c9[k]), -1.0);
            p.add_lmi(e12, "C12a");
            c.tag("C12a");
            CMatExpr e13 = p.expr_of(h.psi_c10[k]);
            e13.add(fvf, -1.0);
            p.add_lmi(e13, "C13a");
            c.tag("C13a");
        }

        // C9: xi_k + (1/2)||W_k - Psi_C9||^2 + lin terms <= 0
        {
            const VarId t9 = p.add_var("t9_" + std::to_string(k), 0.0);
            CMatExpr diff = h.w[k].expr(p);
            diff.add(p.expr_of(h.psi_c9[k]), -1.0);
            p.add_frobenius_epigraph(diff, t9, "C9_epi");
            c.tag("C9_epi");
            LinExpr row(h.xi[k]);
            row.add(t9, 0.5);
            row.add(p.trace_product(c.psi9_t[k], h.psi_c9[k]), -1.0);
            row.add(h.w[k].trace_with(p, c.w_t[k]), -1.0);
            const double rhs = -0.5 * c.psi9_t[k].squaredNorm() - 0.5 * c.w_t[k].squaredNorm();
            p.add_ineq(std::move(row), rhs, "C9");
            c.tag("C9");
        }

        // C10: interference plus AN upper bound through Psi_C10
        {
            LinExpr row;
            double rhs = 0.0;
            for (int i = 0; i < cfg.k_users; ++i) {
                if (i == k) continue;
                const VarId t10 = p.add_var("t10w_" + std::to_string(i) + "_" + std::to_string(k), 0.0);
                CMatExpr sum = h.w[i].expr(p);
                sum.add(p.expr_of(h.psi_c10[k]));
                p.add_frobenius_epigraph(sum, t10, "C10_epi");
                c.tag("C10_epi");
                row.add(t10, 0.5);
                row.add(h.w[i].trace_with(p, c.w_t[i]), -1.0);
                rhs += 0.5 * c.w_t[i].squaredNorm();
            }
            const VarId t10z = p.add_var("t10z_" + std::to_string(k), 0.0);
            CMatExpr sum_z = h.z.expr(p);
            sum_z.add(p.expr_of(h.psi_c10[k]));
            p.add_frobenius_epigraph(sum_z, t10z, "C10_epi");
            c.tag("C10_epi");
            row.add(t10z, 0.5);
            row.add(h.z.trace_with(p, c.z_t), -1.0);
            rhs += 0.5 * c.z_t.squaredNorm();
            const double kk = cfg.k_users;
            row.add(p.trace_product(c.psi10_t[k], h.psi_c10[k]), -kk);
            rhs += 0.5 * kk * c.psi10_t[k].squaredNorm();
            row.add(h.iota[k], -1.0);
            p.add_ineq(std::move(row), -rhs, "C10");
            c.tag("C10");
        }
    }

    // secrecy family: the signal side is over-estimated through Psi_eve and
    // the received AN is under-estimated through Psi_eve_an, so the certified
    // leakage bound holds pointwise over the uncertainty ball
    if (c.opts.include_c5) {
        const double sig_e2 = cfg.noise_eve_w() / (c.u.power * c.u.chan2);
        std::vector<VarId> t_zpsi(cfg.j_eves, -1);
        for (int j = 0; j < cfg.j_eves; ++j) {
            const Eigen::MatrixXcd& f = f_eve[j];
            const double rho2 =
                c.opts.robust
                    ? (c.est.rho_ce[j] * c.est.rho_ce[j] + c.est.rho_ed[j] * c.est.rho_ed[j]) /
                          c.u.chan2
                    : 0.0;
            const CMatExpr fvf = v.left_right(f, f.adjoint());
            if (rho2 > 0.0) {
                // Psi_eve above F V F^H
                CMatExpr e5 = p.expr_of(h.psi_eve[j]);
                e5.add(fvf, -1.0);
                CMatExpr b5(static_cast<int>(f.cols()), m_t);
                b5.add(v.left_right(Eigen::MatrixXcd::Identity(f.cols(), f.cols()), f.adjoint()),
                       -1.0);
                CMatExpr d5(static_cast<int>(f.cols()), static_cast<int>(f.cols()));
                d5.add(v, -1.0);
                const auto r5 = conic::gsproc_lmi(
                    p, d5, b5, e5, Eigen::MatrixXcd::Identity(f.cols(), f.cols()) / rho2,
                    "C5b");
                h.eps_c5b.push_back(r5.eps);
                c.tag("C5b");

                // Psi_eve_an below F V F^H
                CMatExpr e5a = fvf;
                e5a.add(p.expr_of(h.psi_eve_an[j]), -1.0);
                const CMatExpr b5a =
                    v.left_right(Eigen::MatrixXcd::Identity(f.cols(), f.cols()), f.adjoint());
                const auto r5a = conic::gsproc_lmi(
                    p, v, b5a, e5a, Eigen::MatrixXcd::Identity(f.cols(), f.cols()) / rho2,
                    "C5bAN");
                h.eps_c5b_an.push_back(r5a.eps);
                c.tag("C5bAN");
            } else {
                CMatExpr e5 = p.expr_of(h.psi_eve[j]);
                e5.add(fvf, -1.0);
                p.add_lmi(e5, "C5b");
                c.tag("C5b");
                CMatExpr e5a = fvf;
                e5a.add(p.expr_of(h.psi_eve_an[j]), -1.0);
                p.add_lmi(e5a, "C5bAN");
                c.tag("C5bAN");
            }

            // shared ||Z - Psi_eve_an||^2 epigraph
            t_zpsi[j] = p.add_var("t5z_" + std::to_string(j), 0.0);
            CMatExpr zdiff = h.z.expr(p);
            zdiff.add(p.expr_of(h.psi_eve_an[j]), -1.0);
            p.add_frobenius_epigraph(zdiff, t_zpsi[j], "C5a_epi");
            c.tag("C5a_epi");
        }

        for (int k = 0; k < cfg.k_users; ++k) {
            for (int j = 0; j < cfg.j_eves; ++j) {
                const double two_tau = std::pow(2.0, cfg.tau);
                const VarId t_wpsi =
                    p.add_var("t5w_" + std::to_string(k) + "_" + std::to_string(j), 0.0);
                CMatExpr sum = h.w[k].expr(p);
                sum.add(p.expr_of(h.psi_eve[j]));
                p.add_frobenius_epigraph(sum, t_wpsi, "C5a_epi");
                c.tag("C5a_epi");

                // 2 Tr(W Psi_eve) - 2 c Tr(Z Psi_an) <= 2 c sigma^2, c = 2^tau - 1,
                // with every subtracted convex square linearized at the state
                const double cc = two_tau - 1.0;
                LinExpr row(t_wpsi);
                double rhs = -c.w_t[k].squaredNorm();
                row.add(h.w[k].trace_with(p, c.w_t[k]), -2.0);
                rhs -= c.psie_t[j].squaredNorm();
                row.add(p.trace_product(c.psie_t[j], h.psi_eve[j]), -2.0);
                rhs += 2.0 * cc * sig_e2;
                row.add(t_zpsi[j], cc);
                rhs -= cc * c.z_t.squaredNorm();
                row.add(h.z.trace_with(p, c.z_t), -2.0 * cc);
                rhs -= cc * c.psiean_t[j].squaredNorm();
                row.add(p.trace_product(c.psiean_t[j], h.psi_eve_an[j]), -2.0 * cc);
                p.add_ineq(std::move(row), rhs, "C5a");
                c.tag("C5a");
            }
        }
    }
}  // namespace

void add_objective_cut(Subproblem& sp, int k, double u0_scaled) {
    auto& p = sp.problem;
    auto& h = sp.h;
    const double s2 = h.sigma_k2_scaled[k];
    const double u0 = std::max(u0_scaled, 1e-9 * std::max(1.0, s2));
    const double f0 = std::log2(u0 + s2);
    const double fp = 1.0 / (std::log(2.0) * (u0 + s2));
    LinExpr row(h.eta[k]);
    row.add(h.xi[k], -fp);
    row.add(h.iota[k], -fp);
    p.add_ineq(std::move(row), f0 - fp * u0, "obj_cut");
    ++h.tag_count["obj_cut"];
}

std::unique_ptr<Subproblem> build_subproblem(const IterationState& state, const CsiEstimate& est,
                                             const SystemConfig& cfg, const BuildOptions& opts) {
    if (state.has_nan()) throw std::domain_error("build_subproblem: state contains NaN");
    auto sp = std::make_unique<Subproblem>();
    Ctx c{state, est, cfg, opts, *sp, make_unit_scale(est, cfg), 1.0, {}, {}, {}, {}, {}, {}, {}, {}, 0.0};
    c.chan_s = std::sqrt(c.u.chan2);

    const double pw = c.u.power;
    const double pc = c.u.power * c.u.chan2;
    for (int k = 0; k < cfg.k_users; ++k) {
        c.w_t.push_back(state.w_mat[k] / pw);
        c.psi9_t.push_back(state.psi_c9[k] / c.u.chan2);
        c.psi10_t.push_back(state.psi_c10[k] / c.u.chan2);
        c.xi_t.push_back(state.xi[k] / pc);
        c.iota_t.push_back(state.iota[k] / pc);
    }
    for (const auto& m : state.psi_eve) c.psie_t.push_back(m / c.u.chan2);
    for (const auto& m : state.psi_eve_an) c.psiean_t.push_back(m / c.u.chan2);
    c.z_t = state.z_mat / pw;
    c.beta_t = state.beta_pr / c.u.eh;

    make_variables(c);
    add_objective(c);
    add_power_and_cones(c);
    add_energy_family(c);
    add_mode_family(c);
    add_rank_one_family(c);
    add_signal_families(c);
    return sp;
}

IterationState extract_state(const conic::ConicSolution& sol, const Subproblem& sp,
                             const IterationState& previous) {
    const auto& h = sp.h;
    const auto& p = sp.problem;
    IterationState st = previous;
    const double pw = h.scale.power;
    const double pc = h.scale.power * h.scale.chan2;

    st.w_mat.clear();
    for (int k = 0; k < h.k_users; ++k)
        st.w_mat.push_back(psd_project(h.w[k].value(p, sol.x) * pw));
    st.z_mat = psd_project(h.z.value(p, sol.x) * pw);
    if (h.use_y) st.y_mat = psd_project(p.hermitian_value(h.y, sol.x));

    st.psi_c9.clear();
    st.psi_c10.clear();
    st.psi_eve.clear();
    for (int k = 0; k < h.k_users; ++k) {
        st.psi_c9.push_back(p.hermitian_value(h.psi_c9[k], sol.x) * h.scale.chan2);
        st.psi_c10.push_back(p.hermitian_value(h.psi_c10[k], sol.x) * h.scale.chan2);
    }
    st.psi_eve_an.clear();
    for (size_t j = 0; j < h.psi_eve.size(); ++j) {
        st.psi_eve.push_back(p.hermitian_value(h.psi_eve[j], sol.x) * h.scale.chan2);
        st.psi_eve_an.push_back(p.hermitian_value(h.psi_eve_an[j], sol.x) * h.scale.chan2);
    }

    st.xi.clear();
    st.iota.clear();
    for (int k = 0; k < h.k_users; ++k) {
        st.xi.push_back(std::max(0.0, sol.x(h.xi[k])) * pc);
        st.iota.push_back(std::max(0.0, sol.x(h.iota[k])) * pc);
    }
    if (h.beta_pr >= 0) st.beta_pr = std::max(0.0, sol.x(h.beta_pr)) * h.scale.eh;

    if (!h.s.empty()) {
        st.s.resize(static_cast<int>(h.s.size()), h.n_irs);
        for (size_t i = 0; i < h.s.size(); ++i)
            for (int e = 0; e < h.n_irs; ++e) {
                const VarId v = h.s[i][e];
                const double val = p.is_fixed(v) ? p.fixed_value(v) : sol.x(v);
                st.s(static_cast<int>(i), e) = std::clamp(val, 0.0, 1.0);
            }
    }
    return st;
}

double surrogate_objective(const IterationState& state, const SystemConfig& cfg) {
    double obj = rate_bound(state, cfg);
    if (state.s.size() > 0) {
        double pen = 0.0;
        for (int i = 0; i < state.s.rows(); ++i)
            for (int e = 0; e < state.s.cols(); ++e)
                pen += state.s(i, e) - state.s(i, e) * state.s(i, e);
        obj -= cfg.chi_s * pen;
    }
    if (state.y_mat.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state.y_mat, Eigen::EigenvaluesOnly);
        const double lmax = es.eigenvalues().maxCoeff();
        obj -= cfg.chi_y * std::max(0.0, std::real(state.y_mat.trace()) - lmax);
    }
    return obj;
}

double rate_bound(const IterationState& state, const SystemConfig& cfg) {
    double obj = 0.0;
    for (int k = 0; k < cfg.k_users; ++k)
        obj += std::log2(1.0 + state.xi[k] / (state.iota[k] + cfg.noise_user_w()));
    return obj;
}

}  // namespace irssim
