// SPDX-License-Identifier: Apache-2.0
#include "irssim/conic/solver.hpp"

#include <cmath>
#include <iostream>

namespace irssim::conic {

const char* to_string(ConicSolution::Status s) {
    switch (s) {
        case ConicSolution::Status::optimal: return "optimal";
        case ConicSolution::Status::infeasible: return "infeasible";
        default: return "numerical_failure";
    }
}

namespace {

// The solver core runs in extended precision: the reduced (Schur) KKT system
// squares the cone scaling's condition number, and plain double stalls near
// mu ~ 1e-8 on boundary-active mode-selection blocks. Eigendecompositions
// stay in double; everything on the Newton-system path is long double.
using Real = long double;
using MatX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecX = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

MatX to_x(const Eigen::MatrixXd& m) { return m.cast<Real>(); }
Eigen::MatrixXd to_d(const MatX& m) { return m.cast<double>(); }

VecX svec_x(const MatX& a) {
    const int n = static_cast<int>(a.rows());
    VecX v(svec_dim(n));
    const Real s2 = std::sqrt(static_cast<Real>(2));
    int idx = 0;
    for (int c = 0; c < n; ++c) {
        v(idx++) = a(c, c);
        for (int r = c + 1; r < n; ++r) v(idx++) = s2 * a(r, c);
    }
    return v;
}

MatX smat_x(const VecX& v, int n) {
    MatX a(n, n);
    const Real is2 = 1 / std::sqrt(static_cast<Real>(2));
    int idx = 0;
    for (int c = 0; c < n; ++c) {
        a(c, c) = v(idx++);
        for (int r = c + 1; r < n; ++r) {
            a(r, c) = v(idx) * is2;
            a(c, r) = a(r, c);
            ++idx;
        }
    }
    return a;
}

struct LinTermX {
    int var;
    Real coeff;
};

// Problem compiled to  min c'x  s.t.  Gx + s = h, s in (R+^mlp, PSD...), Ax = b.
struct Compiled {
    int n = 0;
    std::vector<int> col_of;
    std::vector<int> var_of;

    std::vector<std::vector<LinTermX>> lp_rows;
    VecX lp_h;

    struct Block {
        int d = 0;
        int sd = 0;
        MatX f0;
        std::vector<int> cols;
        std::vector<MatX> f;
    };
    std::vector<Block> blocks;

    std::vector<std::vector<LinTermX>> eq_rows;
    VecX b;
    VecX c;

    int m_lp = 0;
    int m_total = 0;
    int p = 0;
    Real cone_degree = 0;
    int ineq_row_start = 0;
};

Compiled compile(const ConicProblem& prob) {
    Compiled cp;
    const int nv = prob.num_vars();
    cp.col_of.assign(nv, -1);

    std::vector<char> used(nv, 0);
    auto mark = [&](const LinExpr& e) {
        for (const auto& t : e.terms) used[t.var] = 1;
    };
    mark(prob.objective());
    for (const auto& r : prob.ineqs()) mark(r.expr);
    for (const auto& r : prob.eqs()) mark(r.expr);
    for (const auto& b : prob.lmis())
        for (const auto& [v, m] : b.coeffs) used[v] = 1;
    for (int v = 0; v < nv; ++v)
        if (!prob.is_fixed(v) && (prob.vars()[v].lb > -kInf || prob.vars()[v].ub < kInf))
            used[v] = 1;

    for (int v = 0; v < nv; ++v) {
        if (prob.is_fixed(v) || !used[v]) continue;
        cp.col_of[v] = static_cast<int>(cp.var_of.size());
        cp.var_of.push_back(v);
    }
    cp.n = static_cast<int>(cp.var_of.size());

    auto to_cols = [&](const LinExpr& e) {
        std::vector<LinTermX> row;
        for (const auto& t : e.terms) {
            const int col = cp.col_of[t.var];
            if (col >= 0) row.push_back({col, static_cast<Real>(t.coeff)});
        }
        return row;
    };

    std::vector<Real> lp_h;
    for (int v = 0; v < nv; ++v) {
        const int col = cp.col_of[v];
        if (col < 0) continue;
        const auto& info = prob.vars()[v];
        if (info.lb > -kInf) {
            cp.lp_rows.push_back({{col, -1.0L}});
            lp_h.push_back(-static_cast<Real>(info.lb));
        }
        if (info.ub < kInf) {
            cp.lp_rows.push_back({{col, 1.0L}});
            lp_h.push_back(static_cast<Real>(info.ub));
        }
    }
    cp.ineq_row_start = static_cast<int>(cp.lp_rows.size());
    for (const auto& r : prob.ineqs()) {
        cp.lp_rows.push_back(to_cols(r.expr));
        lp_h.push_back(static_cast<Real>(r.rhs - r.expr.constant));
    }
    cp.m_lp = static_cast<int>(cp.lp_rows.size());
    cp.lp_h = Eigen::Map<VecX>(lp_h.data(), static_cast<Eigen::Index>(lp_h.size()));

    for (const auto& b : prob.lmis()) {
        Compiled::Block blk;
        blk.d = b.dim;
        blk.sd = svec_dim(b.dim);
        blk.f0 = to_x(b.f0);
        for (const auto& [v, m] : b.coeffs) {
            const int col = cp.col_of[v];
            if (col < 0) continue;
            blk.cols.push_back(col);
            blk.f.push_back(to_x(m));
        }
        cp.cone_degree += b.dim;
        cp.m_total += blk.sd;
        cp.blocks.push_back(std::move(blk));
    }
    cp.cone_degree += cp.m_lp;
    cp.m_total += cp.m_lp;

    std::vector<Real> bvec;
    for (const auto& r : prob.eqs()) {
        cp.eq_rows.push_back(to_cols(r.expr));
        bvec.push_back(static_cast<Real>(r.rhs - r.expr.constant));
    }
    cp.p = static_cast<int>(cp.eq_rows.size());
    cp.b = Eigen::Map<VecX>(bvec.data(), static_cast<Eigen::Index>(bvec.size()));

    cp.c = VecX::Zero(cp.n);
    for (const auto& t : prob.objective().terms) {
        const int col = cp.col_of[t.var];
        if (col >= 0) cp.c(col) -= static_cast<Real>(t.coeff);  // maximize -> minimize
    }
    return cp;
}

struct Scaling {
    VecX w2;         // LP: w_i^2 = s_i / z_i
    VecX lp_lambda;  // sqrt(s_i z_i)
    std::vector<MatX> r, rinv, s_inv_scale;  // R, R^{-1}, (R R^T)^{-1}
    std::vector<VecX> lambda;
};

class Hsde {
public:
    Hsde(const Compiled& cp, const SolveOptions& opts) : cp_(cp), o_(opts) {}
    ConicSolution run();

private:
    const Compiled& cp_;
    const SolveOptions& o_;

    VecX x_, y_, s_, z_;
    Real tau_ = 1, kappa_ = 1;
    Scaling w_;
    Eigen::PartialPivLU<MatX> kkt_lu_;
    MatX kkt_;

    VecX cone_identity() const {
        VecX e = VecX::Zero(cp_.m_total);
        e.head(cp_.m_lp).setOnes();
        int off = cp_.m_lp;
        for (const auto& b : cp_.blocks) {
            e.segment(off, b.sd) = svec_x(MatX::Identity(b.d, b.d));
            off += b.sd;
        }
        return e;
    }

    VecX apply_G(const VecX& x) const {
        VecX out(cp_.m_total);
        for (int i = 0; i < cp_.m_lp; ++i) {
            Real acc = 0;
            for (const auto& t : cp_.lp_rows[i]) acc += t.coeff * x(t.var);
            out(i) = acc;
        }
        int off = cp_.m_lp;
        for (const auto& b : cp_.blocks) {
            MatX m = MatX::Zero(b.d, b.d);
            for (size_t j = 0; j < b.cols.size(); ++j) m -= x(b.cols[j]) * b.f[j];
            out.segment(off, b.sd) = svec_x(m);
            off += b.sd;
        }
        return out;
    }

    VecX apply_Gt(const VecX& z) const {
        VecX out = VecX::Zero(cp_.n);
        for (int i = 0; i < cp_.m_lp; ++i)
            for (const auto& t : cp_.lp_rows[i]) out(t.var) += t.coeff * z(i);
        int off = cp_.m_lp;
        for (const auto& b : cp_.blocks) {
            const MatX zm = smat_x(z.segment(off, b.sd), b.d);
            for (size_t j = 0; j < b.cols.size(); ++j)
                out(b.cols[j]) -= (b.f[j].cwiseProduct(zm)).sum();
            off += b.sd;
        }
        return out;
    }

    VecX apply_A(const VecX& x) const {
        VecX out(cp_.p);
        for (int i = 0; i < cp_.p; ++i) {
            Real acc = 0;
            for (const auto& t : cp_.eq_rows[i]) acc += t.coeff * x(t.var);
            out(i) = acc;
        }
        return out;
    }

    VecX apply_At(const VecX& y) const {
        VecX out = VecX::Zero(cp_.n);
        for (int i = 0; i < cp_.p; ++i)
            for (const auto& t : cp_.eq_rows[i]) out(t.var) += t.coeff * y(i);
        return out;
    }

    VecX h_vec() const {
        VecX h(cp_.m_total);
        h.head(cp_.m_lp) = cp_.lp_h;
        int off = cp_.m_lp;
        for (const auto& b : cp_.blocks) {
            h.segment(off, b.sd) = svec_x(b.f0);
            off += b.sd;
        }
        return h;
    }

    bool compute_scaling();
    void factor_kkt();
    void kkt_solve(const VecX& bx, const VecX& by, const VecX& bz, VecX& dx, VecX& dy,
                   VecX& dz) const;

    VecX apply_Winv2(const VecX& v) const;
    VecX apply_W(const VecX& z) const;
    VecX apply_Wt(const VecX& s) const;
    VecX apply_Winv_t(const VecX& s) const;
    VecX lambda_vec() const;
    VecX lambda_inv_circ(const VecX& d) const;
    VecX sym_circ(const VecX& a, const VecX& b) const;
    Real max_step_scaled(const VecX& dir) const;
    Real min_eig_shift(const VecX& v) const;  // max over cones of -min_eig
};

bool Hsde::compute_scaling() {
    w_.w2.resize(cp_.m_lp);
    w_.lp_lambda.resize(cp_.m_lp);
    for (int i = 0; i < cp_.m_lp; ++i) {
        if (s_(i) <= 0 || z_(i) <= 0) return false;
        w_.w2(i) = s_(i) / z_(i);
        w_.lp_lambda(i) = std::sqrt(s_(i) * z_(i));
    }
    w_.r.clear();
    w_.rinv.clear();
    w_.s_inv_scale.clear();
    w_.lambda.clear();
    int off = cp_.m_lp;
    for (const auto& b : cp_.blocks) {
        const Eigen::MatrixXd sm = to_d(smat_x(s_.segment(off, b.sd), b.d));
        const Eigen::MatrixXd zm = to_d(smat_x(z_.segment(off, b.sd), b.d));
        Eigen::LLT<Eigen::MatrixXd> ls(sm);
        Eigen::LLT<Eigen::MatrixXd> lz(zm);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
        const Eigen::MatrixXd Ls = ls.matrixL();
        const Eigen::MatrixXd Lz = lz.matrixL();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd sig = svd.singularValues();
        if (sig.minCoeff() <= 0.0) return false;
        const Eigen::VectorXd sig_isqrt = sig.cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd R = Ls * svd.matrixV() * sig_isqrt.asDiagonal();
        const Eigen::MatrixXd Rinv =
            sig_isqrt.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
        MatX rx = to_x(R), rix = to_x(Rinv);
        w_.s_inv_scale.push_back(rix.transpose() * rix);
        w_.r.push_back(std::move(rx));
        w_.rinv.push_back(std::move(rix));
        w_.lambda.push_back(to_x(sig).col(0));
        off += b.sd;
    }
    return true;
}

VecX Hsde::apply_Winv2(const VecX& v) const {
    VecX out(cp_.m_total);
    out.head(cp_.m_lp) = v.head(cp_.m_lp).cwiseQuotient(w_.w2);
    int off = cp_.m_lp;
    for (size_t bi = 0; bi < cp_.blocks.size(); ++bi) {
        const auto& b = cp_.blocks[bi];
        const MatX m = smat_x(v.segment(off, b.sd), b.d);
        out.segment(off, b.sd) = svec_x(w_.s_inv_scale[bi] * m * w_.s_inv_scale[bi]);
        off += b.sd;
    }
    return out;
}

VecX Hsde::apply_W(const VecX& z) const {
    VecX out(cp_.m_total);
    out.head(cp_.m_lp) = z.head(cp_.m_lp).cwiseProduct(w_.w2.cwiseSqrt());
    int off = cp_.m_lp;
    for (size_t bi = 0; bi < cp_.blocks.size(); ++bi) {
        const auto& b = cp_.blocks[bi];
        const MatX m = smat_x(z.segment(off, b.sd), b.d);
        out.segment(off, b.sd) = svec_x(w_.r[bi].transpose() * m * w_.r[bi]);
        off += b.sd;
    }
    return out;
}

VecX Hsde::apply_Wt(const VecX& s) const {
    VecX out(cp_.m_total);
    out.head(cp_.m_lp) = s.head(cp_.m_lp).cwiseProduct(w_.w2.cwiseSqrt());
    int off = cp_.m_lp;
    for (size_t bi = 0; bi < cp_.blocks.size(); ++bi) {
        const auto& b = cp_.blocks[bi];
        const MatX m = smat_x(s.segment(off, b.sd), b.d);
        out.segment(off, b.sd) = svec_x(w_.r[bi] * m * w_.r[bi].transpose());
        off += b.sd;
    }
    return out;
}

VecX Hsde::apply_Winv_t(const VecX& s) const {
    VecX out(cp_.m_total);
    out.head(cp_.m_lp) = s.head(cp_.m_lp).cwiseQuotient(w_.w2.cwiseSqrt());
    int off = cp_.m_lp;
    for (size_t bi = 0; bi < cp_.blocks.size(); ++bi) {
        const auto& b = cp_.blocks[bi];
        const MatX m = smat_x(s.segment(off, b.sd), b.d);
        out.segment(off, b.sd) = svec_x(w_.rinv[bi] * m * w_.rinv[bi].transpose());
        off += b.sd;
    }
    return out;
}

VecX Hsde::lambda_vec() const {
    VecX out(cp_.m_total);
    out.head(cp_.m_lp) = w_.lp_lambda;
    int off = cp_.m_lp;
    for (size_t bi = 0; bi < cp_.blocks.size(); ++bi) {
        const auto& b = cp_.blocks[bi];
        out.segment(off, b.sd) = svec_x(MatX(w_.lambda[bi].asDiagonal()));
        off += b.sd;
    }
    return out;
}

VecX Hsde::lambda_inv_circ(const VecX& d) const {
    VecX out(cp_.m_total);
    out.head(cp_.m_lp) = d.head(cp_.m_lp).cwiseQuotient(w_.lp_lambda);
    int off = cp_.m_lp;
    for (size_t bi = 0; bi < cp_.blocks.size(); ++bi) {
        const auto& b = cp_.blocks[bi];
        MatX m = smat_x(d.segment(off, b.sd), b.d);
        const auto& lam = w_.lambda[bi];
        for (int r = 0; r < b.d; ++r)
            for (int c = 0; c < b.d; ++c) m(r, c) *= 2 / (lam(r) + lam(c));
        out.segment(off, b.sd) = svec_x(m);
        off += b.sd;
    }
    return out;
}

VecX Hsde::sym_circ(const VecX& a, const VecX& b) const {
    VecX out(cp_.m_total);
    out.head(cp_.m_lp) = a.head(cp_.m_lp).cwiseProduct(b.head(cp_.m_lp));
    int off = cp_.m_lp;
    for (const auto& blk : cp_.blocks) {
        const MatX am = smat_x(a.segment(off, blk.sd), blk.d);
        const MatX bm = smat_x(b.segment(off, blk.sd), blk.d);
        out.segment(off, blk.sd) = svec_x(0.5 * (am * bm + bm * am));
        off += blk.sd;
    }
    return out;
}

Real Hsde::max_step_scaled(const VecX& dir) const {
    Real amax = std::numeric_limits<Real>::infinity();
    for (int i = 0; i < cp_.m_lp; ++i)
        if (dir(i) < 0) amax = std::min(amax, -w_.lp_lambda(i) / dir(i));
    int off = cp_.m_lp;
    for (size_t bi = 0; bi < cp_.blocks.size(); ++bi) {
        const auto& b = cp_.blocks[bi];
        MatX m = smat_x(dir.segment(off, b.sd), b.d);
        const VecX lam_isqrt = w_.lambda[bi].cwiseSqrt().cwiseInverse();
        m = lam_isqrt.asDiagonal() * m * lam_isqrt.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_d(m), Eigen::EigenvaluesOnly);
        const double emin = es.eigenvalues().minCoeff();
        if (emin < 0) amax = std::min(amax, static_cast<Real>(-1.0 / emin));
        off += b.sd;
    }
    return amax;
}

Real Hsde::min_eig_shift(const VecX& v) const {
    Real worst = -std::numeric_limits<Real>::infinity();
    for (int i = 0; i < cp_.m_lp; ++i) worst = std::max(worst, -v(i));
    int off = cp_.m_lp;
    for (const auto& b : cp_.blocks) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_d(smat_x(v.segment(off, b.sd), b.d)),
                                                          Eigen::EigenvaluesOnly);
        worst = std::max(worst, static_cast<Real>(-es.eigenvalues().minCoeff()));
        off += b.sd;
    }
    return worst;
}

void Hsde::factor_kkt() {
    const int n = cp_.n, p = cp_.p;
    kkt_ = MatX::Zero(n + p, n + p);
    for (int i = 0; i < cp_.m_lp; ++i) {
        const Real wi = 1 / w_.w2(i);
        for (const auto& t1 : cp_.lp_rows[i])
            for (const auto& t2 : cp_.lp_rows[i])
                kkt_(t1.var, t2.var) += wi * t1.coeff * t2.coeff;
    }
    for (size_t bi = 0; bi < cp_.blocks.size(); ++bi) {
        const auto& b = cp_.blocks[bi];
        const auto& S = w_.s_inv_scale[bi];
        const int nb = static_cast<int>(b.cols.size());
        std::vector<MatX> g(nb);
        for (int j = 0; j < nb; ++j) g[j] = S * b.f[j] * S;
        for (int j = 0; j < nb; ++j) {
            for (int i = 0; i <= j; ++i) {
                const Real v = (b.f[i].cwiseProduct(g[j])).sum();
                kkt_(b.cols[i], b.cols[j]) += v;
                if (i != j) kkt_(b.cols[j], b.cols[i]) += v;
            }
        }
    }
    for (int i = 0; i < p; ++i) {
        for (const auto& t : cp_.eq_rows[i]) {
            kkt_(n + i, t.var) = t.coeff;
            kkt_(t.var, n + i) = t.coeff;
        }
    }
    kkt_lu_.compute(kkt_);
}

void Hsde::kkt_solve(const VecX& bx, const VecX& by, const VecX& bz, VecX& dx, VecX& dy,
                     VecX& dz) const {
    const int n = cp_.n, p = cp_.p;

    auto reduced_solve = [&](const VecX& rx, const VecX& ry, const VecX& rz, VecX& ox, VecX& oy,
                             VecX& oz) {
        VecX rhs(n + p);
        rhs.head(n) = rx + apply_Gt(apply_Winv2(rz));
        rhs.tail(p) = ry;
        VecX sol = kkt_lu_.solve(rhs);
        const VecX resid = rhs - kkt_ * sol;
        sol += kkt_lu_.solve(resid);
        ox = sol.head(n);
        oy = sol.tail(p);
        oz = apply_Winv2(apply_G(ox) - rz);
    };

    reduced_solve(bx, by, bz, dx, dy, dz);

    // refinement against the full 3x3 system: errors made while eliminating
    // dz are invisible to the reduced system's own refinement
    for (int round = 0; round < 2; ++round) {
        const VecX r1 = bx - (apply_At(dy) + apply_Gt(dz));
        const VecX r2 = by - apply_A(dx);
        const VecX r3 = bz - (apply_G(dx) - apply_Wt(apply_W(dz)));
        VecX ex, ey, ez;
        reduced_solve(r1, r2, r3, ex, ey, ez);
        dx += ex;
        dy += ey;
        dz += ez;
    }
}

ConicSolution Hsde::run() {
    ConicSolution out;
    const int n = cp_.n, p = cp_.p, m = cp_.m_total;
    const VecX h = h_vec();
    const VecX e = cone_identity();
    const Real resx0 = std::max<Real>(1, cp_.c.norm());
    const Real resy0 = std::max<Real>(1, cp_.b.norm());
    const Real resz0 = std::max<Real>(1, h.norm());

    x_ = VecX::Zero(n);
    y_ = VecX::Zero(p);
    s_ = e;
    z_ = e;
    tau_ = 1;
    kappa_ = 1;

    // initial point from two identity-scaled KKT solves
    {
        w_.w2 = VecX::Ones(cp_.m_lp);
        w_.lp_lambda = VecX::Ones(cp_.m_lp);
        w_.r.clear();
        w_.rinv.clear();
        w_.s_inv_scale.clear();
        w_.lambda.clear();
        for (const auto& b : cp_.blocks) {
            w_.r.push_back(MatX::Identity(b.d, b.d));
            w_.rinv.push_back(MatX::Identity(b.d, b.d));
            w_.s_inv_scale.push_back(MatX::Identity(b.d, b.d));
            w_.lambda.push_back(VecX::Ones(b.d));
        }
        factor_kkt();
        VecX dx, dy, dz;
        kkt_solve(VecX::Zero(n), cp_.b, h, dx, dy, dz);
        x_ = dx;
        const VecX s_cand = h - apply_G(x_);
        const Real alpha = min_eig_shift(s_cand);
        s_ = (alpha < 0) ? s_cand : (s_cand + (1 + alpha) * e);

        kkt_solve(-cp_.c, VecX::Zero(p), VecX::Zero(m), dx, dy, dz);
        y_ = dy;
        const VecX z_cand = dz;
        const Real beta = min_eig_shift(z_cand);
        z_ = (beta < 0) ? z_cand : (z_cand + (1 + beta) * e);
    }

    Real best_score = std::numeric_limits<Real>::infinity();
    Eigen::VectorXd best_x = to_d(x_);
    struct Snapshot {
        VecX x, y, s, z;
        Real tau = 1, kappa = 1;
        Real pres = 0, dres = 0, gap = 0, relgap = 0;
        bool set = false;
    } best;

    auto capture = [&](ConicSolution& sol) {
        sol.x = to_d(VecX(x_ / tau_));
        sol.eq_duals = to_d(VecX(y_ / tau_));
        sol.lmi_duals.clear();
        int off = cp_.m_lp;
        for (const auto& b : cp_.blocks) {
            sol.lmi_duals.push_back(to_d(MatX(smat_x(z_.segment(off, b.sd), b.d) / tau_)));
            off += b.sd;
        }
        const int n_ineq = cp_.m_lp - cp_.ineq_row_start;
        sol.ineq_duals = to_d(VecX(z_.segment(cp_.ineq_row_start, n_ineq) / tau_));
    };

    for (int iter = 0; iter < o_.max_iter; ++iter) {
        const VecX rx = apply_At(y_) + apply_Gt(z_) + cp_.c * tau_;
        const VecX ry = apply_A(x_) - cp_.b * tau_;
        const VecX rz = apply_G(x_) + s_ - h * tau_;
        const Real rt = kappa_ + cp_.c.dot(x_) + cp_.b.dot(y_) + h.dot(z_);

        const Real szdot = s_.dot(z_);
        const Real mu = (szdot + tau_ * kappa_) / (cp_.cone_degree + 1);

        const Real cx = cp_.c.dot(x_) / tau_;
        const Real by = (p > 0) ? cp_.b.dot(y_) / tau_ : 0;
        const Real hz = h.dot(z_) / tau_;
        const Real pcost = cx;
        const Real dcost = -by - hz;
        const Real gap = szdot / (tau_ * tau_);
        const Real relgap = gap / std::max({(Real)1, std::abs(pcost), std::abs(dcost)});
        const Real pres = std::max((p > 0 ? ry.norm() / resy0 : 0), rz.norm() / resz0) / tau_;
        const Real dres = rx.norm() / resx0 / tau_;

        if (o_.verbose)
            std::cerr << "it " << iter << " mu " << (double)mu << " pres " << (double)pres
                      << " dres " << (double)dres << " relgap " << (double)relgap << " tau "
                      << (double)tau_ << " kappa " << (double)kappa_ << "\n";

        const Real score = std::max({pres, dres, relgap});
        if (score < best_score) {
            best_score = score;
            best_x = to_d(VecX(x_ / tau_));
            best = {x_, y_, s_, z_, tau_, kappa_, pres, dres, gap, relgap, true};
        }

        if (pres <= o_.feas_tol && dres <= o_.feas_tol &&
            (gap <= o_.gap_tol || relgap <= o_.gap_tol)) {
            out.iterations = iter;
            out.gap = static_cast<double>(gap);
            out.achieved_pres = static_cast<double>(pres);
            out.achieved_dres = static_cast<double>(dres);
            out.achieved_relgap = static_cast<double>(relgap);
            capture(out);
            out.status = ConicSolution::Status::optimal;
            return out;
        }

        // Newton-step breakdown near the numerical floor: the feasibility
        // residual explodes in one iteration while the gap is essentially
        // closed. Stop on the best stored iterate and report its quality.
        if (best.set && score > 30 * best_score && best_score < 1e-3) {
            x_ = best.x;
            y_ = best.y;
            s_ = best.s;
            z_ = best.z;
            tau_ = best.tau;
            kappa_ = best.kappa;
            out.iterations = iter;
            out.gap = static_cast<double>(best.gap);
            out.achieved_pres = static_cast<double>(best.pres);
            out.achieved_dres = static_cast<double>(best.dres);
            out.achieved_relgap = static_cast<double>(best.relgap);
            capture(out);
            out.status = ConicSolution::Status::numerical_failure;
            return out;
        }

        const Real bhz = by + hz;
        if (bhz < 0) {
            const Real pinfres = (apply_At(y_) + apply_Gt(z_)).norm() / resx0 / (-bhz * tau_);
            if (pinfres <= o_.feas_tol) {
                out.status = ConicSolution::Status::infeasible;
                out.iterations = iter;
                out.x = best_x;
                return out;
            }
        }
        if (cx < 0) {
            const Real dinfres = std::max((apply_G(x_) + s_).norm() / resz0,
                                          (p > 0 ? apply_A(x_).norm() / resy0 : (Real)0)) /
                                 (-cx * tau_);
            if (dinfres <= o_.feas_tol) {
                out.status = ConicSolution::Status::numerical_failure;  // unbounded
                out.iterations = iter;
                out.x = best_x;
                return out;
            }
        }

        if (!compute_scaling()) {
            out.status = ConicSolution::Status::numerical_failure;
            out.iterations = iter;
            out.x = best_x;
            return out;
        }
        factor_kkt();

        const VecX lam = lambda_vec();
        VecX x1, y1, z1;
        kkt_solve(-cp_.c, cp_.b, h, x1, y1, z1);

        auto take_step = [&](Real sigma, const VecX& dcomp, Real dtk, VecX& dx, VecX& dy, VecX& dz,
                             VecX& ds, Real& dtau, Real& dkappa) {
            const Real oms = 1 - sigma;
            const VecX bz = -oms * rz - apply_Wt(lambda_inv_circ(dcomp));
            VecX x0, y0, z0;
            kkt_solve(-oms * rx, -oms * ry, bz, x0, y0, z0);
            const Real rhs_tau = -oms * rt - dtk / tau_;
            const Real denom = cp_.c.dot(x1) + cp_.b.dot(y1) + h.dot(z1) - kappa_ / tau_;
            dtau = (rhs_tau - (cp_.c.dot(x0) + cp_.b.dot(y0) + h.dot(z0))) / denom;
            dx = x0 + dtau * x1;
            dy = y0 + dtau * y1;
            dz = z0 + dtau * z1;
            ds = apply_Wt(lambda_inv_circ(dcomp) - apply_W(dz));
            dkappa = (dtk - kappa_ * dtau) / tau_;
        };

        // predictor
        VecX dxa, dya, dza, dsa;
        Real dtaua, dkappaa;
        const VecX lam2 = sym_circ(lam, lam);
        take_step(0, -lam2, -tau_ * kappa_, dxa, dya, dza, dsa, dtaua, dkappaa);

        const VecX ws_a = apply_Winv_t(dsa);
        const VecX wz_a = apply_W(dza);
        Real amax = std::min(max_step_scaled(ws_a), max_step_scaled(wz_a));
        if (dtaua < 0) amax = std::min(amax, -tau_ / dtaua);
        if (dkappaa < 0) amax = std::min(amax, -kappa_ / dkappaa);
        const Real alpha_aff = std::min<Real>(1, amax);
        const Real sigma =
            std::clamp<Real>(std::pow((Real)1 - alpha_aff, (Real)3), 1e-8L, 0.999L);

        // combined corrector
        const VecX dcomp = -lam2 - sym_circ(ws_a, wz_a) + sigma * mu * e;
        const Real dtk = -tau_ * kappa_ - dtaua * dkappaa + sigma * mu;
        VecX dx, dy, dz, ds;
        Real dtau, dkappa;
        take_step(sigma, dcomp, dtk, dx, dy, dz, ds, dtau, dkappa);

        Real amax2 = std::min(max_step_scaled(apply_Winv_t(ds)), max_step_scaled(apply_W(dz)));
        if (dtau < 0) amax2 = std::min(amax2, -tau_ / dtau);
        if (dkappa < 0) amax2 = std::min(amax2, -kappa_ / dkappa);
        const Real alpha = std::min<Real>(1, static_cast<Real>(o_.step_frac) * amax2);

        if (!std::isfinite((double)alpha) || alpha <= 1e-10L) {
            out.status = ConicSolution::Status::numerical_failure;
            out.iterations = iter;
            out.x = best_x;
            return out;
        }

        x_ += alpha * dx;
        y_ += alpha * dy;
        z_ += alpha * dz;
        s_ += alpha * ds;
        tau_ += alpha * dtau;
        kappa_ += alpha * dkappa;

        if (!std::isfinite((double)tau_) || tau_ <= 0) {
            out.status = ConicSolution::Status::numerical_failure;
            out.iterations = iter;
            out.x = best_x;
            return out;
        }

        // re-anchor the primal slack on its affine manifold; the recovered
        // ds accumulates the W'W elimination error fastest of all blocks
        {
            const VecX s_affine = h * tau_ - apply_G(x_);
            if ((s_affine - s_).norm() <= 0.1 * s_.norm() && min_eig_shift(s_affine) < 0)
                s_ = s_affine;
        }
    }

    out.status = ConicSolution::Status::numerical_failure;
    out.iterations = o_.max_iter;
    out.x = best_x;
    return out;
}

}  // namespace

ConicSolution solve(const ConicProblem& prob, const SolveOptions& opts) {
    ConicSolution out;
    if (prob.trivially_infeasible()) {
        out.status = ConicSolution::Status::infeasible;
        out.x = Eigen::VectorXd::Zero(prob.num_vars());
        return out;
    }
    const Compiled cp = compile(prob);

    if (cp.n == 0) {
        out.status = ConicSolution::Status::optimal;
        out.x = Eigen::VectorXd::Zero(prob.num_vars());
        for (int v = 0; v < prob.num_vars(); ++v)
            if (prob.is_fixed(v)) out.x(v) = prob.fixed_value(v);
        out.objective = prob.objective_value(out.x);
        return out;
    }

    Hsde hsde(cp, opts);
    ConicSolution sol = hsde.run();

    Eigen::VectorXd full = Eigen::VectorXd::Zero(prob.num_vars());
    for (int col = 0; col < cp.n; ++col) full(cp.var_of[col]) = sol.x(col);
    for (int v = 0; v < prob.num_vars(); ++v)
        if (prob.is_fixed(v)) full(v) = prob.fixed_value(v);
    sol.x = std::move(full);

    if (sol.status != ConicSolution::Status::infeasible) {
        sol.objective = prob.objective_value(sol.x);
        sol.max_violation = prob.max_violation(sol.x);
    }
    return sol;
}

}  // namespace irssim::conic
