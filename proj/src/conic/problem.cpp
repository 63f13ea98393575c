// SPDX-License-Identifier: Apache-2.0
#include "irssim/conic/problem.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace irssim::conic {

void LinExpr::compress() {
    std::sort(terms.begin(), terms.end(),
              [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
    std::vector<LinTerm> out;
    for (const auto& t : terms) {
        if (!out.empty() && out.back().var == t.var)
            out.back().coeff += t.coeff;
        else
            out.push_back(t);
    }
    std::erase_if(out, [](const LinTerm& t) { return t.coeff == 0.0; });
    terms = std::move(out);
}

// params layout per column c: [diag, (re,im) for r=c+1..dim-1]
namespace {
int col_base(int dim, int c) { return c * (2 * dim - c); }
}  // namespace

VarId HermitianVar::diag(int i) const { return params[col_base(dim, i)]; }

VarId HermitianVar::re(int r, int c) const {
    return params[col_base(dim, c) + 1 + 2 * (r - c - 1)];
}
VarId HermitianVar::im(int r, int c) const {
    return params[col_base(dim, c) + 1 + 2 * (r - c - 1) + 1];
}

void CMatExpr::add_const(const Eigen::MatrixXcd& c) { constant_ += c; }

void CMatExpr::add_term(VarId v, const Eigen::MatrixXcd& coeff) {
    auto it = coeffs_.find(v);
    if (it == coeffs_.end())
        coeffs_.emplace(v, coeff);
    else
        it->second += coeff;
}

void CMatExpr::add(const CMatExpr& other, std::complex<double> scale) {
    constant_ += scale * other.constant_;
    for (const auto& [v, c] : other.coeffs_) add_term(v, scale * c);
}

CMatExpr CMatExpr::left_right(const Eigen::MatrixXcd& l, const Eigen::MatrixXcd& r) const {
    CMatExpr out(static_cast<int>(l.rows()), static_cast<int>(r.cols()));
    out.constant_ = l * constant_ * r;
    for (const auto& [v, c] : coeffs_) out.coeffs_.emplace(v, l * c * r);
    return out;
}

CMatExpr CMatExpr::adjoint() const {
    CMatExpr out(cols_, rows_);
    out.constant_ = constant_.adjoint();
    for (const auto& [v, c] : coeffs_) out.coeffs_.emplace(v, c.adjoint());
    return out;
}

void CMatExpr::place(int r0, int c0, const CMatExpr& src) {
    auto paste = [&](int rr, int cc, const Eigen::MatrixXcd& m, Eigen::MatrixXcd& dst) {
        dst.block(rr, cc, m.rows(), m.cols()) += m;
    };
    paste(r0, c0, src.constant_, constant_);
    for (const auto& [v, c] : src.coeffs_) {
        auto it = coeffs_.find(v);
        if (it == coeffs_.end())
            it = coeffs_.emplace(v, Eigen::MatrixXcd::Zero(rows_, cols_)).first;
        paste(r0, c0, c, it->second);
    }
    if (r0 != c0) {
        const CMatExpr adj = src.adjoint();
        paste(c0, r0, adj.constant_, constant_);
        for (const auto& [v, c] : adj.coeffs_) {
            auto it = coeffs_.find(v);
            if (it == coeffs_.end())
                it = coeffs_.emplace(v, Eigen::MatrixXcd::Zero(rows_, cols_)).first;
            paste(c0, r0, c, it->second);
        }
    }
}

Eigen::MatrixXcd CMatExpr::value(const Eigen::VectorXd& x) const {
    Eigen::MatrixXcd m = constant_;
    for (const auto& [v, c] : coeffs_) m += x(v) * c;
    return m;
}

VarId ConicProblem::add_var(const std::string& name, double lb, double ub) {
    vars_.push_back({name, lb, ub});
    fixed_.push_back(0);
    fixed_value_.push_back(0.0);
    return static_cast<VarId>(vars_.size() - 1);
}

HermitianVar ConicProblem::add_hermitian(const std::string& name, int dim) {
    HermitianVar h;
    h.dim = dim;
    for (int c = 0; c < dim; ++c) {
        h.params.push_back(add_var(name + ".d" + std::to_string(c)));
        for (int r = c + 1; r < dim; ++r) {
            h.params.push_back(add_var(name + ".re" + std::to_string(r) + "_" + std::to_string(c)));
            h.params.push_back(add_var(name + ".im" + std::to_string(r) + "_" + std::to_string(c)));
        }
    }
    return h;
}

void ConicProblem::fix_var(VarId v, double value) {
    fixed_[v] = 1;
    fixed_value_[v] = value;
}

void ConicProblem::fix_hermitian(const HermitianVar& h, const Eigen::MatrixXcd& value) {
    for (int c = 0; c < h.dim; ++c) {
        fix_var(h.diag(c), std::real(value(c, c)));
        for (int r = c + 1; r < h.dim; ++r) {
            fix_var(h.re(r, c), std::real(value(r, c)));
            fix_var(h.im(r, c), std::imag(value(r, c)));
        }
    }
}

LinExpr ConicProblem::fold(LinExpr e) const {
    LinExpr out;
    out.constant = e.constant;
    for (const auto& t : e.terms) {
        if (fixed_[t.var])
            out.constant += t.coeff * fixed_value_[t.var];
        else
            out.terms.push_back(t);
    }
    out.compress();
    return out;
}

void ConicProblem::add_ineq(LinExpr e, double rhs, const std::string& tag) {
    LinExpr f = fold(std::move(e));
    if (f.terms.empty()) {
        if (f.constant > rhs + 1e-9 * std::max(1.0, std::abs(rhs))) trivially_infeasible_ = true;
        return;
    }
    ineqs_.push_back({std::move(f), rhs, tag});
}

void ConicProblem::add_eq(LinExpr e, double rhs, const std::string& tag) {
    LinExpr f = fold(std::move(e));
    if (f.terms.empty()) {
        if (std::abs(f.constant - rhs) > 1e-9 * std::max(1.0, std::abs(rhs)))
            trivially_infeasible_ = true;
        return;
    }
    eqs_.push_back({std::move(f), rhs, tag});
}

int ConicProblem::add_lmi(const CMatExpr& expr, const std::string& tag) {
    if (expr.rows() != expr.cols()) throw std::domain_error("add_lmi: expression not square");
    Eigen::MatrixXd f0 = embed_hermitian(expr.constant());
    std::vector<std::pair<VarId, Eigen::MatrixXd>> coeffs;
    for (const auto& [v, c] : expr.coeffs()) {
        Eigen::MatrixXd cr = embed_hermitian(c);
        if (fixed_[v])
            f0 += fixed_value_[v] * cr;
        else
            coeffs.emplace_back(v, std::move(cr));
    }
    return add_lmi_real(std::move(f0), std::move(coeffs), tag);
}

int ConicProblem::add_lmi_real(Eigen::MatrixXd f0,
                               std::vector<std::pair<VarId, Eigen::MatrixXd>> coeffs,
                               const std::string& tag) {
    // fold any fixed variables that arrived through the real path
    std::vector<std::pair<VarId, Eigen::MatrixXd>> kept;
    for (auto& [v, c] : coeffs) {
        if (fixed_[v])
            f0 += fixed_value_[v] * c;
        else
            kept.emplace_back(v, std::move(c));
    }
    if (kept.empty()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f0);
        if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, f0.norm()))
            trivially_infeasible_ = true;
        return -1;
    }
    LmiBlock b;
    b.dim = static_cast<int>(f0.rows());
    b.f0 = std::move(f0);
    b.coeffs = std::move(kept);
    b.tag = tag;
    lmis_.push_back(std::move(b));
    return static_cast<int>(lmis_.size() - 1);
}

int ConicProblem::add_frobenius_epigraph(const CMatExpr& herm_expr, VarId t,
                                         const std::string& tag) {
    const int d = herm_expr.rows();
    const int m = d * d;  // real components of a Hermitian d x d matrix

    // real svec image of a Hermitian matrix: ||image||_2 = ||M||_F
    auto rimage = [&](const Eigen::MatrixXcd& mat) {
        Eigen::VectorXd r(m);
        int idx = 0;
        for (int c = 0; c < d; ++c) {
            r(idx++) = std::real(mat(c, c));
            for (int rr = c + 1; rr < d; ++rr) {
                r(idx++) = M_SQRT2 * std::real(mat(rr, c));
                r(idx++) = M_SQRT2 * std::imag(mat(rr, c));
            }
        }
        return r;
    };

    Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(m + 1, m + 1);
    f0.topLeftCorner(m, m).setIdentity();
    const Eigen::VectorXd r0 = rimage(herm_expr.constant());
    f0.block(0, m, m, 1) = r0;
    f0.block(m, 0, 1, m) = r0.transpose();

    std::vector<std::pair<VarId, Eigen::MatrixXd>> coeffs;
    for (const auto& [v, c] : herm_expr.coeffs()) {
        Eigen::MatrixXd fi = Eigen::MatrixXd::Zero(m + 1, m + 1);
        const Eigen::VectorXd ri = rimage(c);
        fi.block(0, m, m, 1) = ri;
        fi.block(m, 0, 1, m) = ri.transpose();
        coeffs.emplace_back(v, std::move(fi));
    }
    Eigen::MatrixXd ft = Eigen::MatrixXd::Zero(m + 1, m + 1);
    ft(m, m) = 1.0;
    coeffs.emplace_back(t, std::move(ft));
    return add_lmi_real(std::move(f0), std::move(coeffs), tag);
}

CMatExpr ConicProblem::expr_of(const HermitianVar& h) const {
    CMatExpr e(h.dim, h.dim);
    using C = std::complex<double>;
    for (int c = 0; c < h.dim; ++c) {
        Eigen::MatrixXcd ed = Eigen::MatrixXcd::Zero(h.dim, h.dim);
        ed(c, c) = 1.0;
        e.add_term(h.diag(c), ed);
        for (int r = c + 1; r < h.dim; ++r) {
            Eigen::MatrixXcd er = Eigen::MatrixXcd::Zero(h.dim, h.dim);
            er(r, c) = 1.0;
            er(c, r) = 1.0;
            e.add_term(h.re(r, c), er);
            Eigen::MatrixXcd ei = Eigen::MatrixXcd::Zero(h.dim, h.dim);
            ei(r, c) = C(0, 1);
            ei(c, r) = C(0, -1);
            e.add_term(h.im(r, c), ei);
        }
    }
    return e;
}

LinExpr ConicProblem::trace_product(const Eigen::MatrixXcd& a, const HermitianVar& h) const {
    LinExpr e;
    for (int c = 0; c < h.dim; ++c) {
        e.add(h.diag(c), std::real(a(c, c)));
        for (int r = c + 1; r < h.dim; ++r) {
            e.add(h.re(r, c), 2.0 * std::real(a(r, c)));
            e.add(h.im(r, c), 2.0 * std::imag(a(r, c)));
        }
    }
    return e;
}

Eigen::MatrixXcd ConicProblem::hermitian_value(const HermitianVar& h,
                                               const Eigen::VectorXd& x) const {
    auto get = [&](VarId v) { return fixed_[v] ? fixed_value_[v] : x(v); };
    Eigen::MatrixXcd m(h.dim, h.dim);
    for (int c = 0; c < h.dim; ++c) {
        m(c, c) = get(h.diag(c));
        for (int r = c + 1; r < h.dim; ++r) {
            m(r, c) = {get(h.re(r, c)), get(h.im(r, c))};
            m(c, r) = std::conj(m(r, c));
        }
    }
    return m;
}

double ConicProblem::objective_value(const Eigen::VectorXd& x) const {
    LinExpr f = fold(objective_);
    double v = f.constant;
    for (const auto& t : f.terms) v += t.coeff * x(t.var);
    return v;
}

double ConicProblem::max_violation(const Eigen::VectorXd& x) const {
    auto eval = [&](const LinExpr& e) {
        double v = e.constant;
        for (const auto& t : e.terms) v += t.coeff * (fixed_[t.var] ? fixed_value_[t.var] : x(t.var));
        return v;
    };
    double worst = 0.0;
    for (const auto& r : ineqs_) worst = std::max(worst, eval(r.expr) - r.rhs);
    for (const auto& r : eqs_) worst = std::max(worst, std::abs(eval(r.expr) - r.rhs));
    for (int v = 0; v < num_vars(); ++v) {
        if (fixed_[v]) continue;
        if (vars_[v].lb > -kInf) worst = std::max(worst, vars_[v].lb - x(v));
        if (vars_[v].ub < kInf) worst = std::max(worst, x(v) - vars_[v].ub);
    }
    for (const auto& b : lmis_) {
        Eigen::MatrixXd f = b.f0;
        for (const auto& [v, c] : b.coeffs) f += x(v) * c;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
        worst = std::max(worst, -es.eigenvalues().minCoeff());
    }
    return worst;
}

void ConicProblem::dump(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump: cannot open " + path);
    out.precision(17);
    out << "vars " << vars_.size() << " ineqs " << ineqs_.size() << " eqs " << eqs_.size()
        << " lmis " << lmis_.size() << "\n";
    for (size_t i = 0; i < vars_.size(); ++i) {
        out << "var " << i << " " << vars_[i].name << " " << vars_[i].lb << " " << vars_[i].ub;
        if (fixed_[i]) out << " fixed " << fixed_value_[i];
        out << "\n";
    }
    auto put_expr = [&](const LinExpr& e) {
        out << e.terms.size() << " " << e.constant;
        for (const auto& t : e.terms) out << " " << t.var << " " << t.coeff;
    };
    out << "objective ";
    put_expr(objective_);
    out << "\n";
    for (const auto& r : ineqs_) {
        out << "ineq " << r.tag << " rhs " << r.rhs << " ";
        put_expr(r.expr);
        out << "\n";
    }
    for (const auto& r : eqs_) {
        out << "eq " << r.tag << " rhs " << r.rhs << " ";
        put_expr(r.expr);
        out << "\n";
    }
    for (const auto& b : lmis_) {
        out << "lmi " << b.tag << " dim " << b.dim << " terms " << b.coeffs.size() << "\n";
        out << "F0";
        for (int c = 0; c < b.dim; ++c)
            for (int r = 0; r < b.dim; ++r) out << " " << b.f0(r, c);
        out << "\n";
        for (const auto& [v, m] : b.coeffs) {
            out << "F " << v;
            for (int c = 0; c < b.dim; ++c)
                for (int r = 0; r < b.dim; ++r) out << " " << m(r, c);
            out << "\n";
        }
    }
}

}  // namespace irssim::conic
