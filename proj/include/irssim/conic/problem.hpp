// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irssim/conic/embed.hpp"

namespace irssim::conic {

using VarId = int;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarInfo {
    std::string name;
    double lb = -kInf;
    double ub = kInf;
};

struct LinTerm {
    VarId var;
    double coeff;
};

// Real affine scalar expression.
struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    LinExpr() = default;
    LinExpr(VarId v, double c = 1.0) { terms.push_back({v, c}); }

    LinExpr& add(VarId v, double c) {
        if (c != 0.0) terms.push_back({v, c});
        return *this;
    }
    LinExpr& add(const LinExpr& other, double scale = 1.0) {
        for (const auto& t : other.terms) add(t.var, t.coeff * scale);
        constant += other.constant * scale;
        return *this;
    }
    void compress();
};

// Hermitian matrix variable: d*d real parameters (diagonals plus re/im pairs),
// column-major lower-triangular layout.
struct HermitianVar {
    int dim = 0;
    std::vector<VarId> params;

    VarId diag(int i) const;
    VarId re(int r, int c) const;  // r > c
    VarId im(int r, int c) const;
};

// General complex affine matrix expression C0 + sum_i x[i] * Ci with real
// scalar variables x. Hermitian-ness is a property of usage, not the type.
class CMatExpr {
public:
    CMatExpr(int rows, int cols)
        : rows_(rows), cols_(cols), constant_(Eigen::MatrixXcd::Zero(rows, cols)) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Eigen::MatrixXcd& constant() const { return constant_; }
    const std::map<VarId, Eigen::MatrixXcd>& coeffs() const { return coeffs_; }

    void add_const(const Eigen::MatrixXcd& c);
    void add_term(VarId v, const Eigen::MatrixXcd& coeff);
    void add(const CMatExpr& other, std::complex<double> scale = 1.0);

    // L * expr * R with constant matrices (pass identity-free via sizes)
    CMatExpr left_right(const Eigen::MatrixXcd& l, const Eigen::MatrixXcd& r) const;
    CMatExpr adjoint() const;

    // Place src (and its adjoint mirror when off-diagonal) into this block
    // matrix at (r0, c0). Diagonal placements must themselves be Hermitian.
    void place(int r0, int c0, const CMatExpr& src);

    Eigen::MatrixXcd value(const Eigen::VectorXd& x) const;

private:
    int rows_, cols_;
    Eigen::MatrixXcd constant_;
    std::map<VarId, Eigen::MatrixXcd> coeffs_;
};

struct LmiBlock {
    int dim = 0;  // real symmetric side length
    Eigen::MatrixXd f0;
    std::vector<std::pair<VarId, Eigen::MatrixXd>> coeffs;
    std::string tag;
};

struct LinearRow {
    LinExpr expr;
    double rhs = 0.0;
    std::string tag;
};

// Dense real-block SDP in "maximize linear objective subject to linear
// rows and affine LMIs" form. Complex LMIs are realified on entry; fixed
// variables are folded into constants on entry.
class ConicProblem {
public:
    VarId add_var(const std::string& name, double lb = -kInf, double ub = kInf);
    HermitianVar add_hermitian(const std::string& name, int dim);

    // Pin a variable to a constant before it is used in any constraint.
    void fix_var(VarId v, double value);
    void fix_hermitian(const HermitianVar& h, const Eigen::MatrixXcd& value);
    bool is_fixed(VarId v) const { return fixed_[v]; }
    double fixed_value(VarId v) const { return fixed_value_[v]; }

    void add_ineq(LinExpr e, double rhs, const std::string& tag);  // e <= rhs
    void add_eq(LinExpr e, double rhs, const std::string& tag);
    // Hermitian-affine complex LMI, realified on entry. Returns block index
    // or -1 if the block folded to a constant (then checked for PSD-ness).
    int add_lmi(const CMatExpr& expr, const std::string& tag);
    int add_lmi_real(Eigen::MatrixXd f0, std::vector<std::pair<VarId, Eigen::MatrixXd>> coeffs,
                     const std::string& tag);
    // Epigraph block [[I, r],[r^T, t]] for t >= ||r||^2 with r the real svec
    // image of a Hermitian-affine expression.
    int add_frobenius_epigraph(const CMatExpr& herm_expr, VarId t, const std::string& tag);

    void set_objective(LinExpr e) { objective_ = std::move(e); }  // maximize

    // expression helpers
    CMatExpr expr_of(const HermitianVar& h) const;
    LinExpr trace_product(const Eigen::MatrixXcd& a, const HermitianVar& h) const;  // Tr(a H)
    Eigen::MatrixXcd hermitian_value(const HermitianVar& h, const Eigen::VectorXd& x) const;

    // introspection
    int num_vars() const { return static_cast<int>(vars_.size()); }
    const std::vector<VarInfo>& vars() const { return vars_; }
    const std::vector<LinearRow>& ineqs() const { return ineqs_; }
    const std::vector<LinearRow>& eqs() const { return eqs_; }
    const std::vector<LmiBlock>& lmis() const { return lmis_; }
    const LinExpr& objective() const { return objective_; }
    bool trivially_infeasible() const { return trivially_infeasible_; }

    double objective_value(const Eigen::VectorXd& x) const;
    // Largest constraint violation at x (ineq overshoot, eq residual,
    // negative LMI eigenvalue), in absolute terms.
    double max_violation(const Eigen::VectorXd& x) const;

    // Plain-text dump of the full problem (header with counts, then rows and
    // dense LMI data) for cross-checking against external solvers.
    void dump(const std::string& path) const;

private:
    LinExpr fold(LinExpr e) const;

    std::vector<VarInfo> vars_;
    std::vector<char> fixed_;
    std::vector<double> fixed_value_;
    LinExpr objective_;
    std::vector<LinearRow> ineqs_, eqs_;
    std::vector<LmiBlock> lmis_;
    bool trivially_infeasible_ = false;
};

}  // namespace irssim::conic
