// SPDX-License-Identifier: Apache-2.0
#include "irssim/conic/lemmas.hpp"

#include <stdexcept>

namespace irssim::conic {

CMatExpr scalar_expr(const LinExpr& e) {
    CMatExpr m(1, 1);
    m.add_const(Eigen::MatrixXcd::Constant(1, 1, e.constant));
    for (const auto& t : e.terms) m.add_term(t.var, Eigen::MatrixXcd::Constant(1, 1, t.coeff));
    return m;
}

LemmaResult sproc_lmi(ConicProblem& p, const Eigen::MatrixXcd& a1, const Eigen::VectorXcd& b1,
                      double c1, const CMatExpr& a2, const CMatExpr& b2, const LinExpr& c2,
                      const std::string& tag) {
    const int n = static_cast<int>(a1.rows());
    if (a1.cols() != n || b1.size() != n || a2.rows() != n || a2.cols() != n || b2.rows() != n ||
        b2.cols() != 1)
        throw std::domain_error("sproc_lmi: dimension mismatch");

    LemmaResult res;
    res.eps = p.add_var(tag + ".eps", 0.0);

    CMatExpr block(n + 1, n + 1);
    block.place(0, 0, a2);
    block.place(0, n, b2);
    block.place(n, n, scalar_expr(c2));

    Eigen::MatrixXcd m1 = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    m1.topLeftCorner(n, n) = a1;
    m1.block(0, n, n, 1) = b1;
    m1.block(n, 0, 1, n) = b1.adjoint();
    m1(n, n) = c1;
    block.add_term(res.eps, -m1);

    res.lmi_index = p.add_lmi(block, tag);
    return res;
}

LemmaResult gsproc_lmi(ConicProblem& p, const CMatExpr& d, const CMatExpr& b, const CMatExpr& e,
                       const Eigen::MatrixXcd& j, const std::string& tag) {
    const int q = d.rows();
    const int pe = e.rows();
    if (d.cols() != q || e.cols() != pe || b.rows() != q || b.cols() != pe || j.rows() != q ||
        j.cols() != q)
        throw std::domain_error("gsproc_lmi: dimension mismatch");

    LemmaResult res;
    res.eps = p.add_var(tag + ".eps", 0.0);

    CMatExpr block(pe + q, pe + q);
    block.place(0, 0, e);
    block.place(pe, 0, b);
    block.place(pe, pe, d);

    Eigen::MatrixXcd m1 = Eigen::MatrixXcd::Zero(pe + q, pe + q);
    m1.topLeftCorner(pe, pe).setIdentity();
    m1.bottomRightCorner(q, q) = -j;
    block.add_term(res.eps, -m1);

    res.lmi_index = p.add_lmi(block, tag);
    return res;
}

}  // namespace irssim::conic
