// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irssim/conic/problem.hpp"

namespace irssim::conic {

// Converts a LinExpr into a 1x1 complex matrix expression.
CMatExpr scalar_expr(const LinExpr& e);

struct LemmaResult {
    int lmi_index = -1;
    VarId eps = -1;
};

// S-procedure: the implication
//   x^H A1 x + 2Re(b1^H x) + c1 >= 0  =>  x^H A2 x + 2Re(b2^H x) + c2 >= 0
// holds iff some eps >= 0 satisfies
//   [[A2, b2],[b2^H, c2]] - eps [[A1, b1],[b1^H, c1]] >= 0.
// (A1,b1,c1) describe the fixed uncertainty set; (a2,b2,c2) may be affine in
// problem variables. Emits the LMI and the multiplier into `p`.
LemmaResult sproc_lmi(ConicProblem& p, const Eigen::MatrixXcd& a1, const Eigen::VectorXcd& b1,
                      double c1, const CMatExpr& a2, const CMatExpr& b2, const LinExpr& c2,
                      const std::string& tag);

// Generalized S-procedure: X^H D X + X^H B + B^H X + E >= 0 for all X with
// Tr(J X X^H) <= 1 iff some eps >= 0 satisfies
//   [[E, B^H],[B, D]] - eps [[I, 0],[0, -J]] >= 0.
// d: q x q, b: q x p, e: p x p, j: q x q constant PSD.
LemmaResult gsproc_lmi(ConicProblem& p, const CMatExpr& d, const CMatExpr& b, const CMatExpr& e,
                       const Eigen::MatrixXcd& j, const std::string& tag);

}  // namespace irssim::conic
