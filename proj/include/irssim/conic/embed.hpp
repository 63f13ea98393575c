// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace irssim::conic {

// Realification [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix. PSD iff
// the input is PSD; every eigenvalue appears twice. Throws std::domain_error
// if the input deviates from Hermitian by more than 1e-10 (relative).
Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& h);

// Inverse map for dual matrices: averages the two congruent copies.
Eigen::MatrixXcd unembed_hermitian(const Eigen::MatrixXd& m);

// Symmetric vectorization with sqrt(2)-scaled off-diagonals:
// <svec(A), svec(B)> = Tr(A B). Lower triangle, column major.
Eigen::VectorXd svec(const Eigen::MatrixXd& a);
Eigen::MatrixXd smat(const Eigen::VectorXd& v);
inline int svec_dim(int n) { return n * (n + 1) / 2; }

}  // namespace irssim::conic
