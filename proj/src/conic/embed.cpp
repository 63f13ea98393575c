// SPDX-License-Identifier: Apache-2.0
#include "irssim/conic/embed.hpp"

#include <stdexcept>

namespace irssim::conic {

Eigen::MatrixXd embed_hermitian(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw std::domain_error("embed_hermitian: matrix not square");
    const double scale = std::max(1.0, h.norm());
    if ((h - h.adjoint()).norm() > 1e-10 * scale)
        throw std::domain_error("embed_hermitian: matrix not Hermitian");
    const int n = static_cast<int>(h.rows());
    Eigen::MatrixXd m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = h.real();
    m.topRightCorner(n, n) = -h.imag();
    m.bottomLeftCorner(n, n) = h.imag();
    m.bottomRightCorner(n, n) = h.real();
    // symmetrize away roundoff from the Hermitian tolerance
    m = 0.5 * (m + m.transpose()).eval();
    return m;
}

Eigen::MatrixXcd unembed_hermitian(const Eigen::MatrixXd& m) {
    const int n2 = static_cast<int>(m.rows());
    if (n2 % 2 != 0 || m.cols() != n2)
        throw std::domain_error("unembed_hermitian: bad shape");
    const int n = n2 / 2;
    Eigen::MatrixXd re = 0.5 * (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n));
    Eigen::MatrixXd im = 0.5 * (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n));
    Eigen::MatrixXcd h = re.cast<std::complex<double>>() +
                         std::complex<double>(0, 1) * im.cast<std::complex<double>>();
    return 0.5 * (h + h.adjoint()).eval();
}

Eigen::VectorXd svec(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    Eigen::VectorXd v(svec_dim(n));
    int idx = 0;
    for (int c = 0; c < n; ++c) {
        v(idx++) = a(c, c);
        for (int r = c + 1; r < n; ++r) v(idx++) = M_SQRT2 * a(r, c);
    }
    return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v) {
    const int n = static_cast<int>((std::sqrt(8.0 * v.size() + 1.0) - 1.0) / 2.0 + 0.5);
    Eigen::MatrixXd a(n, n);
    int idx = 0;
    for (int c = 0; c < n; ++c) {
        a(c, c) = v(idx++);
        for (int r = c + 1; r < n; ++r) {
            a(r, c) = v(idx) * M_SQRT1_2;
            a(c, r) = a(r, c);
            ++idx;
        }
    }
    return a;
}

}  // namespace irssim::conic
