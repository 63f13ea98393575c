// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "irssim/conic/embed.hpp"
#include "irssim/rng.hpp"

using namespace irssim;
using namespace irssim::conic;

namespace {
Eigen::MatrixXcd random_hermitian(Rng& rng, int n) {
    Eigen::MatrixXcd a = rng.cgaussian_matrix(n, n);
    return 0.5 * (a + a.adjoint());
}
}  // namespace

TEST_SUITE("conic_embed") {

TEST_CASE("identity embeds to identity") {
    const Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(3, 3);
    CHECK((embed_hermitian(h) - Eigen::MatrixXd::Identity(6, 6)).norm() == 0.0);
}

TEST_CASE("pauli-like example has doubled eigenvalues {0,0,2,2}") {
    Eigen::MatrixXcd h(2, 2);
    h << 1.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(embed_hermitian(h));
    const Eigen::VectorXd ev = es.eigenvalues();
    CHECK(ev(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ev(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ev(2) == doctest::Approx(2.0));
    CHECK(ev(3) == doctest::Approx(2.0));
}

TEST_CASE("eigenvalue doubling on random hermitian matrices") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(5));
        const Eigen::MatrixXcd h = random_hermitian(rng, n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eh(h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(embed_hermitian(h));
        CHECK(std::abs(eh.eigenvalues().minCoeff() - er.eigenvalues().minCoeff()) <= 1e-10);
        // every complex eigenvalue appears twice
        const Eigen::VectorXd ev = er.eigenvalues();
        for (int i = 0; i < n; ++i)
            CHECK(ev(2 * i) == doctest::Approx(ev(2 * i + 1)).epsilon(1e-9));
    }
}

TEST_CASE("embedding is a homomorphism for symmetrized products") {
    Rng rng(4);
    const int n = 4;
    const Eigen::MatrixXcd a = random_hermitian(rng, n);
    const Eigen::MatrixXcd b = random_hermitian(rng, n);
    const Eigen::MatrixXcd prod = 0.5 * (a * b + b * a);
    const Eigen::MatrixXd lhs = embed_hermitian(prod);
    const Eigen::MatrixXd ea = embed_hermitian(a);
    const Eigen::MatrixXd eb = embed_hermitian(b);
    const Eigen::MatrixXd rhs = 0.5 * (ea * eb + eb * ea);
    CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
}

TEST_CASE("non-hermitian input is rejected") {
    Eigen::MatrixXcd h(2, 2);
    h << 1.0, 2.0, 3.0, 1.0;
    CHECK_THROWS_AS(embed_hermitian(h), std::domain_error);
}

TEST_CASE("unembed inverts embed") {
    Rng rng(8);
    const Eigen::MatrixXcd h = random_hermitian(rng, 5);
    CHECK((unembed_hermitian(embed_hermitian(h)) - h).norm() <= 1e-14 * h.norm());
}

TEST_CASE("svec preserves the trace inner product") {
    Rng rng(16);
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(5, 5);
    a = (0.5 * (a + a.transpose())).eval();
    Eigen::MatrixXd b = Eigen::MatrixXd::Random(5, 5);
    b = (0.5 * (b + b.transpose())).eval();
    CHECK(svec(a).dot(svec(b)) == doctest::Approx((a * b).trace()).epsilon(1e-12));
    CHECK((smat(svec(a)) - a).norm() <= 1e-14);
}

}  // TEST_SUITE
