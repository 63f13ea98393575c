// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "irssim/conic/lemmas.hpp"
#include "irssim/conic/solver.hpp"
#include "irssim/rng.hpp"

using namespace irssim;
using namespace irssim::conic;

namespace {

// feasibility probe: maximize 0 subject to whatever was emitted
ConicSolution probe(ConicProblem& p) {
    p.set_objective(LinExpr{});
    return solve(p);
}

}  // namespace

TEST_SUITE("conic_lemmas") {

TEST_CASE("true implication certified: ||x||^2 <= 1 implies ||x||^2 <= 2") {
    // f1 = 1 - x^H x >= 0, f2 = 2 - x^H x >= 0
    ConicProblem p;
    const int n = 3;
    CMatExpr a2(n, n), b2(n, 1);
    a2.add_const(-Eigen::MatrixXcd::Identity(n, n));
    LinExpr c2;
    c2.constant = 2.0;
    const LemmaResult res = sproc_lmi(p, -Eigen::MatrixXcd::Identity(n, n),
                                      Eigen::VectorXcd::Zero(n), 1.0, a2, b2, c2, "sp");
    const ConicSolution sol = probe(p);
    REQUIRE(sol.ok());
    // eps = 1 certifies: [[ -I + I, 0],[0, 2 - 1]] >= 0
    Eigen::VectorXd x = sol.x;
    x(res.eps) = 1.0;
    CHECK(p.max_violation(x) <= 1e-9);
}

TEST_CASE("false implication is infeasible: ||x||^2 <= 2 implies ||x||^2 <= 1") {
    ConicProblem p;
    const int n = 3;
    CMatExpr a2(n, n), b2(n, 1);
    a2.add_const(-Eigen::MatrixXcd::Identity(n, n));
    LinExpr c2;
    c2.constant = 1.0;
    sproc_lmi(p, -Eigen::MatrixXcd::Identity(n, n), Eigen::VectorXcd::Zero(n), 2.0, a2, b2, c2,
              "sp");
    const ConicSolution sol = probe(p);
    CHECK(sol.status == ConicSolution::Status::infeasible);
}

TEST_CASE("certified robust quadratic bound dominates ball samples") {
    // maximize U s.t. (g + d)^H Q (g + d) >= U for all ||d||^2 <= rho^2,
    // exactly the per-element energy certificate shape
    Rng rng(5);
    const int n = 4;
    Eigen::MatrixXcd root = rng.cgaussian_matrix(n, n);
    const Eigen::MatrixXcd q = root * root.adjoint() / n;
    const Eigen::VectorXcd ghat = rng.cgaussian_vector(n);
    const double rho = 0.4;

    ConicProblem p;
    const VarId u = p.add_var("u");
    // f2(d) = d^H Q d + 2Re(g^H Q d) + g^H Q g - U
    CMatExpr a2(n, n), b2(n, 1);
    a2.add_const(q);
    b2.add_const(q * ghat);
    LinExpr c2;
    c2.constant = std::real((ghat.adjoint() * q * ghat)(0));
    c2.add(u, -1.0);
    sproc_lmi(p, -Eigen::MatrixXcd::Identity(n, n), Eigen::VectorXcd::Zero(n), rho * rho, a2, b2,
              c2, "sp");
    p.set_objective(LinExpr(u));
    const ConicSolution sol = solve(p);
    REQUIRE(sol.ok());

    double sample_min = 1e100;
    for (int t = 0; t < 10000; ++t) {
        const Eigen::VectorXcd d =
            (t % 3 == 0) ? rng.sphere_matrix(n, 1, rho).col(0) : rng.ball_vector(n, rho);
        const Eigen::VectorXcd v = ghat + d;
        sample_min = std::min(sample_min, std::real((v.adjoint() * q * v)(0)));
    }
    CHECK(sol.objective <= sample_min + 1e-6);
    // the single-ball S-procedure is lossless, so the bound is also tight
    CHECK(sol.objective == doctest::Approx(sample_min).epsilon(0.05));
}

TEST_CASE("generalized s-procedure trivial and impossible cases") {
    const int q = 3, pe = 2;
    {
        ConicProblem p;
        CMatExpr d(q, q), b(q, pe), e(pe, pe);
        e.add_const(Eigen::MatrixXcd::Identity(pe, pe));
        gsproc_lmi(p, d, b, e, Eigen::MatrixXcd::Identity(q, q), "gs");
        CHECK(probe(p).ok());
    }
    {
        ConicProblem p;
        CMatExpr d(q, q), b(q, pe), e(pe, pe);
        e.add_const(-Eigen::MatrixXcd::Identity(pe, pe));
        gsproc_lmi(p, d, b, e, Eigen::MatrixXcd::Identity(q, q), "gs");
        CHECK(probe(p).status == ConicSolution::Status::infeasible);
    }
}

TEST_CASE("matrix lower bound dominates sampled spectra") {
    // Psi <= (F + dF) V (F + dF)^H for all ||dF||_F <= rho, the user-signal
    // certificate shape at N=2, M_t=2; checked by eigenvalue sampling
    Rng rng(9);
    const int m_t = 2, nv = 3;  // F is m_t x nv
    const Eigen::MatrixXcd fhat = rng.cgaussian_matrix(m_t, nv);
    Eigen::MatrixXcd vroot = rng.cgaussian_matrix(nv, nv);
    const Eigen::MatrixXcd v = vroot * vroot.adjoint() / nv;
    const double rho = 0.35;

    ConicProblem p;
    const HermitianVar psi = p.add_hermitian("psi", m_t);
    // E = F V F^H - Psi, B = V F^H (X = dF^H is nv x m_t), D = V
    CMatExpr e(m_t, m_t);
    e.add_const(fhat * v * fhat.adjoint());
    e.add(p.expr_of(psi), -1.0);
    CMatExpr b(nv, m_t);
    b.add_const(v * fhat.adjoint());
    CMatExpr d(nv, nv);
    d.add_const(v);
    gsproc_lmi(p, d, b, e, Eigen::MatrixXcd::Identity(nv, nv) / (rho * rho), "gs");
    // maximize Tr(Psi) to push the bound up against the true envelope
    p.set_objective(p.trace_product(Eigen::MatrixXcd::Identity(m_t, m_t), psi));
    const ConicSolution sol = solve(p);
    REQUIRE(sol.ok());
    const Eigen::MatrixXcd psi_val = p.hermitian_value(psi, sol.x);

    double worst = 1e100;
    for (int t = 0; t < 10000; ++t) {
        const Eigen::MatrixXcd df = (t % 3 == 0) ? rng.sphere_matrix(m_t, nv, rho)
                                                 : rng.ball_matrix(m_t, nv, rho);
        const Eigen::MatrixXcd f = fhat + df;
        const Eigen::MatrixXcd diff = f * v * f.adjoint() - psi_val;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
        worst = std::min(worst, es.eigenvalues().minCoeff());
    }
    CHECK(worst >= -1e-6);
}

}  // TEST_SUITE
