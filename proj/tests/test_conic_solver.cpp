// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "irssim/conic/solver.hpp"
#include "irssim/rng.hpp"

using namespace irssim;
using namespace irssim::conic;

TEST_SUITE("conic_solver") {

TEST_CASE("eigenvalue bound: maximize t with I - t I psd") {
    ConicProblem p;
    const VarId t = p.add_var("t");
    CMatExpr lmi(2, 2);
    lmi.add_const(Eigen::MatrixXcd::Identity(2, 2));
    lmi.add_term(t, -Eigen::MatrixXcd::Identity(2, 2));
    p.add_lmi(lmi, "bound");
    p.set_objective(LinExpr(t));
    const ConicSolution sol = solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("principal eigenvector: maximize Tr(CX) on the spectraplex") {
    ConicProblem p;
    const HermitianVar x = p.add_hermitian("X", 2);
    p.add_lmi(p.expr_of(x), "psd");
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2, 2);
    c(0, 0) = 3.0;
    c(1, 1) = 1.0;
    p.add_eq(p.trace_product(Eigen::MatrixXcd::Identity(2, 2), x), 1.0, "trace");
    p.set_objective(p.trace_product(c, x));
    const ConicSolution sol = solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-6));
    const Eigen::MatrixXcd xv = p.hermitian_value(x, sol.x);
    CHECK(std::real(xv(0, 0)) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::abs(xv(1, 1)) <= 1e-5);
}

TEST_CASE("random 2-parameter LMI agrees with a grid-scan oracle") {
    Rng rng(31);
    for (int inst = 0; inst < 3; ++inst) {
        Eigen::MatrixXd f1 = Eigen::MatrixXd::Random(3, 3);
        f1 = (0.5 * (f1 + f1.transpose())).eval();
        Eigen::MatrixXd f2 = Eigen::MatrixXd::Random(3, 3);
        f2 = (0.5 * (f2 + f2.transpose())).eval();
        const Eigen::MatrixXd f0 = Eigen::MatrixXd::Identity(3, 3);
        const double c1 = rng.uniform(-1.0, 1.0), c2 = rng.uniform(-1.0, 1.0);

        ConicProblem p;
        const VarId x1 = p.add_var("x1", -2.0, 2.0);
        const VarId x2 = p.add_var("x2", -2.0, 2.0);
        p.add_lmi_real(f0, {{x1, f1}, {x2, f2}}, "lmi");
        LinExpr obj;
        obj.add(x1, c1).add(x2, c2);
        p.set_objective(obj);
        const ConicSolution sol = solve(p);
        REQUIRE(sol.ok());

        // two-stage grid scan
        auto feasible = [&](double a, double b) {
            Eigen::MatrixXd f = f0 + a * f1 + b * f2;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f, Eigen::EigenvaluesOnly);
            return es.eigenvalues().minCoeff() >= 0.0;
        };
        double best = -1e100, ba = 0.0, bb = 0.0;
        const int grid = 200;
        for (int i = 0; i <= grid; ++i)
            for (int j = 0; j <= grid; ++j) {
                const double a = -2.0 + 4.0 * i / grid, b = -2.0 + 4.0 * j / grid;
                if (!feasible(a, b)) continue;
                const double v = c1 * a + c2 * b;
                if (v > best) best = v, ba = a, bb = b;
            }
        const double cell = 4.0 / grid;
        double best2 = best;
        const int fine = 160;
        for (int i = 0; i <= fine; ++i)
            for (int j = 0; j <= fine; ++j) {
                const double a = ba - cell + 2 * cell * i / fine;
                const double b = bb - cell + 2 * cell * j / fine;
                if (std::abs(a) > 2.0 || std::abs(b) > 2.0 || !feasible(a, b)) continue;
                best2 = std::max(best2, c1 * a + c2 * b);
            }
        CHECK(sol.objective == doctest::Approx(best2).epsilon(2e-3));
    }
}

TEST_CASE("solver is deterministic to the bit") {
    ConicProblem p;
    const HermitianVar x = p.add_hermitian("X", 3);
    p.add_lmi(p.expr_of(x), "psd");
    Eigen::MatrixXcd c(3, 3);
    c.setZero();
    c(0, 1) = std::complex<double>(0.3, 0.4);
    c(1, 0) = std::conj(c(0, 1));
    c(2, 2) = -0.5;
    p.add_eq(p.trace_product(Eigen::MatrixXcd::Identity(3, 3), x), 1.0, "trace");
    p.set_objective(p.trace_product(c, x));
    const ConicSolution a = solve(p);
    const ConicSolution b = solve(p);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.x == b.x);
    CHECK(a.objective == b.objective);
}

TEST_CASE("optimal solutions pass the independent recheck") {
    Rng rng(77);
    ConicProblem p;
    const HermitianVar w = p.add_hermitian("W", 3);
    p.add_lmi(p.expr_of(w), "psd");
    LinExpr power = p.trace_product(Eigen::MatrixXcd::Identity(3, 3), w);
    p.add_ineq(power, 2.0, "budget");
    const Eigen::VectorXcd h = rng.cgaussian_vector(3);
    p.set_objective(p.trace_product(h * h.adjoint(), w));
    const ConicSolution sol = solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.max_violation <= 1e-6);
    // optimum is the rank-one aligned matrix at full budget
    CHECK(sol.objective == doctest::Approx(2.0 * h.squaredNorm()).epsilon(1e-6));
}

TEST_CASE("inconsistent bounds are reported infeasible") {
    ConicProblem p;
    const VarId x = p.add_var("x", 0.0, 1.0);
    LinExpr e(x);
    p.add_ineq(e, -1.0, "impossible");  // x <= -1 vs x >= 0
    p.set_objective(LinExpr(x));
    const ConicSolution sol = solve(p);
    CHECK(sol.status == ConicSolution::Status::infeasible);
}

TEST_CASE("equalities interact with psd blocks") {
    // maximize <J, X> s.t. X psd, diag(X) = 1 (2x2 -> max offdiag = 1)
    ConicProblem p;
    const HermitianVar x = p.add_hermitian("X", 2);
    p.add_lmi(p.expr_of(x), "psd");
    p.add_eq(LinExpr(x.diag(0)), 1.0, "d0");
    p.add_eq(LinExpr(x.diag(1)), 1.0, "d1");
    p.set_objective(LinExpr(x.re(1, 0), 2.0));
    const ConicSolution sol = solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-6));
}

}  // TEST_SUITE
