// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irssim/conic/problem.hpp"

namespace irssim::conic {

struct SolveOptions {
    double feas_tol = 1e-7;
    double gap_tol = 1e-7;
    int max_iter = 200;
    double step_frac = 0.98;
    bool verbose = false;
};

struct ConicSolution {
    enum class Status { optimal, infeasible, numerical_failure };

    Status status = Status::numerical_failure;
    Eigen::VectorXd x;        // indexed by VarId; fixed vars carry their value
    double objective = 0.0;   // of the maximize objective
    double gap = 0.0;         // absolute duality gap
    double max_violation = 0.0;  // normalized re-check over all constraints
    int iterations = 0;
    // quality of the returned point (also filled on numerical_failure)
    double achieved_pres = 1.0, achieved_dres = 1.0, achieved_relgap = 1.0;

    // dual certificates (ineq and eq multipliers, one dual matrix per LMI)
    Eigen::VectorXd ineq_duals;
    Eigen::VectorXd eq_duals;
    std::vector<Eigen::MatrixXd> lmi_duals;

    bool ok() const { return status == Status::optimal; }
};

const char* to_string(ConicSolution::Status s);

// Homogeneous self-dual embedding, Nesterov-Todd scaled predictor-corrector.
// Deterministic: identical problems produce identical iterates.
ConicSolution solve(const ConicProblem& p, const SolveOptions& opts = {});

}  // namespace irssim::conic
