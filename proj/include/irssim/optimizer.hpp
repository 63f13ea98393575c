// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "irssim/metrics.hpp"
#include "irssim/sca.hpp"

namespace irssim {

struct RunRecord {
    enum class Status { converged, max_iter, infeasible };

    Status status = Status::infeasible;
    std::vector<double> objective_trace;  // penalized surrogate per iteration
    std::vector<double> bound_trace;      // plain rate bound per iteration
    std::vector<double> solve_times_s;
    int iterations = 0;
    double solve_time_total_s = 0.0;

    IterationState final_state;      // converged SCA point (pre-rounding)
    DesignSolution design;           // rounded + polished design
    std::vector<double> rank_ratio;  // lambda2 / lambda1 per W_k at extraction
    bool polish_used = false;
    bool polish_feasible = false;

    AuditReport audit;
    bool penalty_applied = false;  // paper convention: failed design counts 0
    double sum_rate = 0.0;         // on true channels, post penalty
    double secrecy_rate = 0.0;
    double harvested_w = 0.0;      // at the true channels
    int n_reflect = 0;

    bool converged() const { return status == Status::converged; }
};

// Extra knobs used by the baselines; the plain proposed scheme uses defaults.
struct RunOptions {
    BuildOptions build;
    AuditPolicy audit_policy;
    bool round_and_polish = true;
    bool audit_with_true_radii = false;  // non-robust designs audited honestly
    double kappa_design = -1.0;          // <0: use config kappa for the design
};

// Feasible-by-construction start: MRT beams at half power, isotropic AN,
// all elements harvesting, robust slack matrices with margins.
IterationState initialize(const CsiEstimate& est, const SystemConfig& cfg, std::uint64_t seed);

// Algorithm main loop: build subproblem, solve, extract, repeat until the
// penalized surrogate objective stalls or t_max is hit; then finalize.
RunRecord run(const CsiEstimate& est, const ChannelSet& truth, const SystemConfig& cfg,
              std::uint64_t seed, const RunOptions& opts = {});

// Rank-one extraction, mode/phase rounding, polish solve and audit.
DesignSolution finalize(const IterationState& state, const CsiEstimate& est,
                        const SystemConfig& cfg, RunRecord& record, const RunOptions& opts = {});

}  // namespace irssim
