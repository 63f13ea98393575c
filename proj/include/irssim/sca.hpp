// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "irssim/channel.hpp"
#include "irssim/config.hpp"
#include "irssim/conic/lemmas.hpp"
#include "irssim/conic/problem.hpp"
#include "irssim/conic/solver.hpp"

namespace irssim {

// Point around which the convex subproblem linearizes. Physical units.
struct IterationState {
    std::vector<Eigen::MatrixXcd> w_mat;  // K Hermitian M_t x M_t
    Eigen::MatrixXcd z_mat;               // M_t x M_t
    Eigen::MatrixXcd y_mat;               // (N+2) x (N+2); empty when N = 0
    std::vector<Eigen::MatrixXcd> psi_c9, psi_c10;  // K each, M_t x M_t
    std::vector<Eigen::MatrixXcd> psi_eve;          // J, M_t x M_t (signal side)
    std::vector<Eigen::MatrixXcd> psi_eve_an;       // J (AN side, lower bound)
    std::vector<double> xi, iota;                   // K each
    double beta_pr = 0.0;
    Eigen::MatrixXd s;  // (B+1) x N relaxed selectors in [0,1]

    bool has_nan() const;
};

// Hermitian-matrix-valued slot: either a full Hermitian variable or a scalar
// variable times a constant direction (fixed-MRT baselines).
struct MatVar {
    bool scaled = false;
    conic::HermitianVar herm;
    conic::VarId scale = -1;
    Eigen::MatrixXcd dir;

    int dim() const { return scaled ? static_cast<int>(dir.rows()) : herm.dim; }
    conic::CMatExpr expr(const conic::ConicProblem& p) const;
    conic::LinExpr trace_with(const conic::ConicProblem& p, const Eigen::MatrixXcd& a) const;
    Eigen::MatrixXcd value(const conic::ConicProblem& p, const Eigen::VectorXd& x) const;
};

// Unit scaling applied inside the subproblem (divisors from physical values).
struct UnitScale {
    double power = 1.0;  // watts per scaled power unit
    double chan2 = 1.0;  // squared channel entry per scaled unit
    double eh = 1.0;     // watts per scaled EH unit (received-at-IRS side)
};

struct BuildOptions {
    bool robust = true;            // false treats every radius as zero
    bool include_c3 = true;        // energy sustainability family
    bool include_c5 = true;        // secrecy family
    bool mode_selection = true;    // discrete-mode machinery (s, C4)
    bool continuous_phases = false;  // relaxed |v_n| <= 1 instead of C4
    bool fix_reflection = false;   // pin Y and s at the state values
    bool fix_beamforming = false;  // pin W and Z at the state values
    bool mrt_directions = false;   // W_k = p_k * D_k
    std::vector<Eigen::MatrixXcd> mrt_outer;  // D_k, unit trace
    bool z_isotropic = false;      // Z = p_z / M_t * I
    std::vector<double> objective_cut_factors = {0.8, 1.0, 1.2};
};

struct SubproblemHandles {
    UnitScale scale;
    int k_users = 0, j_eves = 0, n_irs = 0, b_levels = 0, m_t = 0;
    bool use_y = false;

    std::vector<MatVar> w;
    MatVar z;
    conic::HermitianVar y;
    std::vector<conic::HermitianVar> psi_c9, psi_c10, psi_eve, psi_eve_an;
    std::vector<conic::VarId> xi, iota, eta;
    conic::VarId beta_pr = -1;
    conic::VarId t_exp = -1;
    conic::VarId zeta_y = -1;
    std::vector<conic::VarId> u_es, u_bs;
    std::vector<std::vector<conic::VarId>> s;       // [B+1][N]
    std::vector<std::vector<conic::VarId>> zeta_s;  // [B+1][N]
    std::vector<conic::VarId> eps_c3f, eps_c5b, eps_c5b_an, eps_c12, eps_c13;

    // objective pieces for cut refreshes: sigma_k^2 and the linear-in-iota
    // part are fixed at build time
    std::vector<double> sigma_k2_scaled;
    std::map<std::string, int> tag_count;
};

struct Subproblem {
    conic::ConicProblem problem;
    SubproblemHandles h;
};

// F_k = [G_cu,k^H  h_d,k] per user, and the eavesdropper analogue.
std::pair<std::vector<Eigen::MatrixXcd>, std::vector<Eigen::MatrixXcd>> build_f_matrices(
    const CsiEstimate& est);

UnitScale make_unit_scale(const CsiEstimate& est, const SystemConfig& cfg);

// Assembles the convex subproblem around `state`.
std::unique_ptr<Subproblem> build_subproblem(const IterationState& state, const CsiEstimate& est,
                                             const SystemConfig& cfg,
                                             const BuildOptions& opts = {});

// Adds one tangent cut of the concave per-user log at scaled point u0 > 0.
void add_objective_cut(Subproblem& sp, int k, double u0_scaled);

// Reads all handles back into a physical-unit state; W/Z/Y projected onto the
// PSD cone, selectors clamped to [0,1].
IterationState extract_state(const conic::ConicSolution& sol, const Subproblem& sp,
                             const IterationState& previous);

// True (non-linearized) value of the penalized surrogate objective at a state:
// sum_k log2(1 + xi/(iota + sigma^2)) minus the binary and rank-one penalties.
double surrogate_objective(const IterationState& state, const SystemConfig& cfg);

// Plain rate bound without penalties.
double rate_bound(const IterationState& state, const SystemConfig& cfg);

}  // namespace irssim
