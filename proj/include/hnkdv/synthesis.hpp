#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "hnkdv/solvers.hpp"
#include "hnkdv/spectral.hpp"
#include "hnkdv/subspace.hpp"
#include "hnkdv/trajectory_signal.hpp"

namespace hnkdv {

// Discretization of L^2((0,T); H) by piecewise-constant-in-time controls
// with values in the span of h_basis.  Control dofs are enumerated time-cell
// major, basis-element minor.
struct ControlBasis {
    SubspaceBasis h_basis;
    int n_time_cells;
    double horizon;

    ControlBasis(SubspaceBasis basis, int cells, double T);
    int dof() const { return h_basis.dim() * n_time_cells; }
    double cell_edge(int c) const { return horizon * c / n_time_cells; }

    TrajectorySignal unit_signal(int dof_index) const;
    TrajectorySignal control_signal(const std::vector<double>& coeffs) const;
};

// Targets are encoded as [Re c_1, Im c_1, ..., Re c_M, Im c_M].
Eigen::VectorXd encode_target(const SpectralField& f, int target_cutoff);
SpectralField decode_target(const Eigen::VectorXd& v, const Grid& g);

// Dense matrix of the input-to-state map of the linearized equation:
// column i is the encoded terminal state of linburgers_solve(0, w, e_i).
struct SynthesisOperator {
    Eigen::MatrixXd matrix;   // (2 * target_cutoff) x dof
    int target_cutoff;
    ControlBasis basis;
    std::string w_ref;
};

SynthesisOperator assemble_T(const TrajectorySignal& w, const ControlBasis& basis,
                             const Grid& grid, const TimeGrid& tg, int target_cutoff,
                             int workers = 1);

// G = T T^T on the target side.
Eigen::MatrixXd gramian(const SynthesisOperator& Tm);

// || G (G + gamma I)^{-1} h - h ||^2, the Tikhonov defect.
double delta_h(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, double gamma);

struct RightInverseResult {
    std::vector<double> coeffs;       // control coefficients, full dof length
    double tikhonov_residual = 0.0;   // ||T f - h|| before truncation
    double truncation_residual = 0.0; // ||T (P_M f - f)||
    double total_residual = 0.0;      // ||T P_M f - h||
};

// P_M T^T (G + gamma I)^{-1} h; rank_cutoff <= 0 keeps the full dof.
RightInverseResult approx_right_inverse(const SynthesisOperator& Tm, double gamma,
                                        int rank_cutoff, const Eigen::VectorXd& h);

struct SynthesisOutcome {
    TrajectorySignal g;
    std::vector<double> coeffs;
    double h_norm = 0.0;
    double tikhonov_residual = 0.0;
    double total_residual = 0.0;
    double gamma_used = 0.0;
    std::vector<double> gamma_ladder;            // gammas actually probed
    std::vector<double> gamma_residuals;         // matching ||G x - h||
};

// h = encode(u1) - encode(R_T(u0, 0)); returns the synthesized control and
// the Tikhonov diagnostics.  gamma <= 0 walks the ladder and keeps the
// smallest gamma before the residual improvement stalls.  Band-limit of
// (u0, u1) to the target cutoff is enforced unless allow_tail.
SynthesisOutcome synthesize_g(const SpectralField& u0, const SpectralField& u1,
                              const TrajectorySignal& w, const SynthesisOperator& Tm,
                              double gamma, int rank_cutoff, const Grid& grid,
                              const TimeGrid& tg, bool allow_tail = false,
                              const std::vector<double>* ladder = nullptr);

// eta_tau(t) = (1/tau) g(t/tau) + (1/tau^2) xi(t/tau) + (1/tau) (L_j w)(t/tau)
// on [0, tau T]; every value stays in span H_1.
TrajectorySignal rescale_control(const TrajectorySignal& g, const TrajectorySignal& xi,
                                 const TrajectorySignal& w, double tau, int j);

struct SteeringResult {
    TrajectorySignal eta;             // rescaled control on [0, tau T]
    SpectralField u_final;
    double residual_s = 0.0;          // ||u(tau T) - u1||_s
    double linear_residual_s = 0.0;   // ||v(T) - u1||_s
    double remainder_final = 0.0;     // ||u(tau T) - v(T)||_s
    double gramian_condition = 0.0;
    double tau = 0.0, gamma = 0.0, s = 0.0;
    int j = 0;
    std::vector<double> g_coeffs;
    double tikhonov_residual = 0.0;
    double runtime_s = 0.0;
};

// Immutable per-configuration state shared by steering runs: the reference
// trajectory, its Burgers control, the assembled operator and its Gramian.
struct SteerContext {
    Grid grid;
    TimeGrid tg;
    int j;
    double s;
    TrajectorySignal w, xi;
    SynthesisOperator Tm;
    Eigen::MatrixXd G;
    double gramian_condition = 0.0;
    double gramian_sigma_min = 0.0;
    std::string conditioning_warning;  // set when the Gramian is near-singular
    std::vector<double> gamma_ladder;  // empty: built-in default ladder
};

SteerContext make_steer_context(const ModeSet& J, int j, double s, int depth,
                                double amplitude, const Grid& grid, const TimeGrid& tg,
                                int n_time_cells, int target_cutoff, int workers = 1,
                                std::vector<double> gamma_ladder = {});

// Full pipeline: synthesize g, rescale, integrate the nonlinear equation on
// [0, tau T] and the linearized one on [0, T], report the residual split.
SteeringResult steer(const SteerContext& ctx, const SpectralField& u0,
                     const SpectralField& u1, double tau, double gamma = -1.0,
                     int rank_cutoff = -1, bool allow_tail = false);

struct FixedTimeParams {
    double tau = 0.025;         // horizon fraction for each steering segment
    double gamma = -1.0;        // <= 0: gamma ladder
    int rank_cutoff = -1;       // <= 0: full dof
    double drift_budget = 2.5;  // re-steer when drift exceeds half of this
    int max_segments = 8;       // steering segments allowed
};

struct FixedTimeSegment {
    std::string kind;           // "steer" or "coast"
    double t_start = 0.0, t_end = 0.0;
    double error_after = 0.0;   // ||u - u1||_s at t_end
};

struct FixedTimeReport {
    std::vector<FixedTimeSegment> segments;
    std::vector<SteeringResult> steers;
    double final_error = 0.0;
    bool converged = false;
    double drift_entry_error = -1.0;  // error entering the first coast
    double drift_window = -1.0;       // observed time for that error to double; -1 if it never did
};

// Steer to u1, coast with zero control, re-steer when the drift exceeds
// half the budget, and time the last steer to land exactly on T_total.
FixedTimeReport fixed_time_steer(const SteerContext& ctx, const SpectralField& u0,
                                 const SpectralField& u1, double t_total,
                                 const FixedTimeParams& params);

} // namespace hnkdv
