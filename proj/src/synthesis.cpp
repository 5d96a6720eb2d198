#include "hnkdv/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "hnkdv/errors.hpp"
#include "hnkdv/util.hpp"

namespace hnkdv {

namespace {

const double kGammaLadder[] = {1e-2, 1e-4, 1e-6, 1e-8};

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void check_tail(const SpectralField& u, int cutoff, const char* who) {
    double tail = 0.0;
    for (int k = cutoff + 1; k <= u.n_modes(); ++k) tail += std::norm(u[k]);
    double full = tail;
    for (int k = 0; k <= cutoff; ++k) full += std::norm(u[k]);
    if (std::sqrt(tail) > 1e-9 * (1.0 + std::sqrt(full)))
        throw ConfigError(std::string(who) +
                          ": cutoff violation (state has content beyond the target band)");
}

std::string describe_w(const TrajectorySignal& w) {
    if (w.meta.empty()) return "custom";
    std::string s = "observable[";
    bool first = true;
    for (const auto& [key, m] : w.meta) {
        if (!first) s += ",";
        first = false;
        s += std::to_string(key.mode);
        s += key.channel == Channel::Sin ? "s" : "c";
        s += ":p" + std::to_string(m.prime);
    }
    const auto& m0 = w.meta.begin()->second;
    s += ";depth=" + std::to_string(m0.depth) + "]";
    return s;
}

} // namespace

ControlBasis::ControlBasis(SubspaceBasis basis, int cells, double T)
    : h_basis(std::move(basis)), n_time_cells(cells), horizon(T) {
    if (cells < 1) throw ConfigError("ControlBasis: need at least one time cell");
    if (!(T > 0.0)) throw ConfigError("ControlBasis: horizon must be positive");
    if (h_basis.dim() < 1) throw ConfigError("ControlBasis: empty spatial basis");
    for (const TrigPoly& e : h_basis.elements())
        if (e.constant() != 0.0)
            throw ConfigError("ControlBasis: spatial basis must be mean-zero");
}

TrajectorySignal ControlBasis::unit_signal(int dof_index) const {
    if (dof_index < 0 || dof_index >= dof())
        throw ConfigError("ControlBasis: dof index out of range");
    std::vector<double> coeffs(dof(), 0.0);
    coeffs[dof_index] = 1.0;
    return control_signal(coeffs);
}

TrajectorySignal ControlBasis::control_signal(const std::vector<double>& coeffs) const {
    if (static_cast<int>(coeffs.size()) != dof())
        throw ConfigError("ControlBasis: coefficient vector length mismatch");
    TrajectorySignal g(0.0, horizon);
    int dim = h_basis.dim();
    std::vector<double> breaks(n_time_cells + 1);
    for (int c = 0; c <= n_time_cells; ++c) breaks[c] = cell_edge(c);
    for (int e = 0; e < dim; ++e) {
        std::vector<double> values(n_time_cells);
        bool any = false;
        for (int c = 0; c < n_time_cells; ++c) {
            values[c] = coeffs[c * dim + e];
            any = any || values[c] != 0.0;
        }
        if (!any) continue;
        PiecewisePoly prof = PiecewisePoly::steps(breaks, values);
        const TrigPoly& elem = h_basis.elements()[e];
        for (const auto& [l, a] : elem.sin_coeffs())
            g.add_term(l, Channel::Sin, prof.scaled(a));
        for (const auto& [l, b] : elem.cos_coeffs())
            g.add_term(l, Channel::Cos, prof.scaled(b));
    }
    return g;
}

Eigen::VectorXd encode_target(const SpectralField& f, int target_cutoff) {
    if (target_cutoff < 1 || target_cutoff > f.n_modes())
        throw ConfigError("encode_target: cutoff out of range");
    Eigen::VectorXd v(2 * target_cutoff);
    for (int m = 1; m <= target_cutoff; ++m) {
        v[2 * (m - 1)] = f[m].real();
        v[2 * (m - 1) + 1] = f[m].imag();
    }
    return v;
}

SpectralField decode_target(const Eigen::VectorXd& v, const Grid& g) {
    int mt = static_cast<int>(v.size()) / 2;
    if (mt > g.n_modes) throw ConfigError("decode_target: vector exceeds grid modes");
    SpectralField f(g.n_modes);
    for (int m = 1; m <= mt; ++m)
        f[m] = {v[2 * (m - 1)], v[2 * (m - 1) + 1]};
    return f;
}

SynthesisOperator assemble_T(const TrajectorySignal& w, const ControlBasis& basis,
                             const Grid& grid, const TimeGrid& tg, int target_cutoff,
                             int workers) {
    if (target_cutoff < 1 || target_cutoff > grid.n_modes)
        throw ConfigError("assemble_T: target cutoff out of range");
    SynthesisOperator op{Eigen::MatrixXd::Zero(2 * target_cutoff, basis.dof()),
                         target_cutoff, basis, describe_w(w)};
    const int n = basis.dof();
    parallel_for(n, workers, [&](int i) {
        try {
            TrajectorySignal e_i = basis.unit_signal(i);
            SpectralField zero(grid.n_modes);
            Trajectory col = linburgers_solve(zero, &w, &e_i, grid, tg);
            op.matrix.col(i) = encode_target(col.final_state(), target_cutoff);
        } catch (const NumericalError& err) {
            throw NumericalError("assemble_T column " + std::to_string(i) + ": " +
                                 err.what());
        }
    });
    return op;
}

Eigen::MatrixXd gramian(const SynthesisOperator& Tm) {
    return Tm.matrix * Tm.matrix.transpose();
}

double delta_h(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("delta_h: gamma must be positive");
    Eigen::MatrixXd A = G;
    A.diagonal().array() += gamma;
    Eigen::VectorXd x = A.ldlt().solve(h);
    return (G * x - h).squaredNorm();
}

RightInverseResult approx_right_inverse(const SynthesisOperator& Tm, double gamma,
                                        int rank_cutoff, const Eigen::VectorXd& h) {
    if (!(gamma > 0.0)) throw ConfigError("approx_right_inverse: gamma must be positive");
    const int n = Tm.basis.dof();
    if (rank_cutoff <= 0 || rank_cutoff > n) rank_cutoff = n;

    Eigen::MatrixXd G = gramian(Tm);
    Eigen::MatrixXd A = G;
    A.diagonal().array() += gamma;
    Eigen::VectorXd x = A.ldlt().solve(h);
    Eigen::VectorXd f = Tm.matrix.transpose() * x;

    Eigen::VectorXd f_trunc = f;
    f_trunc.tail(n - rank_cutoff).setZero();

    RightInverseResult r;
    r.coeffs.assign(f_trunc.data(), f_trunc.data() + n);
    r.tikhonov_residual = (Tm.matrix * f - h).norm();
    r.truncation_residual = (Tm.matrix * (f_trunc - f)).norm();
    r.total_residual = (Tm.matrix * f_trunc - h).norm();
    return r;
}

SynthesisOutcome synthesize_g(const SpectralField& u0, const SpectralField& u1,
                              const TrajectorySignal& w, const SynthesisOperator& Tm,
                              double gamma, int rank_cutoff, const Grid& grid,
                              const TimeGrid& tg, bool allow_tail,
                              const std::vector<double>* ladder) {
    if (std::abs(u0[0]) > 1e-10 || std::abs(u1[0]) > 1e-10)
        throw ConfigError("synthesize_g: states must be mean-zero");
    if (!allow_tail) {
        check_tail(u0, Tm.target_cutoff, "synthesize_g");
        check_tail(u1, Tm.target_cutoff, "synthesize_g");
    }

    Trajectory free_run = linburgers_solve(u0, &w, nullptr, grid, tg);
    Eigen::VectorXd h = encode_target(u1, Tm.target_cutoff) -
                        encode_target(free_run.final_state(), Tm.target_cutoff);

    std::vector<double> rungs(std::begin(kGammaLadder), std::end(kGammaLadder));
    if (ladder && !ladder->empty()) rungs = *ladder;

    SynthesisOutcome out;
    out.h_norm = h.norm();
    if (out.h_norm == 0.0) {
        out.coeffs.assign(Tm.basis.dof(), 0.0);
        out.g = TrajectorySignal(0.0, Tm.basis.horizon);
        out.gamma_used = gamma > 0.0 ? gamma : rungs.back();
        return out;
    }

    Eigen::MatrixXd G = gramian(Tm);
    if (gamma > 0.0) {
        out.gamma_used = gamma;
    } else {
        // walk the ladder from coarse to fine; stop when the defect stalls
        int chosen = 0;
        for (double gv : rungs) {
            out.gamma_ladder.push_back(gv);
            out.gamma_residuals.push_back(std::sqrt(delta_h(G, h, gv)));
        }
        for (size_t i = 1; i < out.gamma_residuals.size(); ++i) {
            if (out.gamma_residuals[i] <= 0.9 * out.gamma_residuals[chosen])
                chosen = static_cast<int>(i);
            else
                break;
        }
        out.gamma_used = out.gamma_ladder[chosen];
    }

    RightInverseResult inv = approx_right_inverse(Tm, out.gamma_used, rank_cutoff, h);
    out.coeffs = inv.coeffs;
    out.tikhonov_residual = inv.tikhonov_residual;
    out.total_residual = inv.total_residual;
    out.g = Tm.basis.control_signal(out.coeffs);
    return out;
}

TrajectorySignal rescale_control(const TrajectorySignal& g, const TrajectorySignal& xi,
                                 const TrajectorySignal& w, double tau, int j) {
    if (!(tau > 0.0) || tau > 1.0)
        throw ConfigError("rescale_control: tau must lie in (0, 1]");
    double inv = 1.0 / tau;
    TrajectorySignal eta = w.lj_applied(j).time_rescaled(tau).scaled(inv);
    if (!xi.empty())
        eta = signal_add(eta, xi.time_rescaled(tau).scaled(inv * inv));
    if (!g.empty())
        eta = signal_add(eta, g.time_rescaled(tau).scaled(inv));
    return eta;
}

SteerContext make_steer_context(const ModeSet& J, int j, double s, int depth,
                                double amplitude, const Grid& grid, const TimeGrid& tg,
                                int n_time_cells, int target_cutoff, int workers,
                                std::vector<double> gamma_ladder) {
    TrajectorySignal w = build_w(J, tg.t1 - tg.t0, depth, amplitude);
    TrajectorySignal xi = build_xi(w);
    ControlBasis basis(hk_subspace(J, 1), n_time_cells, tg.t1 - tg.t0);
    SynthesisOperator Tm = assemble_T(w, basis, grid, tg, target_cutoff, workers);
    Eigen::MatrixXd G = gramian(Tm);

    SteerContext ctx{grid, tg, j, s, std::move(w), std::move(xi), std::move(Tm),
                     std::move(G), 0.0, 0.0, "", std::move(gamma_ladder)};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ctx.G);
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    ctx.gramian_sigma_min = lmin > 0.0 ? std::sqrt(lmin) : 0.0;
    ctx.gramian_condition =
        lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (!(lmin > 1e-12 * lmax))
        ctx.conditioning_warning =
            "Gramian is near-singular; raise the trajectory amplitude or depth";
    return ctx;
}

SteeringResult steer(const SteerContext& ctx, const SpectralField& u0,
                     const SpectralField& u1, double tau, double gamma,
                     int rank_cutoff, bool allow_tail) {
    double t_start = now_s();
    SteeringResult res;
    res.tau = tau;
    res.j = ctx.j;
    res.s = ctx.s;
    res.gramian_condition = ctx.gramian_condition;

    SynthesisOutcome syn;
    try {
        syn = synthesize_g(u0, u1, ctx.w, ctx.Tm, gamma, rank_cutoff, ctx.grid, ctx.tg,
                           allow_tail, &ctx.gamma_ladder);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("steer/synthesize: ") + e.what());
    }
    res.gamma = syn.gamma_used;
    res.g_coeffs = syn.coeffs;
    res.tikhonov_residual = syn.tikhonov_residual;
    res.eta = rescale_control(syn.g, ctx.xi, ctx.w, tau, ctx.j);

    double T = ctx.tg.t1 - ctx.tg.t0;
    TimeGrid tg_scaled(0.0, T * tau, ctx.tg.n_steps);
    Trajectory u_traj(ctx.grid);
    try {
        u_traj = hnkdv_solve(u0, &res.eta, ctx.j, ctx.grid, tg_scaled, true);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("steer/nonlinear run: ") + e.what());
    }
    Trajectory v_traj(ctx.grid);
    try {
        v_traj = linburgers_solve(u0, &ctx.w, &syn.g, ctx.grid, ctx.tg);
    } catch (const NumericalError& e) {
        throw NumericalError(std::string("steer/linear run: ") + e.what());
    }

    res.u_final = u_traj.final_state();
    res.residual_s = sobolev_norm(res.u_final - u1, ctx.s);
    res.linear_residual_s = sobolev_norm(v_traj.final_state() - u1, ctx.s);
    res.remainder_final = sobolev_norm(res.u_final - v_traj.final_state(), ctx.s);
    res.runtime_s = now_s() - t_start;
    return res;
}

FixedTimeReport fixed_time_steer(const SteerContext& ctx, const SpectralField& u0,
                                 const SpectralField& u1, double t_total,
                                 const FixedTimeParams& params) {
    if (!(t_total > 0.0)) throw ConfigError("fixed_time_steer: t_total must be positive");
    if (!(params.tau > 0.0) || params.tau > 0.5)
        throw ConfigError("fixed_time_steer: segment fraction must lie in (0, 0.5]");
    if (params.max_segments < 1)
        throw ConfigError("fixed_time_steer: max_segments must be >= 1");

    FixedTimeReport rep;
    double T = ctx.tg.t1 - ctx.tg.t0;
    double dt = ctx.tg.dt();
    double eps = 1e-12 * t_total;

    // trivial steady target: zero initial state, zero target
    if (sobolev_norm(u0, ctx.s) <= 1e-14 && sobolev_norm(u1, ctx.s) <= 1e-14) {
        int n = std::max(1, static_cast<int>(std::lround(t_total / dt)));
        Trajectory traj = hnkdv_solve(u0, nullptr, ctx.j, ctx.grid,
                                      TimeGrid(0.0, t_total, n), true);
        rep.final_error = sobolev_norm(traj.final_state() - u1, ctx.s);
        rep.segments.push_back({"coast", 0.0, t_total, rep.final_error});
        rep.converged = true;
        return rep;
    }

    SpectralField state = u0;
    double t = 0.0;
    bool first_coast = true;
    for (;;) {
        double remaining = t_total - t;
        if (remaining <= eps) break;
        if (static_cast<int>(rep.steers.size()) >= params.max_segments) {
            rep.converged = false;
            rep.final_error = sobolev_norm(state - u1, ctx.s);
            return rep;
        }

        bool landing = remaining <= 1.5 * T * params.tau && remaining <= T;
        double tau_seg = landing ? remaining / T : params.tau;
        SteeringResult res =
            steer(ctx, state, u1, tau_seg, params.gamma, params.rank_cutoff, true);
        state = res.u_final;
        rep.segments.push_back({"steer", t, t + T * tau_seg, res.residual_s});
        rep.steers.push_back(std::move(res));
        t += T * tau_seg;
        remaining = t_total - t;
        if (remaining <= eps) break;

        // coast with zero control until exactly one steering segment is
        // left, cut short if the drift exceeds half the budget
        double coast_limit = t_total - T * params.tau;
        if (coast_limit <= t + dt) continue;
        int n = std::max(1, static_cast<int>(std::lround((coast_limit - t) / dt)));
        Trajectory traj =
            hnkdv_solve(state, nullptr, ctx.j, ctx.grid, TimeGrid(t, coast_limit, n), true);
        double r0 = sobolev_norm(state - u1, ctx.s);
        if (first_coast) rep.drift_entry_error = r0;
        int stop = static_cast<int>(traj.times.size()) - 1;
        for (int i = 1; i < static_cast<int>(traj.times.size()); ++i) {
            double err = sobolev_norm(traj.states[i] - u1, ctx.s);
            if (first_coast && rep.drift_window < 0.0 && err > 2.0 * r0)
                rep.drift_window = traj.times[i] - t;
            if (err > 0.5 * params.drift_budget) {
                stop = i;
                break;
            }
        }
        first_coast = false;
        state = traj.states[stop];
        double t_end = traj.times[stop];
        rep.segments.push_back({"coast", t, t_end, sobolev_norm(state - u1, ctx.s)});
        t = t_end;
    }
    rep.final_error = sobolev_norm(state - u1, ctx.s);
    rep.converged = true;
    return rep;
}

} // namespace hnkdv
