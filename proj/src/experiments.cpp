#include "hnkdv/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include "json.hpp"

#include "hnkdv/errors.hpp"
#include "hnkdv/solvers.hpp"
#include "hnkdv/spectral.hpp"
#include "hnkdv/subspace.hpp"
#include "hnkdv/synthesis.hpp"
#include "hnkdv/trajectory_signal.hpp"
#include "hnkdv/util.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace hnkdv {

namespace {

void vlog(const RunOptions& opts, const std::string& msg) {
    if (opts.verbose) std::cerr << "[" << kToolName << "] " << msg << "\n";
}

fs::path out_dir(const ExperimentConfig& cfg, const RunOptions& opts) {
    fs::path dir = !opts.output_dir.empty()
                       ? fs::path(opts.output_dir)
                       : (!cfg.output_dir.empty() ? fs::path(cfg.output_dir)
                                                  : fs::path("."));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw ConfigError("cannot create output directory: " + dir.string());
    return dir;
}

json manifest(const ExperimentConfig& cfg, const char* subcommand) {
    json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["subcommand"] = subcommand;
    m["config_fnv1a"] = hex64(cfg.hash());
    m["config"] = cfg.serialize();
    return m;
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << j.dump(2) << "\n";
}

// CSV files open with a single machine-readable manifest comment line.
std::ofstream open_csv(const fs::path& p, const json& man) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    json slim = man;
    slim.erase("config");
    f << "# manifest " << slim.dump() << "\n";
    return f;
}

Grid make_grid(const ExperimentConfig& cfg) { return Grid(cfg.grid_n, cfg.grid_m); }

TimeGrid make_tg(const ExperimentConfig& cfg) {
    return TimeGrid(0.0, cfg.horizon, cfg.n_steps);
}

ModeSet make_modes(const ExperimentConfig& cfg) {
    return ModeSet(std::set<int>(cfg.modes.begin(), cfg.modes.end()));
}

SpectralField state_field(const std::vector<ModeAmplitude>& entries, const Grid& g) {
    TrigPoly p;
    for (const auto& e : entries) {
        p.add_sin(e.mode, e.sin_c);
        p.add_cos(e.mode, e.cos_c);
    }
    return from_trigpoly(p, g);
}

SteerContext build_context(const ExperimentConfig& cfg, const RunOptions& opts) {
    vlog(opts, "assembling input-to-state operator (" +
                   std::to_string(cfg.n_time_cells) + " cells, " +
                   std::to_string(opts.workers) + " workers)");
    SteerContext ctx = make_steer_context(
        make_modes(cfg), cfg.j, static_cast<double>(cfg.s), cfg.depth, cfg.amplitude,
        make_grid(cfg), make_tg(cfg), cfg.n_time_cells, cfg.target_cutoff,
        opts.workers, cfg.gamma_ladder);
    if (!ctx.conditioning_warning.empty())
        std::cerr << "warning: " << ctx.conditioning_warning << "\n";
    return ctx;
}

json trig_json(const TrigPoly& p) {
    json j;
    j["constant"] = p.constant();
    json sj = json::array();
    for (const auto& [l, a] : p.sin_coeffs()) sj.push_back({{"mode", l}, {"coeff", a}});
    json cj = json::array();
    for (const auto& [l, b] : p.cos_coeffs()) cj.push_back({{"mode", l}, {"coeff", b}});
    j["sin"] = sj;
    j["cos"] = cj;
    return j;
}

json clause_json(const A1Clause& c) {
    return {{"pass", c.pass}, {"worst", c.worst}, {"offending_t", c.offending_t}};
}

json steering_json(const SteeringResult& r) {
    json j;
    j["tau"] = r.tau;
    j["gamma"] = r.gamma;
    j["j"] = r.j;
    j["s"] = r.s;
    j["residual_s"] = r.residual_s;
    j["linear_residual_s"] = r.linear_residual_s;
    j["remainder_final"] = r.remainder_final;
    j["gramian_condition"] = r.gramian_condition;
    j["tikhonov_residual"] = r.tikhonov_residual;
    j["runtime_s"] = r.runtime_s;
    j["g_coeffs"] = r.g_coeffs;
    json ch = json::array();
    for (const auto& [key, prof] : r.eta.channels()) {
        (void)prof;
        ch.push_back({{"mode", key.mode},
                      {"channel", key.channel == Channel::Sin ? "sin" : "cos"}});
    }
    j["eta_channels"] = ch;
    return j;
}

void save_operator(const fs::path& dir, const SynthesisOperator& Tm, const json& man) {
    json meta;
    meta["manifest"] = man;
    meta["rows"] = static_cast<int>(Tm.matrix.rows());
    meta["cols"] = static_cast<int>(Tm.matrix.cols());
    meta["target_cutoff"] = Tm.target_cutoff;
    meta["n_time_cells"] = Tm.basis.n_time_cells;
    meta["spatial_dim"] = Tm.basis.h_basis.dim();
    meta["horizon"] = Tm.basis.horizon;
    meta["w_ref"] = Tm.w_ref;
    meta["matrix_file"] = "synthesis_operator.csv";
    json elems = json::array();
    for (const auto& e : Tm.basis.h_basis.elements()) elems.push_back(trig_json(e));
    meta["spatial_basis"] = elems;
    write_json(dir / "synthesis_operator.json", meta);

    std::ofstream f = open_csv(dir / "synthesis_operator.csv", man);
    for (int r = 0; r < Tm.matrix.rows(); ++r) {
        for (int c = 0; c < Tm.matrix.cols(); ++c) {
            if (c) f << ",";
            f << fmt_shortest(Tm.matrix(r, c));
        }
        f << "\n";
    }
}

} // namespace

void cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts) {
    fs::path dir = out_dir(cfg, opts);
    Grid grid = make_grid(cfg);
    TimeGrid tg = make_tg(cfg);
    SpectralField u0 = state_field(cfg.u0, grid);

    vlog(opts, "integrating free evolution, " + std::to_string(cfg.n_steps) + " steps");
    Trajectory traj =
        hnkdv_solve(u0, nullptr, cfg.j, grid, tg, cfg.simulate.nonlinearity);

    json man = manifest(cfg, "simulate");
    {
        std::ofstream f = open_csv(dir / "norms.csv", man);
        f << "t,mass,l2,hs\n";
        for (size_t i = 0; i < traj.times.size(); ++i) {
            const SpectralField& u = traj.states[i];
            double mass = 2.0 * M_PI * u[0].real();
            f << fmt_shortest(traj.times[i]) << "," << fmt_shortest(mass) << ","
              << fmt_shortest(sobolev_norm(u, 0.0)) << ","
              << fmt_shortest(sobolev_norm(u, static_cast<double>(cfg.s))) << "\n";
        }
    }
    {
        std::ofstream f = open_csv(dir / "trajectory.csv", man);
        f << "t";
        for (int k = 1; k <= cfg.target_cutoff; ++k)
            f << ",re_" << k << ",im_" << k;
        f << "\n";
        for (size_t i = 0; i < traj.times.size(); ++i) {
            f << fmt_shortest(traj.times[i]);
            for (int k = 1; k <= cfg.target_cutoff; ++k)
                f << "," << fmt_shortest(traj.states[i][k].real()) << ","
                  << fmt_shortest(traj.states[i][k].imag());
            f << "\n";
        }
    }
    vlog(opts, "wrote norms.csv and trajectory.csv");
}

void cmd_saturation(const ExperimentConfig& cfg, const RunOptions& opts) {
    fs::path dir = out_dir(cfg, opts);
    ModeSet J = make_modes(cfg);
    SaturationReport rep =
        saturation_report(J, cfg.saturation.cutoff, cfg.saturation.k_max);

    json j;
    j["manifest"] = manifest(cfg, "saturation");
    j["levels"] = rep.levels;
    j["generator"] = rep.generator;
    j["cutoff"] = rep.cutoff;
    j["k_max"] = rep.k_max;
    j["first_covering_k"] = rep.first_covering_k;
    json rows = json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"k", r.k},
                        {"dim", r.dim},
                        {"modes_present", r.modes_present},
                        {"modes_covered", r.modes_covered}});
    }
    j["rows"] = rows;
    json basis = json::array();
    for (const auto& e : hk_subspace(J, 1).elements()) basis.push_back(trig_json(e));
    j["h1_basis"] = basis;
    write_json(dir / "saturation_report.json", j);
    vlog(opts, "wrote saturation_report.json");
}

void cmd_check_a1(const ExperimentConfig& cfg, const RunOptions& opts) {
    fs::path dir = out_dir(cfg, opts);
    ModeSet J = make_modes(cfg);
    TrajectorySignal w = build_w(J, cfg.horizon, cfg.depth, cfg.amplitude);
    TrajectorySignal xi = build_xi(w);
    const int samples = 100;
    const double tol = 1e-10;
    A1Report rep = verify_a1(w, xi, cfg.j, samples, tol);

    json j;
    j["manifest"] = manifest(cfg, "check-a1");
    j["j"] = cfg.j;
    j["samples"] = rep.samples;
    j["tol"] = rep.tol;
    j["boundary"] = clause_json(rep.boundary);
    j["dispersion_range"] = clause_json(rep.dispersion_range);
    j["control_range"] = clause_json(rep.control_range);
    j["burgers_residual"] = clause_json(rep.burgers_residual);
    j["pass"] = rep.pass();
    write_json(dir / "a1_report.json", j);
    vlog(opts, "wrote a1_report.json");

    if (!rep.pass()) {
        std::string which = !rep.boundary.pass            ? "boundary"
                            : !rep.dispersion_range.pass  ? "dispersion_range"
                            : !rep.control_range.pass     ? "control_range"
                                                          : "burgers_residual";
        throw NumericalError("trajectory admissibility check failed: clause " + which);
    }
}

void cmd_gramian(const ExperimentConfig& cfg, const RunOptions& opts) {
    fs::path dir = out_dir(cfg, opts);
    SteerContext ctx = build_context(cfg, opts);
    json man = manifest(cfg, "gramian");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctx.Tm.matrix);
    Eigen::VectorXd sv = svd.singularValues();

    // adjoint pairing <T g, h> == <g, T^T h> at matrix level
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double adjoint_worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
        Eigen::VectorXd gv(ctx.Tm.matrix.cols()), hv(ctx.Tm.matrix.rows());
        for (int i = 0; i < gv.size(); ++i) gv[i] = unif(rng);
        for (int i = 0; i < hv.size(); ++i) hv[i] = unif(rng);
        double lhs = (ctx.Tm.matrix * gv).dot(hv);
        double rhs = gv.dot(ctx.Tm.matrix.transpose() * hv);
        adjoint_worst = std::max(adjoint_worst, std::abs(lhs - rhs));
    }

    Grid grid = make_grid(cfg);
    TimeGrid tg = make_tg(cfg);
    SpectralField u0 = state_field(cfg.u0, grid);
    SpectralField u1 = state_field(cfg.u1, grid);
    Trajectory free_run = linburgers_solve(u0, &ctx.w, nullptr, grid, tg);
    Eigen::VectorXd h = encode_target(u1, cfg.target_cutoff) -
                        encode_target(free_run.final_state(), cfg.target_cutoff);
    json ladder = json::array();
    for (double gv : cfg.gamma_ladder) {
        double d = delta_h(ctx.G, h, gv);
        ladder.push_back({{"gamma", gv}, {"delta_h", d}, {"residual", std::sqrt(d)}});
    }

    vlog(opts, "assembling constant-coefficient comparison operator");
    TrajectorySignal w_flat =
        build_w_flat(make_modes(cfg), cfg.horizon, cfg.depth, cfg.amplitude);
    SynthesisOperator Tm_flat = assemble_T(w_flat, ctx.Tm.basis, grid, tg,
                                           cfg.target_cutoff, opts.workers);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_flat(Tm_flat.matrix);
    Eigen::VectorXd sv_flat = svd_flat.singularValues();

    json j;
    j["manifest"] = man;
    j["dof"] = ctx.Tm.basis.dof();
    j["target_cutoff"] = cfg.target_cutoff;
    j["singular_values"] = std::vector<double>(sv.data(), sv.data() + sv.size());
    j["sigma_min"] = sv[sv.size() - 1];
    j["sigma_max"] = sv[0];
    j["condition"] = sv[sv.size() - 1] > 0.0
                         ? sv[0] / sv[sv.size() - 1]
                         : std::numeric_limits<double>::infinity();
    j["gramian_condition"] = ctx.gramian_condition;
    j["conditioning_warning"] = ctx.conditioning_warning;
    j["adjoint_residual"] = adjoint_worst;
    j["delta_ladder"] = ladder;
    j["flat_theta_comparison"] = {
        {"sigma_min", sv_flat[sv_flat.size() - 1]},
        {"sigma_max", sv_flat[0]},
        {"condition", sv_flat[sv_flat.size() - 1] > 0.0
                          ? sv_flat[0] / sv_flat[sv_flat.size() - 1]
                          : std::numeric_limits<double>::infinity()}};
    write_json(dir / "gramian_report.json", j);
    save_operator(dir, ctx.Tm, man);
    vlog(opts, "wrote gramian_report.json and synthesis_operator.{json,csv}");
}

void cmd_converge_tau(const ExperimentConfig& cfg, const RunOptions& opts) {
    fs::path dir = out_dir(cfg, opts);
    SteerContext ctx = build_context(cfg, opts);
    Grid grid = make_grid(cfg);
    SpectralField u0 = state_field(cfg.u0, grid);
    SpectralField u1 = state_field(cfg.u1, grid);
    json man = manifest(cfg, "converge-tau");

    std::ofstream csv = open_csv(dir / "converge_tau.csv", man);
    csv << "tau,residual_s,linear_residual_s,remainder_final,gramian_condition,"
           "runtime_s\n";
    csv.flush();

    std::vector<double> remainders;
    int rank = cfg.rank_cutoff > 0 ? cfg.rank_cutoff : -1;
    for (double tau : cfg.tau_ladder) {
        vlog(opts, "steering at tau = " + fmt_shortest(tau));
        SteeringResult res;
        try {
            res = steer(ctx, u0, u1, tau, -1.0, rank, false);
        } catch (const NumericalError& e) {
            csv.flush();
            throw NumericalError("tau = " + fmt_shortest(tau) + ": " + e.what());
        }
        csv << fmt_shortest(res.tau) << "," << fmt_shortest(res.residual_s) << ","
            << fmt_shortest(res.linear_residual_s) << ","
            << fmt_shortest(res.remainder_final) << ","
            << fmt_shortest(res.gramian_condition) << ","
            << fmt_shortest(res.runtime_s) << "\n";
        csv.flush();
        remainders.push_back(res.remainder_final);
        json rj;
        rj["manifest"] = man;
        rj["steering"] = steering_json(res);
        write_json(dir / ("steering_tau_" + fmt_shortest(tau) + ".json"), rj);
    }

    for (size_t i = 1; i < remainders.size(); ++i)
        if (!(remainders[i] < remainders[i - 1]))
            throw NumericalError(
                "remainder failed to decrease along the tau ladder (tau = " +
                fmt_shortest(cfg.tau_ladder[i]) + ")");
    vlog(opts, "wrote converge_tau.csv");
}

void cmd_fixed_time(const ExperimentConfig& cfg, const RunOptions& opts) {
    fs::path dir = out_dir(cfg, opts);
    SteerContext ctx = build_context(cfg, opts);
    Grid grid = make_grid(cfg);
    SpectralField u0 = state_field(cfg.u0, grid);
    SpectralField u1 = state_field(cfg.u1, grid);

    FixedTimeParams params;
    params.tau = cfg.fixed_time.tau;
    params.gamma = -1.0;
    params.rank_cutoff = cfg.rank_cutoff > 0 ? cfg.rank_cutoff : -1;
    params.drift_budget = cfg.fixed_time.drift_budget;
    params.max_segments = cfg.fixed_time.max_segments;

    vlog(opts, "fixed-horizon steering to t = " + fmt_shortest(cfg.fixed_time.t_total));
    FixedTimeReport rep = fixed_time_steer(ctx, u0, u1, cfg.fixed_time.t_total, params);

    json j;
    j["manifest"] = manifest(cfg, "fixed-time");
    j["t_total"] = cfg.fixed_time.t_total;
    j["params"] = {{"tau", params.tau},
                   {"drift_budget", params.drift_budget},
                   {"max_segments", params.max_segments}};
    j["converged"] = rep.converged;
    j["final_error"] = rep.final_error;
    j["drift_entry_error"] = rep.drift_entry_error;
    j["drift_window"] = rep.drift_window;
    json segs = json::array();
    for (const auto& s : rep.segments)
        segs.push_back({{"kind", s.kind},
                        {"t_start", s.t_start},
                        {"t_end", s.t_end},
                        {"error_after", s.error_after}});
    j["segments"] = segs;
    json steers = json::array();
    for (const auto& r : rep.steers) steers.push_back(steering_json(r));
    j["steers"] = steers;
    write_json(dir / "fixed_time_report.json", j);
    vlog(opts, "wrote fixed_time_report.json");

    if (!rep.converged)
        throw NumericalError(
            "fixed-horizon steering did not converge within max_segments; "
            "see fixed_time_report.json");
}

} // namespace hnkdv
