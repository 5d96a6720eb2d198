#include "hnkdv/trajectory_signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hnkdv/errors.hpp"

namespace hnkdv {

namespace {

TrigPoly unit(const ChannelKey& k) {
    return k.channel == Channel::Sin ? TrigPoly::sine(k.mode) : TrigPoly::cosine(k.mode);
}

const int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

int nth_prime(int n) {
    if (n < static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0]))) return kPrimes[n];
    int c = kPrimes[sizeof(kPrimes) / sizeof(kPrimes[0]) - 1];
    int seen = sizeof(kPrimes) / sizeof(kPrimes[0]) - 1;
    while (seen < n) {
        ++c;
        if (is_prime(c)) ++seen;
    }
    return c;
}

} // namespace

TrajectorySignal::TrajectorySignal(double t_begin, double t_end)
    : t_begin_(t_begin), t_end_(t_end) {
    if (!(t_end > t_begin))
        throw std::invalid_argument("TrajectorySignal: empty time interval");
}

void TrajectorySignal::add_term(int mode, Channel channel, const PiecewisePoly& profile) {
    if (mode < 1) throw std::invalid_argument("TrajectorySignal: mode must be >= 1");
    ChannelKey key{mode, channel};
    auto it = channels_.find(key);
    if (it == channels_.end()) channels_.emplace(key, profile);
    else it->second = pp_add(it->second, profile);
}

TrigPoly TrajectorySignal::value_at(double t) const {
    TrigPoly v;
    for (const auto& [key, prof] : channels_) {
        double c = prof.eval(t);
        if (key.channel == Channel::Sin) v.add_sin(key.mode, c);
        else v.add_cos(key.mode, c);
    }
    return v;
}

TrigPoly TrajectorySignal::value_within(double t, double locator) const {
    TrigPoly v;
    for (const auto& [key, prof] : channels_) {
        double c = prof.eval_within(t, locator);
        if (key.channel == Channel::Sin) v.add_sin(key.mode, c);
        else v.add_cos(key.mode, c);
    }
    return v;
}

TrigPoly TrajectorySignal::derivative_at(double t) const {
    TrigPoly v;
    for (const auto& [key, prof] : channels_) {
        double c = prof.eval_derivative(t);
        if (key.channel == Channel::Sin) v.add_sin(key.mode, c);
        else v.add_cos(key.mode, c);
    }
    return v;
}

std::vector<double> TrajectorySignal::time_breakpoints() const {
    std::vector<double> all{t_begin_, t_end_};
    for (const auto& [key, prof] : channels_) {
        (void)key;
        all = merge_breakpoints(all, prof.breakpoints());
    }
    return all;
}

TrajectorySignal TrajectorySignal::scaled(double alpha) const {
    TrajectorySignal r(t_begin_, t_end_);
    r.meta = meta;
    for (const auto& [key, prof] : channels_) r.channels_.emplace(key, prof.scaled(alpha));
    return r;
}

TrajectorySignal TrajectorySignal::time_rescaled(double tau) const {
    if (!(tau > 0.0)) throw std::invalid_argument("time_rescaled: tau must be > 0");
    TrajectorySignal r(t_begin_ * tau, t_end_ * tau);
    r.meta = meta;
    for (const auto& [key, prof] : channels_)
        r.channels_.emplace(key, prof.compose_affine(1.0 / tau, 0.0));
    return r;
}

TrajectorySignal TrajectorySignal::lj_applied(int j) const {
    if (j < 1) throw std::invalid_argument("lj_applied: j must be >= 1");
    TrajectorySignal r(t_begin_, t_end_);
    for (const auto& [key, prof] : channels_) {
        double w = 1.0;
        for (int i = 0; i < 2 * j + 1; ++i) w *= key.mode;
        // L_j sin(lx) = -l^(2j+1) cos(lx),  L_j cos(lx) = +l^(2j+1) sin(lx)
        if (key.channel == Channel::Sin)
            r.add_term(key.mode, Channel::Cos, prof.scaled(-w));
        else
            r.add_term(key.mode, Channel::Sin, prof.scaled(w));
    }
    return r;
}

TrajectorySignal signal_add(const TrajectorySignal& a, const TrajectorySignal& b) {
    if (std::abs(a.t_begin() - b.t_begin()) > 1e-12 ||
        std::abs(a.t_end() - b.t_end()) > 1e-12 * std::max(1.0, std::abs(a.t_end())))
        throw std::invalid_argument("signal_add: mismatched time intervals");
    TrajectorySignal r = a;
    for (const auto& [key, prof] : b.channels())
        r.add_term(key.mode, key.channel, prof);
    return r;
}

TrajectorySignal build_w(const ModeSet& J, double horizon, int depth, double amplitude) {
    TrajectorySignal w(0.0, horizon);
    ThetaWindow theta = theta_window(horizon);
    int pi = 0;
    for (int l : J.sorted())
        for (Channel ch : {Channel::Sin, Channel::Cos}) {
            int p = nth_prime(pi++);
            StepFunction phi = observable_phi(p, depth, horizon);
            CoefficientPair cp = vartheta(phi, theta);
            w.add_term(l, ch, cp.value.scaled(amplitude));
            w.meta[{l, ch}] = {p, depth, amplitude};
        }
    return w;
}

TrajectorySignal build_w_flat(const ModeSet& J, double horizon, int depth,
                              double amplitude) {
    TrajectorySignal w(0.0, horizon);
    ThetaWindow theta = theta_window(horizon);
    int pi = 0;
    for (int l : J.sorted())
        for (Channel ch : {Channel::Sin, Channel::Cos}) {
            int p = nth_prime(pi++);
            StepFunction phi = observable_phi(p, depth, horizon);
            // time average of amplitude * vartheta over [0, T]
            PiecewisePoly v = vartheta(phi, theta).value.scaled(amplitude);
            double mean = v.antiderivative().eval(horizon) / horizon;
            w.add_term(l, ch, PiecewisePoly::constant(0.0, horizon, mean));
            w.meta[{l, ch}] = {p, depth, amplitude};
        }
    return w;
}

TrajectorySignal build_xi(const TrajectorySignal& w) {
    TrajectorySignal xi(w.t_begin(), w.t_end());
    // dw/dt
    for (const auto& [key, prof] : w.channels())
        xi.add_term(key.mode, key.channel, prof.derivative());
    // B(w) = (1/2) d/dx (w^2): expand pairwise products of the space factors
    // and carry exact profile products in time.
    const auto& ch = w.channels();
    for (auto it1 = ch.begin(); it1 != ch.end(); ++it1)
        for (auto it2 = it1; it2 != ch.end(); ++it2) {
            double sym = (it1 == it2) ? 0.5 : 1.0;   // off-diagonal pairs occur twice
            TrigPoly spatial = q_bilinear(unit(it1->first), unit(it2->first));
            PiecewisePoly tprof = pp_mul(it1->second, it2->second).scaled(sym);
            for (const auto& [l, a] : spatial.sin_coeffs())
                xi.add_term(l, Channel::Sin, tprof.scaled(a));
            for (const auto& [l, b] : spatial.cos_coeffs())
                xi.add_term(l, Channel::Cos, tprof.scaled(b));
        }
    return xi;
}

A1Report verify_a1(const TrajectorySignal& w, const TrajectorySignal& xi, int j,
                   int samples, double tol) {
    if (samples < 1) throw std::invalid_argument("verify_a1: samples must be >= 1");
    A1Report rep;
    rep.samples = samples;
    rep.tol = tol;

    double T = w.t_end();
    double n0 = w.value_at(w.t_begin()).l2_norm();
    double nT = w.value_at(T).l2_norm();
    rep.boundary.worst = std::max(n0, nT);
    rep.boundary.offending_t = n0 >= nT ? w.t_begin() : T;
    rep.boundary.pass = rep.boundary.worst <= tol;

    std::set<int> levels;
    for (const auto& [key, prof] : w.channels()) {
        (void)prof;
        levels.insert(key.mode);
    }
    if (levels.empty()) {
        // empty reference trajectory: range clauses are vacuous, the residual
        // clause still checks xi against zero
        for (int i = 0; i <= samples; ++i) {
            double t = w.t_begin() + (T - w.t_begin()) * i / samples;
            double r = xi.value_at(t).l2_norm();
            if (r > rep.burgers_residual.worst) {
                rep.burgers_residual.worst = r;
                rep.burgers_residual.offending_t = t;
            }
        }
        rep.burgers_residual.pass = rep.burgers_residual.worst <= tol;
        return rep;
    }

    ModeSet J(levels);
    SubspaceBasis h0 = h0_subspace(J);
    SubspaceBasis h1 = hk_subspace(J, 1);

    for (int i = 0; i <= samples; ++i) {
        // sample off the breakpoint lattice so one-sided values are moot
        double frac = (i + 0.382) / (samples + 1.0);
        double t = w.t_begin() + (T - w.t_begin()) * frac;

        TrigPoly wt = w.value_at(t);
        TrigPoly ljw = lj_apply(wt, j);
        double d2 = h0.distance(ljw) / (1.0 + ljw.l2_norm());
        if (d2 > rep.dispersion_range.worst) {
            rep.dispersion_range.worst = d2;
            rep.dispersion_range.offending_t = t;
        }

        TrigPoly xit = xi.value_at(t);
        double d3 = h1.distance(xit) / (1.0 + xit.l2_norm());
        if (d3 > rep.control_range.worst) {
            rep.control_range.worst = d3;
            rep.control_range.offending_t = t;
        }

        TrigPoly resid =
            tp_combine(1.0, tp_add(w.derivative_at(t), b_nonlinear(wt)), -1.0, xit);
        double d4 = resid.l2_norm();
        if (d4 > rep.burgers_residual.worst) {
            rep.burgers_residual.worst = d4;
            rep.burgers_residual.offending_t = t;
        }
    }
    rep.dispersion_range.pass = rep.dispersion_range.worst <= tol;
    rep.control_range.pass = rep.control_range.worst <= tol;
    rep.burgers_residual.pass = rep.burgers_residual.worst <= tol;
    return rep;
}

} // namespace hnkdv
