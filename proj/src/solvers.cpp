#include "hnkdv/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hnkdv/errors.hpp"

namespace hnkdv {

namespace {

constexpr double kTwoPiHi = 6.283185307179586;       // double(2*pi)
constexpr double kTwoPiLo = 2.4492935982947064e-16;  // 2*pi - double(2*pi)

// (k^(2j+1) * dt) mod 2*pi with a compensated product so the phase keeps
// ~1e-16 absolute accuracy even when k^(2j+1) reaches ~4e12.
double phase_mod_2pi(double p, double dt) {
    double hi = p * dt;
    double lo = std::fma(p, dt, -hi);
    double q = std::nearbyint(hi / kTwoPiHi);
    double r = std::fma(-q, kTwoPiHi, hi);   // exact by Sterbenz-type cancellation
    r = std::fma(-q, kTwoPiLo, r) + lo;
    return r;
}

double signed_odd_power(int k, int j) {
    // |k|^(2j+1) as an exact double; guard the exact-integer range
    double a = std::abs(k);
    double p = 1.0;
    for (int i = 0; i < 2 * j + 1; ++i) {
        p *= a;
        if (p > 9.0e15)
            throw NumericalError("dispersion_multiplier: |k|^(2j+1) exceeds exact double range");
    }
    return k < 0 ? -p : p;
}

using Cv = std::vector<std::complex<double>>;

void fill_multipliers(Cv& out, int n_modes, int j, double dt) {
    out.resize(n_modes + 1);
    for (int k = 0; k <= n_modes; ++k) {
        double ph = phase_mod_2pi(signed_odd_power(k, j), dt);
        out[k] = {std::cos(ph), std::sin(ph)};
    }
}

void apply_multipliers(SpectralField& f, const Cv& m) {
    for (int k = 0; k <= f.n_modes(); ++k) f[k] *= m[k];
}

SpectralField applied(const SpectralField& f, const Cv& m) {
    SpectralField r = f;
    apply_multipliers(r, m);
    return r;
}

// Substep boundaries for one base interval: base endpoints plus any signal
// breakpoints strictly inside, so each RK4 step sees smooth coefficients.
std::vector<double> substeps(double a, double b, const std::vector<double>& jumps) {
    std::vector<double> pts{a};
    double eps = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    auto lo = std::upper_bound(jumps.begin(), jumps.end(), a + eps);
    auto hi = std::lower_bound(jumps.begin(), jumps.end(), b - eps);
    for (auto it = lo; it != hi; ++it) pts.push_back(*it);
    pts.push_back(b);
    return pts;
}

class SpectralProduct {
public:
    explicit SpectralProduct(const Grid& g) : grid_(g), xf_(g) {}

    // FFT( dealias(a)_phys * dealias(b)_phys ) truncated to the 2/3 band.
    SpectralField bilinear(const SpectralField& a, const SpectralField& b) {
        std::vector<double> pa = xf_.to_physical(dealias(a, grid_));
        std::vector<double> pb = xf_.to_physical(dealias(b, grid_));
        for (int m = 0; m < grid_.n_points; ++m) pa[m] *= pb[m];
        SpectralField f = xf_.to_spectral(pa);
        return dealias(f, grid_);
    }

    SpectralField square(const SpectralField& a) {
        std::vector<double> pa = xf_.to_physical(dealias(a, grid_));
        for (int m = 0; m < grid_.n_points; ++m) pa[m] *= pa[m];
        SpectralField f = xf_.to_spectral(pa);
        return dealias(f, grid_);
    }

private:
    Grid grid_;
    SpectralTransform xf_;
};

void mul_ik(SpectralField& f, double scale) {
    for (int k = 0; k <= f.n_modes(); ++k)
        f[k] *= std::complex<double>(0.0, scale * k);
}

void check_initial(const SpectralField& u0, const Grid& grid, const char* who) {
    if (u0.n_modes() != grid.n_modes)
        throw ConfigError(std::string(who) + ": initial data does not match grid");
    if (std::abs(u0[0]) > 1e-10)
        throw ConfigError(std::string(who) + ": initial data must be mean-zero");
}

[[noreturn]] void blow_up(const char* who, int step, double t) {
    throw NumericalError(std::string(who) + ": non-finite state at step " +
                         std::to_string(step) + ", t = " + std::to_string(t));
}

} // namespace

TimeGrid::TimeGrid(double t0_, double t1_, int n_steps_)
    : t0(t0_), t1(t1_), n_steps(n_steps_) {
    if (!(t1 > t0)) throw ConfigError("TimeGrid: t1 must exceed t0");
    if (n_steps < 1) throw ConfigError("TimeGrid: n_steps must be >= 1");
}

SpectralField Trajectory::interpolate(double t) const {
    int n = static_cast<int>(times.size());
    if (n == 0) throw NumericalError("Trajectory::interpolate: empty trajectory");
    if (n == 1) return states[0];
    double scale = std::max({1.0, std::abs(times.front()), std::abs(times.back())});
    // exact hit on a stored time
    auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12 * scale);
    if (it != times.end() && std::abs(*it - t) <= 1e-12 * scale)
        return states[it - times.begin()];

    int i = static_cast<int>(std::upper_bound(times.begin(), times.end(), t) -
                             times.begin()) - 1;
    int window = std::min(4, n);
    int lo = std::clamp(i - 1, 0, n - window);
    SpectralField r(grid.n_modes);
    for (int a = 0; a < window; ++a) {
        double wgt = 1.0;
        for (int b = 0; b < window; ++b)
            if (b != a) wgt *= (t - times[lo + b]) / (times[lo + a] - times[lo + b]);
        r += wgt * states[lo + a];
    }
    return r;
}

std::complex<double> dispersion_multiplier(int j, int k, double dt) {
    if (j < 1) throw ConfigError("dispersion_multiplier: j must be >= 1");
    double ph = phase_mod_2pi(signed_odd_power(k, j), dt);
    return {std::cos(ph), std::sin(ph)};
}

Trajectory hnkdv_solve(const SpectralField& u0, const TrajectorySignal* eta, int j,
                       const Grid& grid, const TimeGrid& tg, bool nonlinearity_on) {
    if (j < 1) throw ConfigError("hnkdv_solve: j must be >= 1");
    check_initial(u0, grid, "hnkdv_solve");
    std::vector<double> jumps;
    if (eta) jumps = eta->time_breakpoints();

    SpectralProduct prod(grid);
    auto rhs = [&](const SpectralField& c, double t, double locator) {
        SpectralField n(grid.n_modes);
        if (nonlinearity_on) {
            n = prod.square(c);
            mul_ik(n, -0.5);
        }
        if (eta) n += from_trigpoly(eta->value_within(t, locator), grid);
        return n;
    };

    Trajectory traj(grid);
    traj.times.reserve(tg.n_steps + 1);
    traj.states.reserve(tg.n_steps + 1);
    SpectralField c = u0;
    traj.times.push_back(tg.time(0));
    traj.states.push_back(c);

    Cv e_full, e_half;
    double cached_h = -1.0;
    for (int i = 0; i < tg.n_steps; ++i) {
        double a = tg.time(i), b = tg.time(i + 1);
        std::vector<double> pts = substeps(a, b, jumps);
        for (size_t spt = 0; spt + 1 < pts.size(); ++spt) {
            double ta = pts[spt], tb = pts[spt + 1];
            double h = tb - ta;
            double mid = 0.5 * (ta + tb);
            if (h != cached_h) {
                fill_multipliers(e_full, grid.n_modes, j, h);
                fill_multipliers(e_half, grid.n_modes, j, 0.5 * h);
                cached_h = h;
            }
            SpectralField k1 = rhs(c, ta, mid);
            SpectralField k2 =
                rhs(applied(c + 0.5 * h * k1, e_half), mid, mid);
            SpectralField k3 = rhs(applied(c, e_half) + 0.5 * h * k2, mid, mid);
            SpectralField k4 =
                rhs(applied(c, e_full) + h * applied(k3, e_half), tb, mid);
            c = applied(c, e_full) +
                (h / 6.0) * (applied(k1, e_full) + 2.0 * applied(k2 + k3, e_half) + k4);
        }
        if (!c.finite()) blow_up("hnkdv_solve", i + 1, b);
        traj.times.push_back(b);
        traj.states.push_back(c);
    }
    return traj;
}

Trajectory linburgers_solve(const SpectralField& v0, const TrajectorySignal* w,
                            const TrajectorySignal* g, const Grid& grid,
                            const TimeGrid& tg) {
    check_initial(v0, grid, "linburgers_solve");
    std::vector<double> jumps;
    if (w) jumps = w->time_breakpoints();
    if (g) jumps = merge_breakpoints(jumps, g->time_breakpoints());

    SpectralProduct prod(grid);
    auto rhs = [&](const SpectralField& v, double t, double locator) {
        SpectralField n(grid.n_modes);
        if (w && !w->empty()) {
            SpectralField wf = from_trigpoly(w->value_within(t, locator), grid);
            n = prod.bilinear(wf, v);
            mul_ik(n, -1.0);
        }
        if (g) n += from_trigpoly(g->value_within(t, locator), grid);
        return n;
    };

    Trajectory traj(grid);
    traj.times.reserve(tg.n_steps + 1);
    traj.states.reserve(tg.n_steps + 1);
    SpectralField v = v0;
    traj.times.push_back(tg.time(0));
    traj.states.push_back(v);

    for (int i = 0; i < tg.n_steps; ++i) {
        double a = tg.time(i), b = tg.time(i + 1);
        std::vector<double> pts = substeps(a, b, jumps);
        for (size_t spt = 0; spt + 1 < pts.size(); ++spt) {
            double ta = pts[spt], tb = pts[spt + 1];
            double h = tb - ta;
            double mid = 0.5 * (ta + tb);
            SpectralField k1 = rhs(v, ta, mid);
            SpectralField k2 = rhs(v + 0.5 * h * k1, mid, mid);
            SpectralField k3 = rhs(v + 0.5 * h * k2, mid, mid);
            SpectralField k4 = rhs(v + h * k3, tb, mid);
            v += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
        }
        if (!v.finite()) blow_up("linburgers_solve", i + 1, b);
        traj.times.push_back(b);
        traj.states.push_back(v);
    }
    return traj;
}

SpectralField resolvent(double delta, const SpectralField& v0,
                        const TrajectorySignal& w, const Grid& grid,
                        const TimeGrid& tg) {
    double span = tg.t1 - tg.t0;
    if (delta < tg.t0 - 1e-12 * span || delta > tg.t1 + 1e-12 * span)
        throw ConfigError("resolvent: start time outside the time grid");
    if (delta >= tg.t1 - 1e-12 * span) return v0;
    int n = std::max(1, static_cast<int>(std::lround(tg.n_steps * (tg.t1 - delta) / span)));
    TimeGrid sub(delta, tg.t1, n);
    return linburgers_solve(v0, &w, nullptr, grid, sub).final_state();
}

std::vector<std::pair<double, double>> remainder_trajectory(
    const Trajectory& u, const Trajectory& v, const TrajectorySignal& w, double tau,
    double s) {
    if (!(tau > 0.0)) throw ConfigError("remainder_trajectory: tau must be > 0");
    double hu = u.times.back(), hv = v.times.back();
    if (std::abs(hu - tau * hv) > 1e-9 * std::max(1.0, std::abs(hu)))
        throw ConfigError("remainder_trajectory: horizons differ (u must span tau * v)");

    std::vector<std::pair<double, double>> out;
    out.reserve(u.times.size());
    for (size_t i = 0; i < u.times.size(); ++i) {
        double t = u.times[i];
        double ts = t / tau;
        SpectralField r = u.states[i] - v.interpolate(ts);
        TrigPoly wt = w.value_at(ts);
        if (!wt.is_zero()) r -= from_trigpoly(tp_scale(1.0 / tau, wt), u.grid);
        out.emplace_back(t, sobolev_norm(r, s));
    }
    return out;
}

} // namespace hnkdv
