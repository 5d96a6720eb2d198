#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "hnkdv/spectral.hpp"
#include "hnkdv/trajectory_signal.hpp"

namespace hnkdv {

struct TimeGrid {
    double t0, t1;
    int n_steps;

    TimeGrid(double t0_, double t1_, int n_steps_);
    double dt() const { return (t1 - t0) / n_steps; }
    double time(int i) const { return t0 + (t1 - t0) * i / n_steps; }
};

// States recorded on the base time grid (substep refinement around forcing
// jumps is internal to the solvers).
struct Trajectory {
    Grid grid;
    std::vector<double> times;
    std::vector<SpectralField> states;

    explicit Trajectory(const Grid& g) : grid(g) {}
    const SpectralField& final_state() const { return states.back(); }
    // Cubic Lagrange interpolation in time; exact at stored times.
    SpectralField interpolate(double t) const;
};

// e^{i k^(2j+1) dt}.  The phase product is carried in double-double and
// reduced mod 2*pi, so the modulus is 1 to rounding for all represented k.
std::complex<double> dispersion_multiplier(int j, int k, double dt);

// d/dt u + L_j u + (1/2) d/dx u^2 = eta, integrating-factor RK4 in spectral
// space.  eta == nullptr means no forcing.  Throws NumericalError with the
// step index if the state leaves the finite range.
Trajectory hnkdv_solve(const SpectralField& u0, const TrajectorySignal* eta, int j,
                       const Grid& grid, const TimeGrid& tg,
                       bool nonlinearity_on = true);

// d/dt v + d/dx(w v) = g, classical RK4 (no dispersion, non-stiff).
Trajectory linburgers_solve(const SpectralField& v0, const TrajectorySignal* w,
                            const TrajectorySignal* g, const Grid& grid,
                            const TimeGrid& tg);

// R(t1, delta) v0 for the homogeneous linearized equation.
SpectralField resolvent(double delta, const SpectralField& v0,
                        const TrajectorySignal& w, const Grid& grid,
                        const TimeGrid& tg);

// r(t) = u(t) - v(t/tau) - (1/tau) w(t/tau) evaluated at u's stored times;
// returns (t, ||r||_{H^s}) pairs.  u must span tau times v's horizon.
std::vector<std::pair<double, double>> remainder_trajectory(
    const Trajectory& u, const Trajectory& v, const TrajectorySignal& w, double tau,
    double s);

} // namespace hnkdv
