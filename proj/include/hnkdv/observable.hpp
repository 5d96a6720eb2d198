#pragma once

#include <vector>

#include "hnkdv/piecewise_poly.hpp"

namespace hnkdv {

// Nested square-wave profile attached to one control channel:
//
//   phi(t) = sum_{n=1}^{depth} p^{-n} sigma_n(t),
//   sigma_n(t) = 1 if floor(p^n t / T) is even, else 0,
//
// for a prime base p.  Its jump set is exactly { m T / p^n : 1 <= n <= depth,
// p does not divide m } intersected with (0, T); distinct primes give
// disjoint jump sets, which is what makes a family of these profiles
// jointly observable.
struct StepFunction {
    int prime = 2;
    int depth = 1;
    double horizon = 1.0;
    std::vector<double> breakpoints;  // interior jump locations, increasing
    std::vector<double> values;       // value on each of the breakpoints.size()+1 cells

    PiecewisePoly profile() const;    // piecewise-constant on [0, T]
    double sup_norm() const;          // <= 1/(p-1)
};

// Throws ConfigError unless p is prime, depth >= 1, T > 0.
StepFunction observable_phi(int prime, int depth, double horizon);

bool is_prime(int n);

// Ramp-down window Theta(t) = (T - t)/T: positive on [0, T), zero exactly
// at T, with constant derivative -1/T.
struct ThetaWindow {
    double horizon = 1.0;

    PiecewisePoly profile() const;
    double eval(double t) const { return (horizon - t) / horizon; }
};

ThetaWindow theta_window(double horizon);

// Channel coefficient vartheta(t) = Theta(t) * int_0^t phi and its exact
// derivative Theta' * int_0^t phi + Theta * phi.  Vanishes at both endpoints.
struct CoefficientPair {
    PiecewisePoly value;
    PiecewisePoly derivative;
};

CoefficientPair vartheta(const StepFunction& phi, const ThetaWindow& theta);

} // namespace hnkdv
