#include "hnkdv/observable.hpp"

#include <algorithm>
#include <cmath>

#include "hnkdv/errors.hpp"

namespace hnkdv {

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

PiecewisePoly StepFunction::profile() const {
    std::vector<double> breaks;
    breaks.reserve(breakpoints.size() + 2);
    breaks.push_back(0.0);
    breaks.insert(breaks.end(), breakpoints.begin(), breakpoints.end());
    breaks.push_back(horizon);
    return PiecewisePoly::steps(std::move(breaks), values);
}

double StepFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

StepFunction observable_phi(int prime, int depth, double horizon) {
    if (!is_prime(prime)) throw ConfigError("observable_phi: base must be prime");
    if (depth < 1) throw ConfigError("observable_phi: depth must be >= 1");
    if (!(horizon > 0.0)) throw ConfigError("observable_phi: horizon must be positive");

    StepFunction sf;
    sf.prime = prime;
    sf.depth = depth;
    sf.horizon = horizon;

    // Jump locations m/p^n (p not dividing m) as exact rationals over p^depth.
    long pd = 1;
    for (int n = 0; n < depth; ++n) {
        if (pd > 2'000'000'000L / prime)
            throw ConfigError("observable_phi: prime^depth too large");
        pd *= prime;
    }
    std::vector<long> nums;   // numerators over denominator pd
    long pn = 1;
    for (int n = 1; n <= depth; ++n) {
        pn *= prime;
        long stride = pd / pn;
        for (long m = 1; m < pn; ++m)
            if (m % prime != 0) nums.push_back(m * stride);
    }
    std::sort(nums.begin(), nums.end());
    nums.erase(std::unique(nums.begin(), nums.end()), nums.end());

    sf.breakpoints.reserve(nums.size());
    for (long v : nums)
        sf.breakpoints.push_back(horizon * static_cast<double>(v) / static_cast<double>(pd));

    // Cell values from the defining sum, evaluated at exact rational cell
    // midpoints (denominator 2 p^depth) so the floor() is unambiguous.
    auto phi_at = [&](long num2) {   // t/T = num2 / (2 pd)
        double v = 0.0;
        double w = 1.0;
        long q = 1;
        for (int n = 1; n <= depth; ++n) {
            q *= prime;
            w /= prime;
            long cell = (num2 * q) / (2 * pd);
            if (cell % 2 == 0) v += w;
        }
        return v;
    };
    std::vector<long> edges;
    edges.push_back(0);
    edges.insert(edges.end(), nums.begin(), nums.end());
    edges.push_back(pd);
    sf.values.reserve(edges.size() - 1);
    for (size_t i = 0; i + 1 < edges.size(); ++i)
        sf.values.push_back(phi_at(edges[i] + edges[i + 1]));
    return sf;
}

PiecewisePoly ThetaWindow::profile() const {
    return PiecewisePoly::poly(0.0, horizon, {1.0, -1.0 / horizon});
}

ThetaWindow theta_window(double horizon) {
    if (!(horizon > 0.0)) throw ConfigError("theta_window: horizon must be positive");
    return ThetaWindow{horizon};
}

CoefficientPair vartheta(const StepFunction& phi, const ThetaWindow& theta) {
    if (std::abs(phi.horizon - theta.horizon) > 1e-12 * std::max(phi.horizon, theta.horizon))
        throw ConfigError("vartheta: mismatched horizons");
    PiecewisePoly integral = phi.profile().antiderivative();
    PiecewisePoly value = pp_mul(theta.profile(), integral);
    // piecewise-polynomial derivative is the exact product rule
    // Theta' int_0^t phi + Theta phi
    PiecewisePoly deriv = value.derivative();
    return {std::move(value), std::move(deriv)};
}

} // namespace hnkdv
