#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "hnkdv/trig_poly.hpp"

namespace hnkdv::testing {

// Pointwise sampling oracle: max |p(x_i) - f(x_i)| over n uniform points.
// n should exceed twice the combined degree of whatever identity is probed.
inline double sample_max_diff(const TrigPoly& p, const std::function<double(double)>& f,
                              int n = 101) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = 2.0 * std::numbers::pi * i / n;
        m = std::max(m, std::abs(p.eval(x) - f(x)));
    }
    return m;
}

inline double max_coeff_diff(const TrigPoly& p, const TrigPoly& q) {
    double m = std::abs(p.constant() - q.constant());
    auto scan = [&](const std::map<int, double>& a, const TrigPoly& other, bool sin_part) {
        for (const auto& [l, c] : a) {
            double oc = sin_part ? other.sin_coeff(l) : other.cos_coeff(l);
            m = std::max(m, std::abs(c - oc));
        }
    };
    scan(p.sin_coeffs(), q, true);
    scan(p.cos_coeffs(), q, false);
    scan(q.sin_coeffs(), p, true);
    scan(q.cos_coeffs(), p, false);
    return m;
}

inline TrigPoly random_poly(std::mt19937_64& rng, int max_mode, bool with_constant = false) {
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    std::uniform_int_distribution<int> pick(0, 2);
    TrigPoly p;
    if (with_constant) p.add_constant(coeff(rng));
    for (int l = 1; l <= max_mode; ++l) {
        if (pick(rng)) p.add_sin(l, coeff(rng));
        if (pick(rng)) p.add_cos(l, coeff(rng));
    }
    return p;
}

} // namespace hnkdv::testing
