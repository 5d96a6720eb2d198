#pragma once

#include <vector>

namespace hnkdv {

// Piecewise polynomial in time on [t_0, t_K], stored as strictly increasing
// breakpoints and one global-coordinate coefficient vector (ascending powers
// of t) per interval [t_i, t_{i+1}).  Global coordinates keep interval
// splitting exact, which the algebra below relies on.
class PiecewisePoly {
public:
    PiecewisePoly() = default;

    // Single polynomial piece on [a, b].
    static PiecewisePoly poly(double a, double b, std::vector<double> coeffs);
    static PiecewisePoly constant(double a, double b, double value);
    // Piecewise constant: values[i] on [breaks[i], breaks[i+1]).
    static PiecewisePoly steps(std::vector<double> breaks, std::vector<double> values);

    int n_pieces() const { return static_cast<int>(pieces_.size()); }
    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<double>& piece(int i) const { return pieces_[i]; }
    double t_begin() const { return breaks_.front(); }
    double t_end() const { return breaks_.back(); }

    // Evaluation; t at a breakpoint uses the right-hand piece (the final
    // breakpoint uses the last piece).
    double eval(double t) const;
    // Evaluates the piece containing `locator` at t; lets steppers take
    // one-sided limits at interior breakpoints.
    double eval_within(double t, double locator) const;
    double eval_derivative(double t) const;

    PiecewisePoly scaled(double alpha) const;
    PiecewisePoly derivative() const;
    // Antiderivative vanishing at t_begin, continuous across breakpoints.
    PiecewisePoly antiderivative() const;
    // p(alpha t + beta) on the preimage interval; alpha must be positive.
    PiecewisePoly compose_affine(double alpha, double beta) const;

    friend PiecewisePoly pp_add(const PiecewisePoly& p, const PiecewisePoly& q);
    friend PiecewisePoly pp_mul(const PiecewisePoly& p, const PiecewisePoly& q);

    bool is_zero(double tol = 0.0) const;
    int max_degree() const;

private:
    std::vector<double> breaks_;              // size K+1
    std::vector<std::vector<double>> pieces_; // size K
    int locate(double t) const;
    void validate() const;
};

PiecewisePoly pp_add(const PiecewisePoly& p, const PiecewisePoly& q);
PiecewisePoly pp_mul(const PiecewisePoly& p, const PiecewisePoly& q);

// Sorted union of two breakpoint lists; near-coincident points (within
// 1e-12 relative) collapse to one.
std::vector<double> merge_breakpoints(const std::vector<double>& a,
                                      const std::vector<double>& b);

} // namespace hnkdv
