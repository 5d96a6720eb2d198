#pragma once

#include <map>
#include <set>
#include <vector>

namespace hnkdv {

// Coefficients with magnitude at or below this are dropped when a TrigPoly
// is put in canonical form.
inline constexpr double kCoeffDropTol = 1e-13;

// Real trigonometric polynomial on the torus [0, 2*pi):
//
//   p(x) = c + sum_{l>=1} a_l sin(l x) + b_l cos(l x)
//
// Always held canonical: only modes with a coefficient above kCoeffDropTol
// are stored.  Mode indices are strictly positive.
class TrigPoly {
public:
    TrigPoly() = default;
    explicit TrigPoly(double constant);

    static TrigPoly sine(int mode, double coeff = 1.0);
    static TrigPoly cosine(int mode, double coeff = 1.0);

    double constant() const { return const_; }
    double sin_coeff(int mode) const;
    double cos_coeff(int mode) const;
    const std::map<int, double>& sin_coeffs() const { return sin_; }
    const std::map<int, double>& cos_coeffs() const { return cos_; }

    void set_constant(double v);
    void add_constant(double v);
    void add_sin(int mode, double v);
    void add_cos(int mode, double v);
    // Accumulate coeff * sin(m x) / coeff * cos(m x) for any integer m,
    // folding sin(-m x) = -sin(m x), cos(-m x) = cos(m x), sin(0) = 0,
    // cos(0) = 1.
    void add_sin_signed(int mode, double v);
    void add_cos_signed(int mode, double v);

    int degree() const;        // largest mode present; 0 for constants
    bool is_zero() const;
    std::set<int> modes() const;

    double eval(double x) const;

    double l2_inner(const TrigPoly& q) const;  // integral over [0, 2*pi)
    double l2_norm() const;

    bool operator==(const TrigPoly& q) const;

private:
    double const_ = 0.0;
    std::map<int, double> sin_, cos_;   // mode -> coefficient
    friend TrigPoly tp_combine(double, const TrigPoly&, double, const TrigPoly&);
};

// alpha*p + beta*q
TrigPoly tp_combine(double alpha, const TrigPoly& p, double beta, const TrigPoly& q);
inline TrigPoly tp_scale(double alpha, const TrigPoly& p) {
    return tp_combine(alpha, p, 0.0, TrigPoly{});
}
inline TrigPoly tp_add(const TrigPoly& p, const TrigPoly& q) {
    return tp_combine(1.0, p, 1.0, q);
}

TrigPoly tp_derivative(const TrigPoly& p);

// Exact pointwise product via product-to-sum identities.
TrigPoly tp_product(const TrigPoly& p, const TrigPoly& q);

// Q(v, w) = d/dx (v w), the symmetrized transport form.
TrigPoly q_bilinear(const TrigPoly& v, const TrigPoly& w);

// B(u) = (1/2) d/dx (u^2) = (1/2) Q(u, u).
TrigPoly b_nonlinear(const TrigPoly& u);

// L_j = (-1)^(j+1) d^(2j+1)/dx^(2j+1); acts mode-wise:
//   sin(l x) -> -l^(2j+1) cos(l x),   cos(l x) -> +l^(2j+1) sin(l x).
TrigPoly lj_apply(const TrigPoly& p, int j);

inline double tp_distance(const TrigPoly& p, const TrigPoly& q) {
    return tp_combine(1.0, p, -1.0, q).l2_norm();
}

} // namespace hnkdv
