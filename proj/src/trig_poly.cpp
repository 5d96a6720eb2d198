#include "hnkdv/trig_poly.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hnkdv {

namespace {

void check_mode(int mode) {
    if (mode < 1) throw std::invalid_argument("TrigPoly: mode index must be >= 1");
}

void acc(std::map<int, double>& m, int mode, double v) {
    auto it = m.find(mode);
    if (it == m.end()) {
        if (std::abs(v) > kCoeffDropTol) m.emplace(mode, v);
        return;
    }
    it->second += v;
    if (std::abs(it->second) <= kCoeffDropTol) m.erase(it);
}

// l^(2j+1) computed by repeated multiplication; exact in double for the
// mode/order ranges in use (stays well below 2^53).
double odd_power(int l, int j) {
    double r = 1.0;
    for (int i = 0; i < 2 * j + 1; ++i) r *= l;
    return r;
}

} // namespace

TrigPoly::TrigPoly(double constant) { set_constant(constant); }

TrigPoly TrigPoly::sine(int mode, double coeff) {
    TrigPoly p;
    p.add_sin(mode, coeff);
    return p;
}

TrigPoly TrigPoly::cosine(int mode, double coeff) {
    TrigPoly p;
    p.add_cos(mode, coeff);
    return p;
}

double TrigPoly::sin_coeff(int mode) const {
    auto it = sin_.find(mode);
    return it == sin_.end() ? 0.0 : it->second;
}

double TrigPoly::cos_coeff(int mode) const {
    auto it = cos_.find(mode);
    return it == cos_.end() ? 0.0 : it->second;
}

void TrigPoly::set_constant(double v) { const_ = std::abs(v) <= kCoeffDropTol ? 0.0 : v; }

void TrigPoly::add_constant(double v) { set_constant(const_ + v); }

void TrigPoly::add_sin(int mode, double v) {
    check_mode(mode);
    acc(sin_, mode, v);
}

void TrigPoly::add_cos(int mode, double v) {
    check_mode(mode);
    acc(cos_, mode, v);
}

void TrigPoly::add_sin_signed(int mode, double v) {
    if (mode == 0) return;
    if (mode < 0) add_sin(-mode, -v);
    else add_sin(mode, v);
}

void TrigPoly::add_cos_signed(int mode, double v) {
    if (mode == 0) add_constant(v);
    else add_cos(std::abs(mode), v);
}

int TrigPoly::degree() const {
    int d = 0;
    if (!sin_.empty()) d = std::max(d, sin_.rbegin()->first);
    if (!cos_.empty()) d = std::max(d, cos_.rbegin()->first);
    return d;
}

bool TrigPoly::is_zero() const { return const_ == 0.0 && sin_.empty() && cos_.empty(); }

std::set<int> TrigPoly::modes() const {
    std::set<int> m;
    for (const auto& [l, c] : sin_) { (void)c; m.insert(l); }
    for (const auto& [l, c] : cos_) { (void)c; m.insert(l); }
    return m;
}

double TrigPoly::eval(double x) const {
    double v = const_;
    for (const auto& [l, a] : sin_) v += a * std::sin(l * x);
    for (const auto& [l, b] : cos_) v += b * std::cos(l * x);
    return v;
}

double TrigPoly::l2_inner(const TrigPoly& q) const {
    constexpr double pi = std::numbers::pi;
    double s = 2.0 * pi * const_ * q.const_;
    for (const auto& [l, a] : sin_) s += pi * a * q.sin_coeff(l);
    for (const auto& [l, b] : cos_) s += pi * b * q.cos_coeff(l);
    return s;
}

double TrigPoly::l2_norm() const { return std::sqrt(l2_inner(*this)); }

bool TrigPoly::operator==(const TrigPoly& q) const {
    return const_ == q.const_ && sin_ == q.sin_ && cos_ == q.cos_;
}

TrigPoly tp_combine(double alpha, const TrigPoly& p, double beta, const TrigPoly& q) {
    TrigPoly r;
    r.add_constant(alpha * p.constant() + beta * q.constant());
    for (const auto& [l, a] : p.sin_) r.add_sin(l, alpha * a);
    for (const auto& [l, b] : p.cos_) r.add_cos(l, alpha * b);
    for (const auto& [l, a] : q.sin_) r.add_sin(l, beta * a);
    for (const auto& [l, b] : q.cos_) r.add_cos(l, beta * b);
    return r;
}

TrigPoly tp_derivative(const TrigPoly& p) {
    TrigPoly r;
    for (const auto& [l, a] : p.sin_coeffs()) r.add_cos(l, a * l);
    for (const auto& [l, b] : p.cos_coeffs()) r.add_sin(l, -b * l);
    return r;
}

TrigPoly tp_product(const TrigPoly& p, const TrigPoly& q) {
    TrigPoly r;
    r.add_constant(p.constant() * q.constant());
    for (const auto& [l, a] : q.sin_coeffs()) r.add_sin(l, p.constant() * a);
    for (const auto& [l, b] : q.cos_coeffs()) r.add_cos(l, p.constant() * b);
    for (const auto& [l, a] : p.sin_coeffs()) r.add_sin(l, q.constant() * a);
    for (const auto& [l, b] : p.cos_coeffs()) r.add_cos(l, q.constant() * b);
    // sin a sin b = (cos(a-b) - cos(a+b))/2
    for (const auto& [la, aa] : p.sin_coeffs())
        for (const auto& [lb, ab] : q.sin_coeffs()) {
            double c = 0.5 * aa * ab;
            r.add_cos_signed(la - lb, c);
            r.add_cos_signed(la + lb, -c);
        }
    // sin a cos b = (sin(a+b) + sin(a-b))/2
    for (const auto& [la, aa] : p.sin_coeffs())
        for (const auto& [lb, bb] : q.cos_coeffs()) {
            double c = 0.5 * aa * bb;
            r.add_sin_signed(la + lb, c);
            r.add_sin_signed(la - lb, c);
        }
    for (const auto& [la, ba] : p.cos_coeffs())
        for (const auto& [lb, ab] : q.sin_coeffs()) {
            double c = 0.5 * ba * ab;
            r.add_sin_signed(lb + la, c);
            r.add_sin_signed(lb - la, c);
        }
    // cos a cos b = (cos(a-b) + cos(a+b))/2
    for (const auto& [la, ba] : p.cos_coeffs())
        for (const auto& [lb, bb] : q.cos_coeffs()) {
            double c = 0.5 * ba * bb;
            r.add_cos_signed(la - lb, c);
            r.add_cos_signed(la + lb, c);
        }
    return r;
}

TrigPoly q_bilinear(const TrigPoly& v, const TrigPoly& w) {
    return tp_derivative(tp_product(v, w));
}

TrigPoly b_nonlinear(const TrigPoly& u) {
    return tp_scale(0.5, q_bilinear(u, u));
}

TrigPoly lj_apply(const TrigPoly& p, int j) {
    if (j < 1) throw std::invalid_argument("lj_apply: dispersion order j must be >= 1");
    TrigPoly r;
    for (const auto& [l, a] : p.sin_coeffs()) r.add_cos(l, -odd_power(l, j) * a);
    for (const auto& [l, b] : p.cos_coeffs()) r.add_sin(l, odd_power(l, j) * b);
    return r;
}

} // namespace hnkdv
