#include "hnkdv/piecewise_poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hnkdv {

namespace {

double horner(const std::vector<double>& c, double t) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
    return v;
}

std::vector<double> conv(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

void trim(std::vector<double>& c) {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    if (c.empty()) c.push_back(0.0);
}

bool near(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

void PiecewisePoly::validate() const {
    if (breaks_.size() < 2) throw std::invalid_argument("PiecewisePoly: need >= 2 breakpoints");
    if (pieces_.size() + 1 != breaks_.size())
        throw std::invalid_argument("PiecewisePoly: piece/breakpoint count mismatch");
    for (size_t i = 1; i < breaks_.size(); ++i)
        if (!(breaks_[i] > breaks_[i - 1]))
            throw std::invalid_argument("PiecewisePoly: breakpoints must increase");
}

PiecewisePoly PiecewisePoly::poly(double a, double b, std::vector<double> coeffs) {
    PiecewisePoly p;
    p.breaks_ = {a, b};
    trim(coeffs);
    p.pieces_ = {std::move(coeffs)};
    p.validate();
    return p;
}

PiecewisePoly PiecewisePoly::constant(double a, double b, double value) {
    return poly(a, b, {value});
}

PiecewisePoly PiecewisePoly::steps(std::vector<double> breaks, std::vector<double> values) {
    PiecewisePoly p;
    p.breaks_ = std::move(breaks);
    p.pieces_.reserve(values.size());
    for (double v : values) p.pieces_.push_back({v});
    p.validate();
    return p;
}

int PiecewisePoly::locate(double t) const {
    if (t <= breaks_.front()) return 0;
    if (t >= breaks_.back()) return n_pieces() - 1;
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    return static_cast<int>(it - breaks_.begin()) - 1;
}

double PiecewisePoly::eval(double t) const { return horner(pieces_[locate(t)], t); }

double PiecewisePoly::eval_within(double t, double locator) const {
    return horner(pieces_[locate(locator)], t);
}

double PiecewisePoly::eval_derivative(double t) const {
    const auto& c = pieces_[locate(t)];
    double v = 0.0;
    for (size_t m = c.size() - 1; m >= 1; --m) v = v * t + c[m] * static_cast<double>(m);
    return v;
}

PiecewisePoly PiecewisePoly::scaled(double alpha) const {
    PiecewisePoly r = *this;
    for (auto& c : r.pieces_) {
        for (double& x : c) x *= alpha;
        trim(c);
    }
    return r;
}

PiecewisePoly PiecewisePoly::derivative() const {
    PiecewisePoly r;
    r.breaks_ = breaks_;
    r.pieces_.reserve(pieces_.size());
    for (const auto& c : pieces_) {
        std::vector<double> d;
        for (size_t m = 1; m < c.size(); ++m) d.push_back(c[m] * static_cast<double>(m));
        trim(d);
        r.pieces_.push_back(std::move(d));
    }
    return r;
}

PiecewisePoly PiecewisePoly::antiderivative() const {
    PiecewisePoly r;
    r.breaks_ = breaks_;
    double offset = 0.0;   // running value at the left edge of the piece
    for (int i = 0; i < n_pieces(); ++i) {
        std::vector<double> c(pieces_[i].size() + 1, 0.0);
        for (size_t m = 0; m < pieces_[i].size(); ++m)
            c[m + 1] = pieces_[i][m] / static_cast<double>(m + 1);
        double left = breaks_[i];
        c[0] = offset - horner(c, left);
        offset = horner(c, breaks_[i + 1]);
        trim(c);
        r.pieces_.push_back(std::move(c));
    }
    return r;
}

PiecewisePoly PiecewisePoly::compose_affine(double alpha, double beta) const {
    if (!(alpha > 0.0))
        throw std::invalid_argument("PiecewisePoly::compose_affine: alpha must be > 0");
    PiecewisePoly r;
    r.breaks_.reserve(breaks_.size());
    for (double t : breaks_) r.breaks_.push_back((t - beta) / alpha);
    r.pieces_.reserve(pieces_.size());
    for (const auto& c : pieces_) {
        // expand sum_m c_m (alpha t + beta)^m
        std::vector<double> out{0.0}, pw{1.0};
        for (size_t m = 0; m < c.size(); ++m) {
            if (out.size() < pw.size()) out.resize(pw.size(), 0.0);
            for (size_t i = 0; i < pw.size(); ++i) out[i] += c[m] * pw[i];
            pw = conv(pw, {beta, alpha});
        }
        trim(out);
        r.pieces_.push_back(std::move(out));
    }
    r.validate();
    return r;
}

bool PiecewisePoly::is_zero(double tol) const {
    for (const auto& c : pieces_)
        for (double x : c)
            if (std::abs(x) > tol) return false;
    return true;
}

int PiecewisePoly::max_degree() const {
    size_t d = 1;
    for (const auto& c : pieces_) d = std::max(d, c.size());
    return static_cast<int>(d) - 1;
}

std::vector<double> merge_breakpoints(const std::vector<double>& a,
                                      const std::vector<double>& b) {
    std::vector<double> m;
    m.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
    std::vector<double> out;
    for (double t : m)
        if (out.empty() || !near(out.back(), t)) out.push_back(t);
    return out;
}

PiecewisePoly pp_add(const PiecewisePoly& p, const PiecewisePoly& q) {
    std::vector<double> breaks = merge_breakpoints(p.breakpoints(), q.breakpoints());
    PiecewisePoly r;
    r.breaks_ = breaks;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        const auto& a = p.pieces_[p.locate(mid)];
        const auto& b = q.pieces_[q.locate(mid)];
        std::vector<double> c(std::max(a.size(), b.size()), 0.0);
        for (size_t m = 0; m < a.size(); ++m) c[m] += a[m];
        for (size_t m = 0; m < b.size(); ++m) c[m] += b[m];
        trim(c);
        r.pieces_.push_back(std::move(c));
    }
    r.validate();
    return r;
}

PiecewisePoly pp_mul(const PiecewisePoly& p, const PiecewisePoly& q) {
    std::vector<double> breaks = merge_breakpoints(p.breakpoints(), q.breakpoints());
    PiecewisePoly r;
    r.breaks_ = breaks;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        double mid = 0.5 * (breaks[i] + breaks[i + 1]);
        std::vector<double> c = conv(p.pieces_[p.locate(mid)], q.pieces_[q.locate(mid)]);
        trim(c);
        r.pieces_.push_back(std::move(c));
    }
    r.validate();
    return r;
}

} // namespace hnkdv
