#include "hnkdv/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "hnkdv/errors.hpp"

namespace hnkdv {

namespace {
std::mutex& plan_mutex() {
    static std::mutex mu;
    return mu;
}
} // namespace

Grid::Grid(int n_modes_, int n_points_) : n_modes(n_modes_), n_points(n_points_) {
    if (n_modes < 2) throw ConfigError("Grid: need at least 2 modes");
    if (n_points < 2 * n_modes + 2)
        throw ConfigError("Grid: need n_points >= 2*n_modes + 2");
}

double Grid::point(int m) const { return 2.0 * std::numbers::pi * m / n_points; }

bool SpectralField::finite() const {
    for (const auto& z : c_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

double SpectralField::max_abs() const {
    double m = 0.0;
    for (const auto& z : c_) m = std::max(m, std::abs(z));
    return m;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    for (auto& z : c_) z *= a;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double a, SpectralField f) { return f *= a; }

double sobolev_norm(const SpectralField& f, double s) {
    double acc = std::norm(f[0]);   // (1 + 0^2)^s = 1
    for (int k = 1; k <= f.n_modes(); ++k)
        acc += 2.0 * std::pow(1.0 + static_cast<double>(k) * k, s) * std::norm(f[k]);
    return std::sqrt(2.0 * std::numbers::pi * acc);
}

SpectralField dealias(const SpectralField& f, const Grid& g) {
    SpectralField r = f;
    for (int k = g.dealias_cutoff() + 1; k <= f.n_modes(); ++k) r[k] = 0.0;
    return r;
}

SpectralField from_trigpoly(const TrigPoly& p, const Grid& g) {
    if (p.degree() > g.n_modes)
        throw ConfigError("from_trigpoly: polynomial degree exceeds grid modes");
    SpectralField f(g.n_modes);
    f[0] = p.constant();
    for (const auto& [l, a] : p.sin_coeffs()) f[l] += std::complex<double>(0.0, -0.5 * a);
    for (const auto& [l, b] : p.cos_coeffs()) f[l] += std::complex<double>(0.5 * b, 0.0);
    return f;
}

TrigPoly to_trigpoly(const SpectralField& f) {
    TrigPoly p;
    p.add_constant(f[0].real());
    for (int l = 1; l <= f.n_modes(); ++l) {
        p.add_sin(l, -2.0 * f[l].imag());
        p.add_cos(l, 2.0 * f[l].real());
    }
    return p;
}

SpectralTransform::SpectralTransform(const Grid& g) : grid_(g) {
    std::lock_guard<std::mutex> lk(plan_mutex());
    int M = grid_.n_points;
    rbuf_ = fftw_alloc_real(M);
    cbuf_ = fftw_alloc_complex(M / 2 + 1);
    auto* cb = static_cast<fftw_complex*>(cbuf_);
    // FFTW_ESTIMATE keeps planning deterministic and leaves buffers intact
    fwd_ = fftw_plan_dft_r2c_1d(M, rbuf_, cb, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_1d(M, cb, rbuf_, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw NumericalError("SpectralTransform: FFTW planning failed");
}

SpectralTransform::~SpectralTransform() {
    std::lock_guard<std::mutex> lk(plan_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
    if (rbuf_) fftw_free(rbuf_);
    if (cbuf_) fftw_free(cbuf_);
}

SpectralField SpectralTransform::to_spectral(const std::vector<double>& samples) {
    int M = grid_.n_points;
    if (static_cast<int>(samples.size()) != M)
        throw ConfigError("to_spectral: sample count does not match grid");
    for (int m = 0; m < M; ++m) rbuf_[m] = samples[m];
    fftw_execute(fwd_);
    auto* cb = static_cast<fftw_complex*>(cbuf_);
    SpectralField f(grid_.n_modes);
    double inv = 1.0 / M;
    for (int k = 0; k <= grid_.n_modes; ++k)
        f[k] = std::complex<double>(cb[k][0] * inv, cb[k][1] * inv);
    return f;
}

std::vector<double> SpectralTransform::to_physical(const SpectralField& f) {
    if (f.n_modes() != grid_.n_modes)
        throw ConfigError("to_physical: field does not match grid");
    int M = grid_.n_points;
    auto* cb = static_cast<fftw_complex*>(cbuf_);
    for (int k = 0; k <= M / 2; ++k) {
        if (k <= grid_.n_modes) {
            cb[k][0] = f[k].real();
            cb[k][1] = f[k].imag();
        } else {
            cb[k][0] = cb[k][1] = 0.0;
        }
    }
    fftw_execute(bwd_);
    return std::vector<double>(rbuf_, rbuf_ + M);
}

} // namespace hnkdv
