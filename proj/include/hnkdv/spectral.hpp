#pragma once

#include <complex>
#include <vector>

#include "hnkdv/trig_poly.hpp"

struct fftw_plan_s;

namespace hnkdv {

// Collocation setup on the 2*pi torus: N retained Fourier modes, M >= 2N+2
// physical points (so products of retained modes can be formed alias-free
// after the 2/3 cutoff).
struct Grid {
    int n_modes;    // N
    int n_points;   // M

    Grid(int n_modes_, int n_points_);
    double point(int m) const;
    // 2/3-rule cutoff: modes above this are zeroed before/after products.
    int dealias_cutoff() const { return (2 * n_modes) / 3; }
};

// Hermitian half-spectrum c_k, k = 0..N, of a real field; c_{-k} = conj c_k.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(int n_modes) : c_(n_modes + 1) {}

    int n_modes() const { return static_cast<int>(c_.size()) - 1; }
    std::complex<double>& operator[](int k) { return c_[k]; }
    const std::complex<double>& operator[](int k) const { return c_[k]; }

    bool finite() const;
    double max_abs() const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double a);

private:
    std::vector<std::complex<double>> c_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField f);

// || f ||_{H^s} = sqrt( sum_{|k|<=N} (1+k^2)^s 2 pi |c_k|^2 ).
double sobolev_norm(const SpectralField& f, double s);

// Zeroes modes above the grid's 2/3 cutoff.
SpectralField dealias(const SpectralField& f, const Grid& g);

// c_l = (b_l - i a_l)/2 from sin/cos coefficients; c_0 = constant term.
// Throws ConfigError if the polynomial degree exceeds the grid.
SpectralField from_trigpoly(const TrigPoly& p, const Grid& g);
TrigPoly to_trigpoly(const SpectralField& f);

// FFTW-backed transforms for one grid.  Each instance owns its plans and
// buffers and must not be shared across threads; construction/destruction
// serialize on a global planning lock.
class SpectralTransform {
public:
    explicit SpectralTransform(const Grid& g);
    ~SpectralTransform();
    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;

    const Grid& grid() const { return grid_; }

    // Collocation DFT with forward 1/M normalization, truncated to N modes.
    SpectralField to_spectral(const std::vector<double>& samples);
    std::vector<double> to_physical(const SpectralField& f);

private:
    Grid grid_;
    double* rbuf_ = nullptr;
    void* cbuf_ = nullptr;
    fftw_plan_s* fwd_ = nullptr;
    fftw_plan_s* bwd_ = nullptr;
};

} // namespace hnkdv
