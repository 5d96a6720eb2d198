#pragma once

#include <set>
#include <string>
#include <vector>

#include "hnkdv/trig_poly.hpp"

namespace hnkdv {

inline constexpr double kSpanTol = 1e-10;

// Finite set of forcing levels (strictly positive integers).  The symmetric
// closure {+l, -l} is implied wherever signed frequency sums appear.
struct ModeSet {
    std::set<int> levels;

    explicit ModeSet(std::set<int> ls);
    std::vector<int> sorted() const { return {levels.begin(), levels.end()}; }
};

// True iff gcd of the levels is 1, i.e. signed sums of levels reach every
// integer frequency.
bool is_generator(const ModeSet& J);

// Frequency iterates: J_0 = {+l, -l : l in J}, J_{k+1} = {i + j : i in J_k,
// j in J_0}.  Zero sums are kept.
std::set<int> jk_iterate(const ModeSet& J, int k);

// Ordered list of trig polynomials spanning a subspace, with an internally
// maintained orthonormal frame for projections.  Elements stay linearly
// independent: a candidate within tol of the current span is rejected.
class SubspaceBasis {
public:
    explicit SubspaceBasis(double tol = kSpanTol) : tol_(tol) {}

    bool append(const TrigPoly& p);         // true if kept
    int dim() const { return static_cast<int>(elems_.size()); }
    const std::vector<TrigPoly>& elements() const { return elems_; }
    double tol() const { return tol_; }

    // L2 distance from p to the span.
    double distance(const TrigPoly& p) const;
    // Pairwise L2 inner products of the stored elements (cached).
    const std::vector<std::vector<double>>& gram() const;

private:
    double tol_;
    std::vector<TrigPoly> elems_;
    std::vector<TrigPoly> ortho_;   // orthonormal frame for the same span
    mutable std::vector<std::vector<double>> gram_;
    mutable bool gram_dirty_ = true;
};

// Relative membership test: distance(p, span) <= tol * (1 + ||p||_L2).
bool membership(const TrigPoly& p, const SubspaceBasis& basis, double tol = kSpanTol);

// H_0 = span{sin(l x), cos(l x) : l in J}, elements ordered sin-then-cos by
// ascending level.
SubspaceBasis h0_subspace(const ModeSet& J, double tol = kSpanTol);

// H_k = H_{k-1} + span{ Q(psi, phi) : psi in H_{k-1}, phi in H_0 }.
SubspaceBasis hk_subspace(const ModeSet& J, int k, double tol = kSpanTol);

struct SaturationRow {
    int k = 0;
    int dim = 0;
    std::set<int> modes_present;    // modes appearing in some basis element
    std::set<int> modes_covered;    // modes m with sin(mx) and cos(mx) in span
};

struct SaturationReport {
    std::vector<int> levels;
    int cutoff = 0;
    int k_max = 0;
    bool generator = false;
    std::vector<SaturationRow> rows;
    int first_covering_k = -1;      // least k with {1..cutoff} covered; -1 if none
};

// Tabulates dim H_k and covered modes for k = 0..k_max (stopping early once
// the cutoff range is covered), and cross-checks against is_generator.
SaturationReport saturation_report(const ModeSet& J, int cutoff, int k_max,
                                   double tol = kSpanTol);

} // namespace hnkdv
