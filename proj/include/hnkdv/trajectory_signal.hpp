#pragma once

#include <compare>
#include <map>
#include <optional>
#include <vector>

#include "hnkdv/observable.hpp"
#include "hnkdv/piecewise_poly.hpp"
#include "hnkdv/subspace.hpp"
#include "hnkdv/trig_poly.hpp"

namespace hnkdv {

enum class Channel { Sin, Cos };

struct ChannelKey {
    int mode;
    Channel channel;
    auto operator<=>(const ChannelKey&) const = default;
};

// Finite sum of separated terms
//
//   s(t, x) = sum_{(l, c)} theta_{l,c}(t) e_{l,c}(x),   e = sin(l x) or cos(l x),
//
// with exact piecewise-polynomial time coefficients.  Houses the reference
// trajectory w, its Burgers control xi, synthesized controls g, and the
// rescaled control.  Immutable after construction in practice; evaluation
// is pure.
class TrajectorySignal {
public:
    TrajectorySignal() : TrajectorySignal(0.0, 1.0) {}
    TrajectorySignal(double t_begin, double t_end);

    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }

    void add_term(int mode, Channel channel, const PiecewisePoly& profile);
    const std::map<ChannelKey, PiecewisePoly>& channels() const { return channels_; }
    bool empty() const { return channels_.empty(); }

    TrigPoly value_at(double t) const;
    TrigPoly derivative_at(double t) const;
    // Values/derivatives taken on the smooth piece containing `locator`;
    // steppers use this to stay one-sided at jump points.
    TrigPoly value_within(double t, double locator) const;

    // Union of all channel breakpoints (deduplicated, increasing).
    std::vector<double> time_breakpoints() const;

    TrajectorySignal scaled(double alpha) const;
    // s(t / tau) on [tau * t_begin, tau * t_end].
    TrajectorySignal time_rescaled(double tau) const;
    // Applies the dispersion operator mode-wise to every value.
    TrajectorySignal lj_applied(int j) const;

    // Construction metadata for channels built from the observable family.
    struct ChannelMeta {
        int prime = 0;
        int depth = 0;
        double amplitude = 1.0;
    };
    std::map<ChannelKey, ChannelMeta> meta;

private:
    double t_begin_, t_end_;
    std::map<ChannelKey, PiecewisePoly> channels_;
};

TrajectorySignal signal_add(const TrajectorySignal& a, const TrajectorySignal& b);

// Reference trajectory: each channel (l, sin), (l, cos) for l in J carries
// amplitude * vartheta built from a distinct prime's square-wave profile,
// primes assigned in order 2, 3, 5, 7, ... by (level, sin-then-cos).
TrajectorySignal build_w(const ModeSet& J, double horizon, int depth,
                         double amplitude = 1.0);

// Constant-coefficient comparison trajectory: channel (l, c) holds the time
// average of the observable-family coefficient it replaces.
TrajectorySignal build_w_flat(const ModeSet& J, double horizon, int depth,
                              double amplitude = 1.0);

// xi = dw/dt + B(w), expanded channel-by-channel into exact profiles.
TrajectorySignal build_xi(const TrajectorySignal& w);

struct A1Clause {
    bool pass = true;
    double worst = 0.0;        // clause-specific residual magnitude
    double offending_t = 0.0;  // where the worst value occurred
};

struct A1Report {
    A1Clause boundary;          // (i)  ||w(0)|| = ||w(T)|| = 0
    A1Clause dispersion_range;  // (ii) L_j w(t) in H_0
    A1Clause control_range;     // (iii) xi(t) in H_1
    A1Clause burgers_residual;  // (iv) ||w' + B(w) - xi||_L2 <= tol
    int samples = 0;
    double tol = 0.0;
    bool pass() const {
        return boundary.pass && dispersion_range.pass && control_range.pass &&
               burgers_residual.pass;
    }
};

// The level set J is read off w's channels; an empty w passes trivially.
A1Report verify_a1(const TrajectorySignal& w, const TrajectorySignal& xi,
                   int j, int samples, double tol);

} // namespace hnkdv
