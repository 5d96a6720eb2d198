#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "hnkdv/errors.hpp"
#include "hnkdv/observable.hpp"
#include "hnkdv/trajectory_signal.hpp"
#include "hnkdv/trig_poly.hpp"

using namespace hnkdv;

namespace {

// sigma_n as defined: 1 when floor(p^n t / T) is even
double phi_oracle(int p, int depth, double T, double t) {
    double v = 0.0;
    double pn = 1.0;
    for (int n = 1; n <= depth; ++n) {
        pn *= p;
        long long cell = static_cast<long long>(std::floor(pn * t / T));
        v += (cell % 2 == 0 ? 1.0 : 0.0) / pn;
    }
    return v;
}

std::set<long long> jump_grid(const StepFunction& f, long long scale) {
    std::set<long long> out;
    for (double b : f.breakpoints)
        out.insert(static_cast<long long>(std::llround(b * scale)));
    return out;
}

} // namespace

TEST_CASE("primality helper") {
    CHECK_FALSE(is_prime(0));
    CHECK_FALSE(is_prime(1));
    CHECK(is_prime(2));
    CHECK(is_prime(3));
    CHECK_FALSE(is_prime(4));
    CHECK(is_prime(5));
    CHECK_FALSE(is_prime(91));  // 7 * 13
    CHECK(is_prime(97));
}

TEST_CASE("nested square-wave profile: jumps and values") {
    SECTION("base 2, depth 3: jumps are the odd multiples of 2^-n") {
        StepFunction f = observable_phi(2, 3, 1.0);
        REQUIRE(f.breakpoints.size() == 7);
        std::vector<double> expect = {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
        for (size_t i = 0; i < expect.size(); ++i)
            CHECK(f.breakpoints[i] == Catch::Approx(expect[i]).margin(1e-15));
        CHECK(f.values.size() == 8);
        CHECK(f.values[0] == Catch::Approx(0.875).margin(1e-15));  // 1/2+1/4+1/8
        CHECK(f.sup_norm() <= 1.0 + 1e-15);                        // <= 1/(p-1)
        CHECK(f.sup_norm() == Catch::Approx(0.875).margin(1e-15));
    }

    SECTION("base 3, depth 2: multiples of powers of 3 coprime to 3") {
        StepFunction f = observable_phi(3, 2, 1.0);
        REQUIRE(f.breakpoints.size() == 8);
        std::set<long long> grid = jump_grid(f, 9);
        std::set<long long> expect = {1, 2, 3, 4, 5, 6, 7, 8};
        CHECK(grid == expect);  // k/9 for k=1..8 (3 and 6 are the depth-1 jumps)
        CHECK(f.sup_norm() <= 0.5 + 1e-15);  // 1/(3-1)
    }

    SECTION("jump sets of distinct primes are disjoint") {
        StepFunction f2 = observable_phi(2, 3, 1.0);
        StepFunction f3 = observable_phi(3, 3, 1.0);
        StepFunction f5 = observable_phi(5, 2, 1.0);
        // compare on the common grid 2^3 * 3^3 * 5^2 = 5400
        auto g2 = jump_grid(f2, 5400), g3 = jump_grid(f3, 5400),
             g5 = jump_grid(f5, 5400);
        std::vector<long long> i23, i25, i35;
        std::set_intersection(g2.begin(), g2.end(), g3.begin(), g3.end(),
                              std::back_inserter(i23));
        std::set_intersection(g2.begin(), g2.end(), g5.begin(), g5.end(),
                              std::back_inserter(i25));
        std::set_intersection(g3.begin(), g3.end(), g5.begin(), g5.end(),
                              std::back_inserter(i35));
        CHECK(i23.empty());
        CHECK(i25.empty());
        CHECK(i35.empty());
    }

    SECTION("pointwise values match the floor-parity definition") {
        for (auto [p, d] : {std::pair{2, 4}, {3, 3}, {5, 2}, {7, 1}}) {
            StepFunction f = observable_phi(p, d, 1.0);
            PiecewisePoly prof = f.profile();
            for (int i = 0; i < 700; ++i) {
                double t = (i + 0.382) / 700.0;
                REQUIRE(prof.eval(t) ==
                        Catch::Approx(phi_oracle(p, d, 1.0, t)).margin(1e-14));
            }
        }
    }

    SECTION("scaling the horizon scales the jump locations") {
        StepFunction f = observable_phi(2, 2, 2.5);
        REQUIRE(f.breakpoints.size() == 3);
        CHECK(f.breakpoints[0] == Catch::Approx(2.5 * 0.25).margin(1e-14));
        CHECK(f.breakpoints[1] == Catch::Approx(2.5 * 0.5).margin(1e-14));
        CHECK(f.breakpoints[2] == Catch::Approx(2.5 * 0.75).margin(1e-14));
    }

    SECTION("invalid parameters are rejected") {
        CHECK_THROWS_AS(observable_phi(4, 1, 1.0), ConfigError);
        CHECK_THROWS_AS(observable_phi(1, 1, 1.0), ConfigError);
        CHECK_THROWS_AS(observable_phi(2, 0, 1.0), ConfigError);
        CHECK_THROWS_AS(observable_phi(2, 1, 0.0), ConfigError);
        CHECK_THROWS_AS(observable_phi(2, 1, -1.0), ConfigError);
    }
}

TEST_CASE("ramp window and channel coefficient") {
    ThetaWindow th = theta_window(2.0);
    CHECK(th.eval(0.0) == 1.0);
    CHECK(th.eval(2.0) == 0.0);
    CHECK(th.profile().eval(0.5) == Catch::Approx(0.75).margin(1e-15));
    CHECK(th.profile().eval_derivative(1.3) == Catch::Approx(-0.5).margin(1e-15));

    SECTION("vartheta vanishes at both endpoints") {
        for (auto [p, d] : {std::pair{2, 3}, {3, 2}, {5, 1}}) {
            CoefficientPair vt = vartheta(observable_phi(p, d, 1.0), theta_window(1.0));
            CHECK(std::abs(vt.value.eval(0.0)) < 1e-15);
            CHECK(std::abs(vt.value.eval(1.0)) < 1e-15);
        }
    }

    SECTION("frozen midpoint value for the simplest profile") {
        // phi = (1/2) sigma_1 integrates to 1/4 over [0, 1/2]; window gives 1/2
        CoefficientPair vt = vartheta(observable_phi(2, 1, 1.0), theta_window(1.0));
        CHECK(vt.value.eval(0.5) == Catch::Approx(0.125).margin(1e-15));
    }

    SECTION("stored derivative matches finite differences of the value") {
        CoefficientPair vt = vartheta(observable_phi(3, 2, 1.0), theta_window(1.0));
        double h = 1e-6;
        for (int i = 0; i < 40; ++i) {
            double t = 0.02 + 0.96 * (i + 0.3) / 40.0;
            // stay away from jump points of the base-3 profile
            bool near_jump = false;
            for (double b : observable_phi(3, 2, 1.0).breakpoints)
                if (std::abs(t - b) < 10 * h) near_jump = true;
            if (near_jump) continue;
            double fd = (vt.value.eval(t + h) - vt.value.eval(t - h)) / (2 * h);
            REQUIRE(vt.derivative.eval(t) == Catch::Approx(fd).margin(1e-6));
        }
    }

    SECTION("mismatched horizons are rejected") {
        CHECK_THROWS_AS(vartheta(observable_phi(2, 1, 1.0), theta_window(2.0)),
                        ConfigError);
    }
}

TEST_CASE("trajectory signal assembly and evaluation") {
    TrajectorySignal s(0.0, 1.0);
    CHECK(s.empty());
    s.add_term(1, Channel::Sin, PiecewisePoly::constant(0.0, 1.0, 2.0));
    s.add_term(2, Channel::Cos, PiecewisePoly::poly(0.0, 1.0, {0.0, 1.0}));
    CHECK_FALSE(s.empty());

    TrigPoly v = s.value_at(0.5);
    CHECK(v.sin_coeff(1) == Catch::Approx(2.0).margin(1e-15));
    CHECK(v.cos_coeff(2) == Catch::Approx(0.5).margin(1e-15));

    SECTION("terms on the same channel accumulate") {
        s.add_term(1, Channel::Sin, PiecewisePoly::constant(0.0, 1.0, -0.5));
        CHECK(s.value_at(0.9).sin_coeff(1) == Catch::Approx(1.5).margin(1e-15));
    }

    SECTION("derivative_at differentiates the time profiles") {
        TrigPoly d = s.derivative_at(0.3);
        CHECK(d.sin_coeff(1) == Catch::Approx(0.0).margin(1e-15));
        CHECK(d.cos_coeff(2) == Catch::Approx(1.0).margin(1e-15));
    }

    SECTION("scaling acts on every channel") {
        TrigPoly v2 = s.scaled(3.0).value_at(0.5);
        CHECK(v2.sin_coeff(1) == Catch::Approx(6.0).margin(1e-15));
        CHECK(v2.cos_coeff(2) == Catch::Approx(1.5).margin(1e-15));
    }

    SECTION("time rescaling composes the profiles with t/tau") {
        double tau = 0.25;
        TrajectorySignal r = s.time_rescaled(tau);
        CHECK(r.t_end() == Catch::Approx(tau).margin(1e-15));
        TrigPoly rv = r.value_at(0.1);
        TrigPoly sv = s.value_at(0.1 / tau);
        CHECK(tp_distance(rv, sv) < 1e-14);
    }

    SECTION("dispersion application swaps channels with the right signs") {
        // sin(l x) -> -l^(2j+1) cos(l x), cos(l x) -> +l^(2j+1) sin(l x)
        TrajectorySignal lj = s.lj_applied(2);
        TrigPoly lv = lj.value_at(0.5);
        CHECK(lv.cos_coeff(1) == Catch::Approx(-2.0).margin(1e-15));
        CHECK(lv.sin_coeff(2) == Catch::Approx(0.5 * 32.0).margin(1e-14));
        CHECK(lv.sin_coeff(1) == 0.0);
        CHECK(lv.cos_coeff(2) == 0.0);
    }

    SECTION("signals on mismatched intervals cannot be added") {
        TrajectorySignal other(0.0, 2.0);
        other.add_term(1, Channel::Sin, PiecewisePoly::constant(0.0, 2.0, 1.0));
        CHECK_THROWS_AS(signal_add(s, other), std::invalid_argument);
    }

    SECTION("breakpoint union covers every channel") {
        TrajectorySignal t2(0.0, 1.0);
        t2.add_term(1, Channel::Sin,
                    PiecewisePoly::steps({0.0, 0.5, 1.0}, {1.0, 0.0}));
        t2.add_term(1, Channel::Cos,
                    PiecewisePoly::steps({0.0, 0.25, 1.0}, {1.0, 2.0}));
        std::vector<double> bp = t2.time_breakpoints();
        REQUIRE(bp.size() == 4);
        CHECK(bp[1] == Catch::Approx(0.25).margin(1e-15));
        CHECK(bp[2] == Catch::Approx(0.5).margin(1e-15));
    }
}

TEST_CASE("reference trajectory construction") {
    ModeSet J({1});
    double T = 1.0;
    TrajectorySignal w = build_w(J, T, 3, 1.0);

    SECTION("channels and prime assignment follow the pinned order") {
        REQUIRE(w.channels().size() == 2);
        ChannelKey ks{1, Channel::Sin}, kc{1, Channel::Cos};
        REQUIRE(w.meta.count(ks) == 1);
        REQUIRE(w.meta.count(kc) == 1);
        CHECK(w.meta.at(ks).prime == 2);
        CHECK(w.meta.at(kc).prime == 3);
        CHECK(w.meta.at(ks).depth == 3);
    }

    SECTION("two-level set uses the next primes in level order") {
        TrajectorySignal w2 = build_w(ModeSet({1, 2}), T, 2, 1.0);
        CHECK(w2.meta.at({1, Channel::Sin}).prime == 2);
        CHECK(w2.meta.at({1, Channel::Cos}).prime == 3);
        CHECK(w2.meta.at({2, Channel::Sin}).prime == 5);
        CHECK(w2.meta.at({2, Channel::Cos}).prime == 7);
    }

    SECTION("vanishes at both ends of the horizon") {
        CHECK(w.value_at(0.0).l2_norm() < 1e-14);
        CHECK(w.value_at(T).l2_norm() < 1e-14);
    }

    SECTION("amplitude scales the coefficients linearly") {
        TrajectorySignal w3 = build_w(J, T, 3, 2.5);
        TrigPoly a = w.value_at(0.37), b = w3.value_at(0.37);
        CHECK(b.sin_coeff(1) == Catch::Approx(2.5 * a.sin_coeff(1)).margin(1e-14));
        CHECK(b.cos_coeff(1) == Catch::Approx(2.5 * a.cos_coeff(1)).margin(1e-14));
    }

    SECTION("flat comparison trajectory carries the channel time averages") {
        TrajectorySignal wf = build_w_flat(J, T, 3, 1.0);
        REQUIRE(wf.channels().size() == 2);
        // constant in time
        TrigPoly v1 = wf.value_at(0.2), v2 = wf.value_at(0.8);
        CHECK(tp_distance(v1, v2) < 1e-14);
        // equal to the mean of the corresponding observable coefficient
        for (const auto& [key, prof] : w.channels()) {
            double mean = prof.antiderivative().eval(T) / T;
            double flat = key.channel == Channel::Sin
                              ? wf.value_at(0.5).sin_coeff(key.mode)
                              : wf.value_at(0.5).cos_coeff(key.mode);
            CHECK(flat == Catch::Approx(mean).margin(1e-14));
        }
    }
}

TEST_CASE("Burgers control identity xi = dw/dt + B(w)") {
    for (int depth : {1, 2, 3}) {
        ModeSet J({1});
        TrajectorySignal w = build_w(J, 1.0, depth, 1.0);
        TrajectorySignal xi = build_xi(w);
        for (int i = 0; i < 200; ++i) {
            double t = (i + 0.382) / 200.0;
            TrigPoly expect = tp_add(w.derivative_at(t), b_nonlinear(w.value_at(t)));
            REQUIRE(tp_distance(xi.value_at(t), expect) < 1e-12);
        }
    }

    SECTION("xi lives on modes reachable by one bracket") {
        TrajectorySignal xi = build_xi(build_w(ModeSet({1}), 1.0, 2, 1.0));
        for (const auto& [key, prof] : xi.channels()) {
            (void)prof;
            CHECK(key.mode <= 2);
        }
    }

    SECTION("quadratic scaling of the nonlinear part") {
        // with amplitude A, dw/dt scales by A and B(w) by A^2
        TrajectorySignal w1 = build_w(ModeSet({1}), 1.0, 1, 1.0);
        TrajectorySignal w2 = build_w(ModeSet({1}), 1.0, 1, 2.0);
        TrigPoly x1 = build_xi(w1).value_at(0.3);
        TrigPoly x2 = build_xi(w2).value_at(0.3);
        TrigPoly lin = w1.derivative_at(0.3);
        TrigPoly quad = b_nonlinear(w1.value_at(0.3));
        TrigPoly expect = tp_add(tp_scale(2.0, lin), tp_scale(4.0, quad));
        CHECK(tp_distance(x2, expect) < 1e-12);
        CHECK(tp_distance(x1, tp_add(lin, quad)) < 1e-13);
    }
}

TEST_CASE("admissibility verification of the reference trajectory") {
    ModeSet J({1});
    TrajectorySignal w = build_w(J, 1.0, 3, 1.0);
    TrajectorySignal xi = build_xi(w);

    SECTION("canonical trajectory passes all clauses for every dispersion order") {
        for (int j : {1, 2, 3}) {
            A1Report rep = verify_a1(w, xi, j, 100, 1e-10);
            INFO("j = " << j);
            CHECK(rep.boundary.pass);
            CHECK(rep.dispersion_range.pass);
            CHECK(rep.control_range.pass);
            CHECK(rep.burgers_residual.pass);
            CHECK(rep.pass());
            CHECK(rep.samples == 100);
        }
    }

    SECTION("empty trajectory passes vacuously") {
        TrajectorySignal none(0.0, 1.0);
        A1Report rep = verify_a1(none, TrajectorySignal(0.0, 1.0), 1, 50, 1e-10);
        CHECK(rep.pass());
    }

    SECTION("a corrupted control violates the residual clause") {
        TrajectorySignal bad = xi.scaled(1.0);
        bad.add_term(1, Channel::Sin, PiecewisePoly::constant(0.0, 1.0, 0.05));
        A1Report rep = verify_a1(w, bad, 1, 100, 1e-10);
        CHECK_FALSE(rep.burgers_residual.pass);
        CHECK(rep.burgers_residual.worst > 0.01);
    }

    SECTION("a trajectory that does not return to zero fails the boundary clause") {
        TrajectorySignal bad = w.scaled(1.0);
        bad.add_term(1, Channel::Sin, PiecewisePoly::constant(0.0, 1.0, 0.3));
        A1Report rep = verify_a1(bad, xi, 1, 100, 1e-10);
        CHECK_FALSE(rep.boundary.pass);
    }

    SECTION("an out-of-range control fails the range clause") {
        TrajectorySignal bad = xi.scaled(1.0);
        bad.add_term(5, Channel::Cos, PiecewisePoly::constant(0.0, 1.0, 0.2));
        A1Report rep = verify_a1(w, bad, 1, 100, 1e-10);
        CHECK_FALSE(rep.control_range.pass);
    }
}
