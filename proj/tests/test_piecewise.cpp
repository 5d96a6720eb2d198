#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "hnkdv/piecewise_poly.hpp"

using namespace hnkdv;

namespace {

// pointwise comparison on a uniform grid, with sample points offset by an
// irrational fraction so they never land on breakpoints
double grid_max_diff(const PiecewisePoly& p, const std::function<double(double)>& f,
                     int n = 2000) {
    double a = p.t_begin(), b = p.t_end();
    double worst = 0.0;
    for (int i = 0; i <= n; ++i) {
        double t = a + (b - a) * (i + 0.31830988618) / (n + 1);
        worst = std::max(worst, std::abs(p.eval(t) - f(t)));
    }
    return worst;
}

} // namespace

TEST_CASE("factories, validation, and evaluation conventions") {
    PiecewisePoly p = PiecewisePoly::poly(0.0, 2.0, {1.0, -3.0, 0.5});
    CHECK(p.n_pieces() == 1);
    CHECK(p.t_begin() == 0.0);
    CHECK(p.t_end() == 2.0);
    CHECK(p.eval(0.0) == 1.0);
    CHECK(p.eval(2.0) == Catch::Approx(1.0 - 6.0 + 2.0).margin(1e-15));
    CHECK(p.max_degree() == 2);

    PiecewisePoly c = PiecewisePoly::constant(-1.0, 1.0, 4.25);
    CHECK(c.eval(-0.3) == 4.25);
    CHECK(c.max_degree() == 0);
    CHECK_FALSE(c.is_zero());
    CHECK(PiecewisePoly::constant(0.0, 1.0, 0.0).is_zero());

    PiecewisePoly s = PiecewisePoly::steps({0.0, 1.0, 2.0, 3.0}, {5.0, -1.0, 2.0});
    CHECK(s.n_pieces() == 3);
    SECTION("evaluation at breakpoints is right-continuous") {
        CHECK(s.eval(0.5) == 5.0);
        CHECK(s.eval(1.0) == -1.0);
        CHECK(s.eval(2.0) == 2.0);
        CHECK(s.eval(3.0) == 2.0);  // final breakpoint belongs to the last piece
    }
    SECTION("eval_within takes the piece holding the locator") {
        CHECK(s.eval_within(1.0, 0.5) == 5.0);   // left limit
        CHECK(s.eval_within(1.0, 1.5) == -1.0);  // right limit
        CHECK(s.eval_within(2.0, 2.5) == 2.0);
    }

    CHECK_THROWS_AS(PiecewisePoly::steps({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(PiecewisePoly::steps({0.0, 1.0, 0.5}, {1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PiecewisePoly::poly(1.0, 1.0, {1.0}), std::invalid_argument);
}

TEST_CASE("addition and multiplication match pointwise arithmetic") {
    PiecewisePoly p = PiecewisePoly::poly(0.0, 3.0, {1.0, 2.0, -0.5});
    PiecewisePoly q = PiecewisePoly::steps({0.0, 0.7, 1.9, 3.0}, {2.0, -1.0, 0.5});

    auto pf = [](double t) { return 1.0 + 2.0 * t - 0.5 * t * t; };
    auto qf = [&q](double t) { return q.eval(t); };

    PiecewisePoly sum = pp_add(p, q);
    CHECK(grid_max_diff(sum, [&](double t) { return pf(t) + qf(t); }) < 1e-14);
    CHECK(sum.n_pieces() == 3);

    PiecewisePoly prod = pp_mul(p, q);
    CHECK(grid_max_diff(prod, [&](double t) { return pf(t) * qf(t); }) < 1e-13);
    CHECK(prod.max_degree() == 2);

    SECTION("product of polynomials multiplies degrees") {
        PiecewisePoly a = PiecewisePoly::poly(0.0, 1.0, {0.0, 1.0});       // t
        PiecewisePoly b = PiecewisePoly::poly(0.0, 1.0, {0.0, 0.0, 1.0});  // t^2
        PiecewisePoly ab = pp_mul(a, b);
        CHECK(ab.max_degree() == 3);
        CHECK(ab.eval(0.5) == Catch::Approx(0.125).margin(1e-16));
    }

    SECTION("random cross-checks") {
        std::mt19937_64 rng(20240817);
        std::uniform_real_distribution<double> coeff(-2.0, 2.0);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<double> ca(4), cb(3);
            for (double& v : ca) v = coeff(rng);
            for (double& v : cb) v = coeff(rng);
            PiecewisePoly a = PiecewisePoly::poly(-1.0, 2.0, ca);
            PiecewisePoly b = PiecewisePoly::poly(-1.0, 2.0, cb);
            auto fa = [&](double t) {
                return ca[0] + t * (ca[1] + t * (ca[2] + t * ca[3]));
            };
            auto fb = [&](double t) { return cb[0] + t * (cb[1] + t * cb[2]); };
            CHECK(grid_max_diff(pp_add(a, b), [&](double t) { return fa(t) + fb(t); },
                                400) < 1e-13);
            CHECK(grid_max_diff(pp_mul(a, b), [&](double t) { return fa(t) * fb(t); },
                                400) < 1e-12);
        }
    }
}

TEST_CASE("derivative and antiderivative are exact inverses") {
    PiecewisePoly p = PiecewisePoly::poly(0.5, 2.5, {1.0, -1.0, 3.0, 0.25});

    SECTION("derivative against the closed form") {
        PiecewisePoly d = p.derivative();
        CHECK(grid_max_diff(d, [](double t) { return -1.0 + 6.0 * t + 0.75 * t * t; }) <
              1e-13);
        CHECK(d.max_degree() == 2);
    }

    SECTION("antiderivative vanishes at the left end and derives back") {
        PiecewisePoly F = p.antiderivative();
        CHECK(F.eval(0.5) == 0.0);
        PiecewisePoly back = F.derivative();
        CHECK(grid_max_diff(back, [&p](double t) { return p.eval(t); }) < 1e-12);
    }

    SECTION("antiderivative of steps is continuous and integrates exactly") {
        PiecewisePoly s = PiecewisePoly::steps({0.0, 1.0, 2.0}, {1.0, -1.0});
        PiecewisePoly F = s.antiderivative();
        CHECK(F.eval(1.0) == Catch::Approx(1.0).margin(1e-15));
        CHECK(F.eval(2.0) == Catch::Approx(0.0).margin(1e-15));
        // continuity across the interior breakpoint
        CHECK(F.eval_within(1.0, 0.5) == Catch::Approx(F.eval_within(1.0, 1.5))
                                             .margin(1e-15));
        CHECK(F.eval(1.5) == Catch::Approx(0.5).margin(1e-15));
    }

    SECTION("fundamental theorem on a multi-piece function") {
        PiecewisePoly s =
            PiecewisePoly::steps({0.0, 0.25, 0.5, 1.0}, {2.0, 0.0, -4.0});
        PiecewisePoly tpoly = PiecewisePoly::poly(0.0, 1.0, {0.0, 1.0});
        PiecewisePoly prod = pp_mul(s, tpoly);  // t on each constant cell
        PiecewisePoly F = prod.antiderivative();
        // integral of 2t on [0,.25] = .0625; 0 on [.25,.5]; -4t from .5
        CHECK(F.eval(0.25) == Catch::Approx(0.0625).margin(1e-15));
        CHECK(F.eval(0.5) == Catch::Approx(0.0625).margin(1e-15));
        CHECK(F.eval(1.0) == Catch::Approx(0.0625 - 2.0 * (1.0 - 0.25)).margin(1e-14));
        CHECK(grid_max_diff(F.derivative(), [&prod](double t) { return prod.eval(t); }) <
              1e-13);
    }
}

TEST_CASE("affine composition implements exact time rescaling") {
    PiecewisePoly p = PiecewisePoly::poly(0.0, 1.0, {1.0, 2.0, 1.0});  // (1+t)^2

    SECTION("dilation p(t/tau) lives on the stretched interval") {
        double tau = 0.25;
        PiecewisePoly q = p.compose_affine(1.0 / tau, 0.0);
        CHECK(q.t_begin() == Catch::Approx(0.0).margin(1e-15));
        CHECK(q.t_end() == Catch::Approx(tau).margin(1e-15));
        CHECK(grid_max_diff(q, [&](double t) {
                  double u = 1.0 + t / tau;
                  return u * u;
              }) < 1e-12);
    }

    SECTION("shift and scale with breakpoint mapping") {
        PiecewisePoly s = PiecewisePoly::steps({0.0, 1.0, 2.0}, {3.0, 7.0});
        PiecewisePoly q = s.compose_affine(2.0, -1.0);  // q(t) = s(2t - 1)
        CHECK(q.t_begin() == Catch::Approx(0.5).margin(1e-15));
        CHECK(q.t_end() == Catch::Approx(1.5).margin(1e-15));
        CHECK(q.eval(0.7) == 3.0);
        CHECK(q.eval(1.3) == 7.0);
        CHECK(q.breakpoints()[1] == Catch::Approx(1.0).margin(1e-15));
    }

    SECTION("composition preserves products and sums") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> coeff(-1.5, 1.5);
        std::vector<double> ca(3), cb(3);
        for (double& v : ca) v = coeff(rng);
        for (double& v : cb) v = coeff(rng);
        PiecewisePoly a = PiecewisePoly::poly(0.0, 2.0, ca);
        PiecewisePoly b = PiecewisePoly::poly(0.0, 2.0, cb);
        double al = 1.7, be = 0.3;
        PiecewisePoly lhs = pp_mul(a, b).compose_affine(al, be);
        PiecewisePoly rhs = pp_mul(a.compose_affine(al, be), b.compose_affine(al, be));
        for (int i = 0; i <= 100; ++i) {
            double t = lhs.t_begin() +
                       (lhs.t_end() - lhs.t_begin()) * (i + 0.4) / 101.0;
            CHECK(lhs.eval(t) == Catch::Approx(rhs.eval(t)).margin(1e-12));
        }
    }

    CHECK_THROWS_AS(p.compose_affine(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(p.compose_affine(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("scaling and breakpoint merging") {
    PiecewisePoly p = PiecewisePoly::poly(0.0, 1.0, {1.0, 1.0});
    PiecewisePoly q = p.scaled(-2.5);
    CHECK(grid_max_diff(q, [](double t) { return -2.5 * (1.0 + t); }) < 1e-15);
    CHECK(p.scaled(0.0).is_zero());

    SECTION("merge_breakpoints deduplicates near-coincident points") {
        std::vector<double> a = {0.0, 1.0, 2.0};
        std::vector<double> b = {1.0 + 1e-15, 1.5};
        std::vector<double> m = merge_breakpoints(a, b);
        REQUIRE(m.size() == 4);
        CHECK(m[0] == 0.0);
        CHECK(m[1] == Catch::Approx(1.0).margin(1e-14));
        CHECK(m[2] == 1.5);
        CHECK(m[3] == 2.0);
    }

    SECTION("adding signals with offset breakpoints keeps all jumps") {
        PiecewisePoly s1 = PiecewisePoly::steps({0.0, 0.5, 1.0}, {1.0, 0.0});
        PiecewisePoly s2 = PiecewisePoly::steps({0.0, 0.25, 1.0}, {0.0, 2.0});
        PiecewisePoly sum = pp_add(s1, s2);
        CHECK(sum.n_pieces() == 3);
        CHECK(sum.eval(0.1) == 1.0);
        CHECK(sum.eval(0.3) == 3.0);
        CHECK(sum.eval(0.7) == 2.0);
    }
}

TEST_CASE("square wave integral identities used by the channel profiles") {
    // depth-1 base-2 square wave on [0,1]: 1 on [0,1/2), 0 on [1/2,1)
    PiecewisePoly sq = PiecewisePoly::steps({0.0, 0.5, 1.0}, {1.0, 0.0});
    PiecewisePoly integral = sq.antiderivative();
    CHECK(integral.eval(1.0) == Catch::Approx(0.5).margin(1e-15));

    // ramp window (1 - t) times the integral: vanishes at both endpoints
    PiecewisePoly theta = PiecewisePoly::poly(0.0, 1.0, {1.0, -1.0});
    PiecewisePoly vt = pp_mul(theta, integral);
    CHECK(vt.eval(0.0) == 0.0);
    CHECK(std::abs(vt.eval(1.0)) < 1e-15);
    // interior value (1 - 1/2) * 1/2 = 1/4 at the midpoint
    CHECK(vt.eval(0.5) == Catch::Approx(0.25).margin(1e-15));
}
