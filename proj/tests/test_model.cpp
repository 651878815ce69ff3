#include "doctest.h"

#include "kpp/model.hpp"
#include "kpp/twsolver.hpp"

#include <cmath>

using namespace kpp;

TEST_CASE("grid spacing, nodes and validation") {
    const Grid g{-1.0, 1.0, 21};
    CHECK(g.spacing() == doctest::Approx(0.1));
    CHECK(g.at(20) == doctest::Approx(1.0));
    CHECK(g.nodes().size() == 21);
    CHECK_NOTHROW(g.validate(5));
    CHECK_THROWS_AS(g.validate(6), std::invalid_argument);  // needs 4m+1 = 25 nodes
    CHECK_THROWS_AS((Grid{1.0, 1.0, 21}.validate(1)), std::invalid_argument);
    CHECK(Grid::with_spacing(-100, 400, 0.05).n == 10001);
    CHECK(g.translated(2.0) == Grid{1.0, 3.0, 21});
}

TEST_CASE("ModelSpec equality and validation") {
    CHECK(ModelSpec{2, 0.5} == ModelSpec{2, 0.5});
    CHECK_FALSE(ModelSpec{2, 0.5} == ModelSpec{3, 0.5});
    CHECK_THROWS(ModelSpec{0, 0.5}.validate());
    CHECK_THROWS(ModelSpec{2, NAN}.validate());
    CHECK(leading_sign(1) == 1);
    CHECK(leading_sign(2) == -1);
    CHECK(leading_sign(3) == 1);
}

TEST_CASE("first derivative is second order, including the one-sided ends") {
    auto err = [](std::size_t n) {
        const Grid g{0.0, 2.0, n};
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(g.at(i));
        const auto d = first_derivative(v, g.spacing());
        double e = 0;
        for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(d[i] - std::cos(g.at(i))));
        return e;
    };
    CHECK(std::log2(err(101) / err(201)) >= 1.9);
}

TEST_CASE("trapezoid integrates exactly on linear data") {
    CHECK(trapezoid({0, 1, 2, 3}, 0.5) == doctest::Approx(2.25));
    CHECK(trapezoid({}, 1.0) == 0.0);
}

TEST_CASE("momentum identity on synthetic and solved profiles") {
    // zero profile: flags as trivial
    TWProfile z;
    z.grid = Grid{-10, 10, 201};
    z.values.assign(201, 0.0);
    z.lambda = 0.5;
    CHECK(momentum_identity(z) == 0.0);

    // f = (1 - tanh y)/2 has int f'^2 = 1/3 exactly
    const Grid g{-30, 30, 6001};
    std::vector<double> f(g.n);
    for (std::size_t i = 0; i < g.n; ++i) f[i] = 0.5 * (1 - std::tanh(g.at(i)));
    CHECK(momentum_identity(f, g.spacing(), 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-5));

    std::vector<double> bad(f);
    bad[10] = NAN;
    CHECK_THROWS_AS(momentum_identity(bad, g.spacing(), 1.0), QuadratureError);

    // lambda int f'^2 = 1/6 for every travelling wave, 1e-3 relative
    for (auto [m, lam] : {std::pair{2, 0.5}, std::pair{3, 1.0}}) {
        const auto o = solve_tw({m, lam}, BvpOptions::defaults(m, lam));
        REQUIRE(o.ok());
        CHECK(std::abs(o.profile->momentum - 1.0 / 6.0) <= 1e-3 / 6.0);
    }
}

TEST_CASE("validity report names the failed checks") {
    TWProfile p;
    p.grid = Grid{-10, 10, 201};
    p.values.assign(201, 0.0);
    p.lambda = 1.0;
    p.residual_norm = 1.0;
    const auto r = check_validity(p);
    CHECK_FALSE(r.valid());
    CHECK_FALSE(r.residual_ok);
    CHECK_FALSE(r.tails_ok);  // f(left) = 0, not 1
    CHECK(r.describe().find("residual") != std::string::npos);
}

TEST_CASE("blow-up solution") {
    const Grid g{-3.0, -1.0, 3};
    const auto f = blowup_profile(0.0, g);
    CHECK(f[2] == doctest::Approx(-840.0));  // y = -1
    CHECK(f[0] == doctest::Approx(-840.0 / 81.0));

    // translation invariance in y0
    const auto f10 = blowup_profile(10.0, g.translated(10.0));
    for (std::size_t i = 0; i < 3; ++i) CHECK(f10[i] == doctest::Approx(f[i]));

    CHECK_THROWS_AS(blowup_profile(0.0, Grid{-2.0, 0.0, 5}), SingularityError);
    CHECK_THROWS_AS(blowup_profile(0.0, Grid{-2.0, 1.0, 5}), SingularityError);

    // f'''' = -f^2 with closed-form derivatives: 840 * 4*5*6*7 / d^8 = 840^2 / d^8
    CHECK(840.0 * 4 * 5 * 6 * 7 == 840.0 * 840.0);
    for (double y : {-0.5, -1.0, -4.0}) {
        const double v = blowup_derivative(0, y, 0);
        CHECK(std::abs(blowup_derivative(0, y, 4) + v * v) <= 1e-13 * v * v);
    }

    // five-point stencil: second order
    auto err = [](double h) {
        double e = 0;
        for (double y = -3; y <= -2; y += 0.125) {
            auto f0 = [](double x) { return blowup_derivative(0, x, 0); };
            const double d4 =
                (f0(y - 2 * h) - 4 * f0(y - h) + 6 * f0(y) - 4 * f0(y + h) + f0(y + 2 * h)) / std::pow(h, 4);
            e = std::max(e, std::abs(d4 + f0(y) * f0(y)));
        }
        return e;
    };
    CHECK(std::log2(err(0.02) / err(0.01)) >= 1.9);
}

TEST_CASE("blow-up correction balance") {
    CHECK(blowup_correction_check(0.0, 0.0).c == 0.0);
    // lambda (y0-y)^4 f0' = -4*840 lambda / (y0-y); (24 - 1680) c = kappa lambda
    const auto b = blowup_correction_check(1.0, 3.0);
    CHECK(b.kappa == doctest::Approx(-4.0 * 840.0));
    CHECK(b.operator_coeff == doctest::Approx(-1656.0));
    CHECK(std::abs(std::abs(b.c) - 140.0 / 69.0) <= 1e-12 * 140.0 / 69.0);
    CHECK(std::abs(std::abs(blowup_correction_check(69.0, 0.0).c) - 140.0) <= 1e-12 * 140.0);
    CHECK(b.residual <= 1e-10);
}

TEST_CASE("front location with the left-window rule") {
    const Grid g{-20, 20, 401};
    std::vector<double> ramp(g.n);
    for (std::size_t i = 0; i < g.n; ++i) ramp[i] = std::clamp(0.5 - (g.at(i) - 3.0) / 10.0, 0.0, 1.0);
    REQUIRE(locate_front(g, ramp).has_value());
    CHECK(*locate_front(g, ramp) == doctest::Approx(3.0));

    // a blip above 1/2 far to the right is too narrow to count
    auto blip = ramp;
    for (std::size_t i = 0; i < g.n; ++i)
        if (std::abs(g.at(i) - 15.0) < 0.25) blip[i] = 0.6;
    CHECK(*locate_front(g, blip) == doctest::Approx(3.0));

    CHECK_FALSE(locate_front(g, std::vector<double>(g.n, 0.0)).has_value());
}

TEST_CASE("interpolation clamps outside the grid") {
    const Grid g{0, 1, 3};
    const std::vector<double> v{0, 1, 4};
    CHECK(interpolate(g, v, 0.25) == doctest::Approx(0.5));
    CHECK(interpolate(g, v, -1) == 0.0);
    CHECK(interpolate(g, v, 2) == 4.0);
}
