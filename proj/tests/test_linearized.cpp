#include "doctest.h"

#include "kpp/charpoly.hpp"
#include "kpp/linearized.hpp"
#include "kpp/twsolver.hpp"

#include <cmath>

using namespace kpp;

namespace {

double max_abs(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

TWProfile solved(int m, double lam, double h) {
    auto o = BvpOptions::defaults(m, lam);
    o.grid = Grid::with_spacing(-100, 400, h);
    const auto r = solve_tw({m, lam}, o);
    REQUIRE(r.ok());
    return *r.profile;
}

}  // namespace

TEST_CASE("B on the rest state reproduces the characteristic polynomial") {
    // f = 0: B e^{mu y} = P(mu) e^{mu y} + O(h^2), and P vanishes on the roots
    const int m = 2;
    const double lam = 0.5;
    const auto roots = find_roots(build_charpoly(m, lam, EquilibriumSide::zero));
    double mu = 0;
    for (const auto& r : roots.roots)
        if (std::abs(r.value.imag()) < 1e-12) mu = r.value.real();
    REQUIRE(mu != 0);
    auto defect = [&](double h) {
        TWProfile z;
        z.m = m;
        z.lambda = lam;
        z.grid = Grid::with_spacing(0, 10, h);
        z.values.assign(z.grid.n, 0.0);
        const auto B = assemble_B(z);
        std::vector<double> w(z.grid.n);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(mu * z.grid.at(i));
        const auto r = B.apply(w);
        double e = 0;
        for (std::size_t i = m; i + m < w.size(); ++i) e = std::max(e, std::abs(r[i]) / w[i]);
        return e;
    };
    const double e1 = defect(0.05), e2 = defect(0.025);
    CHECK(e1 <= 10 * 0.05 * 0.05);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("translation mode is a discrete null vector") {
    for (auto [m, lam] : {std::pair{2, 0.5}, std::pair{1, 1.9}}) {
        double prev = INFINITY;
        for (double h : {0.05, 0.025}) {
            const auto p = solved(m, lam, h);
            const auto B = assemble_B(p);
            const double r = max_abs(B.apply(profile_derivative(p)));
            CHECK(r <= 10 * (h * h + p.residual_norm));
            CHECK(r < prev);
            prev = r;
        }
    }
}

TEST_CASE("affine centre solve") {
    for (auto [m, lam] : {std::pair{2, 0.5}, std::pair{1, 1.9}, std::pair{3, 1.0}}) {
        const auto p = solved(m, lam, 0.05);
        const auto B = assemble_B(p);
        const auto fp = profile_derivative(p);
        const auto c = solve_affine_center(B, fp);
        CHECK(c.residual <= 1e-4);
        CHECK(c.orthogonality_defect <= 1e-10);
        CHECK(max_abs(c.psi) > 0);

        const auto z = solve_affine_center(B, std::vector<double>(fp.size(), 0.0));
        CHECK(max_abs(z.psi) == 0.0);
    }
}

TEST_CASE("constrained solver") {
    const auto p = solved(1, 1.9, 0.05);
    const auto B = assemble_B(p);
    const auto fp = profile_derivative(p);
    const ConstrainedSolver s(B, fp);
    // every solution satisfies the constraint, up to cancellation between B^{-1} r and the nu p term
    std::vector<double> r(fp.size(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::sin(0.1 * p.grid.at(i)) * std::exp(-0.01 * p.grid.at(i) * p.grid.at(i));
    const auto x = s.solve(r);
    double dot = 0, xx = 0, cc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * fp[i];
        xx += x[i] * x[i];
        cc += fp[i] * fp[i];
    }
    CHECK(std::abs(dot) <= 1e-8 * std::sqrt(xx * cc));
    CHECK_THROWS_AS(ConstrainedSolver(B, std::vector<double>(fp.size(), 0.0)), SolverError);
    CHECK_THROWS_AS(ConstrainedSolver(B, std::vector<double>(3, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(s.solve({1.0}), std::invalid_argument);
}

TEST_CASE("second-order corrections") {
    const auto p = solved(2, 0.5, 0.05);
    const auto c = solve_affine_center(assemble_B(p), profile_derivative(p));
    const auto zero = second_order_residual(c, 0.0);
    CHECK(max_abs(zero.phi) == 0.0);

    // the right-hand side is k psi + k^2 (psi' + psi^2); three values of k pin both parts
    const auto rhs = second_order_rhs(c);
    const auto a = rhs.at(1.0), b = rhs.at(2.0), d = rhs.at(-1.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == doctest::Approx(rhs.linear[i] + rhs.quadratic[i]));
        CHECK(0.5 * (a[i] + d[i]) == doctest::Approx(rhs.quadratic[i]));
        CHECK(b[i] == doctest::Approx(2 * rhs.linear[i] + 4 * rhs.quadratic[i]));
    }
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(rhs.linear[i] == c.psi[i]);

    const auto scan = scan_second_order(c, {0.0, 0.5, 1.0, 2.0, 3.0});
    REQUIRE(scan.size() == 5);
    for (const auto& s : scan) CHECK(s.residual <= 1e-6);
    CHECK_THROWS_AS(second_order_rhs(CenterSolution{}), SolverError);
}

TEST_CASE("self-similar profile") {
    // m = 1: V(z) = erfc(z / 2) / 2
    auto err = [](double h) {
        const auto g = Grid::with_spacing(-20, 20, h);
        const auto V = selfsimilar_profile(1, g);
        double e = 0;
        for (std::size_t i = 0; i < g.n; ++i) e = std::max(e, std::abs(V[i] - 0.5 * std::erfc(g.at(i) / 2)));
        return e;
    };
    CHECK(err(0.02) <= 1e-3);
    CHECK(std::log2(err(0.02) / err(0.01)) >= 1.9);

    // m = 2: odd about 1/2, ends at 1 and 0, and dips below 0 (no maximum principle)
    const auto g = Grid::with_spacing(-30, 30, 0.02);
    const auto V = selfsimilar_profile(2, g);
    CHECK(V.front() == doctest::Approx(1.0));
    CHECK(V.back() == doctest::Approx(0.0));
    CHECK(interpolate(g, V, 0.0) == doctest::Approx(0.5).epsilon(1e-6));
    double lo = 1;
    for (double v : V) lo = std::min(lo, v);
    CHECK(lo < -1e-3);
    CHECK_THROWS(selfsimilar_profile(0, g));
}
