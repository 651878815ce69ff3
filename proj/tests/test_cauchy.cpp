#include "doctest.h"

#include "kpp/cauchy.hpp"
#include "kpp/linearized.hpp"
#include "kpp/twsolver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace kpp;

namespace {

CauchyState constant_state(int m, double value, std::size_t n = 401) {
    return {0.0, Grid{-10, 10, n}, std::vector<double>(n, value), m};
}

double moment(const CauchyState& s, int k, double mean = 0) {
    double a = 0;
    for (std::size_t i = 0; i < s.grid.n; ++i) a += std::pow(s.grid.at(i) - mean, k) * s.u[i];
    return a * s.grid.spacing();
}

}  // namespace

TEST_CASE("config validation") {
    CauchyConfig c;
    CHECK_NOTHROW(c.validate());
    c.h = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.behind = -1;
    CHECK_THROWS(c.validate());
    c = {};
    c.t_final = 0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("equilibria are fixed points of one step") {
    for (int m : {1, 2, 3})
        for (double v : {0.0, 1.0}) {
            ImexStepper st(m, 0.05, 401);
            const auto s = st.step(constant_state(m, v), 0.01);
            double e = 0;
            for (double x : s.u) e = std::max(e, std::abs(x - v));
            INFO("m = " << m);
            CHECK(e <= 1e-14);
            CHECK(s.t == doctest::Approx(0.01));
        }
}

TEST_CASE("heat step widens a Gaussian by 2 dt in variance") {
    const std::size_t n = 2001;
    CauchyState s{0.0, Grid{-20, 20, n}, std::vector<double>(n), 1};
    for (std::size_t i = 0; i < n; ++i) s.u[i] = std::exp(-s.grid.at(i) * s.grid.at(i) / 2.0);
    const double dt = 1e-3;
    ImexStepper st(1, s.grid.spacing(), n, /*reaction=*/false);
    auto var = [&](const CauchyState& x) { return moment(x, 2) / moment(x, 0); };
    double v = var(s);
    for (int k = 0; k < 10; ++k) {
        const auto next = st.step(s, dt);
        const double vn = var(next);
        CHECK(std::abs((vn - v) - 2 * dt) <= 1e-4 * dt + 10 * dt * dt);
        v = vn;
        s = next;
    }
}

TEST_CASE("initial data") {
    CauchyConfig c;
    c.m = 2;
    const auto s = initial_state(c);
    CHECK(s.u.front() == doctest::Approx(1.0));
    CHECK(s.u.back() == doctest::Approx(0.0));
    CHECK(track_front(s) == doctest::Approx(0.0).epsilon(1e-9));
    c.u0 = CustomData{{-1.0, 1.0}, {1.0, 0.0}};
    const auto r = initial_state(c);
    CHECK(interpolate(r.grid, r.u, 0.0) == doctest::Approx(0.5).epsilon(1e-2));
    c.u0 = CustomData{{1.0, -1.0}, {1.0, 0.0}};
    CHECK_THROWS(initial_state(c));
}

TEST_CASE("front tracking") {
    const std::size_t n = 401;
    CauchyState ramp{0.0, Grid{-20, 20, n}, std::vector<double>(n), 2};
    for (std::size_t i = 0; i < n; ++i) ramp.u[i] = std::clamp(0.5 - (ramp.grid.at(i) - 3.0) / 10.0, 0.0, 1.0);
    CHECK(track_front(ramp) == doctest::Approx(3.0));
    CHECK_THROWS_AS(track_front(constant_state(2, 0.0)), TrackingError);

    // travelling wave plus a far oscillation poking above 1/2: the narrow blip is rejected
    const auto o = solve_tw({2, 0.5}, BvpOptions::defaults(2, 0.5));
    REQUIRE(o.ok());
    const auto& p = *o.profile;
    CauchyState tw{0.0, p.grid.translated(7.0), p.values, 2};
    CHECK(std::abs(track_front(tw) - 7.0) <= p.grid.spacing());
    for (std::size_t i = 0; i < tw.grid.n; ++i) {
        const double x = tw.grid.at(i);
        if (x > 40 && x < 42) tw.u[i] += 0.6 * std::sin(M_PI * (x - 40) / 2);
    }
    CHECK(std::abs(track_front(tw) - 7.0) <= p.grid.spacing());
}

TEST_CASE("shift fit is exact on its basis") {
    FrontHistory h;
    for (double t = 1; t <= 100; t += 1) {
        h.times.push_back(t);
        h.xf.push_back(2 * t - 1.5 * std::log(t) + 3);
    }
    const auto f = fit_shift(h, {1.0, 100.0});
    CHECK(f.lambda0 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.k == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(f.c == doctest::Approx(-3.0).epsilon(1e-10));
    CHECK(f.residual_rms <= 1e-10);
    CHECK(f.samples == 100);

    for (auto& x : h.xf) x = 0;
    for (std::size_t i = 0; i < h.times.size(); ++i) h.xf[i] = 2 * h.times[i];
    CHECK(std::abs(fit_shift(h, {1.0, 100.0}).k) <= 1e-10);
    CHECK(fit_shift(h, 100.0).window == std::pair{10.0, 100.0});

    CHECK_THROWS_AS(fit_shift(h, {50.0, 55.0}), FitError);  // fewer than 10 samples
    CHECK_THROWS_AS(fit_shift(h, {0.5, 100.0}), FitError);  // log t basis needs t >= 1
}

TEST_CASE("Lyapunov functional on equilibria") {
    const CProfile c{};
    CHECK(c(-1e3) == doctest::Approx(1.0 / 6.0));
    CHECK(c(1e3) == doctest::Approx(0.0));
    for (double v : {0.0, 1.0}) {
        auto s = constant_state(2, v);
        ImexStepper st(2, s.grid.spacing(), s.grid.n);
        std::vector<CauchyState> snaps{s};
        for (int k = 0; k < 5; ++k) snaps.push_back(s = st.step(s, 0.1));
        const auto L = lyapunov_monitor(snaps, c, /*analytic_tails=*/false);
        for (double x : L.values) CHECK(x == doctest::Approx(L.values.front()).epsilon(1e-12));
        CHECK(first_increase(L, 1e-12) == -1);
    }
    CHECK_THROWS_AS(lyapunov_value(constant_state(2, 0.0), c, true), MonitorError);
    CHECK_THROWS(lyapunov_value(constant_state(1, 0.0), c, false));
    CHECK(first_increase({{0, 1, 2}, {3, 2, 2.5}}, 0.1) == 1);
}

TEST_CASE("negative well blows up") {
    CauchyConfig c;
    c.m = 1;
    c.behind = 30;
    c.ahead = 30;
    c.t_final = 5;
    std::vector<double> x, u;
    for (double s = -30; s <= 30; s += 0.05) {
        x.push_back(s);
        u.push_back(s >= 0 && s <= 10 ? -1.5 : (s < 0 ? 1.0 : 0.0));
    }
    c.u0 = CustomData{x, u};
    const auto r = evolve(c);
    CHECK(r.blowup.detected);
    CHECK(r.blowup.t_detect < 5);
    CHECK(r.blowup.sup_norm_at_detect >= c.blowup_threshold);
}

TEST_CASE("heat-kernel profile at small time") {
    // m = 1: u(x, t) from step data is close to erfc(x / 2 sqrt t) / 2 at t = 0.01
    CauchyConfig c;
    c.m = 1;
    c.h = 0.005;
    c.behind = 5;
    c.ahead = 5;
    c.t_final = 0.01;
    c.dt_max = 2e-4;
    c.dt_initial = 1e-5;
    c.error_tol = 1e-5;
    c.dt_min = 1e-14;
    c.snapshot_times = {0.01};
    const auto r = evolve(c);
    REQUIRE(r.snapshots.size() == 1);
    const Grid z{-30, 30, 6001};
    const auto V = selfsimilar_profile(1, z);
    const auto rep = selfsimilar_domain_check(r.snapshots[0], z, V);
    CHECK(rep.sup_compact <= 0.02);
    CHECK(rep.predicted == doctest::Approx(std::sqrt(0.01) * std::abs(std::log(0.01))));
    CHECK_THROWS_AS(selfsimilar_domain_check(r.snapshots[0], z, {}), DependencyError);
}

TEST_CASE("classical front moves at speed close to 2") {
    CauchyConfig c;
    c.m = 1;
    c.t_final = 40;
    c.behind = 60;
    c.ahead = 100;
    c.error_tol = 1e-3;
    const auto r = evolve(c);
    CHECK_FALSE(r.blowup.detected);
    const auto& h = r.history;
    REQUIRE(h.times.size() > 30);
    const double v = (h.xf.back() - h.xf[h.xf.size() - 11]) / (h.times.back() - h.times[h.times.size() - 11]);
    CHECK(v > 1.8);
    CHECK(v < 2.0);
    for (std::size_t i = 0; i < h.times.size(); ++i) {
        CHECK(h.umax[i] <= 1.0 + 1e-9);
        CHECK(h.umin[i] >= -1e-9);
    }
}

TEST_CASE("snapshot and history CSV") {
    const auto dir = std::filesystem::temp_directory_path();
    const CauchyState s{1.25, Grid{0, 1, 5}, {1, 0.75, 0.5, 0.25, 0}, 2};
    write_snapshot_csv((dir / "kpp_snap.csv").string(), s);
    std::ifstream in(dir / "kpp_snap.csv");
    std::string first, second;
    std::getline(in, first);
    std::getline(in, second);
    CHECK(first == "# t=1.25");
    CHECK(second == "x,u");

    FrontHistory h{{1, 2, 3}, {0.5, 2.5, 4.5}, {}, {}};
    write_history_csv((dir / "kpp_hist.csv").string(), h);
    const auto back = read_history_csv((dir / "kpp_hist.csv").string());
    CHECK(back.times == h.times);
    CHECK(back.xf == h.xf);
    std::filesystem::remove(dir / "kpp_snap.csv");
    std::filesystem::remove(dir / "kpp_hist.csv");
}
