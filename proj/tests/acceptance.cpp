// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any criterion fails.

#include "kpp/cauchy.hpp"
#include "kpp/charpoly.hpp"
#include "kpp/linearized.hpp"
#include "kpp/twsolver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace kpp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

TWProfile solve(int m, double lam, double h = 0) {
    auto o = BvpOptions::defaults(m, lam);
    if (h > 0) o.grid = Grid::with_spacing(o.grid.left, o.grid.right, h);
    const auto r = solve_tw({m, lam}, o);
    if (!r.ok()) throw std::runtime_error(fmt("no valid profile at m=%g lambda=%g", m, lam) + ": " + r.message);
    return *r.profile;
}

double max_abs(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

double core_diff(const TWProfile& a, const TWProfile& b, double lo, double hi) {
    double d = 0;
    for (double y = lo; y <= hi; y += 0.01)
        d = std::max(d, std::abs(interpolate(a.grid, a.values, y) - interpolate(b.grid, b.values, y)));
    return d;
}

Outcome momentum() {
    const std::vector<std::pair<int, std::vector<double>>> branch = {
        {1, {0.5, 1.0, 1.9}},
        {2, {0.1, 0.5, 1.0, 1.25}},
        {3, {0.5, 1.0, 2.0}},
        {4, {0.5, 1.0, 2.0}},
        {5, {0.5, 1.0}},
    };
    double worst = 0;
    int count = 0;
    for (const auto& [m, lams] : branch)
        for (double lam : lams) {
            worst = std::max(worst, std::abs(momentum_identity(solve(m, lam)) - 1.0 / 6.0));
            ++count;
        }
    const double fine = std::abs(solve(2, 0.5, 0.025).momentum - 1.0 / 6.0);
    return {worst <= 1e-2 && fine <= 1e-3,
            fmt("%g profiles, max |lambda int f'^2 - 1/6| = %.3g; m=2 lambda=0.5 h=0.025: %.3g", count, worst, fine)};
}

Outcome lambda_max() {
    struct Row {
        int m;
        double lo, hi;
    };
    bool pass = true;
    std::string d;
    for (const Row r : {Row{2, 1.26, 1.29}, Row{3, 2.10, 2.14}, Row{4, 2.08, 2.13}}) {
        try {
            const auto s = scan_lambda_max(r.m, 0.5, 4.0, 0.01);
            const bool ok = s.lo >= r.lo && s.hi <= r.hi;
            pass = pass && ok;
            d += fmt("m=%g: [%.4f, %.4f]", r.m, s.lo, s.hi) + fmt(" vs [%.2f, %.2f]; ", r.lo, r.hi);
        } catch (const ScanError& e) {
            pass = false;
            d += fmt("m=%g: ", r.m) + e.what() + "; ";
        }
    }
    return {pass, d.substr(0, d.size() - 2)};
}

Outcome classical() {
    CauchyConfig c;
    c.m = 1;
    c.t_final = 500;
    c.behind = 150;
    c.ahead = 450;
    const auto r = evolve(c);
    if (r.blowup.detected) return {false, "unexpected blow-up"};
    const auto& h = r.history;
    auto at = [&](double t) {
        std::size_t i = 0;
        while (i + 1 < h.times.size() && h.times[i + 1] <= t) ++i;
        const double a = (t - h.times[i]) / (h.times[i + 1] - h.times[i]);
        return (1 - a) * h.xf[i] + a * h.xf[i + 1];
    };
    const double speed = (at(200) - at(100)) / 100;
    const auto f = fit_shift(h, {50.0, 500.0});
    return {std::abs(speed - 2) <= 0.04 && f.k >= 1.2 && f.k <= 1.8,
            fmt("speed on [100,200] = %.5f, fit over [50,500]: lambda0 = %.5f, k = %.4f", speed, f.lambda0, f.k)};
}

Outcome roots() {
    double e0 = 0;
    const auto z = find_roots(build_charpoly(2, 0.0, EquilibriumSide::zero));
    const auto o = find_roots(build_charpoly(2, 0.0, EquilibriumSide::one));
    auto dist = [](const RootSet& r, cplx mu) {
        double d = INFINITY;
        for (const auto& x : r.roots) d = std::min(d, std::abs(x.value - mu));
        return d;
    };
    for (cplx mu : {cplx{1, 0}, cplx{-1, 0}, cplx{0, 1}, cplx{0, -1}}) e0 = std::max(e0, dist(z, mu));
    const double q = 1 / std::sqrt(2.0);
    for (cplx mu : {cplx{q, q}, cplx{q, -q}, cplx{-q, q}, cplx{-q, -q}}) e0 = std::max(e0, dist(o, mu));

    double ratio = 0;  // max error / lambda^2
    for (double lam : {0.02, 0.05, 0.1, 0.15, 0.2}) {
        const auto a = asymptotic_roots_small_lambda(lam);
        const auto r = find_roots(build_charpoly(2, lam, EquilibriumSide::zero));
        double e = 0;
        for (cplx mu : {cplx{a.mu1, 0}, cplx{a.mu2, 0}, a.mu_plus, a.mu_minus}) e = std::max(e, dist(r, mu));
        ratio = std::max(ratio, e / (lam * lam));
    }
    return {e0 <= 1e-12 && ratio <= 2, fmt("lambda=0 root error %.2g; small-lambda error <= %.3g lambda^2", e0, ratio)};
}

Outcome loci() {
    bool pass = true;
    double res = 0;
    const auto m2 = double_root_loci(2, EquilibriumSide::one);
    pass = pass && m2.size() == 2;
    for (const auto& d : m2) {
        const auto p = build_charpoly(2, d.lambda, EquilibriumSide::one);
        res = std::max({res, std::abs(p.evaluate(d.mu)), std::abs(p.derivative(d.mu))});
        pass = pass && std::abs(std::abs(d.mu) - std::pow(3.0, -0.25)) <= 1e-12 &&
               std::abs(std::abs(d.lambda) - 4 * std::pow(3.0, -0.75)) <= 1e-12;
    }
    const bool zero_empty = double_root_loci(2, EquilibriumSide::zero).empty();
    const auto m3 = double_root_loci(3, EquilibriumSide::zero);
    pass = pass && zero_empty && m3.size() == 2;
    for (const auto& d : m3) {
        const auto p = build_charpoly(3, d.lambda, EquilibriumSide::zero);
        res = std::max({res, std::abs(p.evaluate(d.mu)), std::abs(p.derivative(d.mu))});
        const double mu = d.mu.real();
        pass = pass && std::abs(std::abs(mu) - std::pow(5.0, -1.0 / 6.0)) <= 1e-12 &&
               std::abs(d.lambda + 6 * std::pow(mu, 5)) <= 1e-12;  // P' = 0 eliminates lambda
    }
    return {pass && res <= 1e-10, fmt("max |P|, |P'| on loci %.2g; m=2 zero side empty: %g; m=3 loci: %g", res,
                                      zero_empty, static_cast<double>(m3.size()))};
}

Outcome blowup() {
    double analytic = 0;
    for (double y = -5; y <= -0.5; y += 0.25) {
        const double v = blowup_derivative(0, y, 0);
        analytic = std::max(analytic, std::abs(blowup_derivative(0, y, 4) + v * v) / (v * v));
    }
    auto err = [](double h) {
        // same residual nodes for every h: y in [-4, -2]
        const Grid g = Grid::with_spacing(-4.2, -1.8, h);
        const auto f = blowup_profile(0, g);
        double e = 0;
        for (std::size_t i = 2; i + 2 < g.n; ++i) {
            if (g.at(i) < -4 - 1e-9 || g.at(i) > -2 + 1e-9) continue;
            const double d4 = (f[i - 2] - 4 * f[i - 1] + 6 * f[i] - 4 * f[i + 1] + f[i + 2]) / std::pow(h, 4);
            e = std::max(e, std::abs(d4 + f[i] * f[i]));
        }
        return e;
    };
    const double order = std::log2(err(0.02) / err(0.01));
    return {analytic <= 1e-13 && order >= 1.9, fmt("analytic relative residual %.2g; discrete order %.3f", analytic, order)};
}

Outcome cross_order() {
    const double d = compare_orders(solve(4, 0.5), solve(5, 0.5));
    return {d <= 0.03, fmt("sup |f_4 - f_5| = %.4f", d)};
}

Outcome oscillations() {
    const auto p = solve(2, 0.1);
    const int zero = count_oscillations(p, EquilibriumSide::zero, 1e-12, std::pair{0.0, 300.0});
    const int one = count_oscillations(p, EquilibriumSide::one, 1e-6);
    return {zero >= 5 && one >= 5, fmt("sign changes on (0,300): %g; crossings of 1 for y<0 at amplitude 1e-6: %g", zero, one)};
}

Outcome lyapunov() {
    CauchyConfig c;
    c.m = 2;
    c.t_final = 100;
    c.output_interval = 0.5;
    std::vector<CauchyState> snaps{initial_state(c)};
    double next = c.output_interval;
    const auto r = evolve(c, [&](const CauchyState& s) {
        if (s.t >= next - 1e-12) {
            snaps.push_back(s);
            next += c.output_interval;
        }
    });
    // monotonicity is still reported on the stretch before a blow-up
    LyapunovSeries L;
    for (const auto& s : snaps) {
        try {
            L.values.push_back(lyapunov_value(s, CProfile{}));
            L.times.push_back(s.t);
        } catch (const MonitorError&) {
            break;
        }
    }
    const int i = first_increase(L, 1e-6 * std::abs(L.values.front()));
    std::string d = i < 0 ? fmt("L non-increasing over %g snapshots up to t = %.2f", L.values.size(), L.times.back())
                          : fmt("L increases after t = %.3f", L.times[static_cast<std::size_t>(i)]);
    if (r.blowup.detected)
        d += fmt("; solution blows up at t = %.3f (sup %.3g) before T = 100", r.blowup.t_detect,
                 r.blowup.sup_norm_at_detect);
    return {i < 0 && !r.blowup.detected, d};
}

Outcome selfsimilar() {
    const auto z = Grid::with_spacing(-20, 20, 0.01);
    const auto V1 = selfsimilar_profile(1, z);
    double e = 0;
    for (std::size_t i = 0; i < z.n; ++i) e = std::max(e, std::abs(V1[i] - 0.5 * std::erfc(z.at(i) / 2)));

    const Grid zz{-30, 30, 6001};
    const auto V2 = selfsimilar_profile(2, zz);
    double worst = 0;
    for (double t : {1e-3, 1e-2}) {
        CauchyConfig c;
        c.m = 2;
        c.h = 0.005;
        c.behind = 5;
        c.ahead = 5;
        c.t_final = t;
        c.dt_max = t / 50;
        c.dt_min = 1e-14;
        c.dt_initial = 1e-13;
        c.error_tol = 1e-5;
        c.output_interval = t;
        c.snapshot_times = {t};
        const auto r = evolve(c);
        worst = std::max(worst, selfsimilar_domain_check(r.snapshots.back(), zz, V2).sup_compact);
    }
    return {e <= 1e-3 && worst <= 0.02, fmt("m=1 |V - erfc/2| = %.2g; m=2 small-t sup on |z|<=5: %.4f", e, worst)};
}

Outcome properties() {
    std::string d;
    // translation mode
    double prev = INFINITY;
    bool falls = true;
    for (double h : {0.05, 0.025}) {
        const auto p = solve(2, 0.5, h);
        const double r = max_abs(assemble_B(p).apply(profile_derivative(p)));
        falls = falls && r < prev;
        d += fmt("|Bf'|(h=%g) = %.3g; ", h, r);
        prev = r;
    }
    // shift fit on its own basis
    FrontHistory h;
    for (double t = 1; t <= 200; t += 0.5) {
        h.times.push_back(t);
        h.xf.push_back(2 * t - 1.5 * std::log(t) + 0.75);
    }
    const auto f = fit_shift(h, {1.0, 200.0});
    const double fit_err = std::max({std::abs(f.lambda0 - 2), std::abs(f.k - 1.5), std::abs(f.c + 0.75)});
    d += fmt("fit error %.2g; ", fit_err);
    // grid refinement and interval extension
    const auto a = solve(2, 0.5, 0.1), b = solve(2, 0.5, 0.05), c = solve(2, 0.5, 0.025);
    const double order = std::log2(core_diff(a, b, -20, 40) / core_diff(b, c, -20, 40));
    double ext = 0;
    for (auto [m, lam] : {std::pair{2, 0.5}, std::pair{3, 1.0}, std::pair{1, 1.0}}) {
        const auto g = default_grid(m, lam);
        const double L = g.right - g.left;
        auto o = BvpOptions::defaults(m, lam);
        o.grid = Grid::with_spacing(g.left - 0.125 * L, g.right + 0.125 * L, g.spacing());
        const auto wide = solve_tw({m, lam}, o);
        if (!wide.ok()) return {false, d + "extended interval did not converge"};
        ext = std::max(ext, core_diff(solve(m, lam), *wide.profile, -50, 200));
    }
    d += fmt("refinement order %.3f; interval extension change %.2g", order, ext);
    return {falls && fit_err <= 1e-10 && order >= 1.9 && ext <= 1e-4, d};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"momentum identity", momentum},
        {"lambda_max brackets", lambda_max},
        {"m=1 classical front", classical},
        {"characteristic roots", roots},
        {"double-root loci", loci},
        {"exact blow-up solution", blowup},
        {"cross-order closeness", cross_order},
        {"oscillation structure", oscillations},
        {"Lyapunov monotonicity", lyapunov},
        {"self-similar oracle", selfsimilar},
        {"property suite", properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), sec);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
