#include "kpp/runner.hpp"

#include "kpp/cauchy.hpp"
#include "kpp/charpoly.hpp"
#include "kpp/csv.hpp"
#include "kpp/linearized.hpp"
#include "kpp/manifest.hpp"
#include "kpp/plotdata.hpp"
#include "kpp/twsolver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

namespace kpp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string tag(double x) {
    std::string s = format_double(x);
    for (char& c : s)
        if (c == '-') c = 'm';
    return s;
}

std::string profile_name(int m, double lambda) { return "profile_m" + std::to_string(m) + "_lambda" + tag(lambda) + ".csv"; }

// json has no NaN; missing numbers become null
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

BvpOptions bvp_options(const RunConfig& cfg, int m, double lambda, std::uint64_t seed) {
    BvpOptions o = BvpOptions::defaults(m, lambda);
    if (cfg.left || cfg.right || cfg.h)
        o.grid = Grid::with_spacing(cfg.left.value_or(o.grid.left), cfg.right.value_or(o.grid.right),
                                    cfg.h.value_or(o.grid.spacing()));
    if (cfg.newton_tol) o.newton_tol = *cfg.newton_tol;
    if (cfg.max_iter) o.max_iter = *cfg.max_iter;
    o.perturbation = cfg.perturbation;
    o.seed = seed;
    return o;
}

// continuation ladder from `from` to `to`, both ends included
std::vector<double> ladder(double from, double to, double step) {
    std::vector<double> v;
    const double dir = to >= from ? 1.0 : -1.0;
    const auto n = static_cast<std::size_t>(std::ceil(std::abs(to - from) / step - 1e-9));
    for (std::size_t i = 0; i < n; ++i) v.push_back(from + dir * step * static_cast<double>(i));
    v.push_back(to);
    return v;
}

SolveOutcome solve_one(const RunConfig& cfg, int m, double lambda, std::uint64_t seed) {
    const BvpOptions opts = bvp_options(cfg, m, lambda, seed);
    if (!cfg.continue_from) return solve_tw({m, lambda}, opts);
    auto outs = continue_branch(m, ladder(*cfg.continue_from, lambda, cfg.continue_step), opts);
    return std::move(outs.back());
}

json outcome_json(const SolveOutcome& o) {
    json j = {{"status", to_string(o.status)}, {"iterations", o.iterations}, {"message", o.message}};
    if (o.profile) {
        j["residual_norm"] = num(o.profile->residual_norm);
        j["momentum"] = num(o.profile->momentum);
        j["validity"] = o.validity.describe();
        j["grid"] = {{"left", o.profile->grid.left}, {"right", o.profile->grid.right}, {"n", o.profile->grid.n}};
        j["shift"] = num(o.profile->shift);
    }
    return j;
}

json roots_json(const RootSet& r) {
    json a = json::array();
    for (const auto& x : r.roots) a.push_back({{"re", x.value.real()}, {"im", x.value.imag()}, {"multiplicity", x.multiplicity}});
    return a;
}

struct Context {
    const RunConfig& cfg;
    Manifest& man;
    std::ostream& log;
    int m() const { return cfg.m.value_or(0); }
};

int cmd_roots(Context& c) {
    const int m = c.m();
    const double lam = *c.cfg.lambda;
    std::vector<double> side_col, re, im, mult;
    json res;
    for (auto side : {EquilibriumSide::zero, EquilibriumSide::one}) {
        const auto rs = find_roots(build_charpoly(m, lam, side));
        const auto dims = classify_bundles(rs);
        json s = {{"roots", roots_json(rs)},
                  {"bundles", {{"stable", dims.stable}, {"unstable", dims.unstable}, {"marginal", dims.marginal}}}};
        if (dims.stable > 0) {
            const Root slow = slowest_stable_root(rs);
            s["slowest_stable"] = {{"re", slow.value.real()}, {"im", slow.value.imag()}};
        }
        json loci = json::array();
        for (const auto& d : double_root_loci(m, side))
            loci.push_back({{"mu_re", d.mu.real()}, {"mu_im", d.mu.imag()}, {"lambda", d.lambda}});
        s["double_root_loci"] = loci;
        res[to_string(side)] = s;
        for (const auto& r : rs.roots) {
            side_col.push_back(side == EquilibriumSide::zero ? 0 : 1);
            re.push_back(r.value.real());
            im.push_back(r.value.imag());
            mult.push_back(r.multiplicity);
        }
        c.log << to_string(side) << " side: stable " << dims.stable << ", unstable " << dims.unstable << ", marginal "
              << dims.marginal << "\n";
    }
    const fs::path csv = c.man.dir() / "roots.csv";
    write_csv(csv.string(), {"side", "re", "im", "multiplicity"}, {&side_col, &re, &im, &mult},
              {"side 0: f = 0 (y -> +inf), side 1: f = 1 (y -> -inf)"});
    c.man.add_output(csv);
    c.man.json()["results"] = res;
    c.man.add_task({{"name", "roots"}, {"status", "ok"}});
    return kExitOk;
}

int cmd_tw(Context& c) {
    const int m = c.m();
    const double lam = *c.cfg.lambda;
    RunConfig cfg = c.cfg;
    if (cfg.plot == "f2" && !cfg.right) cfg.right = std::max(default_grid(m, lam).right, 700.0);
    const SolveOutcome o = solve_one(cfg, m, lam, cfg.seed);
    json res = outcome_json(o);
    c.log << "m=" << m << " lambda=" << lam << ": " << to_string(o.status) << " after " << o.iterations
          << " iterations";
    if (o.profile) c.log << ", momentum " << o.profile->momentum << ", " << o.validity.describe();
    c.log << "\n";
    if (o.profile) {
        const fs::path csv = c.man.dir() / profile_name(m, lam);
        write_profile_csv(csv.string(), *o.profile);
        c.man.add_output(csv);
        res["oscillations"] = {
            {"zero", count_oscillations(*o.profile, EquilibriumSide::zero, cfg.oscillation_threshold)},
            {"one", count_oscillations(*o.profile, EquilibriumSide::one, cfg.oscillation_threshold)}};
        if (cfg.plot == "f2")
            for (const auto& f : emit_tail(c.man.dir() / "plot_f2", csv, {{0.0, 300.0}, {0.0, 600.0}})) c.man.add_output(f);
    } else if (cfg.plot == "f2") {
        c.log << "no profile: f2 bundle not written\n";
    }
    if (cfg.center && o.ok()) {
        const auto op = assemble_B(*o.profile);
        const auto fp = profile_derivative(*o.profile);
        const auto center = solve_affine_center(op, fp);
        const fs::path psi = c.man.dir() / "psi.csv";
        write_values_csv(psi.string(), op.grid, center.psi);
        c.man.add_output(psi);
        const auto ks = cfg.ks.empty() ? parse_list("0:0.25:3") : cfg.ks;
        const auto scan = scan_second_order(center, ks);
        const fs::path ksc = c.man.dir() / "kscan.csv";
        write_kscan_csv(ksc.string(), scan);
        c.man.add_output(ksc);
        res["center"] = {{"residual", center.residual},
                         {"orthogonality_defect", center.orthogonality_defect},
                         {"translation_residual", [&] {
                              const auto bf = op.apply(fp);
                              double s = 0;
                              for (double v : bf) s = std::max(s, std::abs(v));
                              return s;
                          }()}};
        if (cfg.plot == "kscan")
            for (const auto& f : emit_kscan(c.man.dir() / "plot_kscan", ksc)) c.man.add_output(f);
    }
    c.man.json()["results"] = res;
    c.man.add_task({{"name", "tw"}, {"status", to_string(o.status)}, {"message", o.message}});
    return o.ok() ? kExitOk : kExitNonexistent;
}

int cmd_scan(Context& c) {
    const int m = c.m();
    const auto& cfg = c.cfg;
    std::optional<BvpOptions> base;
    if (cfg.left || cfg.right || cfg.h || cfg.newton_tol || cfg.max_iter)
        base = bvp_options(cfg, m, cfg.lo, cfg.seed);
    auto write_samples = [&](const std::vector<std::pair<double, SolveStatus>>& samples) {
        std::vector<double> l, s;
        for (const auto& [lam, st] : samples) {
            l.push_back(lam);
            s.push_back(static_cast<double>(st));
        }
        const fs::path csv = c.man.dir() / "scan.csv";
        write_csv(csv.string(), {"lambda", "status"}, {&l, &s},
                  {"status 0 converged, 1 diverged, 2 trivial, 3 invalid"});
        c.man.add_output(csv);
    };
    try {
        const LambdaScan scan = scan_lambda_max(m, cfg.lo, cfg.hi, cfg.width_tol, base);
        write_samples(scan.samples);
        c.man.json()["results"] = {{"m", m}, {"bracket", {scan.lo, scan.hi}}, {"width", scan.width()},
                                   {"predicate", scan.predicate}, {"samples", scan.samples.size()}};
        c.man.add_task({{"name", "scan-max"}, {"status", "bracketed"}});
        c.log << "lambda_max(" << m << ") in [" << scan.lo << ", " << scan.hi << ")\n";
        return kExitNonexistent;
    } catch (const ScanError& e) {
        write_samples(e.samples);
        throw;
    }
}

struct SweepRow {
    double lambda = 0;
    SolveOutcome outcome;
    int oscillations = -1;
};

int cmd_sweep(Context& c) {
    const int m = c.m();
    const auto& cfg = c.cfg;
    if (cfg.lambdas.empty()) {
        c.log << "empty sweep: no lambdas given, nothing written\n";
        c.man.add_task({{"name", "sweep"}, {"status", "empty"}});
        return kExitOk;
    }
    std::vector<SweepRow> rows(cfg.lambdas.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].lambda = cfg.lambdas[i];

    auto finish = [&](SweepRow& r) {
        if (r.outcome.profile) {
            write_profile_csv((c.man.dir() / profile_name(m, r.lambda)).string(), *r.outcome.profile);
            r.oscillations = count_oscillations(*r.outcome.profile, EquilibriumSide::zero, cfg.oscillation_threshold);
        }
    };

    if (cfg.continuation) {
        std::vector<double> lams = cfg.lambdas;
        const auto base = bvp_options(cfg, m, *std::min_element(lams.begin(), lams.end()), cfg.seed);
        auto outs = continue_branch(m, lams, base);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].outcome = std::move(outs[i]);
            finish(rows[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::string> errors(rows.size());
        auto worker = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
                try {
                    rows[i].outcome = solve_one(cfg, m, rows[i].lambda, cfg.seed + i);
                    finish(rows[i]);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        const unsigned jobs = std::min<unsigned>(cfg.jobs, static_cast<unsigned>(rows.size()));
        for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (!errors[i].empty()) {
                rows[i].outcome.status = SolveStatus::diverged;
                rows[i].outcome.message = "error: " + errors[i];
            }
    }

    const fs::path summary = c.man.dir() / "summary.csv";
    {
        std::ofstream out(summary);
        out << "lambda,status,momentum,oscillations\n";
        for (const auto& r : rows)
            out << format_double(r.lambda) << "," << to_string(r.outcome.status) << ","
                << (r.outcome.profile ? format_double(r.outcome.profile->momentum) : std::string("nan")) << ","
                << r.oscillations << "\n";
    }
    bool all_ok = true;
    std::vector<ProfileInput> plotted;
    json per = json::array();
    for (const auto& r : rows) {
        if (r.outcome.profile) {
            c.man.add_output(c.man.dir() / profile_name(m, r.lambda));
            if (r.outcome.ok()) plotted.push_back({c.man.dir() / profile_name(m, r.lambda), "lambda=" + format_double(r.lambda)});
        }
        all_ok = all_ok && r.outcome.ok();
        json j = outcome_json(r.outcome);
        j["lambda"] = r.lambda;
        j["oscillations"] = r.oscillations;
        per.push_back(j);
        c.log << "lambda=" << r.lambda << ": " << to_string(r.outcome.status) << "\n";
    }
    c.man.add_output(summary);
    c.man.json()["results"] = {{"m", m}, {"profiles", per}};
    if (cfg.plot == "f0") {
        const auto files = emit_profile_overlay(c.man.dir() / "plot_f0", plotted);
        if (files.empty()) c.log << "no converged profiles: f0 bundle not written\n";
        for (const auto& f : files) c.man.add_output(f);
    }
    c.man.add_task({{"name", "sweep"}, {"status", all_ok ? "ok" : "partial"}});
    return all_ok ? kExitOk : kExitNonexistent;
}

int cmd_evolve(Context& c) {
    const auto& cfg = c.cfg;
    CauchyConfig cc;
    cc.m = c.m();
    cc.h = cfg.dx;
    cc.behind = cfg.behind;
    cc.ahead = cfg.ahead;
    cc.t_final = *cfg.t_final;
    cc.dt_max = cfg.dt_max;
    cc.dt_min = cfg.dt_min;
    cc.dt_initial = std::clamp(cc.dt_initial, std::min(10 * cfg.dt_min, cfg.dt_max), cfg.dt_max);
    cc.error_tol = cfg.error_tol;
    cc.output_interval = cfg.output_interval;
    if (cfg.initial == "smoothed") cc.u0 = SmoothedData{cfg.width};
    cc.snapshot_times = cfg.snapshots;
    if (cfg.lyapunov)
        for (double t = 0; t <= cc.t_final + 1e-9; t += cfg.output_interval) cc.snapshot_times.push_back(t);
    cc.validate();

    const CauchyResult r = evolve(cc);
    const fs::path hist = c.man.dir() / "history.csv";
    write_history_csv(hist.string(), r.history);
    c.man.add_output(hist);

    json res = {{"m", cc.m},
                {"accepted_steps", r.accepted_steps},
                {"rejected_steps", r.rejected_steps},
                {"final_time", r.final_state.t},
                {"blowup", {{"detected", r.blowup.detected}, {"t", r.blowup.t_detect}, {"sup", r.blowup.sup_norm_at_detect}}}};

    // requested snapshots, in request order; Lyapunov sampling snapshots are not written
    std::vector<double> wanted = cfg.snapshots;
    std::sort(wanted.begin(), wanted.end());
    std::size_t k = 0;
    for (const auto& s : r.snapshots) {
        if (k < wanted.size() && std::abs(s.t - wanted[k]) <= 1e-9 * std::max(1.0, wanted[k])) {
            const fs::path p = c.man.dir() / ("snapshot_t" + tag(wanted[k]) + ".csv");
            write_snapshot_csv(p.string(), s);
            c.man.add_output(p);
            ++k;
        }
    }
    if (cfg.lyapunov) {
        std::vector<CauchyState> series;
        for (const auto& s : r.snapshots)
            if (series.empty() || s.t > series.back().t + 1e-12) series.push_back(s);
        const auto L = lyapunov_monitor(series, CProfile{});
        const fs::path p = c.man.dir() / "lyapunov.csv";
        write_csv(p.string(), {"t", "L"}, {&L.times, &L.values});
        c.man.add_output(p);
        res["lyapunov_first_increase"] = first_increase(L, 1e-6 * std::abs(L.values.empty() ? 0.0 : L.values.front()));
    }
    double lambda0 = 2.0;
    if (!r.blowup.detected && r.history.times.size() >= 4) {
        try {
            const ShiftFit f = fit_shift(r.history, cc.t_final);
            lambda0 = f.lambda0;
            res["fit"] = {{"lambda0", f.lambda0}, {"k", f.k}, {"c", f.c}, {"window", {f.window.first, f.window.second}},
                          {"residual_rms", f.residual_rms}, {"samples", f.samples}};
            c.log << "fit: lambda0=" << f.lambda0 << " k=" << f.k << " c=" << f.c << "\n";
        } catch (const FitError& e) {
            res["fit_error"] = e.what();
        }
    }
    if (cfg.plot == "front")
        for (const auto& f : emit_front_history(c.man.dir() / "plot_front", hist, lambda0)) c.man.add_output(f);
    c.man.json()["results"] = res;
    if (r.blowup.detected) {
        c.log << "blow-up at t=" << r.blowup.t_detect << " (sup " << r.blowup.sup_norm_at_detect << ")\n";
        c.man.add_task({{"name", "evolve"}, {"status", "blowup"}});
        return kExitNonexistent;
    }
    c.log << "reached t=" << r.final_state.t << " in " << r.accepted_steps << " steps\n";
    c.man.add_task({{"name", "evolve"}, {"status", "ok"}});
    return kExitOk;
}

int cmd_fit(Context& c) {
    const auto& cfg = c.cfg;
    const FrontHistory h = read_history_csv(*cfg.history);
    if (h.times.empty()) throw FitError("fit-shift: empty history");
    const double T = h.times.back();
    const ShiftFit f = fit_shift(h, {cfg.t0.value_or(T / 10), cfg.t1.value_or(T)});
    const std::vector<double> l{f.lambda0}, k{f.k}, cc{f.c}, a{f.window.first}, b{f.window.second},
        rms{f.residual_rms}, rl{f.rms_linear}, rs{f.rms_sqrt}, n{static_cast<double>(f.samples)};
    const fs::path p = c.man.dir() / "fit.csv";
    write_csv(p.string(), {"lambda0", "k", "c", "t0", "t1", "residual_rms", "rms_linear", "rms_sqrt", "samples"},
              {&l, &k, &cc, &a, &b, &rms, &rl, &rs, &n}, {"xf = lambda0 t - k log t - c"});
    c.man.add_output(p);
    c.man.json()["results"] = {{"lambda0", f.lambda0}, {"k", f.k}, {"c", f.c}, {"window", {f.window.first, f.window.second}},
                               {"residual_rms", f.residual_rms}, {"rms_linear", f.rms_linear},
                               {"rms_sqrt", f.rms_sqrt}, {"samples", f.samples}};
    c.log << "lambda0=" << f.lambda0 << " k=" << f.k << " c=" << f.c << " rms=" << f.residual_rms << "\n";
    c.man.add_task({{"name", "fit-shift"}, {"status", "ok"}});
    return kExitOk;
}

int cmd_verify(Context& c) {
    std::vector<CheckResult> checks = invariant_suite();
    if (c.cfg.manifest)
        for (const auto& d : verify_manifest(*c.cfg.manifest))
            checks.push_back({"digest " + d.path, d.ok, d.ok ? 0.0 : 1.0, 0.0, d.message});
    const fs::path p = c.man.dir() / "checks.csv";
    bool all = true;
    {
        std::ofstream out(p);
        out << "check,pass,value,bound\n";
        for (const auto& k : checks) {
            out << k.name << "," << (k.pass ? 1 : 0) << "," << format_double(k.value) << "," << format_double(k.bound) << "\n";
            c.log << (k.pass ? "PASS " : "FAIL ") << k.name << ": " << k.detail << "\n";
            all = all && k.pass;
            c.man.add_task({{"name", k.name}, {"status", k.pass ? "pass" : "fail"}, {"message", k.detail}});
        }
    }
    c.man.add_output(p);
    return all ? kExitOk : kExitError;
}

}  // namespace

std::vector<CheckResult> invariant_suite() {
    std::vector<CheckResult> out;

    for (auto [m, lam] : {std::pair{2, 0.5}, std::pair{3, 1.0}}) {
        CheckResult r;
        r.name = "momentum m=" + std::to_string(m) + " lambda=" + format_double(lam);
        r.bound = 1e-2;
        const auto o = solve_tw({m, lam}, BvpOptions::defaults(m, lam));
        if (o.ok()) {
            r.value = std::abs(o.profile->momentum - 1.0 / 6.0);
            r.pass = r.value <= r.bound;
            r.detail = "lambda int f'^2 = " + format_double(o.profile->momentum);
        } else {
            r.value = 1;
            r.detail = std::string("solver: ") + to_string(o.status);
        }
        out.push_back(r);
    }

    {
        // f0'''' + f0^2 with closed-form derivatives
        CheckResult r{"blow-up exact residual", false, 0.0, 1e-12, ""};
        for (double y = -5; y <= -1; y += 0.25) {
            const double f = blowup_derivative(0, y, 0);
            r.value = std::max(r.value, std::abs(blowup_derivative(0, y, 4) + f * f) / (f * f));
        }
        r.pass = r.value <= r.bound;
        r.detail = "relative residual " + format_double(r.value);
        out.push_back(r);
    }
    {
        // 5-point fourth difference: error ratio between h and h/2
        auto err = [](double h) {
            double e = 0;
            for (double y = -3; y <= -2; y += 0.125) {
                auto f = [](double x) { return blowup_derivative(0, x, 0); };
                const double d4 = (f(y - 2 * h) - 4 * f(y - h) + 6 * f(y) - 4 * f(y + h) + f(y + 2 * h)) / std::pow(h, 4);
                e = std::max(e, std::abs(d4 + f(y) * f(y)));
            }
            return e;
        };
        CheckResult r{"blow-up discrete order", false, std::log2(err(0.02) / err(0.01)), 1.9, ""};
        r.pass = r.value >= r.bound;
        r.detail = "observed order " + format_double(r.value);
        out.push_back(r);
    }
    {
        const auto b = blowup_correction_check(1.0, 0.0);
        CheckResult r{"blow-up correction magnitude", false, std::abs(std::abs(b.c) - 140.0 / 69.0) / (140.0 / 69.0), 1e-12, ""};
        r.pass = r.value <= r.bound;
        r.detail = "|c| = " + format_double(std::abs(b.c));
        out.push_back(r);
    }
    {
        const auto loci = double_root_loci(2, EquilibriumSide::one);
        CheckResult r{"double roots m=2 one side", false, 0.0, 1e-10, ""};
        const double lam_ref = 4 * std::pow(3.0, -0.75);
        bool shape = loci.size() == 2;
        for (const auto& d : loci) {
            const auto p = build_charpoly(2, d.lambda, EquilibriumSide::one);
            r.value = std::max({r.value, std::abs(p.evaluate(d.mu)), std::abs(p.derivative(d.mu))});
            shape = shape && std::abs(std::abs(d.lambda) - lam_ref) <= 1e-12 &&
                    std::abs(std::abs(d.mu) - std::pow(3.0, -0.25)) <= 1e-12;
        }
        r.pass = shape && r.value <= r.bound;
        r.detail = std::to_string(loci.size()) + " loci, max |P|,|P'| " + format_double(r.value);
        out.push_back(r);
    }
    {
        const auto loci = double_root_loci(2, EquilibriumSide::zero);
        CheckResult r{"double roots m=2 zero side", loci.empty(), static_cast<double>(loci.size()), 0.0, ""};
        r.detail = std::to_string(loci.size()) + " loci";
        out.push_back(r);
    }
    {
        const Grid z{-20.0, 20.0, 2001};
        const auto V = selfsimilar_profile(1, z);
        CheckResult r{"self-similar m=1 vs erfc", false, 0.0, 1e-3, ""};
        for (std::size_t i = 0; i < z.n; ++i) r.value = std::max(r.value, std::abs(V[i] - 0.5 * std::erfc(z.at(i) / 2)));
        r.pass = r.value <= r.bound;
        r.detail = "sup error " + format_double(r.value);
        out.push_back(r);
    }
    return out;
}

int run(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    fs::create_directories(out_dir);
    Manifest man(out_dir);
    auto& j = man.json();
    j["command"] = to_string(cfg.command);
    j["config"] = cfg.values;
    j["config_text"] = echo_config(cfg);
    j["seed"] = cfg.seed;
    j["jobs"] = cfg.jobs;
    j["started"] = utc_timestamp();
    for (const auto& w : cfg.warnings) {
        man.warn(w);
        log << "warning: " << w << "\n";
    }
    Context c{cfg, man, log};
    int code = kExitError;
    try {
        switch (cfg.command) {
            case Command::roots: code = cmd_roots(c); break;
            case Command::tw: code = cmd_tw(c); break;
            case Command::scan_max: code = cmd_scan(c); break;
            case Command::sweep: code = cmd_sweep(c); break;
            case Command::evolve: code = cmd_evolve(c); break;
            case Command::fit_shift: code = cmd_fit(c); break;
            case Command::verify: code = cmd_verify(c); break;
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        man.add_task({{"name", to_string(cfg.command)}, {"status", "error"}, {"message", e.what()}});
        code = kExitError;
    }
    j["finished"] = utc_timestamp();
    j["exit_code"] = code;
    man.write();
    return code;
}

}  // namespace kpp
