#include "kpp/twsolver.hpp"

#include "kpp/stencil.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>
#include <tuple>

namespace kpp {

namespace {

using ld = long double;
using VecL = Eigen::Matrix<ld, Eigen::Dynamic, 1>;
using SpL = Eigen::SparseMatrix<ld>;

// Below this Newton step size the iterate is as good as the arithmetic allows.
constexpr double kNegligibleStep = 1e-10;

// Residual noise of the 2m-th difference: eps * sum|w_k| / h^{2m}, with a safety factor.
ld roundoff_floor(int m, ld h) {
    return 10 * LDBL_EPSILON * std::pow(ld(4), m) / std::pow(h, 2 * m);
}

struct TwSystem {
    int m;
    std::size_t n;
    SpL A;
    VecL b;

    TwSystem(const ModelSpec& spec, const Grid& grid) : m(spec.m), n(grid.n) {
        const ld h = static_cast<ld>(grid.right - grid.left) / static_cast<ld>(grid.n - 1);
        const ld lam = spec.lambda;
        A = assemble_operator<ld>(m, n, h, ld(leading_sign(m)), [lam](std::size_t) { return lam; },
                                  [](std::size_t) { return ld(0); });
        b = VecL::Zero(n);
        for (int i = 0; i < m; ++i) b[i] = 1;
    }

    VecL residual(const VecL& f) const {
        VecL r = A * f - b;
        for (std::size_t i = m; i + m < n; ++i) r[i] += f[i] * (1 - f[i]);
        return r;
    }

    SpL jacobian(const VecL& f) const {
        SpL J = A;
        for (std::size_t i = m; i + m < n; ++i) J.coeffRef(i, i) += 1 - 2 * f[i];
        return J;
    }
};

ld max_abs(const VecL& v) {
    ld s = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const ld a = std::fabs(v[i]);
        if (!(a == a)) return std::numeric_limits<ld>::infinity();
        s = std::max(s, a);
    }
    return s;
}

VecL initial_guess(const BvpOptions& opts, int m) {
    const Grid& g = opts.grid;
    const std::size_t n = g.n;
    VecL f(n);
    if (std::holds_alternative<HeavisideSeed>(opts.guess)) {
        const double w = 2 * g.spacing();
        for (std::size_t i = 0; i < n; ++i) f[i] = 0.5 * (1 - std::tanh(g.at(i) / w));
    } else if (auto* s = std::get_if<SmoothedSeed>(&opts.guess)) {
        for (std::size_t i = 0; i < n; ++i) f[i] = 0.5 * (1 - std::tanh(g.at(i) / s->width));
    } else {
        // seed in the frame the profile was solved in: the truncation pins the front there
        TWProfile seed = std::get<ProfileSeed>(opts.guess).profile;
        seed.grid = seed.grid.translated(seed.shift);
        const auto v = resample(seed, g);
        for (std::size_t i = 0; i < n; ++i) f[i] = v[i];
    }
    if (opts.perturbation > 0) {
        // smooth bumps: nodewise noise would put an h^{-2m} spike into the first residual
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> amp(-opts.perturbation, opts.perturbation), at(-20.0, 20.0);
        for (int k = 0; k < 8; ++k) {
            const double a = amp(rng), c = at(rng);
            for (std::size_t i = 0; i < n; ++i) {
                const double z = (g.at(i) - c) / 2.0;
                f[i] += a * std::exp(-z * z);
            }
        }
    }
    for (int i = 0; i < m; ++i) {
        f[i] = 1;
        f[n - 1 - i] = 0;
    }
    return f;
}

BvpOptions options_for(int m, double lambda, const std::optional<BvpOptions>& base, Seed seed) {
    BvpOptions o = base ? *base : BvpOptions::defaults(m, lambda);
    o.guess = std::move(seed);
    return o;
}

}  // namespace

double default_spacing(int m) {
    const double eps = LDBL_EPSILON;
    return std::max(0.05, std::pow(std::pow(4.0, m) * eps / 1e-8, 1.0 / (2 * m)));
}

Grid default_grid(int m, double lambda) {
    const double right = lambda >= 0.1 ? 400.0 : (lambda >= 0.02 ? 1500.0 : 6000.0);
    return Grid::with_spacing(-100.0, right, default_spacing(m));
}

BvpOptions BvpOptions::defaults(int m, double lambda) {
    BvpOptions o;
    o.grid = default_grid(m, lambda);
    return o;
}

void BvpOptions::validate(int m) const {
    grid.validate(m);
    if (!(newton_tol > 0)) throw std::invalid_argument("newton_tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (auto* s = std::get_if<SmoothedSeed>(&guess); s && !(s->width > 0))
        throw std::invalid_argument("smoothing width must be > 0");
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::diverged: return "diverged";
        case SolveStatus::trivial: return "trivial";
        case SolveStatus::invalid: return "invalid";
    }
    return "?";
}

ResidualSystem assemble_system(const ModelSpec& spec, const std::vector<double>& f, const BvpOptions& opts) {
    spec.validate();
    opts.grid.validate(spec.m);
    if (f.size() != opts.grid.n) throw std::invalid_argument("assemble_system: vector does not match grid");
    TwSystem sys(spec, opts.grid);
    VecL fl(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) fl[i] = f[i];
    const VecL r = sys.residual(fl);
    ResidualSystem out;
    out.residual.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out.residual[i] = static_cast<double>(r[i]);
    out.jacobian = sys.jacobian(fl).cast<double>();
    return out;
}

double collocation_residual(const ModelSpec& spec, const Grid& grid, const std::vector<double>& f) {
    TwSystem sys(spec, grid);
    VecL fl(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) fl[i] = f[i];
    return static_cast<double>(max_abs(sys.residual(fl)));
}

namespace {

SolveOutcome newton_solve(const ModelSpec& spec, const BvpOptions& opts) {
    SolveOutcome out;
    const TwSystem sys(spec, opts.grid);
    const ld floor_tol = std::min<ld>(opts.validity.max_residual,
                                      std::max<ld>(opts.newton_tol, roundoff_floor(spec.m, opts.grid.spacing())));
    VecL f = initial_guess(opts, spec.m);
    VecL r = sys.residual(f);
    ld nr = max_abs(r);
    out.residual_history.push_back(static_cast<double>(nr));

    Eigen::SparseLU<SpL, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(sys.A);

    bool converged = false;
    for (int it = 0;; ++it) {
        if (nr <= opts.newton_tol) {
            converged = true;
            break;
        }
        if (it >= opts.max_iter) break;
        lu.factorize(sys.jacobian(f));
        if (lu.info() != Eigen::Success) {
            out.message = "singular Jacobian";
            break;
        }
        const VecL dx = lu.solve(-r);
        const ld step = max_abs(dx);
        if (!std::isfinite(static_cast<double>(step))) {
            out.message = "non-finite Newton step";
            break;
        }
        ld alpha = 1;
        bool accepted = false;
        VecL fn, rn;
        ld nrn = 0;
        for (int k = 0; k <= opts.max_halvings; ++k, alpha /= 2) {
            fn = f + alpha * dx;
            rn = sys.residual(fn);
            nrn = max_abs(rn);
            if (nrn < nr) {
                accepted = true;
                break;
            }
            // Near-translation steps: the front moves by O(1) and the residual test rejects
            // good steps. Accept when the simplified Newton correction contracts instead.
            const VecL dbar = lu.solve(-rn);
            if (max_abs(dbar) <= (1 - alpha / 2) * step && nrn < 10 * nr + 1) {
                accepted = true;
                break;
            }
        }
        out.iterations = it + 1;
        if (!accepted) {
            // at the round-off floor the residual is noise and cannot decrease further
            if (nr <= floor_tol || (nr <= opts.validity.max_residual && step <= kNegligibleStep)) {
                converged = true;
                out.message = "stopped at round-off floor";
            } else {
                out.message = "line search failed";
            }
            break;
        }
        f = std::move(fn);
        r = std::move(rn);
        nr = nrn;
        out.residual_history.push_back(static_cast<double>(nr));
        if (alpha * step <= kNegligibleStep && nr <= opts.validity.max_residual) {
            converged = true;
            if (nr > opts.newton_tol) out.message = "stopped at round-off floor";
            break;
        }
    }
    if (!converged) {
        out.status = SolveStatus::diverged;
        if (out.message.empty()) out.message = "max_iter reached";
        return out;
    }

    TWProfile p;
    p.grid = opts.grid;
    p.values.resize(opts.grid.n);
    for (std::size_t i = 0; i < opts.grid.n; ++i) p.values[i] = static_cast<double>(f[i]);
    p.lambda = spec.lambda;
    p.m = spec.m;
    p.residual_norm = static_cast<double>(nr);

    const auto xc = locate_front(p.grid, p.values);
    const double margin = 5.0;
    if (!xc || *xc < p.grid.left + margin || *xc > p.grid.right - margin) {
        out.status = SolveStatus::trivial;
        out.message = "no interior front";
        p.momentum = momentum_identity(p);
        out.profile = std::move(p);
        return out;
    }
    p.grid = p.grid.translated(-*xc);
    p.aligned = true;
    p.shift = *xc;
    p.momentum = momentum_identity(p);
    out.validity = check_validity(p, opts.validity);
    out.status = out.validity.valid() ? SolveStatus::converged : SolveStatus::invalid;
    if (!out.validity.valid()) out.message = "validity: " + out.validity.describe();
    out.profile = std::move(p);
    return out;
}

}  // namespace

SolveOutcome solve_tw(const ModelSpec& spec, const BvpOptions& opts) {
    spec.validate();
    opts.validate(spec.m);
    SolveOutcome out = newton_solve(spec, opts);
    if (out.status != SolveStatus::diverged || !std::holds_alternative<HeavisideSeed>(opts.guess)) return out;
    // The 2h ramp leaves a residual of order h^{-2m}; a few lambdas stall on it.
    BvpOptions retry = opts;
    retry.guess = SmoothedSeed{1.0};
    SolveOutcome second = newton_solve(spec, retry);
    second.iterations += out.iterations;
    second.residual_history.insert(second.residual_history.begin(), out.residual_history.begin(),
                                   out.residual_history.end());
    second.message = "step seed: " + out.message + "; restarted from width-1 seed" +
                     (second.message.empty() ? "" : ": " + second.message);
    return second;
}

std::vector<SolveOutcome> continue_branch(int m, const std::vector<double>& lambdas,
                                          const std::optional<BvpOptions>& base) {
    for (std::size_t i = 2; i < lambdas.size(); ++i)
        if ((lambdas[i] - lambdas[i - 1]) * (lambdas[1] - lambdas[0]) < 0)
            throw std::invalid_argument("continue_branch: lambdas must be monotone");
    std::vector<SolveOutcome> out;
    std::optional<TWProfile> last;
    for (double lam : lambdas) {
        Seed seed = base ? base->guess : Seed{HeavisideSeed{}};
        if (last) seed = ProfileSeed{*last};
        out.push_back(solve_tw({m, lam}, options_for(m, lam, base, std::move(seed))));
        if (out.back().ok()) last = out.back().profile;
    }
    return out;
}

int branch_loss_index(const std::vector<SolveOutcome>& outcomes) {
    bool seen = false;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].ok())
            seen = true;
        else if (seen)
            return static_cast<int>(i);
    }
    return -1;
}

LambdaScan scan_lambda_max(int m, double lo, double hi, double width_tol, const std::optional<BvpOptions>& base) {
    if (!(lo < hi) || !(width_tol > 0)) throw std::invalid_argument("scan_lambda_max: need lo < hi, width_tol > 0");
    constexpr double kStep = 0.05;
    LambdaScan scan;
    scan.m = m;
    auto solve_at = [&](double lam, Seed seed) {
        auto o = solve_tw({m, lam}, options_for(m, lam, base, std::move(seed)));
        scan.samples.emplace_back(lam, o.status);
        return o;
    };

    auto first = solve_at(lo, base ? base->guess : Seed{HeavisideSeed{}});
    if (!first.ok()) throw ScanError("scan_lambda_max: no valid profile at lo", scan.samples);
    TWProfile lo_profile = *first.profile;

    const int steps = std::max(1, static_cast<int>(std::ceil((hi - lo) / kStep - 1e-9)));
    double last_ok = lo;
    std::optional<double> first_fail;
    for (int k = 1; k <= steps; ++k) {
        const double lam = (k == steps) ? hi : lo + k * (hi - lo) / steps;
        auto o = solve_at(lam, ProfileSeed{lo_profile});
        if (o.ok()) {
            if (first_fail) throw ScanError("scan_lambda_max: existence predicate is not monotone", scan.samples);
            lo_profile = *o.profile;
            last_ok = lam;
        } else if (!first_fail) {
            first_fail = lam;
        }
    }
    if (!first_fail) throw ScanError("scan_lambda_max: profile still valid at hi", scan.samples);

    scan.lo = last_ok;
    scan.hi = *first_fail;
    // the seed for every probe is the profile at the current lower end, at most kStep away
    while (scan.hi - scan.lo > width_tol) {
        const double mid = 0.5 * (scan.lo + scan.hi);
        auto o = solve_at(mid, ProfileSeed{lo_profile});
        if (o.ok()) {
            scan.lo = mid;
            lo_profile = *o.profile;
        } else {
            scan.hi = mid;
        }
    }
    return scan;
}

int count_oscillations(const TWProfile& p, EquilibriumSide side, double threshold,
                       std::optional<std::pair<double, double>> window) {
    double front = 0.0;
    if (!p.aligned) {
        const auto xc = locate_front(p.grid, p.values);
        front = xc ? *xc : 0.0;
    }
    double a, b;
    if (window) {
        std::tie(a, b) = *window;
    } else if (side == EquilibriumSide::zero) {
        a = front;
        b = p.grid.right + 1;
    } else {
        a = p.grid.left - 1;
        b = front;
    }
    const double e = equilibrium_value(side);
    struct Run {
        int sign;
        double peak;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        const double y = p.grid.at(i);
        if (!(y > a && y < b)) continue;
        const double g = p.values[i] - e;
        if (g == 0) continue;
        const int s = g > 0 ? 1 : -1;
        if (runs.empty() || runs.back().sign != s) runs.push_back({s, 0.0});
        runs.back().peak = std::max(runs.back().peak, std::abs(g));
    }
    // A crossing counts when it bounds an excursion above threshold. Small excursions between
    // two large ones are chatter: an odd number of flips there is one crossing, an even number none.
    std::vector<std::size_t> big;
    for (std::size_t i = 0; i < runs.size(); ++i)
        if (runs[i].peak > threshold) big.push_back(i);
    if (big.empty()) return 0;
    int changes = 0;
    for (std::size_t j = 1; j < big.size(); ++j)
        if (runs[big[j]].sign != runs[big[j - 1]].sign) ++changes;
    if (big.front() > 0 && runs[big.front() - 1].sign != runs[big.front()].sign) ++changes;
    if (big.back() + 1 < runs.size() && runs[big.back() + 1].sign != runs[big.back()].sign) ++changes;
    return changes;
}

double compare_orders(const TWProfile& p1, const TWProfile& p2) {
    if (std::abs(p1.lambda - p2.lambda) > 1e-12 * std::max(1.0, std::abs(p1.lambda)))
        throw std::invalid_argument("compare_orders: profiles have different lambda");
    const double lo = std::max(p1.grid.left, p2.grid.left);
    const double hi = std::min(p1.grid.right, p2.grid.right);
    if (!(lo < hi)) throw ComparisonError("compare_orders: grids do not overlap");
    const Grid& fine = p1.grid.spacing() <= p2.grid.spacing() ? p1.grid : p2.grid;
    double d = 0;
    for (std::size_t i = 0; i < fine.n; ++i) {
        const double y = fine.at(i);
        if (y < lo || y > hi) continue;
        d = std::max(d, std::abs(interpolate(p1.grid, p1.values, y) - interpolate(p2.grid, p2.values, y)));
    }
    return d;
}

TWProfile align_profile(const TWProfile& p) {
    const auto xc = locate_front(p.grid, p.values);
    if (!xc) throw std::runtime_error("align_profile: no front crossing of 1/2");
    TWProfile q = p;
    q.grid = p.grid.translated(-*xc);
    q.aligned = true;
    q.shift = p.shift + *xc;
    return q;
}

std::vector<double> resample(const TWProfile& p, const Grid& grid) {
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double y = grid.at(i);
        if (y < p.grid.left)
            v[i] = 1.0;
        else if (y > p.grid.right)
            v[i] = 0.0;
        else
            v[i] = interpolate(p.grid, p.values, y);
    }
    return v;
}

}  // namespace kpp
