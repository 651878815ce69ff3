#include "kpp/cauchy.hpp"

#include "kpp/csv.hpp"
#include "kpp/stencil.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kpp {

namespace {

using SpD = Eigen::SparseMatrix<double>;
using LU = Eigen::SparseLU<SpD, Eigen::COLAMDOrdering<int>>;

double sup_norm(const std::vector<double>& u) {
    double s = 0;
    for (double v : u) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        s = std::max(s, std::abs(v));
    }
    return s;
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

void CauchyConfig::validate() const {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(h > 0)) throw std::invalid_argument("h must be > 0");
    if (!(behind > 0) || !(ahead > 0)) throw std::invalid_argument("window extents must be > 0");
    if (!(t_final > 0)) throw std::invalid_argument("t_final must be > 0");
    if (!(dt_max > 0) || !(dt_initial > 0) || !(dt_min > 0)) throw std::invalid_argument("time steps must be > 0");
    if (!(error_tol > 0)) throw std::invalid_argument("error_tol must be > 0");
    if (!(output_interval > 0)) throw std::invalid_argument("output_interval must be > 0");
    if (auto* s = std::get_if<SmoothedData>(&u0); s && !(s->width > 0))
        throw std::invalid_argument("smoothing width must be > 0");
    if (auto* c = std::get_if<CustomData>(&u0); c && (c->x.size() != c->u.size() || c->x.size() < 2))
        throw std::invalid_argument("custom data needs matching x and u with at least two samples");
    if (auto* c = std::get_if<CustomData>(&u0); c && !std::is_sorted(c->x.begin(), c->x.end(), std::less_equal<>{}))
        throw std::invalid_argument("custom data x must be strictly increasing");
}

struct ImexStepper::Impl {
    int m;
    double h;
    std::size_t n;
    bool reaction;
    std::map<double, std::unique_ptr<LU>> cache;

    LU& factor(double dt) {
        auto it = cache.find(dt);
        if (it != cache.end()) return *it->second;
        const SpD A = assemble_operator<double>(m, n, h, -dt * leading_sign(m), [](std::size_t) { return 0.0; },
                                                [](std::size_t) { return 1.0; });
        auto lu = std::make_unique<LU>();
        lu->compute(A);
        if (lu->info() != Eigen::Success) throw InstabilityError("IMEX matrix factorization failed");
        return *cache.emplace(dt, std::move(lu)).first->second;
    }
};

ImexStepper::ImexStepper(int m, double h, std::size_t n, bool reaction)
    : impl_(std::make_unique<Impl>(Impl{m, h, n, reaction, {}})) {}
ImexStepper::~ImexStepper() = default;
ImexStepper::ImexStepper(ImexStepper&&) noexcept = default;
ImexStepper& ImexStepper::operator=(ImexStepper&&) noexcept = default;

void ImexStepper::forget(double dt) { impl_->cache.erase(dt); }

CauchyState ImexStepper::step(const CauchyState& s, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("step: dt must be > 0");
    const std::size_t n = s.u.size();
    if (n != impl_->n) throw std::invalid_argument("step: state does not match the stepper size");
    const std::size_t m = static_cast<std::size_t>(impl_->m);
    // increment form (I - dt L) d = dt (L u + r(u)): equilibria give d = 0 exactly, and the
    // conditioning of I - dt L (about dt h^{-2m}) multiplies the increment, not u itself
    const auto w = even_difference_weights<double>(impl_->m);
    const double scale = dt * leading_sign(impl_->m) / std::pow(impl_->h, 2 * impl_->m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = m; i + m < n; ++i) {
        const double u = s.u[i];
        double d = 0;
        for (std::size_t k = 0; k <= 2 * m; ++k) d += w[k] * s.u[i - m + k];
        rhs[i] = scale * d + (impl_->reaction ? dt * u * (1 - u) : 0.0);
    }
    const Eigen::VectorXd d = impl_->factor(dt).solve(rhs);
    CauchyState out{s.t + dt, s.grid, s.u, s.m};
    for (std::size_t i = 0; i < n; ++i) out.u[i] += d[i];
    for (double x : out.u)
        if (!std::isfinite(x)) throw InstabilityError("step: non-finite value");
    return out;
}

CauchyState initial_state(const CauchyConfig& cfg) {
    cfg.validate();
    CauchyState s;
    s.m = cfg.m;
    s.grid = Grid::with_spacing(-cfg.behind, cfg.ahead, cfg.h);
    s.grid.validate(cfg.m);
    s.u.resize(s.grid.n);
    for (std::size_t i = 0; i < s.grid.n; ++i) {
        const double x = s.grid.at(i);
        if (std::holds_alternative<HeavisideData>(cfg.u0)) {
            s.u[i] = 0.5 * (1 - std::tanh(x / (2 * cfg.h)));
        } else if (auto* sm = std::get_if<SmoothedData>(&cfg.u0)) {
            s.u[i] = 0.5 * (1 - std::tanh(x / sm->width));
        } else {
            const auto& c = std::get<CustomData>(cfg.u0);
            if (x <= c.x.front()) {
                s.u[i] = c.u.front();
            } else if (x >= c.x.back()) {
                s.u[i] = c.u.back();
            } else {
                const auto j = static_cast<std::size_t>(std::upper_bound(c.x.begin(), c.x.end(), x) - c.x.begin());
                const double t = (x - c.x[j - 1]) / (c.x[j] - c.x[j - 1]);
                s.u[i] = (1 - t) * c.u[j - 1] + t * c.u[j];
            }
        }
    }
    return s;
}

double track_front(const CauchyState& s) {
    const auto x = locate_front(s.grid, s.u);
    if (!x) throw TrackingError("track_front: no qualifying downward crossing of 1/2");
    return *x;
}

CauchyResult evolve(const CauchyConfig& cfg, const std::function<void(const CauchyState&)>& observer) {
    CauchyResult res;
    CauchyState state = initial_state(cfg);
    const double far_left = state.u.front();
    const double far_right = state.u.back();
    const std::size_t n = state.grid.n;
    const std::size_t m = static_cast<std::size_t>(cfg.m);
    ImexStepper stepper(cfg.m, state.grid.spacing(), n, cfg.reaction);

    // dt lives on the ladder dt_max * 2^-k so that factorizations can be reused
    auto quantize = [&](double x) {
        double d = cfg.dt_max;
        while (d > x) d *= 0.5;
        return d;
    };
    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    while (next_snap < snaps.size() && snaps[next_snap] <= 0) {
        res.snapshots.push_back(state);
        ++next_snap;
    }

    auto record = [&](const CauchyState& s) {
        const auto x = locate_front(s.grid, s.u);
        if (!x) return;
        res.history.times.push_back(s.t);
        res.history.xf.push_back(*x);
        res.history.umax.push_back(*std::max_element(s.u.begin(), s.u.end()));
        res.history.umin.push_back(*std::min_element(s.u.begin(), s.u.end()));
    };
    record(state);
    if (observer) observer(state);

    const double span = cfg.behind + cfg.ahead;
    const double eps_t = 1e-12 * std::max(1.0, cfg.t_final);
    double dt = quantize(cfg.dt_initial);
    double next_out = cfg.output_interval;

    while (state.t < cfg.t_final - eps_t) {
        double target = std::min(next_out, cfg.t_final);
        if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
        double dt_try = dt;
        const bool partial = state.t + dt_try > target - eps_t;
        if (partial) dt_try = target - state.t;

        double err;
        CauchyState half;
        try {
            const CauchyState full = stepper.step(state, dt_try);
            half = stepper.step(stepper.step(state, dt_try / 2), dt_try / 2);
            err = 0;
            for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(full.u[i] - half.u[i]));
        } catch (const InstabilityError&) {
            err = std::numeric_limits<double>::infinity();
        }
        if (partial && dt_try != quantize(dt_try)) {
            stepper.forget(dt_try);
            stepper.forget(dt_try / 2);
        }

        if (!(err <= cfg.error_tol)) {
            ++res.rejected_steps;
            dt = quantize(dt_try / 2);
            if (dt < cfg.dt_min) {
                const double sup = sup_norm(state.u);
                if (sup > 10.0) {
                    res.blowup = {true, state.t, sup};
                    break;
                }
                throw IntegrationError("evolve: dt fell below dt_min without blow-up");
            }
            continue;
        }

        state = std::move(half);
        if (partial) state.t = target;  // remove accumulated rounding
        ++res.accepted_steps;
        if (observer) observer(state);

        const double sup = sup_norm(state.u);
        if (sup >= cfg.blowup_threshold) {
            res.blowup = {true, state.t, sup};
            record(state);
            break;
        }
        if (!partial) {
            const double fac = cfg.safety * std::sqrt(cfg.error_tol / std::max(err, 1e-300));
            dt = quantize(std::min(2 * dt_try, dt_try * fac));
        }
        if (state.t >= next_out - eps_t) {
            record(state);
            while (next_out <= state.t + eps_t) next_out += cfg.output_interval;
        }
        while (next_snap < snaps.size() && snaps[next_snap] <= state.t + eps_t) {
            res.snapshots.push_back(state);
            ++next_snap;
        }

        // keep the front in the rear half of the window
        if (const auto xf = locate_front(state.grid, state.u); xf && *xf - state.grid.left > span / 2) {
            const double hh = state.grid.spacing();
            const auto shift = static_cast<std::size_t>(std::llround((*xf - cfg.behind - state.grid.left) / hh));
            if (shift > 0 && shift < n) {
                std::vector<double> u(n, far_right);
                std::copy(state.u.begin() + static_cast<std::ptrdiff_t>(shift), state.u.end(), u.begin());
                for (std::size_t i = 0; i < m; ++i) {
                    u[i] = far_left;
                    u[n - 1 - i] = far_right;
                }
                state.u = std::move(u);
                state.grid = state.grid.translated(static_cast<double>(shift) * hh);
            }
        }
    }
    res.final_state = state;
    return res;
}

ShiftFit fit_shift(const FrontHistory& h, std::pair<double, double> window) {
    if (window.first < 1.0) throw FitError("fit_shift: t_min must be >= 1");
    std::vector<double> t, x;
    for (std::size_t i = 0; i < h.times.size(); ++i)
        if (h.times[i] >= window.first && h.times[i] <= window.second) {
            t.push_back(h.times[i]);
            x.push_back(h.xf[i]);
        }
    if (t.size() < 10) throw FitError("fit_shift: fewer than 10 samples in window");
    const auto rows = static_cast<Eigen::Index>(t.size());
    const Eigen::Map<const Eigen::VectorXd> b(x.data(), rows);

    auto solve = [&](int which, Eigen::VectorXd& coef) {
        Eigen::MatrixXd A(rows, 3);
        for (Eigen::Index i = 0; i < rows; ++i) {
            A(i, 0) = t[i];
            A(i, 1) = which == 0 ? std::log(t[i]) : std::sqrt(t[i]);
            A(i, 2) = 1.0;
        }
        if (which == 2) A = A(Eigen::all, std::vector<int>{0, 2}).eval();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        if (qr.rank() < A.cols()) throw FitError("fit_shift: rank-deficient design (window too short)");
        coef = qr.solve(b);
        return std::sqrt((A * coef - b).squaredNorm() / static_cast<double>(rows));
    };

    ShiftFit f;
    Eigen::VectorXd coef;
    f.residual_rms = solve(0, coef);
    f.lambda0 = coef[0];
    f.k = -coef[1];
    f.c = -coef[2];
    Eigen::VectorXd tmp;
    f.rms_sqrt = solve(1, tmp);
    f.rms_linear = solve(2, tmp);
    f.window = window;
    f.samples = t.size();
    return f;
}

double CProfile::operator()(double x) const { return (1.0 - std::tanh(x / ell)) / 12.0; }

double lyapunov_value(const CauchyState& s, const CProfile& c, bool analytic_tails) {
    if (s.m != 2) throw std::invalid_argument("lyapunov_value: the functional is specific to m = 2");
    const std::size_t n = s.u.size();
    const double h = s.grid.spacing();
    const auto& u = s.u;
    double grad = 0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double d2 = (u[k + 1] - 2 * u[k] + u[k - 1]) / (h * h);
        grad += d2 * d2;
    }
    std::vector<double> pot(n);
    for (std::size_t i = 0; i < n; ++i) pot[i] = c(s.grid.at(i)) - 0.5 * u[i] * u[i] + u[i] * u[i] * u[i] / 3.0;
    double L = 0.5 * h * grad + trapezoid(pot, h);
    if (analytic_tails) {
        if (std::abs(u.front() - 1.0) > 1e-6 || std::abs(u.back()) > 1e-6)
            throw MonitorError("lyapunov_value: window ends are not at the states 1 and 0 (window too small)");
        const double a = s.grid.left, b = s.grid.right;
        L += -c.ell * softplus(2 * a / c.ell) / 12.0;
        L += c.ell * softplus(-2 * b / c.ell) / 12.0;
    }
    return L;
}

LyapunovSeries lyapunov_monitor(const std::vector<CauchyState>& snapshots, const CProfile& c, bool analytic_tails) {
    LyapunovSeries out;
    for (const auto& s : snapshots) {
        out.times.push_back(s.t);
        out.values.push_back(lyapunov_value(s, c, analytic_tails));
    }
    return out;
}

int first_increase(const LyapunovSeries& s, double tol) {
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i)
        if (s.values[i + 1] > s.values[i] + tol) return static_cast<int>(i);
    return -1;
}

SelfSimilarReport selfsimilar_domain_check(const CauchyState& s, const Grid& zgrid, const std::vector<double>& V,
                                           double tol, double z_max) {
    if (V.empty() || V.size() != zgrid.n) throw DependencyError("selfsimilar_domain_check: self-similar profile unavailable");
    if (!(s.t > 0)) throw std::invalid_argument("selfsimilar_domain_check: t must be > 0");
    SelfSimilarReport r;
    r.t = s.t;
    const double tau = std::pow(s.t, 1.0 / (2 * s.m));
    r.predicted = tau * std::abs(std::log(s.t));
    const std::size_t n = s.u.size();
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = s.grid.at(i) / tau;
        diff[i] = std::abs(s.u[i] - interpolate(zgrid, V, z));
        if (std::abs(z) <= z_max) r.sup_compact = std::max(r.sup_compact, diff[i]);
    }
    // grow |x| <= X outward from the origin while every node stays within tol
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(s.grid.at(a)) < std::abs(s.grid.at(b));
    });
    r.extent = 0;
    for (std::size_t i : order) {
        if (diff[i] > tol) break;
        r.extent = std::abs(s.grid.at(i));
    }
    r.ratio = r.predicted > 0 ? r.extent / r.predicted : 0.0;
    return r;
}

void write_snapshot_csv(const std::string& path, const CauchyState& s) {
    const auto x = s.grid.nodes();
    write_csv(path, {"x", "u"}, {&x, &s.u}, {"t=" + format_double(s.t)});
}

void write_history_csv(const std::string& path, const FrontHistory& h) {
    write_csv(path, {"t", "xf"}, {&h.times, &h.xf});
}

FrontHistory read_history_csv(const std::string& path) {
    auto t = read_csv(path);
    if (t.header != std::vector<std::string>{"t", "xf"}) throw std::runtime_error(path + ": expected header t,xf");
    FrontHistory h;
    h.times = std::move(t.columns[0]);
    h.xf = std::move(t.columns[1]);
    return h;
}

}  // namespace kpp
