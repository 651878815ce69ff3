#pragma once

#include "kpp/model.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace kpp {

struct HeavisideData {};  // 0.5 (1 - tanh(x / 2h))
struct SmoothedData {
    double width = 1.0;   // 0.5 (1 - tanh(x / width))
};
struct CustomData {
    std::vector<double> x;  // increasing; linear interpolation, constant extension
    std::vector<double> u;
};
using InitialData = std::variant<HeavisideData, SmoothedData, CustomData>;

struct CauchyConfig {
    int m = 2;
    double h = 0.05;
    double behind = 150.0;  // window is [x_f - behind, x_f + ahead]
    double ahead = 450.0;
    double t_final = 10.0;
    double dt_initial = 1e-3;
    double dt_max = 0.05;
    double dt_min = 1e-10;
    double error_tol = 1e-4;  // step-doubling tolerance on max |u_full - u_half|
    double safety = 0.9;
    double output_interval = 1.0;
    std::vector<double> snapshot_times;
    double blowup_threshold = 1e3;
    bool reaction = true;
    InitialData u0 = HeavisideData{};

    void validate() const;
};

/// Solution on the current window at time t. Also used as a snapshot.
struct CauchyState {
    double t = 0.0;
    Grid grid;
    std::vector<double> u;
    int m = 2;
};

struct FrontHistory {
    std::vector<double> times;
    std::vector<double> xf;
    std::vector<double> umax;
    std::vector<double> umin;
};

struct BlowupReport {
    bool detected = false;
    double t_detect = 0.0;
    double sup_norm_at_detect = 0.0;
};

struct CauchyResult {
    FrontHistory history;
    std::vector<CauchyState> snapshots;
    BlowupReport blowup;
    CauchyState final_state;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

class InstabilityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class IntegrationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class TrackingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class FitError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class MonitorError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class DependencyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// (I - dt L) u_new = u + dt u(1-u) with L = (-1)^{m+1} D^{2m}; the m outermost nodes on
/// each side keep their values. Factorizations are cached per dt.
class ImexStepper {
public:
    ImexStepper(int m, double h, std::size_t n, bool reaction = true);
    ~ImexStepper();
    ImexStepper(ImexStepper&&) noexcept;
    ImexStepper& operator=(ImexStepper&&) noexcept;

    CauchyState step(const CauchyState& s, double dt);
    void forget(double dt);  // drops a cached factorization

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

CauchyState initial_state(const CauchyConfig& cfg);

/// Integrates to t_final or blow-up. The observer, if given, sees every accepted step.
CauchyResult evolve(const CauchyConfig& cfg,
                    const std::function<void(const CauchyState&)>& observer = nullptr);

/// Right-most downward crossing of 1/2 with u > 1/2 on the width-5 stretch to its left.
double track_front(const CauchyState& s);

struct ShiftFit {
    double lambda0 = 0.0;
    double k = 0.0;
    double c = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    double residual_rms = 0.0;
    double rms_linear = 0.0;  // basis {t, 1}
    double rms_sqrt = 0.0;    // basis {t, sqrt t, 1}
    std::size_t samples = 0;
};

/// Least squares x_f = lambda0 t - k log t - c over samples with t in window.
ShiftFit fit_shift(const FrontHistory& h, std::pair<double, double> window);
inline ShiftFit fit_shift(const FrontHistory& h, double t_final) { return fit_shift(h, {t_final / 10, t_final}); }

/// c(x) = (1/12)(1 - tanh(x / ell)): 1/6 at -inf, 0 at +inf.
struct CProfile {
    double ell = 1.0;
    double operator()(double x) const;
};

struct LyapunovSeries {
    std::vector<double> times;
    std::vector<double> values;
};

/// L[u] = 1/2 int (u_xx)^2 + int (c - u^2/2 + u^3/3). With analytic tails the states 1 (left)
/// and 0 (right) are continued beyond the window in closed form; otherwise L covers the window
/// only. Fourth-order (m = 2) snapshots only.
double lyapunov_value(const CauchyState& s, const CProfile& c, bool analytic_tails = true);
LyapunovSeries lyapunov_monitor(const std::vector<CauchyState>& snapshots, const CProfile& c,
                                bool analytic_tails = true);

/// Index of the first i with L[i+1] > L[i] + tol, or -1 when the series never increases.
int first_increase(const LyapunovSeries& s, double tol);

struct SelfSimilarReport {
    double t = 0.0;
    double extent = 0.0;     // largest X with |u - V(x / t^{1/2m})| <= tol on |x| <= X
    double predicted = 0.0;  // t^{1/2m} |log t|
    double ratio = 0.0;
    double sup_compact = 0.0;  // sup |u - V| over |z| <= z_max
};

/// Compares a small-time snapshot with the self-similar profile V (given on a z grid).
SelfSimilarReport selfsimilar_domain_check(const CauchyState& s, const Grid& zgrid, const std::vector<double>& V,
                                           double tol = 0.1, double z_max = 5.0);

void write_snapshot_csv(const std::string& path, const CauchyState& s);
void write_history_csv(const std::string& path, const FrontHistory& h);
FrontHistory read_history_csv(const std::string& path);

}  // namespace kpp
