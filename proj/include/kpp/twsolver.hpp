#pragma once

#include "kpp/model.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace kpp {

struct HeavisideSeed {};      // tanh ramp of width 2h centered at y = 0
struct SmoothedSeed {
    double width = 1.0;       // 0.5 (1 - tanh(y / width))
};
struct ProfileSeed {
    TWProfile profile;        // interpolated, extended by 1 on the left and 0 on the right
};
using Seed = std::variant<HeavisideSeed, SmoothedSeed, ProfileSeed>;

struct BvpOptions {
    Grid grid;
    double newton_tol = 1e-9;
    int max_iter = 200;
    int max_halvings = 30;  // backtracking: halve until the max-norm residual decreases
    Seed guess = HeavisideSeed{};
    ValidityCriteria validity;
    double perturbation = 0.0;  // amplitude of eight seeded random width-2 bumps added to the guess near the front
    std::uint64_t seed = 0;

    static BvpOptions defaults(int m, double lambda);
    void validate(int m) const;
};

/// Default node spacing: 0.05, coarsened for m >= 4 so that the round-off floor of the
/// 2m-th difference in long double, about eps * 4^m / h^{2m}, stays near 1e-8.
double default_spacing(int m);

/// [-100, R] with R = 400 (lambda >= 0.1), 1500 (0.02 <= lambda < 0.1), 6000 otherwise.
Grid default_grid(int m, double lambda);

enum class SolveStatus { converged, diverged, trivial, invalid };
const char* to_string(SolveStatus s);

struct SolveOutcome {
    SolveStatus status = SolveStatus::diverged;
    std::optional<TWProfile> profile;  // present for converged and invalid
    int iterations = 0;
    std::vector<double> residual_history;
    ValidityReport validity;
    std::string message;

    bool ok() const { return status == SolveStatus::converged; }
};

struct ResidualSystem {
    std::vector<double> residual;
    Eigen::SparseMatrix<double> jacobian;
};

/// Residual and Jacobian of the truncated BVP at f (f must live on opts.grid).
ResidualSystem assemble_system(const ModelSpec& spec, const std::vector<double>& f, const BvpOptions& opts);

/// Damped Newton on the truncated BVP. Converged profiles are aligned (f(0) = 1/2).
/// A failed start from HeavisideSeed is retried once from SmoothedSeed{1}.
SolveOutcome solve_tw(const ModelSpec& spec, const BvpOptions& opts);

/// Solves along `lambdas`, seeding each solve from the last converged profile. Without
/// `base`, each lambda gets its default grid and tolerances.
std::vector<SolveOutcome> continue_branch(int m, const std::vector<double>& lambdas,
                                          const std::optional<BvpOptions>& base = std::nullopt);

/// Index of the first non-converged entry after at least one converged one, or -1.
int branch_loss_index(const std::vector<SolveOutcome>& outcomes);

struct LambdaScan {
    int m = 2;
    std::vector<std::pair<double, SolveStatus>> samples;
    double lo = 0;
    double hi = 0;
    std::string predicate = "converged and valid, branch-continued seed, step <= 0.05";

    double width() const { return hi - lo; }
};

class ScanError : public std::runtime_error {
public:
    ScanError(const std::string& what, std::vector<std::pair<double, SolveStatus>> log)
        : std::runtime_error(what), samples(std::move(log)) {}
    std::vector<std::pair<double, SolveStatus>> samples;
};

/// Brackets the largest lambda for which the continued branch still yields valid profiles.
/// An ascending sweep from lo to hi finds the first loss (and rejects a valid-invalid-valid
/// pattern), then bisection narrows the bracket to width_tol.
LambdaScan scan_lambda_max(int m, double lo, double hi, double width_tol,
                           const std::optional<BvpOptions>& base = std::nullopt);

/// Crossings of the equilibrium beyond the front that bound an excursion of f - e with peak
/// above threshold. Sub-threshold wiggles between two larger excursions do not add crossings.
/// The default window is the side's half line measured from the front.
int count_oscillations(const TWProfile& p, EquilibriumSide side, double threshold,
                       std::optional<std::pair<double, double>> window = std::nullopt);

/// Max |p1 - p2| over the grid overlap (sampled on the finer grid). Same lambda required.
double compare_orders(const TWProfile& p1, const TWProfile& p2);

class ComparisonError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Translates the grid so the front crossing of 1/2 sits at y = 0.
TWProfile align_profile(const TWProfile& p);

/// Resamples onto `grid`, extending by 1 on the left and 0 on the right.
std::vector<double> resample(const TWProfile& p, const Grid& grid);

void write_profile_csv(const std::string& path, const TWProfile& p);
/// Residual and momentum are recomputed from the stored values.
TWProfile read_profile_csv(const std::string& path, int m, double lambda);

/// Max-norm collocation residual of f, evaluated in long double.
double collocation_residual(const ModelSpec& spec, const Grid& grid, const std::vector<double>& f);

}  // namespace kpp
