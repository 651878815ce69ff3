#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpp {

/// One KPP-(2m,1) instance: -lambda f' = (-1)^{m+1} f^{(2m)} + f(1-f).
struct ModelSpec {
    int m = 2;
    double lambda = 0.5;

    void validate() const;
    bool operator==(const ModelSpec&) const = default;
};

/// Sign of the leading term, (-1)^{m+1}.
inline int leading_sign(int m) { return (m % 2 == 1) ? 1 : -1; }

/// Uniform grid on [left, right] with n nodes.
struct Grid {
    double left = -100.0;
    double right = 400.0;
    std::size_t n = 10001;

    double spacing() const { return (right - left) / static_cast<double>(n - 1); }
    double at(std::size_t i) const { return left + static_cast<double>(i) * spacing(); }
    std::vector<double> nodes() const;

    // throws std::invalid_argument when the grid cannot carry a 2m-order stencil
    void validate(int m) const;

    /// Grid with spacing as close to h as the interval allows (right is kept).
    static Grid with_spacing(double left, double right, double h);

    Grid translated(double shift) const { return {left + shift, right + shift, n}; }

    bool operator==(const Grid&) const = default;
};

enum class EquilibriumSide { zero, one };

const char* to_string(EquilibriumSide side);
inline double equilibrium_value(EquilibriumSide side) { return side == EquilibriumSide::zero ? 0.0 : 1.0; }

struct TWProfile {
    Grid grid;
    std::vector<double> values;
    double lambda = 0.0;
    int m = 2;
    double residual_norm = 0.0;  // max norm of the collocation residual
    double momentum = 0.0;       // lambda * int (f')^2
    bool aligned = false;
    double shift = 0.0;  // translation removed by alignment: solver coordinate = y + shift
};

/// Numerical existence test applied to every solver output.
struct ValidityCriteria {
    double max_residual = 1e-6;
    double momentum_tol = 1e-2;
    double max_sup = 10.0;
    double tail_tol = 1e-3;
};

struct ValidityReport {
    bool residual_ok = false;
    bool momentum_ok = false;
    bool bounded_ok = false;
    bool tails_ok = false;

    bool valid() const { return residual_ok && momentum_ok && bounded_ok && tails_ok; }
    std::string describe() const;
};

ValidityReport check_validity(const TWProfile& p, const ValidityCriteria& c = {});

class QuadratureError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SingularityError : public std::domain_error {
    using std::domain_error::domain_error;
};

/// Centered second-order difference, one-sided second-order at the ends.
std::vector<double> first_derivative(const std::vector<double>& v, double h);

/// Composite trapezoid rule on a uniform grid.
double trapezoid(const std::vector<double>& v, double h);

/// lambda * int (f')^2 dy; equals 1/6 for every travelling wave, any m.
double momentum_identity(const TWProfile& p);
double momentum_identity(const std::vector<double>& f, double h, double lambda);

/// f0(y) = -840/(y0-y)^4, the exact solution of f'''' = -f^2.
std::vector<double> blowup_profile(double y0, const Grid& grid);

/// k-th derivative of f0 at y, in closed form.
double blowup_derivative(double y0, double y, int k);

/// Result of substituting eps = c/(y0-y) into the linearized blow-up correction
///   (y0-y)^4 eps'''' - 1680 eps = kappa*lambda/(y0-y).
struct BlowupBalance {
    double lambda = 0.0;
    double kappa = 0.0;         // recovered from lambda (y0-y)^4 f0'(y); -3360
    double operator_coeff = 0;  // 24 - 1680
    double c = 0.0;             // balancing coefficient, |c| = 140|lambda|/69
    double residual = 0.0;      // max balance defect over sample points
};

BlowupBalance blowup_correction_check(double lambda, double y0);

/// Linear interpolation of nodal values; outside the grid the nearest end value is returned.
double interpolate(const Grid& grid, const std::vector<double>& v, double y);

/// Position of the right-most downward crossing of `level` that has v > level on the
/// `window`-wide stretch immediately to its left. Empty if there is none.
std::optional<double> locate_front(const Grid& grid, const std::vector<double>& v,
                                   double level = 0.5, double window = 5.0);

}  // namespace kpp
