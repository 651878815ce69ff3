#include "kpp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kpp {

void ModelSpec::validate() const {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite");
}

std::vector<double> Grid::nodes() const {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = at(i);
    return y;
}

void Grid::validate(int m) const {
    if (!(left < right)) throw std::invalid_argument("grid: left must be < right");
    if (n < static_cast<std::size_t>(4 * m + 1))
        throw std::invalid_argument("grid: need at least 4m+1 nodes, got " + std::to_string(n));
}

Grid Grid::with_spacing(double left, double right, double h) {
    if (!(h > 0) || !(left < right)) throw std::invalid_argument("grid: bad spacing or interval");
    const auto cells = static_cast<std::size_t>(std::llround((right - left) / h));
    return {left, right, std::max<std::size_t>(cells, 1) + 1};
}

const char* to_string(EquilibriumSide side) { return side == EquilibriumSide::zero ? "zero" : "one"; }

std::string ValidityReport::describe() const {
    if (valid()) return "valid";
    std::ostringstream os;
    const char* sep = "";
    if (!residual_ok) { os << sep << "residual"; sep = ","; }
    if (!momentum_ok) { os << sep << "momentum"; sep = ","; }
    if (!bounded_ok) { os << sep << "unbounded"; sep = ","; }
    if (!tails_ok) { os << sep << "tails"; }
    return os.str();
}

ValidityReport check_validity(const TWProfile& p, const ValidityCriteria& c) {
    ValidityReport r;
    const auto& f = p.values;
    if (f.empty()) return r;
    const bool finite = std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
    r.residual_ok = std::isfinite(p.residual_norm) && p.residual_norm <= c.max_residual;
    r.momentum_ok = finite && std::abs(p.momentum - 1.0 / 6.0) <= c.momentum_tol;
    double sup = 0;
    for (double v : f) sup = std::max(sup, std::abs(v));
    r.bounded_ok = finite && sup <= c.max_sup;

    // The end nodes are pinned, so the tails are read off the outermost stretch of width 5.
    const double h = p.grid.spacing();
    const std::size_t k = std::min<std::size_t>(f.size() / 4, static_cast<std::size_t>(5.0 / h) + 1);
    double left_dev = 0, right_dev = 0;
    for (std::size_t i = 0; i < k; ++i) {
        left_dev = std::max(left_dev, std::abs(f[i] - 1.0));
        right_dev = std::max(right_dev, std::abs(f[f.size() - 1 - i]));
    }
    r.tails_ok = finite && left_dev <= c.tail_tol && right_dev <= c.tail_tol;
    return r;
}

double momentum_identity(const std::vector<double>& f, double h, double lambda) {
    for (double v : f)
        if (!std::isfinite(v)) throw QuadratureError("momentum_identity: non-finite profile value");
    auto d = first_derivative(f, h);
    for (auto& v : d) v *= v;
    const double q = lambda * trapezoid(d, h);
    if (!std::isfinite(q)) throw QuadratureError("momentum_identity: quadrature overflow");
    return q;
}

double momentum_identity(const TWProfile& p) {
    return momentum_identity(p.values, p.grid.spacing(), p.lambda);
}

std::vector<double> blowup_profile(double y0, const Grid& grid) {
    if (grid.right >= y0)
        throw SingularityError("blowup_profile: grid must lie strictly left of y0");
    std::vector<double> f(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double d = y0 - grid.at(i);
        f[i] = -840.0 / (d * d * d * d);
    }
    return f;
}

double blowup_derivative(double y0, double y, int k) {
    const double d = y0 - y;
    if (d == 0) throw SingularityError("blowup_derivative: y == y0");
    double coeff = -840.0;
    for (int j = 0; j < k; ++j) coeff *= 4 + j;  // d/dy (y0-y)^{-p} = p (y0-y)^{-p-1}
    return coeff * std::pow(d, -4 - k);
}

BlowupBalance blowup_correction_check(double lambda, double y0) {
    BlowupBalance b;
    b.lambda = lambda;
    const double d_ref = 1.0;
    // forcing: lambda (y0-y)^4 f0'(y) = kappa lambda / (y0-y)
    b.kappa = std::pow(d_ref, 5) * blowup_derivative(y0, y0 - d_ref, 1);
    // eps = 1/(y0-y): eps'''' = 4! (y0-y)^{-5}
    b.operator_coeff = 24.0 - 1680.0;
    b.c = b.kappa * lambda / b.operator_coeff + 0.0;

    for (double d : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double eps = b.c / d;
        const double eps4 = 24.0 * b.c / std::pow(d, 5);
        const double lhs = std::pow(d, 4) * eps4 - 1680.0 * eps;
        const double rhs = lambda * std::pow(d, 4) * blowup_derivative(y0, y0 - d, 1);
        b.residual = std::max(b.residual, std::abs(lhs - rhs) * d);
    }
    return b;
}

}  // namespace kpp
