#include "kpp/charpoly.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace kpp {

cplx CharPoly::evaluate(cplx mu) const {
    cplx acc = 0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * mu + coeffs[k];
    return acc;
}

cplx CharPoly::derivative(cplx mu) const {
    cplx acc = 0;
    for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * mu + static_cast<double>(k) * coeffs[k];
    return acc;
}

double CharPoly::scale(cplx mu) const {
    double acc = 0, r = std::abs(mu);
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * r + std::abs(coeffs[k]);
    return acc;
}

int RootSet::total_multiplicity() const {
    int s = 0;
    for (const auto& r : roots) s += r.multiplicity;
    return s;
}

CharPoly build_charpoly(int m, double lambda, EquilibriumSide side) {
    ModelSpec{m, lambda}.validate();
    const double s = leading_sign(m);
    const double sigma = side == EquilibriumSide::zero ? 1.0 : -1.0;
    CharPoly p{m, lambda, side, std::vector<double>(2 * m + 1, 0.0)};
    p.coeffs[2 * m] = 1.0;
    p.coeffs[1] += lambda / s;  // m == 0 is excluded, so index 1 < 2m
    p.coeffs[0] = sigma / s;
    return p;
}

namespace {

cplx polish(const CharPoly& p, cplx mu) {
    for (int it = 0; it < 100; ++it) {
        const cplx d = p.derivative(mu);
        if (d == cplx(0)) break;
        const cplx step = p.evaluate(mu) / d;
        mu -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(mu))) break;
    }
    return mu;
}

}  // namespace

RootSet find_roots(const CharPoly& p, double tol) {
    for (double c : p.coeffs)
        if (!std::isfinite(c)) throw RootFinderError("find_roots: non-finite coefficient", p);
    const int n = p.degree();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p.coeffs[i];

    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    if (es.info() != Eigen::Success) throw RootFinderError("find_roots: eigenvalue iteration failed", p);

    std::vector<cplx> raw;
    for (int i = 0; i < n; ++i) {
        cplx mu = polish(p, es.eigenvalues()[i]);
        if (std::abs(mu.imag()) <= 1e-9 * std::max(1.0, std::abs(mu))) mu = polish(p, cplx(mu.real(), 0.0));
        raw.push_back(mu);
    }

    const double merge = 10 * std::sqrt(tol);
    RootSet out{{}, p.side, p.lambda, p.m};
    std::vector<bool> used(raw.size(), false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (used[i]) continue;
        cplx sum = raw[i];
        int mult = 1;
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            if (!used[j] && std::abs(raw[j] - raw[i]) <= merge) {
                used[j] = true;
                sum += raw[j];
                ++mult;
            }
        }
        cplx mu = sum / static_cast<double>(mult);
        if (std::abs(mu.imag()) <= merge) mu.imag(0.0);
        if (std::abs(p.evaluate(mu)) > tol * std::max(1.0, p.scale(mu)))
            throw RootFinderError("find_roots: polished root misses tolerance", p);
        out.roots.push_back({mu, mult});
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return out;
}

BundleDims classify_bundles(const RootSet& r, double margin_tol) {
    BundleDims b;
    for (const auto& root : r.roots) {
        const double re = root.value.real();
        if (std::abs(re) <= margin_tol)
            b.marginal += root.multiplicity;
        else if ((r.side == EquilibriumSide::zero) == (re < 0))
            b.stable += root.multiplicity;
        else
            b.unstable += root.multiplicity;
    }
    return b;
}

std::vector<DoubleRoot> double_root_loci(int m, EquilibriumSide side) {
    if (m < 1) throw std::invalid_argument("double_root_loci: m must be >= 1");
    const double s = leading_sign(m);
    const double sigma = side == EquilibriumSide::zero ? 1.0 : -1.0;
    const double rhs = sigma / (s * (2 * m - 1));
    std::vector<DoubleRoot> out;
    if (rhs <= 0) return out;
    const double r = std::pow(rhs, 1.0 / (2 * m));
    for (double mu : {-r, r}) out.push_back({cplx(mu, 0.0), -2.0 * m * s * std::pow(mu, 2 * m - 1)});
    return out;
}

SmallLambdaRoots asymptotic_roots_small_lambda(double lambda) {
    if (!(std::abs(lambda) <= 0.5)) throw std::domain_error("asymptotic_roots_small_lambda: |lambda| > 0.5");
    SmallLambdaRoots r;
    const double l2 = lambda * lambda;
    // mu = -1 + d in mu^4 - lambda mu - 1: -4d + lambda + O(d^2, lambda d) = 0 gives d ~ +lambda/4
    r.mu1 = -1.0 + lambda / (4.0 + lambda);
    r.mu1_printed = -1.0 - lambda / (4.0 + lambda);
    r.mu2 = 1.0 + lambda / (4.0 - lambda);
    const double re = -4.0 * lambda / (l2 + 16.0);
    const double im = 1.0 - l2 / (l2 + 16.0);
    r.mu_plus = {re, im};
    r.mu_minus = {re, -im};
    return r;
}

Root slowest_stable_root(const RootSet& r, double margin_tol) {
    const Root* best = nullptr;
    for (const auto& root : r.roots) {
        const double re = root.value.real();
        if (std::abs(re) <= margin_tol) continue;
        if ((r.side == EquilibriumSide::zero) != (re < 0)) continue;
        if (!best || std::abs(re) < std::abs(best->value.real())) best = &root;
    }
    if (!best) throw std::runtime_error("slowest_stable_root: no stable root");
    return *best;
}

}  // namespace kpp
