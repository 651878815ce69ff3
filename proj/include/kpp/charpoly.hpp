#pragma once

#include "kpp/model.hpp"

#include <complex>
#include <stdexcept>
#include <vector>

namespace kpp {

using cplx = std::complex<double>;

/// Characteristic polynomial of the TW ODE linearized about an equilibrium,
///   P(mu) = (-1)^{m+1} mu^{2m} + lambda mu + sigma,  sigma = +1 about f=0, -1 about f=1,
/// stored monic with ascending coefficients. Substituting f = 1 + g turns f(1-f) into -g,
/// which is where the sign of sigma on the f=1 side comes from.
struct CharPoly {
    int m = 2;
    double lambda = 0.0;
    EquilibriumSide side = EquilibriumSide::zero;
    std::vector<double> coeffs;  // coeffs[k] multiplies mu^k; coeffs[2m] == 1

    int degree() const { return 2 * m; }
    cplx evaluate(cplx mu) const;
    cplx derivative(cplx mu) const;
    double scale(cplx mu) const;  // sum |c_k| |mu|^k, used for relative residuals
};

struct Root {
    cplx value;
    int multiplicity = 1;
};

struct RootSet {
    std::vector<Root> roots;
    EquilibriumSide side = EquilibriumSide::zero;
    double lambda = 0.0;
    int m = 2;

    int total_multiplicity() const;
};

/// Stable means decaying toward the equilibrium: Re mu < 0 on the zero side (y -> +inf),
/// Re mu > 0 on the one side (y -> -inf).
struct BundleDims {
    int stable = 0;
    int unstable = 0;
    int marginal = 0;

    bool operator==(const BundleDims&) const = default;
};

struct DoubleRoot {
    cplx mu;
    double lambda = 0.0;
};

struct SmallLambdaRoots {
    double mu1 = -1;
    double mu2 = 1;
    cplx mu_plus{0, 1};
    cplx mu_minus{0, -1};
    double mu1_printed = -1;  // -1 - lambda/(4+lambda), kept for reporting only
};

class RootFinderError : public std::runtime_error {
public:
    RootFinderError(const std::string& what, CharPoly p) : std::runtime_error(what), poly(std::move(p)) {}
    CharPoly poly;
};

CharPoly build_charpoly(int m, double lambda, EquilibriumSide side);

/// Companion-matrix eigenvalues polished by Newton. Polished roots closer than
/// 10*sqrt(tol) are merged into one root of higher multiplicity.
RootSet find_roots(const CharPoly& p, double tol = 1e-12);

BundleDims classify_bundles(const RootSet& r, double margin_tol = 1e-9);

/// All real-lambda (mu, lambda) with P = P' = 0. Eliminating lambda = -2m s mu^{2m-1}
/// leaves mu^{2m} = sigma / (s (2m-1)), so real loci exist only when sigma*s > 0.
std::vector<DoubleRoot> double_root_loci(int m, EquilibriumSide side);

/// m = 2 expansions about lambda = 0 (zero side). Throws std::domain_error for |lambda| > 0.5.
SmallLambdaRoots asymptotic_roots_small_lambda(double lambda);

/// Stable root with the smallest |Re mu|: the rate that dominates the tail.
Root slowest_stable_root(const RootSet& r, double margin_tol = 1e-9);

}  // namespace kpp
