#pragma once

#include "kpp/model.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpp {

/// B w = (-1)^{m+1} D^{2m} w + (1 - 2f) w + lambda0 w_y on the profile grid, with w pinned
/// to zero on the m outermost nodes at each end.
struct LinearOperator {
    Eigen::SparseMatrix<double> B;
    Grid grid;
    int m = 2;
    double lambda = 0.0;
    std::vector<double> f;

    std::vector<double> apply(const std::vector<double>& w) const;
};

LinearOperator assemble_B(const TWProfile& profile);

/// Numerical f' of the profile, zeroed on the pinned nodes.
std::vector<double> profile_derivative(const TWProfile& profile);

class SolverError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Least squares  min |B x - r|  subject to  <x, c> = 0. The normal equations
/// B^T B x = B^T r + nu c reduce, for invertible B, to x = B^{-1} r + nu B^{-1} B^{-T} c with
/// nu fixed by the constraint, so one LU of B serves every right-hand side.
class ConstrainedSolver {
public:
    ConstrainedSolver(const LinearOperator& op, std::vector<double> constraint);
    std::vector<double> solve(const std::vector<double>& rhs) const;
    const LinearOperator& op() const { return op_; }
    const std::vector<double>& constraint() const { return c_; }

private:
    struct Impl;
    LinearOperator op_;
    std::vector<double> c_;
    std::shared_ptr<Impl> impl_;
};

struct CenterSolution {
    std::vector<double> psi;
    double residual = 0.0;           // |B psi - f'|_inf / |f'|_inf
    double orthogonality_defect = 0.0;  // |<psi, f'>| with <u,v> = h sum u v
    std::shared_ptr<const ConstrainedSolver> solver;
};

/// B psi = rhs in the constrained least-squares sense, constraint direction f'.
CenterSolution solve_affine_center(const LinearOperator& B, const std::vector<double>& rhs);

struct SecondOrderReport {
    double k = 0.0;
    std::vector<double> phi;
    double residual = 0.0;  // |B phi - rhs|_inf
};

/// Linear and quadratic parts of k psi + k^2 (psi' + psi^2).
struct SecondOrderRhs {
    std::vector<double> linear;     // psi
    std::vector<double> quadratic;  // psi' + psi^2
    std::vector<double> at(double k) const;
};

SecondOrderRhs second_order_rhs(const CenterSolution& center);
SecondOrderReport second_order_residual(const CenterSolution& center, double k);
std::vector<SecondOrderReport> scan_second_order(const CenterSolution& center, const std::vector<double>& ks);

/// Solves (-1)^{m+1} V^{(2m)} + z V' / (2m) = 0 with V = 1 on the left end and 0 on the right.
std::vector<double> selfsimilar_profile(int m, const Grid& zgrid);

void write_values_csv(const std::string& path, const Grid& grid, const std::vector<double>& v);
void write_kscan_csv(const std::string& path, const std::vector<SecondOrderReport>& scan);

}  // namespace kpp
