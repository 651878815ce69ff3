#include "kpp/linearized.hpp"

#include "kpp/csv.hpp"
#include "kpp/stencil.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace kpp {

namespace {

double max_abs(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

double inner(const std::vector<double>& a, const std::vector<double>& b, double h) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * h;
}

}  // namespace

std::vector<double> LinearOperator::apply(const std::vector<double>& w) const {
    const Eigen::Map<const Eigen::VectorXd> x(w.data(), static_cast<Eigen::Index>(w.size()));
    const Eigen::VectorXd y = B * x;
    return {y.data(), y.data() + y.size()};
}

LinearOperator assemble_B(const TWProfile& profile) {
    profile.grid.validate(profile.m);
    LinearOperator op;
    op.grid = profile.grid;
    op.m = profile.m;
    op.lambda = profile.lambda;
    op.f = profile.values;
    const double lam = profile.lambda;
    const auto& f = op.f;
    op.B = assemble_operator<double>(profile.m, profile.grid.n, profile.grid.spacing(), leading_sign(profile.m),
                                     [lam](std::size_t) { return lam; },
                                     [&f](std::size_t i) { return 1.0 - 2.0 * f[i]; });
    return op;
}

std::vector<double> profile_derivative(const TWProfile& profile) {
    auto d = first_derivative(profile.values, profile.grid.spacing());
    const std::size_t m = static_cast<std::size_t>(profile.m);
    for (std::size_t i = 0; i < m && i < d.size(); ++i) {
        d[i] = 0;
        d[d.size() - 1 - i] = 0;
    }
    return d;
}

struct ConstrainedSolver::Impl {
    using ld = long double;
    using Vec = Eigen::Matrix<ld, Eigen::Dynamic, 1>;
    Eigen::SparseLU<Eigen::SparseMatrix<ld>, Eigen::COLAMDOrdering<int>> lu;
    Vec c;
    Vec p;  // B^{-1} B^{-T} c
    ld cp = 0;
};

ConstrainedSolver::ConstrainedSolver(const LinearOperator& op, std::vector<double> constraint)
    : op_(op), c_(std::move(constraint)), impl_(std::make_shared<Impl>()) {
    using ld = Impl::ld;
    const std::size_t n = op_.grid.n;
    if (c_.size() != n) throw std::invalid_argument("ConstrainedSolver: constraint size mismatch");
    const double cn = max_abs(c_);
    if (!(cn > 0)) throw SolverError("ConstrainedSolver: zero constraint direction");

    Eigen::SparseMatrix<ld> B = op_.B.cast<ld>();
    B.makeCompressed();
    impl_->lu.compute(B);
    if (impl_->lu.info() != Eigen::Success) throw SolverError("ConstrainedSolver: operator is singular");
    impl_->c.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) impl_->c[static_cast<Eigen::Index>(i)] = c_[i] / cn;
    // B^T gets its own factorization; the transposed solve through the LU of B is not reliable
    Eigen::SparseMatrix<ld> Bt = B.transpose();
    Bt.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<ld>, Eigen::COLAMDOrdering<int>> lut(Bt);
    if (lut.info() != Eigen::Success) throw SolverError("ConstrainedSolver: operator is singular");
    const Impl::Vec q = lut.solve(impl_->c);
    impl_->p = impl_->lu.solve(q);
    impl_->cp = impl_->c.dot(impl_->p);
    if (!impl_->p.allFinite() || !(impl_->cp > 0)) throw SolverError("ConstrainedSolver: least-squares breakdown");
}

std::vector<double> ConstrainedSolver::solve(const std::vector<double>& rhs) const {
    using ld = Impl::ld;
    const std::size_t n = c_.size();
    if (rhs.size() != n) throw std::invalid_argument("ConstrainedSolver: rhs size mismatch");
    Impl::Vec r(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) r[static_cast<Eigen::Index>(i)] = rhs[i];
    const Impl::Vec x0 = impl_->lu.solve(r);
    const ld nu = -impl_->c.dot(x0) / impl_->cp;
    const Impl::Vec x = x0 + nu * impl_->p;
    if (!x.allFinite()) throw SolverError("ConstrainedSolver: least-squares breakdown");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(x[static_cast<Eigen::Index>(i)]);
    return out;
}

CenterSolution solve_affine_center(const LinearOperator& B, const std::vector<double>& rhs) {
    TWProfile tmp;
    tmp.grid = B.grid;
    tmp.values = B.f;
    tmp.m = B.m;
    const auto fp = profile_derivative(tmp);
    CenterSolution c;
    c.solver = std::make_shared<const ConstrainedSolver>(B, fp);
    c.psi = c.solver->solve(rhs);
    auto r = B.apply(c.psi);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
    const double rn = max_abs(rhs);
    c.residual = rn > 0 ? max_abs(r) / rn : max_abs(r);
    c.orthogonality_defect = std::abs(inner(c.psi, fp, B.grid.spacing()));
    return c;
}

std::vector<double> SecondOrderRhs::at(double k) const {
    std::vector<double> v(linear.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = k * linear[i] + k * k * quadratic[i];
    return v;
}

SecondOrderRhs second_order_rhs(const CenterSolution& center) {
    if (!center.solver) throw SolverError("second_order_rhs: centre solution has no operator");
    const auto& op = center.solver->op();
    SecondOrderRhs r;
    r.linear = center.psi;
    r.quadratic = first_derivative(center.psi, op.grid.spacing());
    for (std::size_t i = 0; i < r.quadratic.size(); ++i) r.quadratic[i] += center.psi[i] * center.psi[i];
    return r;
}

SecondOrderReport second_order_residual(const CenterSolution& center, double k) {
    const auto rhs = second_order_rhs(center).at(k);
    SecondOrderReport rep;
    rep.k = k;
    rep.phi = center.solver->solve(rhs);
    auto r = center.solver->op().apply(rep.phi);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
    rep.residual = max_abs(r);
    return rep;
}

std::vector<SecondOrderReport> scan_second_order(const CenterSolution& center, const std::vector<double>& ks) {
    std::vector<SecondOrderReport> out;
    out.reserve(ks.size());
    for (double k : ks) out.push_back(second_order_residual(center, k));
    return out;
}

std::vector<double> selfsimilar_profile(int m, const Grid& zgrid) {
    if (m < 1) throw std::invalid_argument("selfsimilar_profile: m must be >= 1");
    zgrid.validate(m);
    using ld = long double;
    const std::size_t n = zgrid.n;
    const ld h = static_cast<ld>(zgrid.right - zgrid.left) / static_cast<ld>(n - 1);
    const ld left = zgrid.left;
    const ld inv2m = ld(1) / (2 * m);
    const auto A = assemble_operator<ld>(m, n, h, ld(leading_sign(m)),
                                         [&](std::size_t i) { return (left + h * ld(i)) * inv2m; },
                                         [](std::size_t) { return ld(0); });
    Eigen::Matrix<ld, Eigen::Dynamic, 1> b = Eigen::Matrix<ld, Eigen::Dynamic, 1>::Zero(static_cast<Eigen::Index>(n));
    for (int i = 0; i < m; ++i) b[i] = 1;
    Eigen::SparseLU<Eigen::SparseMatrix<ld>, Eigen::COLAMDOrdering<int>> lu(A);
    if (lu.info() != Eigen::Success) throw SolverError("selfsimilar_profile: singular system");
    const Eigen::Matrix<ld, Eigen::Dynamic, 1> v = lu.solve(b);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(v[static_cast<Eigen::Index>(i)]);
    for (double x : out)
        if (!std::isfinite(x)) throw SolverError("selfsimilar_profile: non-finite solution");
    return out;
}

void write_values_csv(const std::string& path, const Grid& grid, const std::vector<double>& v) {
    const auto y = grid.nodes();
    write_csv(path, {"y", "value"}, {&y, &v});
}

void write_kscan_csv(const std::string& path, const std::vector<SecondOrderReport>& scan) {
    std::vector<double> k, r;
    for (const auto& s : scan) {
        k.push_back(s.k);
        r.push_back(s.residual);
    }
    write_csv(path, {"k", "residual"}, {&k, &r});
}

}  // namespace kpp
