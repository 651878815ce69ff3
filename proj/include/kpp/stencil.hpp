#pragma once

// Finite-difference stencils shared by the TW solver, the PDE stepper and the
// linearized operator. Templated on the scalar so the solvers can run in long double.

#include <Eigen/Sparse>

#include <cmath>
#include <cstddef>
#include <vector>

namespace kpp {

/// Weights (-1)^k C(2m,k), k = 0..2m, of the centered 2m-th difference; offsets -m..m.
template <class T>
std::vector<T> even_difference_weights(int m) {
    std::vector<T> w(2 * m + 1);
    T c = 1;
    for (int k = 0; k <= 2 * m; ++k) {
        w[k] = (k % 2 == 0) ? c : -c;
        c = c * T(2 * m - k) / T(k + 1);
    }
    return w;
}

/// Rows i in [m, n-m):  lead * D^{2m} f + drift(i) * D f + diag(i) * f  (centered stencils).
/// The first and last m rows are identity: those nodes are pinned, which is the same
/// constraint as f and its first m-1 one-sided differences being fixed at each end.
template <class T, class Drift, class Diag>
Eigen::SparseMatrix<T> assemble_operator(int m, std::size_t n, T h, T lead, Drift drift, Diag diag) {
    using Trip = Eigen::Triplet<T>;
    const auto w = even_difference_weights<T>(m);
    T scale = lead;
    for (int k = 0; k < 2 * m; ++k) scale /= h;

    std::vector<Trip> trips;
    trips.reserve(n * (2 * m + 3));
    const std::size_t mm = static_cast<std::size_t>(m);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < mm || i + mm >= n) {
            trips.emplace_back(i, i, T(1));
            continue;
        }
        for (int k = 0; k <= 2 * m; ++k) {
            T v = scale * w[k];
            if (k == m) v += diag(i);
            if (k == m - 1) v -= drift(i) / (2 * h);
            if (k == m + 1) v += drift(i) / (2 * h);
            trips.emplace_back(i, i - mm + k, v);
        }
    }
    Eigen::SparseMatrix<T> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return A;
}

}  // namespace kpp
