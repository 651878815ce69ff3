#include "kpp/csv.hpp"
#include "kpp/twsolver.hpp"

#include <cmath>

namespace kpp {

void write_profile_csv(const std::string& path, const TWProfile& p) {
    const auto y = p.grid.nodes();
    write_csv(path, {"y", "f"}, {&y, &p.values});
}

TWProfile read_profile_csv(const std::string& path, int m, double lambda) {
    auto t = read_csv(path);
    if (t.header != std::vector<std::string>{"y", "f"}) throw std::runtime_error(path + ": expected header y,f");
    const auto& y = t.columns[0];
    if (y.size() < 2) throw std::runtime_error(path + ": too few nodes");
    TWProfile p;
    p.grid = {y.front(), y.back(), y.size()};
    const double h = p.grid.spacing();
    for (std::size_t i = 0; i < y.size(); ++i)
        if (std::abs(y[i] - p.grid.at(i)) > 1e-6 * h) throw std::runtime_error(path + ": grid is not uniform");
    p.values = std::move(t.columns[1]);
    p.m = m;
    p.lambda = lambda;
    p.residual_norm = collocation_residual({m, lambda}, p.grid, p.values);
    p.momentum = momentum_identity(p);
    const auto xc = locate_front(p.grid, p.values);
    p.aligned = xc && std::abs(*xc) <= 1e-8;
    return p;
}

}  // namespace kpp
