#include "kpp/model.hpp"

#include <algorithm>
#include <cmath>

namespace kpp {

std::vector<double> first_derivative(const std::vector<double>& v, double h) {
    const std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) {
        if (n == 2) d[0] = d[1] = (v[1] - v[0]) / h;
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2 * h);
    d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h);
    d[n - 1] = (3 * v[n - 1] - 4 * v[n - 2] + v[n - 3]) / (2 * h);
    return d;
}

double trapezoid(const std::vector<double>& v, double h) {
    if (v.size() < 2) return 0.0;
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * h;
}

double interpolate(const Grid& grid, const std::vector<double>& v, double y) {
    if (y <= grid.left) return v.front();
    if (y >= grid.right) return v.back();
    const double s = (y - grid.left) / grid.spacing();
    std::size_t i = static_cast<std::size_t>(s);
    if (i + 1 >= v.size()) return v.back();
    const double t = s - static_cast<double>(i);
    return (1 - t) * v[i] + t * v[i + 1];
}

std::optional<double> locate_front(const Grid& grid, const std::vector<double>& v, double level,
                                   double window) {
    const double h = grid.spacing();
    const std::size_t reach = static_cast<std::size_t>(std::ceil(window / h));
    for (std::size_t i = v.size() - 1; i-- > 0;) {
        if (!(v[i] >= level && v[i + 1] < level)) continue;
        const double xc = grid.at(i) + h * (v[i] - level) / (v[i] - v[i + 1]);
        bool ok = true;
        const std::size_t lo = i > reach ? i - reach : 0;
        for (std::size_t j = lo; j < i && ok; ++j)
            if (grid.at(j) >= xc - window && !(v[j] > level)) ok = false;
        if (ok) return xc;
    }
    return std::nullopt;
}

}  // namespace kpp
