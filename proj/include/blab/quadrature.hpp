#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace blab::quad {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Adaptive Gauss-Kronrod (15-point) over [a,b]; a/b may be infinite.
template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-10, double* err_out = nullptr) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0;
    const double v = GK::integrate(f, a, b, 18, tol, &err);
    if (err_out) *err_out = err;
    return v;
}

/// Single non-adaptive 15-point Kronrod application (used on small panels).
template <typename F>
double integrate_panel(const F& f, double a, double b, double* err_out = nullptr) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0;
    const double v = GK::integrate(f, a, b, 0, 0.0, &err);
    if (err_out) *err_out = err;
    return v;
}

/// Integrates over consecutive segments given by `nodes` (sorted, endpoints
/// may be infinite). Used to split at formula kinks before adapting.
template <typename F>
double integrate_piecewise(const F& f, std::vector<double> nodes, double tol = 1e-10) {
    double total = 0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i] == nodes[i + 1]) continue;
        total += integrate(f, nodes[i], nodes[i + 1], tol);
    }
    return total;
}

} // namespace blab::quad
