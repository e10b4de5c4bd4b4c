#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "blab/rng.hpp"

namespace blab {

/// A discretized trajectory on a uniform grid: values[k] at time k*dt,
/// values[0] = 0 for every process built here.
struct PathGrid {
    std::size_t n_steps{0};
    double dt{0};
    std::vector<double> values; // length n_steps + 1

    [[nodiscard]] double t_end() const { return static_cast<double>(n_steps) * dt; }

    /// Linear interpolation at time t (clamped to the grid).
    [[nodiscard]] double at_time(double t) const {
        if (t <= 0.0) return values.front();
        const double pos = t / dt;
        const auto k = static_cast<std::size_t>(pos);
        if (k >= n_steps) return values.back();
        const double w = pos - static_cast<double>(k);
        return values[k] * (1.0 - w) + values[k + 1] * w;
    }
};

inline PathGrid simulate_bm(std::size_t n_steps, double T, SeedSpec seed) {
    if (n_steps < 1 || !(T > 0.0)) throw std::invalid_argument("simulate_bm: bad grid");
    PathGrid p;
    p.n_steps = n_steps;
    p.dt = T / static_cast<double>(n_steps);
    p.values.resize(n_steps + 1);
    p.values[0] = 0.0;
    Rng rng(seed);
    const double sdt = std::sqrt(p.dt);
    for (std::size_t k = 0; k < n_steps; ++k) p.values[k + 1] = p.values[k] + sdt * rng.gaussian();
    return p;
}

/// Brownian bridge on [0,1]: b(u) = B_u - u B_1; both endpoints exactly 0.
inline PathGrid bridge_from_bm(const PathGrid& p) {
    if (std::abs(p.t_end() - 1.0) > 1e-12) throw std::invalid_argument("bridge_from_bm: t_end != 1");
    PathGrid b = p;
    const double b1 = p.values.back();
    const auto n = static_cast<double>(p.n_steps);
    for (std::size_t k = 0; k <= p.n_steps; ++k)
        b.values[k] = p.values[k] - (static_cast<double>(k) / n) * b1;
    b.values[0] = 0.0;
    b.values[p.n_steps] = 0.0;
    return b;
}

enum class LocalTimeMethod { downcrossing, occupation };

/// Estimated local time at a level, as a nondecreasing curve on the path grid.
struct LocalTimeCurve {
    std::size_t n_steps{0};
    double dt{0};
    LocalTimeMethod method{LocalTimeMethod::occupation};
    double bandwidth{0};
    std::vector<double> values; // length n_steps + 1, values[0] = 0

    [[nodiscard]] double total() const { return values.back(); }

    [[nodiscard]] double at_time(double t) const {
        if (t <= 0.0) return 0.0;
        const double pos = t / dt;
        const auto k = static_cast<std::size_t>(pos);
        if (k >= n_steps) return values.back();
        const double w = pos - static_cast<double>(k);
        return values[k] * (1.0 - w) + values[k + 1] * w;
    }
};

namespace detail {

// Time fraction of the segment a -> b spent inside [-eps, eps], by linear
// interpolation within the step.
inline double band_fraction(double a, double b, double eps) {
    if (a == b) return std::abs(a) <= eps ? 1.0 : 0.0;
    double t0 = (-eps - a) / (b - a);
    double t1 = (eps - a) / (b - a);
    if (t0 > t1) std::swap(t0, t1);
    return std::max(0.0, std::min(1.0, t1) - std::max(0.0, t0));
}

// Incremental local time state shared by the curve builder and the
// pseudo-bridge stopping loop.
struct LocalTimeAccum {
    LocalTimeMethod method;
    double eps;
    double dt;
    double total{0};
    bool armed{false}; // downcrossing: has reached +eps since last visit to 0

    double step(double prev, double cur) {
        if (method == LocalTimeMethod::occupation) {
            total += band_fraction(prev, cur, eps) * dt / (2.0 * eps);
        } else {
            if (cur >= eps) armed = true;
            if (armed && cur <= 0.0) {
                total += 2.0 * eps;
                armed = false;
            }
        }
        return total;
    }
};

} // namespace detail

inline LocalTimeCurve local_time_zero(const PathGrid& p, LocalTimeMethod method, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("local_time_zero: eps must be positive");
    LocalTimeCurve c;
    c.n_steps = p.n_steps;
    c.dt = p.dt;
    c.method = method;
    c.bandwidth = eps;
    c.values.resize(p.n_steps + 1);
    c.values[0] = 0.0;
    detail::LocalTimeAccum acc{method, eps, p.dt};
    for (std::size_t k = 0; k < p.n_steps; ++k)
        c.values[k + 1] = acc.step(p.values[k], p.values[k + 1]);
    return c;
}

/// Local time at an arbitrary level, via the shifted path.
inline LocalTimeCurve local_time_at_level(const PathGrid& p, double level, LocalTimeMethod method,
                                          double eps) {
    PathGrid shifted = p;
    for (double& v : shifted.values) v -= level;
    LocalTimeCurve c = local_time_zero(shifted, method, eps);
    return c;
}

/// Default occupation bandwidth: dt^0.45 (shrinks slower than sqrt(dt)).
inline double default_bandwidth(double dt) { return std::pow(dt, 0.45); }

/// Meander via the Biane-Yor construction: m(u) = |b(u)| + lambda_u^0. The
/// local-time curve doubles as the future infimum i_u.
struct MeanderPath {
    PathGrid path;
    LocalTimeCurve future_inf;
};

inline MeanderPath meander_from_bridge(const PathGrid& b, const LocalTimeCurve& lt) {
    if (b.n_steps != lt.n_steps || std::abs(b.dt - lt.dt) > 1e-15)
        throw std::invalid_argument("meander_from_bridge: mismatched grids");
    MeanderPath m;
    m.path.n_steps = b.n_steps;
    m.path.dt = b.dt;
    m.path.values.resize(b.n_steps + 1);
    for (std::size_t k = 0; k <= b.n_steps; ++k)
        m.path.values[k] = std::abs(b.values[k]) + lt.values[k];
    m.future_inf = lt;
    return m;
}

/// Three-dimensional Bessel process from 0: norm of three independent BMs
/// sharing the grid. Marginals are exact at grid points.
inline PathGrid simulate_bes3(std::size_t n_steps, double T, SeedSpec seed) {
    if (n_steps < 1 || !(T > 0.0)) throw std::invalid_argument("simulate_bes3: bad grid");
    PathGrid p;
    p.n_steps = n_steps;
    p.dt = T / static_cast<double>(n_steps);
    p.values.resize(n_steps + 1);
    p.values[0] = 0.0;
    Rng rng(seed);
    const double sdt = std::sqrt(p.dt);
    double x = 0, y = 0, z = 0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        x += sdt * rng.gaussian();
        y += sdt * rng.gaussian();
        z += sdt * rng.gaussian();
        p.values[k + 1] = std::sqrt(x * x + y * y + z * z);
    }
    return p;
}

/// inf over [u, 1] of the grid values (linear interpolation at u).
inline double future_infimum(const PathGrid& p, double u) {
    if (u < 0.0 || u > 1.0) throw std::invalid_argument("future_infimum: u outside [0,1]");
    if (p.t_end() < 1.0 - 1e-12) throw std::invalid_argument("future_infimum: grid ends before 1");
    double m = p.at_time(u);
    const auto k0 = static_cast<std::size_t>(std::ceil(u / p.dt - 1e-12));
    const auto k1 = static_cast<std::size_t>(std::floor(1.0 / p.dt + 1e-12));
    for (std::size_t k = k0; k <= std::min(k1, p.n_steps); ++k) m = std::min(m, p.values[k]);
    m = std::min(m, p.at_time(1.0));
    return m;
}

/// inf over [u, 1] refined with per-cell Brownian-bridge minima (the radial
/// part has unit diffusion, so within a cell the missing sub-grid dip is the
/// minimum of a bridge between the endpoint values). Removes the O(sqrt(dt))
/// downward-miss of the plain grid minimum.
inline double future_infimum_sampled(const PathGrid& p, double u, Rng& rng) {
    if (u < 0.0 || u > 1.0) throw std::invalid_argument("future_infimum_sampled: u outside [0,1]");
    double m = p.at_time(u);
    const auto k0 = static_cast<std::size_t>(std::ceil(u / p.dt - 1e-12));
    const auto k1 = static_cast<std::size_t>(std::floor(1.0 / p.dt + 1e-12));
    // partial first cell [u, k0*dt]
    if (k0 >= 1 && k0 <= p.n_steps) {
        const double frac = static_cast<double>(k0) - u / p.dt;
        if (frac > 1e-12) {
            const double a = p.at_time(u), b = p.values[k0];
            const double len = frac * p.dt;
            const double xi = std::max(rng.uniform(), 1e-300);
            const double bm =
                0.5 * (a + b - std::sqrt((a - b) * (a - b) - 2.0 * len * std::log(xi)));
            m = std::min(m, std::max(0.0, bm));
        }
    }
    for (std::size_t k = k0; k < std::min(k1, p.n_steps); ++k) {
        const double a = p.values[k], b = p.values[k + 1];
        const double xi = std::max(rng.uniform(), 1e-300);
        const double bm = 0.5 * (a + b - std::sqrt((a - b) * (a - b) - 2.0 * p.dt * std::log(xi)));
        m = std::min(m, std::max(0.0, bm));
    }
    m = std::min(m, p.at_time(1.0));
    return m;
}

} // namespace blab
