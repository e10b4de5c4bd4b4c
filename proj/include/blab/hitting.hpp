#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "blab/paths.hpp"
#include "blab/rng.hpp"

namespace blab {

enum class HittingMethod { walk_capped, exact_reversal };

/// A Brownian path run until its first hit of level one. Under
/// exact_reversal the path reaches 1 exactly at t_end and stays below
/// before; under walk_capped the final grid value is the first one >= 1 and
/// T1 is the in-step interpolated crossing time.
struct HittingPath {
    PathGrid path;
    double T1{0};
    HittingMethod method{HittingMethod::walk_capped};
};

/// Naive baseline: step BM until the grid first crosses 1, or give up at
/// cap_steps (returns nullopt; callers must report the discard fraction).
inline std::optional<HittingPath> simulate_hitting_path_walk(double dt, std::size_t cap_steps,
                                                             SeedSpec seed) {
    if (!(dt > 0.0) || cap_steps < 1) throw std::invalid_argument("hitting_walk: bad arguments");
    Rng rng(seed);
    const double sdt = std::sqrt(dt);
    std::vector<double> vals{0.0};
    vals.reserve(4096);
    double x = 0.0;
    for (std::size_t k = 0; k < cap_steps; ++k) {
        const double prev = x;
        x += sdt * rng.gaussian();
        vals.push_back(x);
        if (x >= 1.0) {
            HittingPath h;
            h.method = HittingMethod::walk_capped;
            h.path.n_steps = vals.size() - 1;
            h.path.dt = dt;
            h.path.values = std::move(vals);
            const double frac = (1.0 - prev) / (x - prev);
            h.T1 = (static_cast<double>(h.path.n_steps - 1) + frac) * dt;
            return h;
        }
    }
    return std::nullopt;
}

/// Exact construction through time reversal: draw T1 = 1/N^2, build a
/// Bessel-3 bridge from 0 to 1 over [0,T1] as the norm of a 3-D Brownian
/// bridge from the origin to (1,0,0), and read the Brownian path backwards:
/// B_{u T1} = 1 - bridge((1-u) T1). Hits 1 first at t_end by construction.
inline HittingPath simulate_hitting_path_exact(std::size_t n_steps, SeedSpec seed) {
    if (n_steps < 2) throw std::invalid_argument("hitting_exact: n_steps < 2");
    Rng rng(seed);
    const double g = rng.gaussian_nonzero();
    const double T1 = 1.0 / (g * g);
    const double dt = T1 / static_cast<double>(n_steps);
    const double sdt = std::sqrt(dt);

    std::vector<double> wx(n_steps + 1, 0.0), wy(n_steps + 1, 0.0), wz(n_steps + 1, 0.0);
    for (std::size_t k = 0; k < n_steps; ++k) {
        wx[k + 1] = wx[k] + sdt * rng.gaussian();
        wy[k + 1] = wy[k] + sdt * rng.gaussian();
        wz[k + 1] = wz[k] + sdt * rng.gaussian();
    }
    HittingPath h;
    h.method = HittingMethod::exact_reversal;
    h.T1 = T1;
    h.path.n_steps = n_steps;
    h.path.dt = dt;
    h.path.values.resize(n_steps + 1);
    const auto n = static_cast<double>(n_steps);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        // pin the bridge at j/n toward target (1,0,0), then reverse time
        const std::size_t j = n_steps - k;
        const double w = static_cast<double>(j) / n;
        const double bx = wx[j] - w * wx[n_steps] + w;
        const double by = wy[j] - w * wy[n_steps];
        const double bz = wz[j] - w * wz[n_steps];
        h.path.values[k] = 1.0 - std::sqrt(bx * bx + by * by + bz * bz);
    }
    h.path.values[0] = 0.0;
    h.path.values[n_steps] = 1.0;
    return h;
}

/// alpha = B_{u T1} / sqrt(T1), path read by linear interpolation.
inline double alpha_from_path(const HittingPath& h, double u_draw) {
    if (u_draw < 0.0 || u_draw > 1.0) throw std::invalid_argument("alpha_from_path: u outside [0,1]");
    return h.path.at_time(u_draw * h.T1) / std::sqrt(h.T1);
}

/// The pseudo-Brownian bridge B_{u tau_1}/sqrt(tau_1) on [0,1], with the
/// rescaled local-time curve u -> L_{u tau_1}. Long paths are stored
/// decimated (every stride-th grid point) to bound memory; tau1 and the
/// stopping rule always use the full-resolution walk.
struct PseudoBridgePath {
    PathGrid path;       // rescaled to [0,1], values divided by sqrt(tau1)
    double tau1{0};
    LocalTimeCurve local_time; // on the same rescaled grid, raw local-time units
    std::size_t stride{1};

    [[nodiscard]] double local_time_at(double u) const { return local_time.at_time(u); }
    [[nodiscard]] double local_time_total() const { return local_time.total(); }
};

/// Runs BM tracking estimated local time at 0; stops at the first grid time
/// the estimate exceeds 1. Discarded (nullopt) if cap_steps is reached.
inline std::optional<PseudoBridgePath> simulate_pseudo_bridge(double dt, LocalTimeMethod method,
                                                              double eps, std::size_t cap_steps,
                                                              SeedSpec seed) {
    if (!(dt > 0.0) || !(eps > 0.0)) throw std::invalid_argument("pseudo_bridge: bad arguments");
    constexpr std::size_t max_stored = std::size_t{1} << 20;
    Rng rng(seed);
    const double sdt = std::sqrt(dt);
    detail::LocalTimeAccum acc{method, eps, dt};

    std::vector<double> vals{0.0}, lts{0.0};
    vals.reserve(1 << 12);
    lts.reserve(1 << 12);
    std::size_t stride = 1;
    double x = 0.0;
    bool stopped = false;
    std::size_t k = 0;
    for (; k < cap_steps; ++k) {
        const double prev = x;
        x += sdt * rng.gaussian();
        const double lt = acc.step(prev, x);
        if ((k + 1) % stride == 0) {
            vals.push_back(x);
            lts.push_back(lt);
            if (vals.size() > max_stored) {
                // halve resolution in place, keeping aligned samples
                std::size_t w = 1;
                for (std::size_t r = 2; r < vals.size(); r += 2, ++w) {
                    vals[w] = vals[r];
                    lts[w] = lts[r];
                }
                vals.resize(w);
                lts.resize(w);
                stride *= 2;
            }
        }
        if (lt > 1.0) {
            stopped = true;
            ++k;
            break;
        }
    }
    if (!stopped) return std::nullopt;

    // ensure the stopping point itself is stored
    if (k % stride != 0) {
        vals.push_back(x);
        lts.push_back(acc.total);
    }
    const double tau1 = static_cast<double>(k) * dt;
    const double scale = 1.0 / std::sqrt(tau1);

    PseudoBridgePath p;
    p.tau1 = tau1;
    p.stride = stride;
    p.path.n_steps = vals.size() - 1;
    p.path.dt = 1.0 / static_cast<double>(vals.size() - 1);
    p.path.values.resize(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) p.path.values[i] = vals[i] * scale;
    p.local_time.n_steps = p.path.n_steps;
    p.local_time.dt = p.path.dt;
    p.local_time.method = method;
    p.local_time.bandwidth = eps;
    p.local_time.values = std::move(lts);
    return p;
}

/// Exact two-point Bessel-3 skeleton (U, R_U, R_1): Gaussian marginals at
/// times U and 1, no grid.
struct BesselTwoPoint {
    double u{0}, r_u{0}, r_1{0};
};

inline BesselTwoPoint bessel_two_point(Rng& rng) {
    BesselTwoPoint s;
    s.u = rng.uniform();
    const double su = std::sqrt(s.u), sr = std::sqrt(1.0 - s.u);
    const double x = su * rng.gaussian(), y = su * rng.gaussian(), z = su * rng.gaussian();
    s.r_u = std::sqrt(x * x + y * y + z * z);
    const double x1 = x + sr * rng.gaussian();
    const double y1 = y + sr * rng.gaussian();
    const double z1 = z + sr * rng.gaussian();
    s.r_1 = std::sqrt(x1 * x1 + y1 * y1 + z1 * z1);
    return s;
}

/// Jeulin residual beta_t = B_t + int_0^t ds/(1-B_s) - int_0^t ds (1-B_s)/(T1-s)
/// on a uniform n_grid over [0, T1]. Both integrands blow up like
/// (T1-s)^{-1/2}; the last 1% is integrated in the variable v = sqrt(T1-s)
/// and the final cell uses the square-root profile of 1-B.
inline PathGrid jeulin_residual(const HittingPath& h, std::size_t n_grid) {
    if (h.method != HittingMethod::exact_reversal)
        throw std::invalid_argument("jeulin_residual: needs an exact_reversal path");
    if (n_grid < 16) throw std::invalid_argument("jeulin_residual: n_grid too small");
    const double T1 = h.T1;
    const double dg = T1 / static_cast<double>(n_grid);

    std::vector<double> B(n_grid + 1);
    for (std::size_t k = 0; k <= n_grid; ++k)
        B[k] = h.path.at_time(static_cast<double>(k) * dg);
    B[n_grid] = 1.0;

    PathGrid beta;
    beta.n_steps = n_grid;
    beta.dt = dg;
    beta.values.resize(n_grid + 1);
    beta.values[0] = 0.0;

    const std::size_t k_plain = n_grid - std::max<std::size_t>(1, n_grid / 100);
    double i1 = 0.0, i2 = 0.0;
    auto f1 = [&](std::size_t k) { return 1.0 / (1.0 - B[k]); };
    auto f2 = [&](std::size_t k) {
        return (1.0 - B[k]) / (T1 - static_cast<double>(k) * dg);
    };
    for (std::size_t k = 1; k <= k_plain; ++k) {
        i1 += 0.5 * dg * (f1(k - 1) + f1(k));
        i2 += 0.5 * dg * (f2(k - 1) + f2(k));
        beta.values[k] = B[k] + i1 - i2;
    }
    // v = sqrt(T1 - s); g(v) = 2 v f(T1 - v^2) stays bounded at v = 0
    auto vk = [&](std::size_t k) { return std::sqrt(T1 - static_cast<double>(k) * dg); };
    auto g1 = [&](std::size_t k) {
        if (k == n_grid) return 2.0 * std::sqrt(dg) / (1.0 - B[n_grid - 1]);
        return 2.0 * vk(k) * f1(k);
    };
    auto g2 = [&](std::size_t k) {
        if (k == n_grid) return 2.0 * (1.0 - B[n_grid - 1]) / std::sqrt(dg);
        return 2.0 * vk(k) * f2(k);
    };
    for (std::size_t k = k_plain + 1; k <= n_grid; ++k) {
        const double dv = vk(k - 1) - vk(k);
        i1 += 0.5 * dv * (g1(k - 1) + g1(k));
        i2 += 0.5 * dv * (g2(k - 1) + g2(k));
        beta.values[k] = B[k] + i1 - i2;
    }
    return beta;
}

} // namespace blab
