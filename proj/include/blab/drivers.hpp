#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "blab/hitting.hpp"
#include "blab/parallel.hpp"
#include "blab/paths.hpp"
#include "blab/rng.hpp"

namespace blab {

// Batch drivers: one stream per path (stream_id = base + i), results written
// to per-index slots, so output is identical for any worker count.

/// Per-path functionals of the Brownian bridge on [0,1]: local time at 0
/// (occupation estimator, bandwidth dt^0.45), the uniformly sampled value
/// b(U), the local time at U, and optionally the local time at a level y.
/// Meander functionals come for free through Biane-Yor: m = |b| + lambda.
struct BridgeFunctionals {
    std::vector<double> lambda1;  // lambda_1^0
    std::vector<double> b_u;      // b(U)
    std::vector<double> lambda_u; // lambda_U^0
    std::vector<double> ratio_u;  // lambda_U^0 / lambda_1^0, clamped to [0,1]
    std::vector<double> m_u;      // |b(U)| + lambda_U^0
    std::vector<double> m_1;      // == lambda_1^0 (b(1) = 0)
    std::vector<double> lambda1_y; // lambda_1^y when requested, else empty
};

inline BridgeFunctionals simulate_bridge_functionals(std::size_t n_paths, std::size_t n_steps,
                                                     SeedSpec base, int workers,
                                                     bool want_level = false, double level_y = 0.5) {
    BridgeFunctionals out;
    out.lambda1.resize(n_paths);
    out.b_u.resize(n_paths);
    out.lambda_u.resize(n_paths);
    out.ratio_u.resize(n_paths);
    out.m_u.resize(n_paths);
    out.m_1.resize(n_paths);
    if (want_level) out.lambda1_y.resize(n_paths);

    const double dt = 1.0 / static_cast<double>(n_steps);
    const double sdt = std::sqrt(dt);
    const double eps = default_bandwidth(dt);

    parallel_for(n_paths, workers, [&](std::size_t i) {
        Rng rng(base.offset(i));
        const double u = rng.uniform();
        thread_local std::vector<double> bm;
        bm.resize(n_steps + 1);
        bm[0] = 0.0;
        for (std::size_t k = 0; k < n_steps; ++k) bm[k + 1] = bm[k] + sdt * rng.gaussian();
        const double b1 = bm[n_steps];
        const auto nd = static_cast<double>(n_steps);

        const double pos = u * nd;
        const auto ku = static_cast<std::size_t>(pos);
        const double w = pos - static_cast<double>(ku);

        detail::LocalTimeAccum a0{LocalTimeMethod::occupation, eps, dt};
        detail::LocalTimeAccum ay{LocalTimeMethod::occupation, eps, dt};
        double bk = 0.0, lk = 0.0;
        double b_lo = 0, b_hi = 0, l_lo = 0, l_hi = 0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double bnext =
                (k + 1 == n_steps) ? 0.0 : bm[k + 1] - (static_cast<double>(k + 1) / nd) * b1;
            if (k == ku) {
                b_lo = bk;
                b_hi = bnext;
                l_lo = lk;
            }
            const double l = a0.step(bk, bnext);
            if (k == ku) l_hi = l;
            if (want_level) ay.step(bk - level_y, bnext - level_y);
            bk = bnext;
            lk = l;
        }
        const double lambda1 = a0.total;
        const double lambda_u = l_lo * (1.0 - w) + l_hi * w;
        const double bu = b_lo * (1.0 - w) + b_hi * w;
        out.lambda1[i] = lambda1;
        out.b_u[i] = bu;
        out.lambda_u[i] = lambda_u;
        out.ratio_u[i] = lambda1 > 0 ? std::clamp(lambda_u / lambda1, 0.0, 1.0) : 0.0;
        out.m_u[i] = std::abs(bu) + lambda_u;
        out.m_1[i] = lambda1;
        if (want_level) out.lambda1_y[i] = ay.total;
    });
    return out;
}

namespace detail {

/// Minimum of a Brownian bridge between (a, b) over a cell of length len,
/// sampled by inversion; always <= min(a, b).
inline double bridge_min_sample(double a, double b, double len, Rng& rng) {
    const double xi = std::max(rng.uniform(), 1e-300);
    const double d = a - b;
    return 0.5 * (a + b - std::sqrt(d * d - 2.0 * len * std::log(xi)));
}

} // namespace detail

/// Per-path functionals of the Bessel-3 process on [0,1]: R(1), R(U) (linear
/// interpolation), and J_U/R(1) where the future infimum is refined with
/// per-cell bridge minima of the radial values.
struct BesselFunctionals {
    std::vector<double> r1;
    std::vector<double> r_u;
    std::vector<double> j_ratio;
};

inline BesselFunctionals simulate_bessel_functionals(std::size_t n_paths, std::size_t n_steps,
                                                     SeedSpec base, int workers) {
    BesselFunctionals out;
    out.r1.resize(n_paths);
    out.r_u.resize(n_paths);
    out.j_ratio.resize(n_paths);
    const double dt = 1.0 / static_cast<double>(n_steps);
    const double sdt = std::sqrt(dt);

    parallel_for(n_paths, workers, [&](std::size_t i) {
        Rng rng(base.offset(i));
        const double u = rng.uniform();
        thread_local std::vector<double> R;
        R.resize(n_steps + 1);
        R[0] = 0.0;
        double x = 0, y = 0, z = 0;
        for (std::size_t k = 0; k < n_steps; ++k) {
            x += sdt * rng.gaussian();
            y += sdt * rng.gaussian();
            z += sdt * rng.gaussian();
            R[k + 1] = std::sqrt(x * x + y * y + z * z);
        }
        const double pos = u * static_cast<double>(n_steps);
        const auto ku = static_cast<std::size_t>(pos);
        const double w = pos - static_cast<double>(ku);
        const double ru = R[ku] * (1.0 - w) + R[ku + 1] * w;

        double jmin = ru;
        if (w < 1.0 - 1e-12)
            jmin = std::min(jmin, std::max(0.0, detail::bridge_min_sample(ru, R[ku + 1],
                                                                          (1.0 - w) * dt, rng)));
        for (std::size_t k = ku + 1; k < n_steps; ++k)
            jmin = std::min(jmin,
                            std::max(0.0, detail::bridge_min_sample(R[k], R[k + 1], dt, rng)));
        out.r1[i] = R[n_steps];
        out.r_u[i] = ru;
        out.j_ratio[i] = std::clamp(jmin / R[n_steps], 0.0, 1.0);
    });
    return out;
}

/// alpha = B_{U T1}/sqrt(T1) from exact-reversal hitting paths, computed
/// without storing the path (only the two grid values bracketing U T1 are
/// needed). Stream layout per path: N for T1, then U, then increments.
struct AlphaDraws {
    std::vector<double> alpha;
    std::vector<double> t1;
};

inline AlphaDraws simulate_alpha_draws(std::size_t n_paths, std::size_t n_steps, SeedSpec base,
                                       int workers) {
    AlphaDraws out;
    out.alpha.resize(n_paths);
    out.t1.resize(n_paths);
    parallel_for(n_paths, workers, [&](std::size_t i) {
        Rng rng(base.offset(i));
        const double g = rng.gaussian_nonzero();
        const double T1 = 1.0 / (g * g);
        const double u = rng.uniform();
        const auto nd = static_cast<double>(n_steps);
        const double dt = T1 / nd;
        const double sdt = std::sqrt(dt);

        const double pos = u * nd;
        const auto kb = static_cast<std::size_t>(pos);
        const double w = pos - static_cast<double>(kb);
        const std::size_t j1 = n_steps - kb - 1, j2 = n_steps - kb;

        double x = 0, y = 0, z = 0;
        double x1 = 0, y1 = 0, z1 = 0, x2 = 0, y2 = 0, z2 = 0;
        if (j1 == 0) { x1 = y1 = z1 = 0; }
        for (std::size_t j = 1; j <= n_steps; ++j) {
            x += sdt * rng.gaussian();
            y += sdt * rng.gaussian();
            z += sdt * rng.gaussian();
            if (j == j1) { x1 = x; y1 = y; z1 = z; }
            if (j == j2) { x2 = x; y2 = y; z2 = z; }
        }
        const double wxn = x, wyn = y, wzn = z;
        auto bridge_norm = [&](std::size_t j, double wx, double wy, double wz) {
            const double s = static_cast<double>(j) / nd;
            const double bx = wx - s * wxn + s;
            const double by = wy - s * wyn;
            const double bz = wz - s * wzn;
            return std::sqrt(bx * bx + by * by + bz * bz);
        };
        const double b_lo = 1.0 - bridge_norm(j2, x2, y2, z2);  // B at grid index kb
        const double b_hi = 1.0 - bridge_norm(j1, x1, y1, z1);  // B at grid index kb+1
        out.alpha[i] = (b_lo * (1.0 - w) + b_hi * w) / std::sqrt(T1);
        out.t1[i] = T1;
    });
    return out;
}

/// Pseudo-bridge triplet draws: (B_{U tau1}/sqrt(tau1), 1/sqrt(tau1),
/// L_{U tau1} normalized by the stopped level). Paths that exhaust cap_steps
/// are discarded and counted.
struct PseudoBridgeDraws {
    std::vector<double> b_coord;
    std::vector<double> inv_sqrt_tau;
    std::vector<double> lt_uniform;
    std::size_t discarded{0};
    std::size_t attempted{0};
};

inline PseudoBridgeDraws simulate_pseudo_bridge_draws(std::size_t n_paths, double dt,
                                                      double epsilon, std::size_t cap_steps,
                                                      SeedSpec base, int workers) {
    std::vector<double> b(n_paths), tau(n_paths), lt(n_paths);
    std::vector<char> ok(n_paths, 0);
    const double eps = epsilon > 0 ? epsilon : default_bandwidth(dt);
    parallel_for(n_paths, workers, [&](std::size_t i) {
        const auto p = simulate_pseudo_bridge(dt, LocalTimeMethod::occupation, eps, cap_steps,
                                              base.offset(2 * i));
        if (!p) return;
        Rng rng(base.offset(2 * i + 1));
        const double u = rng.uniform();
        b[i] = p->path.at_time(u);
        tau[i] = p->tau1;
        const double total = p->local_time_total();
        lt[i] = total > 0 ? std::clamp(p->local_time_at(u) / total, 0.0, 1.0) : 0.0;
        ok[i] = 1;
    });
    PseudoBridgeDraws out;
    out.attempted = n_paths;
    for (std::size_t i = 0; i < n_paths; ++i) {
        if (!ok[i]) {
            ++out.discarded;
            continue;
        }
        out.b_coord.push_back(b[i]);
        out.inv_sqrt_tau.push_back(1.0 / std::sqrt(tau[i]));
        out.lt_uniform.push_back(lt[i]);
    }
    return out;
}

/// Exact joint Bessel-3 skeletons (U, R_U, R_1) plus the derived Lemma-1/2
/// statistics.
struct BesselTwoPointDraws {
    std::vector<double> u, r_u, r_1;
    std::vector<double> ru_over_r1sq;   // R_U / R_1^2
    std::vector<double> u_over_rur1sq;  // U / (R_U R_1^2)
    std::vector<double> u_over_ru;      // U / R_U
};

inline BesselTwoPointDraws simulate_bessel_two_point(std::size_t n, SeedSpec seed) {
    BesselTwoPointDraws out;
    out.u.resize(n);
    out.r_u.resize(n);
    out.r_1.resize(n);
    out.ru_over_r1sq.resize(n);
    out.u_over_rur1sq.resize(n);
    out.u_over_ru.resize(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = bessel_two_point(rng);
        out.u[i] = s.u;
        out.r_u[i] = s.r_u;
        out.r_1[i] = s.r_1;
        const double r1sq = s.r_1 * s.r_1;
        out.ru_over_r1sq[i] = s.r_u / r1sq;
        out.u_over_rur1sq[i] = s.u / (s.r_u * r1sq);
        out.u_over_ru[i] = s.u / s.r_u;
    }
    return out;
}

} // namespace blab
