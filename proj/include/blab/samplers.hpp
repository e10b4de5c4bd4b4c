#pragma once

#include <cmath>

#include "blab/batch.hpp"
#include "blab/rng.hpp"

namespace blab {

/// Maxwell draw (chi with 3 df), the law of |3-D standard normal| and of R(1).
inline double maxwell_draw(Rng& rng) {
    const double a = rng.gaussian(), b = rng.gaussian(), c = rng.gaussian();
    return std::sqrt(a * a + b * b + c * c);
}

namespace detail {

// (B_1, L_1) through the Maxwell decomposition: S = |B_1| + L_1 is Maxwell,
// V uniform on [-1,1] independent, B_1 = S V, L_1 = S (1 - |V|).
inline void joint_b1_l1_draw(Rng& rng, double& b1, double& l1) {
    const double s = maxwell_draw(rng);
    const double v = rng.uniform_pm1();
    b1 = s * v;
    l1 = s * (1.0 - std::abs(v));
}

} // namespace detail

inline SampleBatch sample_gaussian(std::size_t n, SeedSpec seed) {
    return make_batch(n, seed, {"n"}, [](Rng& rng, double* row) { row[0] = rng.gaussian(); });
}

/// Pairs (B_1, L_1) with density (|x|+l) e^{-(l+|x|)^2/2} / sqrt(2 pi).
inline SampleBatch sample_joint_b1_l1(std::size_t n, SeedSpec seed) {
    return make_batch(n, seed, {"b1", "l1"},
                      [](Rng& rng, double* row) { detail::joint_b1_l1_draw(rng, row[0], row[1]); });
}

/// alpha = Lambda L_1 - |B_1|/2 with Lambda uniform [0,1) independent.
inline SampleBatch sample_alpha_closed(std::size_t n, SeedSpec seed) {
    return make_batch(n, seed, {"alpha"}, [](Rng& rng, double* row) {
        double b1, l1;
        detail::joint_b1_l1_draw(rng, b1, l1);
        row[0] = rng.uniform() * l1 - 0.5 * std::abs(b1);
    });
}

/// First hitting time of level one: T_1 = 1/N^2.
inline SampleBatch sample_T1(std::size_t n, SeedSpec seed) {
    return make_batch(n, seed, {"t1"}, [](Rng& rng, double* row) {
        const double g = rng.gaussian_nonzero();
        row[0] = 1.0 / (g * g);
    });
}

/// b(U) = sqrt(2 E) V/2, E exponential, V uniform [-1,1].
inline SampleBatch sample_bU_closed(std::size_t n, SeedSpec seed) {
    return make_batch(n, seed, {"bU"}, [](Rng& rng, double* row) {
        row[0] = std::sqrt(2.0 * rng.exponential()) * 0.5 * rng.uniform_pm1();
    });
}

/// m(U) = sqrt(2 E) W, E exponential, W uniform [1/2, 1].
inline SampleBatch sample_mU_closed(std::size_t n, SeedSpec seed) {
    return make_batch(n, seed, {"mU"}, [](Rng& rng, double* row) {
        row[0] = std::sqrt(2.0 * rng.exponential()) * rng.uniform_in(0.5, 1.0);
    });
}

/// R(1), Maxwell distributed.
inline SampleBatch sample_R1(std::size_t n, SeedSpec seed) {
    return make_batch(n, seed, {"r1"}, [](Rng& rng, double* row) { row[0] = maxwell_draw(rng); });
}

/// R(U) = sqrt(U) R(1) with U fresh and independent.
inline SampleBatch sample_RU_closed(std::size_t n, SeedSpec seed) {
    return make_batch(n, seed, {"rU"}, [](Rng& rng, double* row) {
        row[0] = std::sqrt(rng.uniform()) * maxwell_draw(rng);
    });
}

/// Triples ((1/2) B_1, L_1, Lambda), the closed-form side of the
/// pseudo-bridge triplet identity.
inline SampleBatch sample_triplet_closed(std::size_t n, SeedSpec seed) {
    return make_batch(n, seed, {"half_b1", "l1", "lambda"}, [](Rng& rng, double* row) {
        double b1, l1;
        detail::joint_b1_l1_draw(rng, b1, l1);
        row[0] = 0.5 * b1;
        row[1] = l1;
        row[2] = rng.uniform();
    });
}

} // namespace blab
