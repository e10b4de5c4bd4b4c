#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace blab {

/// Identifies one reproducible random stream. Identical (master_seed,
/// stream_id) always yields the identical draw sequence; distinct stream_ids
/// select distinct PCG increments and are statistically independent.
struct SeedSpec {
    std::uint64_t master_seed{0};
    std::uint64_t stream_id{0};

    [[nodiscard]] SeedSpec stream(std::uint64_t id) const { return {master_seed, id}; }
    [[nodiscard]] SeedSpec offset(std::uint64_t k) const { return {master_seed, stream_id + k}; }
};

/// FNV-1a, used to derive stream ids from experiment/check labels.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

// PCG64 (setseq variant, XSL-RR output). 128-bit LCG state, one stream per
// odd increment; see pcg-random.org for the independence guarantees.
class Pcg64 {
  public:
    using u128 = unsigned __int128;

    Pcg64(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed;
        const u128 init_state = (u128(detail::splitmix64(sm)) << 64) | detail::splitmix64(sm);
        std::uint64_t tm = stream ^ 0xda3e39cb94b95bdbULL;
        const u128 init_seq = (u128(detail::splitmix64(tm)) << 64) | stream;
        inc_ = (init_seq << 1) | 1u;
        state_ = 0u;
        step();
        state_ += init_state;
        step();
    }

    std::uint64_t operator()() {
        const u128 old = state_;
        step();
        const auto xored = static_cast<std::uint64_t>(old >> 64) ^ static_cast<std::uint64_t>(old);
        const auto rot = static_cast<unsigned>(old >> 122);
        return (xored >> rot) | (xored << ((-rot) & 63u));
    }

  private:
    void step() { state_ = state_ * mult() + inc_; }

    static constexpr u128 mult() {
        return (u128(2549297995355413924ULL) << 64) | 4865540595714422341ULL;
    }

    u128 state_{0};
    u128 inc_{0};
};

/// Scalar draw engine over one PCG64 stream. Uniforms are half-open [0,1),
/// exponentials use inverse CDF -ln(1-U), Gaussians Marsaglia's polar method.
class Rng {
  public:
    explicit Rng(SeedSpec s) : gen_(s.master_seed, s.stream_id), seed_(s) {}

    [[nodiscard]] SeedSpec seed() const { return seed_; }

    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [-1, 1).
    double uniform_pm1() { return 2.0 * uniform() - 1.0; }

    /// Uniform on [lo, hi).
    double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential() { return -std::log1p(-uniform()); }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform_pm1();
            v = uniform_pm1();
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Nonzero standard normal (rejects the measure-zero exact 0).
    double gaussian_nonzero() {
        double n = gaussian();
        while (n == 0.0) n = gaussian();
        return n;
    }

  private:
    Pcg64 gen_;
    SeedSpec seed_;
    double spare_{0};
    bool has_spare_{false};
};

} // namespace blab
