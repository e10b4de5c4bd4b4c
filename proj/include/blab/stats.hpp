#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "blab/special.hpp"

namespace blab {

/// Neumaier compensated accumulator.
class Kahan {
  public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            c_ += (sum_ - t) + v;
        else
            c_ += (v - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + c_; }

  private:
    double sum_{0}, c_{0};
};

inline double compensated_mean(std::span<const double> xs) {
    Kahan k;
    for (double x : xs) k.add(x);
    return k.value() / static_cast<double>(xs.size());
}

inline double compensated_variance(std::span<const double> xs, double mean) {
    Kahan k;
    for (double x : xs) {
        const double d = x - mean;
        k.add(d * d);
    }
    return k.value() / static_cast<double>(xs.size() - 1);
}

/// Kolmogorov survival function 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 x^2}.
inline double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 10.0) return 0.0;
    double s = 0.0, sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

/// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chi2_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

enum class Verdict { pass, flag, fail };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::flag: return "flag";
        case Verdict::fail: return "fail";
    }
    return "fail";
}

/// Outcome of one statistical check. The comparison rule that produced the
/// verdict is recorded in `notes`.
struct TestReport {
    std::string test_name;
    double statistic{0};
    double threshold{0};
    std::optional<double> p_value;
    std::vector<std::size_t> n;
    std::vector<std::uint64_t> seeds;
    Verdict verdict{Verdict::fail};
    std::string notes;
};

/// How a KS-style report is judged: by p-value (exact samplers) or by a
/// distance threshold with a flag band at 1.5x (biased path-level checks).
struct KsRule {
    enum class Mode { p_value, distance } mode{Mode::p_value};
    double level{1e-3};

    static KsRule p(double alpha = 1e-3) { return {Mode::p_value, alpha}; }
    static KsRule dist(double dmax) { return {Mode::distance, dmax}; }
};

namespace detail {

inline void reject_nan(std::span<const double> xs, const char* who) {
    for (double x : xs)
        if (std::isnan(x)) throw std::invalid_argument(std::string(who) + ": NaN in batch");
}

inline double ks_stat_sorted(const std::vector<double>& s, const CdfSpec& cdf) {
    const auto n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// Stephens' small-sample adjustment of the asymptotic Kolmogorov argument.
inline double ks_p_from_stat(double d, double n_eff) {
    const double rn = std::sqrt(n_eff);
    return kolmogorov_sf(d * (rn + 0.12 + 0.11 / rn));
}

inline void apply_ks_rule(TestReport& r, const KsRule& rule) {
    if (rule.mode == KsRule::Mode::p_value) {
        r.threshold = rule.level;
        r.verdict = (r.p_value && *r.p_value > rule.level) ? Verdict::pass : Verdict::fail;
        r.notes += " rule: pass iff p_value > threshold";
    } else {
        r.threshold = rule.level;
        if (r.statistic < rule.level)
            r.verdict = Verdict::pass;
        else if (r.statistic < 1.5 * rule.level)
            r.verdict = Verdict::flag;
        else
            r.verdict = Verdict::fail;
        r.notes += " rule: pass iff statistic < threshold, flag below 1.5x";
    }
}

} // namespace detail

/// One-sample Kolmogorov-Smirnov against a reference CDF.
inline TestReport ks_one_sample(std::string name, std::span<const double> data, const CdfSpec& cdf,
                                KsRule rule = KsRule::p()) {
    if (data.size() < 10) throw std::invalid_argument("ks_one_sample: n < 10");
    detail::reject_nan(data, "ks_one_sample");
    std::vector<double> s(data.begin(), data.end());
    std::sort(s.begin(), s.end());
    TestReport r;
    r.test_name = std::move(name);
    r.statistic = detail::ks_stat_sorted(s, cdf);
    r.p_value = detail::ks_p_from_stat(r.statistic, static_cast<double>(s.size()));
    r.n = {s.size()};
    r.notes = "ks_one_sample vs " + cdf.name + ";";
    detail::apply_ks_rule(r, rule);
    return r;
}

/// Two-sample Kolmogorov-Smirnov.
inline TestReport ks_two_sample(std::string name, std::span<const double> a,
                                std::span<const double> b, KsRule rule = KsRule::p()) {
    if (a.size() < 10 || b.size() < 10) throw std::invalid_argument("ks_two_sample: n < 10");
    detail::reject_nan(a, "ks_two_sample");
    detail::reject_nan(b, "ks_two_sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
    double d = 0.0, fa = 0.0, fb = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        fa = static_cast<double>(i) / na;
        fb = static_cast<double>(j) / nb;
        d = std::max(d, std::abs(fa - fb));
    }
    TestReport r;
    r.test_name = std::move(name);
    r.statistic = d;
    r.p_value = detail::ks_p_from_stat(d, na * nb / (na + nb));
    r.n = {sa.size(), sb.size()};
    r.notes = "ks_two_sample;";
    detail::apply_ks_rule(r, rule);
    return r;
}

/// Mean with a conf_sigma * SE interval around it; passes when `target` lies
/// inside. Compensated summation throughout.
inline TestReport mean_ci(std::string name, std::span<const double> data, double conf_sigma,
                          double target) {
    if (data.size() < 30) throw std::invalid_argument("mean_ci: n < 30");
    detail::reject_nan(data, "mean_ci");
    const double mean = compensated_mean(data);
    const double var = compensated_variance(data, mean);
    const double se = std::sqrt(var / static_cast<double>(data.size()));
    TestReport r;
    r.test_name = std::move(name);
    r.statistic = mean;
    r.threshold = conf_sigma * se;
    r.n = {data.size()};
    r.verdict = std::abs(mean - target) <= r.threshold ? Verdict::pass : Verdict::fail;
    r.notes = "mean_ci target " + std::to_string(target) + ", interval halfwidth " +
              std::to_string(r.threshold) + "; rule: pass iff |statistic - target| <= threshold";
    return r;
}

/// Pearson chi-square against the uniform law on [0,1].
inline TestReport chi2_uniformity(std::string name, std::span<const double> data, std::size_t bins,
                                  double alpha = 1e-3) {
    if (bins < 2) throw std::invalid_argument("chi2_uniformity: bins < 2");
    detail::reject_nan(data, "chi2_uniformity");
    for (double x : data)
        if (x < 0.0 || x > 1.0)
            throw std::invalid_argument("chi2_uniformity: value outside [0,1]");
    std::vector<std::size_t> counts(bins, 0);
    for (double x : data) {
        auto b = static_cast<std::size_t>(x * static_cast<double>(bins));
        if (b == bins) b = bins - 1; // x == 1.0
        ++counts[b];
    }
    const double expected = static_cast<double>(data.size()) / static_cast<double>(bins);
    double chi2 = 0.0;
    for (std::size_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    TestReport r;
    r.test_name = std::move(name);
    r.statistic = chi2;
    r.threshold = alpha;
    r.p_value = chi2_sf(chi2, static_cast<double>(bins - 1));
    r.n = {data.size()};
    r.verdict = *r.p_value > alpha ? Verdict::pass : Verdict::fail;
    r.notes = "chi2_uniformity, " + std::to_string(bins) +
              " bins; rule: pass iff p_value > threshold";
    return r;
}

namespace detail {

inline std::vector<double> midranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
        i = j + 1;
    }
    return rank;
}

} // namespace detail

/// Spearman rank correlation with midrank tie handling.
inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman_rho: size mismatch");
    const auto rx = detail::midranks(x);
    const auto ry = detail::midranks(y);
    const double mx = compensated_mean(rx), my = compensated_mean(ry);
    Kahan cov, vx, vy;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        cov.add((rx[i] - mx) * (ry[i] - my));
        vx.add((rx[i] - mx) * (rx[i] - mx));
        vy.add((ry[i] - my) * (ry[i] - my));
    }
    const double denom = std::sqrt(vx.value() * vy.value());
    return denom > 0 ? cov.value() / denom : 0.0;
}

/// Rank-correlation independence check; passes when |rho| < 4/sqrt(n).
inline TestReport rank_independence(std::string name, std::span<const double> x,
                                    std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("rank_independence: size mismatch");
    if (x.size() < 10) throw std::invalid_argument("rank_independence: n < 10");
    detail::reject_nan(x, "rank_independence");
    detail::reject_nan(y, "rank_independence");
    const double rho = spearman_rho(x, y);
    const auto n = static_cast<double>(x.size());
    TestReport r;
    r.test_name = std::move(name);
    r.statistic = rho;
    r.threshold = 4.0 / std::sqrt(n);
    r.p_value = std::erfc(std::abs(rho) * std::sqrt(n - 1.0) * kInvSqrt2);
    r.n = {x.size()};
    r.verdict = std::abs(rho) < r.threshold ? Verdict::pass : Verdict::fail;
    r.notes = "spearman rank correlation; rule: pass iff |statistic| < threshold";
    return r;
}

/// Same statistic but judged against a caller-supplied bound (path-level
/// checks where 4/sqrt(n) is not the contract), flag band at 1.5x.
inline TestReport rank_independence_bound(std::string name, std::span<const double> x,
                                          std::span<const double> y, double bound) {
    TestReport r = rank_independence(std::move(name), x, y);
    r.threshold = bound;
    const double a = std::abs(r.statistic);
    r.verdict = a < bound ? Verdict::pass : (a < 1.5 * bound ? Verdict::flag : Verdict::fail);
    r.notes = "spearman rank correlation; rule: pass iff |statistic| < threshold, flag below 1.5x";
    return r;
}

struct BinStat {
    double lo{0}, hi{0};
    std::size_t count{0};
    double mean{0};
    double se{0};
    bool low_occupancy{false};
};

/// Per-bin mean and SE of y given x in the bin; bins under 500 points are
/// flagged rather than failed.
inline std::vector<BinStat> binned_conditional_mean(std::span<const double> x,
                                                    std::span<const double> y,
                                                    std::span<const double> edges,
                                                    std::size_t min_occupancy = 500) {
    if (x.size() != y.size()) throw std::invalid_argument("binned_conditional_mean: size mismatch");
    if (edges.size() < 2) throw std::invalid_argument("binned_conditional_mean: need >= 2 edges");
    std::vector<BinStat> out(edges.size() - 1);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        out[b].lo = edges[b];
        out[b].hi = edges[b + 1];
    }
    std::vector<Kahan> sums(out.size());
    std::vector<std::size_t> counts(out.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), x[i]);
        if (it == edges.begin() || it == edges.end()) continue;
        const auto b = static_cast<std::size_t>(it - edges.begin()) - 1;
        sums[b].add(y[i]);
        ++counts[b];
    }
    for (std::size_t b = 0; b < out.size(); ++b) {
        out[b].count = counts[b];
        if (counts[b] == 0) {
            out[b].low_occupancy = true;
            continue;
        }
        out[b].mean = sums[b].value() / static_cast<double>(counts[b]);
        if (counts[b] > 1) {
            Kahan ss;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] > out[b].lo && x[i] <= out[b].hi) {
                    const double d = y[i] - out[b].mean;
                    ss.add(d * d);
                }
            }
            out[b].se = std::sqrt(ss.value() / static_cast<double>(counts[b] - 1) /
                                  static_cast<double>(counts[b]));
        }
        out[b].low_occupancy = counts[b] < min_occupancy;
    }
    return out;
}

/// Distance-style report: pass iff |statistic| < threshold, flag below 1.5x.
inline TestReport distance_report(std::string name, double statistic, double threshold,
                                  std::string notes) {
    TestReport r;
    r.test_name = std::move(name);
    r.statistic = statistic;
    r.threshold = threshold;
    const double a = std::abs(statistic);
    r.verdict = a < threshold ? Verdict::pass
                              : (a < 1.5 * threshold ? Verdict::flag : Verdict::fail);
    r.notes = std::move(notes) + "; rule: pass iff |statistic| < threshold, flag below 1.5x";
    return r;
}

/// Difference-of-means check: |mean(a) - c * mean(b)| against conf_sigma
/// combined SEs. Serves identities whose two sides are estimated separately.
inline TestReport means_agree(std::string name, std::span<const double> a,
                              std::span<const double> b, double scale_b, double conf_sigma) {
    const double ma = compensated_mean(a), mb = scale_b * compensated_mean(b);
    const double va = compensated_variance(a, ma);
    const double vb = scale_b * scale_b * compensated_variance(b, mb / scale_b);
    const double se = std::sqrt(va / static_cast<double>(a.size()) +
                                vb / static_cast<double>(b.size()));
    TestReport r;
    r.test_name = std::move(name);
    r.statistic = ma - mb;
    r.threshold = conf_sigma * se;
    r.n = {a.size(), b.size()};
    r.verdict = std::abs(r.statistic) <= r.threshold ? Verdict::pass : Verdict::fail;
    r.notes = "difference of means (lhs - scale*rhs); rule: pass iff |statistic| <= threshold";
    return r;
}

} // namespace blab
