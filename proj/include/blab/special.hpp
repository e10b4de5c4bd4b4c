#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blab/quadrature.hpp"

namespace blab {

inline constexpr double kSqrt2Pi = 2.5066282746310005024;
inline constexpr double kSqrtPiOver2 = 1.2533141373155002512;
inline constexpr double kSqrt2OverPi = 0.7978845608028653559;
inline constexpr double kInvSqrt2 = 0.7071067811865475244;

/// Unnormalized Gaussian tail integral_x^inf e^{-z^2/2} dz.
inline double gauss_tail(double x) {
    if (x <= -38.0) return kSqrt2Pi; // full mass to 1e-300 accuracy
    return kSqrtPiOver2 * std::erfc(x * kInvSqrt2);
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }
inline double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

namespace detail {

// Laplace continued fraction for the Mills ratio, 1/(l + 1/(l + 2/(l + ...))),
// evaluated by the modified Lentz scheme. Accurate and overflow-free for
// large arguments.
inline double mills_continued_fraction(double l) {
    const double tiny = 1e-300;
    double f = l > tiny ? l : tiny;
    double c = f, d = 0.0;
    for (int k = 1; k < 200; ++k) {
        const double a = static_cast<double>(k);
        d = l + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = l + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

} // namespace detail

/// Scaled Gaussian tail e^{l^2/2} * integral_l^inf e^{-x^2/2} dx (the Mills
/// ratio of the standard normal). Tail-stable: the exponential factor is
/// never formed on its own past l = 25.
inline double mills_ratio(double l) {
    if (!(l >= 0.0)) throw std::domain_error("mills_ratio: requires l >= 0");
    if (l > 25.0) return detail::mills_continued_fraction(l);
    return std::exp(0.5 * l * l) * gauss_tail(l);
}

/// Same quantity through the identity with l*E[1/(N^2+l^2)], N standard
/// normal, evaluated by adaptive quadrature. Independent route used to
/// cross-check mills_ratio; degenerates at l = 0.
inline double mills_ratio_via_quadrature(double l) {
    if (!(l > 0.0)) throw std::domain_error("mills_ratio_via_quadrature: requires l > 0");
    const auto integrand = [l](double x) {
        return std::exp(-0.5 * x * x) / ((x * x + l * l) * kSqrt2Pi);
    };
    // integrand is even; peak has width ~l at the origin, split accordingly
    const std::vector<double> nodes{0.0, l, 10.0 * l, std::max(5.0, 20.0 * l), quad::kInf};
    return 2.0 * l * quad::integrate_piecewise(integrand, nodes, 1e-12);
}

/// Joint density of (B_1, L_1) at (x, l): (|x|+l) e^{-(l+|x|)^2/2} / sqrt(2 pi).
inline double joint_density_b1_l1(double x, double l) {
    if (!(l >= 0.0)) throw std::domain_error("joint_density_b1_l1: requires l >= 0");
    const double s = std::abs(x) + l;
    return s * std::exp(-0.5 * s * s) / kSqrt2Pi;
}

/// Rayleigh density l e^{-l^2/2}: law of the bridge local time at 0, time 1.
inline double pdf_lambda10(double l) {
    if (!(l >= 0.0)) throw std::domain_error("pdf_lambda10: requires l >= 0");
    return l * std::exp(-0.5 * l * l);
}

/// Conditional density of b(U) at y given lambda_1^0 = l.
inline double pdf_bU_given_lambda(double y, double l) {
    if (!(l >= 0.0)) throw std::domain_error("pdf_bU_given_lambda: requires l >= 0");
    const double a = std::abs(y);
    return (2.0 * a + l) * std::exp(-(2.0 * y * y + 2.0 * a * l));
}

/// E[lambda_1^y / lambda_1^0] = e^{-2 y^2}.
inline double expected_ratio_lambda(double y) { return std::exp(-2.0 * y * y); }

/// Density of the uniformly sampled bridge b(U): integral_{2|y|}^inf e^{-z^2/2} dz.
inline double pdf_bU(double y) { return gauss_tail(2.0 * std::abs(y)); }

/// Density of the uniformly sampled meander m(U): 2 integral_y^{2y} e^{-z^2/2} dz.
inline double pdf_mU(double y) {
    if (y < 0.0) return 0.0;
    return 2.0 * (gauss_tail(y) - gauss_tail(2.0 * y));
}

/// Maxwell density of R(1): sqrt(2/pi) y^2 e^{-y^2/2}.
inline double pdf_R1(double y) {
    if (y < 0.0) return 0.0;
    return kSqrt2OverPi * y * y * std::exp(-0.5 * y * y);
}

/// Density of R(U): 2 sqrt(2/pi) y integral_y^inf e^{-z^2/2} dz.
inline double pdf_RU(double y) {
    if (y < 0.0) return 0.0;
    return 2.0 * kSqrt2OverPi * y * gauss_tail(y);
}

/// E[U/R_U | R_1 = r], equal to the Mills ratio at r.
inline double cond_exp_U_over_RU(double r) {
    if (!(r > 0.0)) throw std::domain_error("cond_exp_U_over_RU: requires r > 0");
    return mills_ratio(r);
}

/// An evaluable density with declared support: returns 0 outside it.
/// `kinks` lists interior points where the formula is not smooth; quadrature
/// splits there.
class DensitySpec {
  public:
    DensitySpec() = default;
    DensitySpec(std::string name, double lo, double hi, std::function<double(double)> pdf,
                std::vector<double> kinks = {})
        : name_(std::move(name)), lo_(lo), hi_(hi), pdf_(std::move(pdf)), kinks_(std::move(kinks)) {}

    double operator()(double x) const {
        if (x < lo_ || x > hi_) return 0.0;
        return pdf_(x);
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] double support_lo() const { return lo_; }
    [[nodiscard]] double support_hi() const { return hi_; }
    [[nodiscard]] const std::vector<double>& kinks() const { return kinks_; }

  private:
    std::string name_;
    double lo_{0}, hi_{0};
    std::function<double(double)> pdf_;
    std::vector<double> kinks_;
};

inline DensitySpec density_bU() {
    return {"pdf_bU", -quad::kInf, quad::kInf, [](double y) { return pdf_bU(y); }, {0.0}};
}
inline DensitySpec density_mU() {
    return {"pdf_mU", 0.0, quad::kInf, [](double y) { return pdf_mU(y); }};
}
inline DensitySpec density_R1() {
    return {"pdf_R1", 0.0, quad::kInf, [](double y) { return pdf_R1(y); }};
}
inline DensitySpec density_RU() {
    return {"pdf_RU", 0.0, quad::kInf, [](double y) { return pdf_RU(y); }};
}
inline DensitySpec density_rayleigh() {
    return {"rayleigh", 0.0, quad::kInf, [](double l) { return pdf_lambda10(l); }};
}
inline DensitySpec density_halfnormal() {
    return {"halfnormal", 0.0, quad::kInf,
            [](double x) { return kSqrt2OverPi * std::exp(-0.5 * x * x); }};
}
inline DensitySpec density_std_normal() {
    return {"std_normal", -quad::kInf, quad::kInf, [](double x) { return std_normal_pdf(x); }};
}
inline DensitySpec density_uniform01() {
    return {"uniform01", 0.0, 1.0, [](double) { return 1.0; }};
}
inline DensitySpec density_maxwell() { return density_R1(); }

/// Total mass of a density by adaptive quadrature split at its kinks.
inline double density_mass(const DensitySpec& d, double tol = 1e-11) {
    std::vector<double> nodes{d.support_lo()};
    for (double k : d.kinks()) nodes.push_back(k);
    nodes.push_back(d.support_hi());
    std::sort(nodes.begin(), nodes.end());
    return quad::integrate_piecewise([&d](double x) { return d(x); }, nodes, tol);
}

/// A CDF obtained from a DensitySpec by cumulative quadrature: panelized
/// prefix integrals plus one Kronrod application for the partial panel.
class NumericCdf {
  public:
    explicit NumericCdf(const DensitySpec& d, double panel_tol = 1e-12) : d_(d) {
        build(panel_tol);
    }

    double operator()(double x) const {
        if (x <= nodes_.front()) return 0.0;
        if (x >= nodes_.back()) return 1.0;
        const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        const double partial = quad::integrate_panel([this](double t) { return d_(t); }, nodes_[i], x);
        return std::clamp(cum_[i] + partial, 0.0, 1.0);
    }

    [[nodiscard]] double mass() const { return mass_; }
    [[nodiscard]] const std::string& name() const { return d_.name(); }

  private:
    void build(double panel_tol) {
        double lo = d_.support_lo(), hi = d_.support_hi();
        if (std::isinf(lo)) lo = extend(-1.0, -1.0);
        if (std::isinf(hi)) hi = extend(+1.0, +1.0);

        std::vector<double> seeds{lo};
        for (double k : d_.kinks())
            if (k > lo && k < hi) seeds.push_back(k);
        seeds.push_back(hi);
        std::sort(seeds.begin(), seeds.end());

        nodes_ = {lo};
        cum_ = {0.0};
        double acc = 0.0;
        for (std::size_t s = 0; s + 1 < seeds.size(); ++s)
            subdivide(seeds[s], seeds[s + 1], panel_tol, 0, acc);
        mass_ = acc;
    }

    // Finds a finite cut-off beyond which the remaining tail mass is < 1e-14.
    double extend(double start, double dir) const {
        double a = start, w = 1.0;
        for (int i = 0; i < 60; ++i) {
            const double b = a + dir * w;
            const double m = quad::integrate([this](double t) { return d_(t); },
                                             std::min(a, b), std::max(a, b), 1e-13);
            a = b;
            if (m < 1e-14) break;
            w *= 2.0;
        }
        return a;
    }

    void subdivide(double a, double b, double tol, int depth, double& acc) {
        double err = 0;
        const double m = quad::integrate_panel([this](double t) { return d_(t); }, a, b, &err);
        if (err > tol && depth < 48) {
            const double mid = 0.5 * (a + b);
            subdivide(a, mid, tol, depth + 1, acc);
            subdivide(mid, b, tol, depth + 1, acc);
            return;
        }
        acc += m;
        nodes_.push_back(b);
        cum_.push_back(acc);
    }

    DensitySpec d_;
    std::vector<double> nodes_;
    std::vector<double> cum_;
    double mass_{0};
};

/// An evaluable CDF used as a KS reference.
struct CdfSpec {
    std::string name;
    std::string derived_from;
    std::function<double(double)> cdf;

    double operator()(double x) const { return cdf(x); }
};

/// Builds a CdfSpec from a density; rejects densities whose quadrature mass
/// differs from 1 by more than 1e-8.
inline CdfSpec cdf_from_density(const DensitySpec& d) {
    auto num = std::make_shared<NumericCdf>(d);
    if (std::abs(num->mass() - 1.0) > 1e-8)
        throw std::invalid_argument("cdf_from_density: density '" + d.name() +
                                    "' is not normalized (mass " + std::to_string(num->mass()) + ")");
    CdfSpec c;
    c.name = "cdf_" + d.name();
    c.derived_from = d.name();
    c.cdf = [num](double x) { return (*num)(x); };
    return c;
}

inline CdfSpec cdf_from_function(std::string name, std::function<double(double)> f) {
    return {std::move(name), "closed_form", std::move(f)};
}

} // namespace blab
