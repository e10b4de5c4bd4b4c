#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "blab/io.hpp"
#include "blab/special.hpp"

namespace blab {

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    // snprintf honors locale; normalize any comma decimal separator
    for (char& c : buf)
        if (c == ',') c = '.';
    return buf;
}

} // namespace detail

/// Normalized histogram (Freedman-Diaconis bins) of a batch overlaid with a
/// density curve sampled at 512 points. Deterministic bytes for fixed input.
inline void render_plot(std::span<const double> data, const DensitySpec& density,
                        const std::filesystem::path& out_path,
                        const std::string& title = "") {
    if (data.size() < 1000) throw std::invalid_argument("render_plot: need n >= 1000");
    std::vector<double> s(data.begin(), data.end());
    std::sort(s.begin(), s.end());
    const double lo = s.front(), hi = s.back();
    if (!(hi > lo)) throw std::invalid_argument("render_plot: degenerate batch (zero range)");

    const double q1 = s[s.size() / 4], q3 = s[(3 * s.size()) / 4];
    const double iqr = q3 - q1;
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(s.size()));
    if (!(width > 0)) width = (hi - lo) / 64.0;
    auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    bins = std::clamp<std::size_t>(bins, 8, 512);
    width = (hi - lo) / static_cast<double>(bins);

    std::vector<double> hist(bins, 0.0);
    for (double x : s) {
        auto b = static_cast<std::size_t>((x - lo) / width);
        if (b >= bins) b = bins - 1;
        hist[b] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(s.size()) * width);
    for (double& h : hist) h *= norm;

    constexpr int kCurvePts = 512;
    std::vector<double> cx(kCurvePts), cy(kCurvePts);
    double ymax = 0.0;
    for (int i = 0; i < kCurvePts; ++i) {
        cx[i] = lo + (hi - lo) * static_cast<double>(i) / (kCurvePts - 1);
        cy[i] = density(cx[i]);
        ymax = std::max(ymax, cy[i]);
    }
    for (double h : hist) ymax = std::max(ymax, h);
    if (ymax <= 0) ymax = 1.0;

    constexpr double W = 800, H = 500, ml = 60, mr = 20, mt = 40, mb = 50;
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto X = [&](double x) { return ml + (x - lo) / (hi - lo) * pw; };
    auto Y = [&](double y) { return mt + ph - y / (ymax * 1.05) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
           "viewBox=\"0 0 800 500\">\n";
    svg += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
    if (!title.empty())
        svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"16\">" + title + "</text>\n";

    for (std::size_t b = 0; b < bins; ++b) {
        const double x0 = lo + width * static_cast<double>(b);
        svg += "<rect x=\"" + detail::svg_num(X(x0)) + "\" y=\"" + detail::svg_num(Y(hist[b])) +
               "\" width=\"" + detail::svg_num(pw / static_cast<double>(bins)) + "\" height=\"" +
               detail::svg_num(Y(0) - Y(hist[b])) + "\" fill=\"#9ecae1\" stroke=\"none\"/>\n";
    }

    svg += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
    for (int i = 0; i < kCurvePts; ++i) {
        if (i) svg += ' ';
        svg += detail::svg_num(X(cx[i])) + "," + detail::svg_num(Y(cy[i]));
    }
    svg += "\"/>\n";

    // axes with a handful of ticks
    svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(mt + ph) +
           "\" x2=\"" + detail::svg_num(ml + pw) + "\" y2=\"" + detail::svg_num(mt + ph) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(mt) + "\" x2=\"" +
           detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(mt + ph) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = lo + (hi - lo) * i / 5.0;
        const double yv = ymax * 1.05 * i / 5.0;
        svg += "<text x=\"" + detail::svg_num(X(xv)) + "\" y=\"" + detail::svg_num(mt + ph + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::svg_num(xv) + "</text>\n";
        svg += "<text x=\"" + detail::svg_num(ml - 6) + "\" y=\"" + detail::svg_num(Y(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               detail::svg_num(yv) + "</text>\n";
    }
    svg += "<text x=\"" + detail::svg_num(ml + pw - 4) + "\" y=\"" + detail::svg_num(mt + 14) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d62728\">" +
           density.name() + "</text>\n";
    svg += "</svg>\n";

    atomic_write_text(out_path, svg);
}

} // namespace blab
