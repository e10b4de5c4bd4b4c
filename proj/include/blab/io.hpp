#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <system_error>

#include "blab/batch.hpp"
#include "blab/paths.hpp"
#include "blab/special.hpp"

namespace blab {

/// Shortest round-trip decimal form, '.' separator regardless of locale.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

/// Write-temp-then-rename so readers never observe a partial file.
inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("rename failed: " + tmp + " -> " + path.string());
}

/// One row per draw, header = coordinate names.
inline void write_batch_csv(const SampleBatch& b, const std::filesystem::path& path) {
    std::string out;
    for (std::size_t c = 0; c < b.dim; ++c) {
        if (c) out += ',';
        out += b.names[c];
    }
    out += '\n';
    for (std::size_t i = 0; i < b.n; ++i) {
        for (std::size_t c = 0; c < b.dim; ++c) {
            if (c) out += ',';
            out += format_double(b(i, c));
        }
        out += '\n';
    }
    atomic_write_text(path, out);
}

namespace detail {

inline void append_f64_le(std::string& out, std::span<const double> vals) {
    static_assert(std::endian::native == std::endian::little,
                  "binary dumps are little-endian; big-endian hosts unsupported");
    const auto* p = reinterpret_cast<const char*>(vals.data());
    out.append(p, vals.size() * sizeof(double));
}

} // namespace detail

/// Little-endian float64 dump: u64 count of values, then the values.
inline void write_f64_dump(std::span<const double> vals, const std::filesystem::path& path) {
    std::string out;
    const auto count = static_cast<std::uint64_t>(vals.size());
    out.append(reinterpret_cast<const char*>(&count), sizeof(count));
    detail::append_f64_le(out, vals);
    atomic_write_text(path, out);
}

inline void write_batch_f64(const SampleBatch& b, const std::filesystem::path& path) {
    write_f64_dump(b.values, path);
}

inline void write_path_f64(const PathGrid& p, const std::filesystem::path& path) {
    write_f64_dump(p.values, path);
}

inline std::vector<double> read_f64_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    std::vector<double> vals(count);
    in.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated dump: " + path.string());
    return vals;
}

/// CSV tabulation (y, pdf, cdf) of a density on a user grid, for plotting.
inline void tabulate_density_csv(const DensitySpec& d, const CdfSpec& cdf,
                                 std::span<const double> grid,
                                 const std::filesystem::path& path) {
    std::string out = "y,pdf,cdf\n";
    for (double y : grid) {
        out += format_double(y);
        out += ',';
        out += format_double(d(y));
        out += ',';
        out += format_double(cdf(y));
        out += '\n';
    }
    atomic_write_text(path, out);
}

} // namespace blab
