#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blab/rng.hpp"

namespace blab {

/// A tagged collection of draws. Row-major: draw i, coordinate c lives at
/// values[i*dim + c]. `names` labels the coordinates (CSV header).
struct SampleBatch {
    std::size_t n{0};
    std::size_t dim{1};
    std::vector<std::string> names;
    std::vector<double> values;
    SeedSpec provenance{};

    double operator()(std::size_t i, std::size_t c = 0) const { return values[i * dim + c]; }

    [[nodiscard]] std::vector<double> column(std::size_t c) const {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = values[i * dim + c];
        return out;
    }

    void validate() const {
        if (values.size() != n * dim) throw std::logic_error("SampleBatch: size mismatch");
        if (names.size() != dim) throw std::logic_error("SampleBatch: names/dim mismatch");
        for (double v : values)
            if (!std::isfinite(v)) throw std::logic_error("SampleBatch: non-finite value");
    }
};

/// Fills an n x dim batch from a fresh stream; row_fn writes one draw.
inline SampleBatch make_batch(std::size_t n, SeedSpec seed, std::vector<std::string> names,
                              const std::function<void(Rng&, double*)>& row_fn) {
    SampleBatch b;
    b.n = n;
    b.dim = names.size();
    b.names = std::move(names);
    b.provenance = seed;
    b.values.resize(n * b.dim);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) row_fn(rng, b.values.data() + i * b.dim);
    return b;
}

inline SampleBatch batch_from_values(std::vector<double> values, std::string name, SeedSpec seed) {
    SampleBatch b;
    b.n = values.size();
    b.dim = 1;
    b.names = {std::move(name)};
    b.values = std::move(values);
    b.provenance = seed;
    return b;
}

} // namespace blab
