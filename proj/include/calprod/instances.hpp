#pragma once

// Deterministic instance generation for batch runs. Magnitudes are
// log-uniform in [2^-8, 2^8]; every instance is a pure function of
// (seed, index) through a splitmix64 stream, so alternate implementations can
// reproduce the distributions from this description alone.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "calprod/calderon.hpp"
#include "calprod/maximal.hpp"
#include "calprod/sequence.hpp"

namespace calprod {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return detail::splitmix64(state_); }
    double uniform() { return detail::uniform01(state_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// 2^u with u uniform in [-8, 8].
    double log_uniform_magnitude() { return std::exp2(uniform(-8.0, 8.0)); }
    long long index(long long n) { return static_cast<long long>(next() % static_cast<std::uint64_t>(n)); }

    /// Independent stream for item `index` of a seeded batch.
    static Rng split(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = seed;
        detail::splitmix64(s);
        s += 0x9E3779B97F4A7C15ULL * (index + 1);
        return Rng(s);
    }

private:
    std::uint64_t state_;
};

/// Shape of a random sequence batch.
struct InstanceShape {
    Window window;
    int level_min = 0;
    int level_max = -1;        // -1: up to window.max_level
    double density = 1.0;      // inclusion probability per in-window index
    long long max_support = -1;  // if >= 0, draw exactly min(cap, candidates) indices
    bool complex_phase = false;
    bool nonnegative = true;
};

inline Sequence generate_instance(std::uint64_t seed, std::uint64_t index, const InstanceShape& shape) {
    Rng rng = Rng::split(seed, index);
    const int lmax = shape.level_max < 0 ? shape.window.max_level : shape.level_max;
    std::vector<DyadicIndex> candidates;
    for (int j = shape.level_min; j <= lmax; ++j) {
        auto lvl = shape.window.level_indices(j);
        candidates.insert(candidates.end(), lvl.begin(), lvl.end());
    }
    Sequence seq(shape.window);
    auto draw_value = [&]() -> std::complex<double> {
        const double mag = rng.log_uniform_magnitude();
        if (shape.complex_phase) {
            const double phi = rng.uniform(0.0, 6.283185307179586);
            return {mag * std::cos(phi), mag * std::sin(phi)};
        }
        if (!shape.nonnegative && rng.uniform() < 0.5) return {-mag, 0.0};
        return {mag, 0.0};
    };
    if (shape.max_support >= 0) {
        // Partial Fisher-Yates draw of exactly min(cap, #candidates) indices.
        const long long take = std::min<long long>(shape.max_support, static_cast<long long>(candidates.size()));
        for (long long i = 0; i < take; ++i) {
            const long long j = i + rng.index(static_cast<long long>(candidates.size()) - i);
            std::swap(candidates[static_cast<size_t>(i)], candidates[static_cast<size_t>(j)]);
            seq.entries[candidates[static_cast<size_t>(i)]] = draw_value();
        }
        return seq;
    }
    for (const DyadicIndex& idx : candidates)
        if (rng.uniform() < shape.density) seq.entries[idx] = draw_value();
    return seq;
}

inline std::vector<Sequence> generate_instances(std::uint64_t seed, std::uint64_t count,
                                                const InstanceShape& shape) {
    std::vector<Sequence> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(generate_instance(seed, i, shape));
    return out;
}

/// Random finest-cell function: log-uniform values on a density-fraction of
/// cells, zero elsewhere.
inline CellFunction generate_cell_function(std::uint64_t seed, std::uint64_t index, const Window& window,
                                           double density = 1.0) {
    Rng rng = Rng::split(seed, index ^ 0xCE11F0ULL);
    std::vector<double> values(static_cast<size_t>(window.finest_cell_count()), 0.0);
    for (double& v : values)
        if (rng.uniform() < density) v = rng.log_uniform_magnitude();
    return CellFunction(window, values);
}

/// Random strictly positive per-cell masses (for cell-measure weights).
inline std::vector<double> generate_cell_masses(std::uint64_t seed, std::uint64_t index,
                                                const Window& window) {
    Rng rng = Rng::split(seed, index ^ 0x3A55E5ULL);
    std::vector<double> masses(static_cast<size_t>(window.finest_cell_count()));
    for (double& m : masses) m = rng.log_uniform_magnitude() * std::ldexp(1.0, -window.max_level * window.dim);
    return masses;
}

/// Random positive y-table over all in-window indices.
inline YTable generate_y_table(std::uint64_t seed, std::uint64_t index, const Window& window) {
    Rng rng = Rng::split(seed, index ^ 0x7AB1EULL);
    YTable t;
    t.window = window;
    for (const DyadicIndex& idx : window.all_indices()) t.values[idx] = rng.log_uniform_magnitude();
    return t;
}

}  // namespace calprod
