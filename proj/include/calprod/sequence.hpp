#pragma once

// Sparse coefficient sequences supported inside a window.

#include <cmath>
#include <complex>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "calprod/dyadic.hpp"

namespace calprod {

/// Finitely supported coefficients, one complex value per in-window index.
/// Entries absent from the map are zero. Map order (level-major, then
/// lexicographic position) fixes every summation order.
struct Sequence {
    Window window;
    std::map<DyadicIndex, std::complex<double>> entries;

    Sequence() = default;
    explicit Sequence(Window w) : window(w) {}

    void set(const DyadicIndex& idx, std::complex<double> value) {
        if (!window.contains(idx)) throw std::invalid_argument("Sequence::set: index outside window");
        if (value == std::complex<double>(0.0, 0.0))
            entries.erase(idx);
        else
            entries[idx] = value;
    }

    std::complex<double> at(const DyadicIndex& idx) const {
        auto it = entries.find(idx);
        return it == entries.end() ? std::complex<double>(0.0, 0.0) : it->second;
    }

    size_t support_size() const { return entries.size(); }

    Sequence abs() const {
        Sequence out(window);
        for (const auto& [idx, v] : entries) out.entries[idx] = std::abs(v);
        return out;
    }

    Sequence scaled(std::complex<double> c) const {
        Sequence out(window);
        if (c == std::complex<double>(0.0, 0.0)) return out;
        for (const auto& [idx, v] : entries) out.entries[idx] = c * v;
        return out;
    }

    friend Sequence operator+(const Sequence& a, const Sequence& b) {
        Sequence out = a;
        for (const auto& [idx, v] : b.entries) {
            auto w = out.at(idx) + v;
            if (w == std::complex<double>(0.0, 0.0))
                out.entries.erase(idx);
            else
                out.entries[idx] = w;
        }
        return out;
    }
    friend Sequence operator-(const Sequence& a, const Sequence& b) { return a + b.scaled(-1.0); }
};

/// Text records "j k_1 ... k_d re [im]", one per line.
inline void write_sequence(std::ostream& os, const Sequence& seq) {
    os.precision(17);
    for (const auto& [idx, v] : seq.entries) {
        os << idx.level;
        for (long long k : idx.pos) os << ' ' << k;
        os << ' ' << v.real();
        if (v.imag() != 0.0) os << ' ' << v.imag();
        os << '\n';
    }
}

inline Sequence read_sequence(std::istream& is, const Window& window) {
    Sequence seq(window);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        DyadicIndex idx;
        if (!(ls >> idx.level)) continue;
        idx.pos.resize(static_cast<size_t>(window.dim));
        for (int i = 0; i < window.dim; ++i)
            if (!(ls >> idx.pos[static_cast<size_t>(i)])) throw std::runtime_error("sequence parse error: truncated index");
        double re, im = 0.0;
        if (!(ls >> re)) throw std::runtime_error("sequence parse error: missing value");
        ls >> im;
        seq.set(idx, {re, im});
    }
    return seq;
}

}  // namespace calprod
