#pragma once

// Local Hardy-Littlewood maximal operator on dyadic windows.
//
// The supremum is restricted to dyadic ancestor cubes (all of volume <= 1
// since levels are nonnegative), which makes every average exact. The
// dyadic-restricted operator is dominated pointwise by the full local maximal
// operator and dominates a constant multiple of it, so boundedness transfers;
// reports should mention the restriction.

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "calprod/dyadic.hpp"
#include "calprod/weight.hpp"

namespace calprod {

/// Nonnegative function that is constant on the finest cells of a window,
/// stored by finest ordinal.
struct CellFunction {
    Window window;
    std::vector<double> values;

    CellFunction() = default;
    CellFunction(Window w, std::vector<double> v) : window(w), values(std::move(v)) {
        if (static_cast<long long>(values.size()) != window.finest_cell_count())
            throw std::invalid_argument("CellFunction: need one value per finest cell");
        for (double x : values)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw std::invalid_argument("CellFunction: values must be nonnegative finite");
    }

    static CellFunction constant(const Window& w, double c) {
        return CellFunction(w, std::vector<double>(static_cast<size_t>(w.finest_cell_count()), c));
    }
};

/// Per finest cell: the maximum over all in-window dyadic cubes containing it
/// of the average of f, i.e. a sup over the ancestor chain up to level 0.
inline CellFunction m_loc(const CellFunction& f) {
    const Window& win = f.window;
    const int d = win.dim;
    const int jmax = win.max_level;

    // Aggregate sums level by level, coarse to fine alongside a running max of
    // the ancestor averages.
    // sums[j] holds the integral of f over each level-j cube.
    std::vector<std::vector<double>> sums(static_cast<size_t>(jmax + 1));
    sums[static_cast<size_t>(jmax)].resize(static_cast<size_t>(win.finest_cell_count()));
    const double finest_vol = std::ldexp(1.0, -jmax * d);
    for (size_t i = 0; i < f.values.size(); ++i) sums[static_cast<size_t>(jmax)][i] = f.values[i] * finest_vol;

    for (int j = jmax - 1; j >= 0; --j) {
        const long long n = win.cell_count(j);
        sums[static_cast<size_t>(j)].assign(static_cast<size_t>(n), 0.0);
        const long long side_child = win.cells_per_side(j + 1);
        const long long side = win.cells_per_side(j);
        const long long n_child = win.cell_count(j + 1);
        for (long long c = 0; c < n_child; ++c) {
            // parent ordinal: halve each coordinate digit
            long long rem = c, parent = 0;
            std::vector<long long> digits(static_cast<size_t>(d));
            for (int i = d - 1; i >= 0; --i) {
                digits[static_cast<size_t>(i)] = rem % side_child;
                rem /= side_child;
            }
            for (int i = 0; i < d; ++i) parent = parent * side + digits[static_cast<size_t>(i)] / 2;
            sums[static_cast<size_t>(j)][static_cast<size_t>(parent)] += sums[static_cast<size_t>(j + 1)][static_cast<size_t>(c)];
        }
    }

    CellFunction out = f;
    for (long long ord = 0; ord < win.finest_cell_count(); ++ord) {
        DyadicIndex cell = win.finest_index(ord);
        double best = 0.0;
        for (int j = 0; j <= jmax; ++j) {
            DyadicIndex anc = ancestor(cell, j);
            const long long lim = win.half_extent << j;
            const long long side = win.cells_per_side(j);
            long long a_ord = 0;
            for (int i = 0; i < d; ++i) a_ord = a_ord * side + (anc.pos[static_cast<size_t>(i)] + lim);
            const double avg = sums[static_cast<size_t>(j)][static_cast<size_t>(a_ord)] * std::ldexp(1.0, j * d);
            best = std::max(best, avg);
        }
        out.values[static_cast<size_t>(ord)] = best;
    }
    return out;
}

/// || g | L_p(w) || for a finest-cell function, given the finest-cell masses.
/// p = inf takes the sup and ignores the masses.
inline double lp_norm(const CellFunction& g, double p, const std::vector<double>& masses) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : g.values) m = std::max(m, v);
        return m;
    }
    double sum = 0.0;
    for (size_t i = 0; i < g.values.size(); ++i)
        if (g.values[i] != 0.0) sum += std::pow(g.values[i], p) * masses[i];
    return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p);
}

// Cell functions share the cell-measure text format; the mass column is read
// as the (possibly zero) cell value.

inline void write_cell_function(std::ostream& os, const CellFunction& f) {
    const Window& win = f.window;
    os << "window " << win.dim << ' ' << win.max_level << ' ' << win.half_extent << '\n';
    os.precision(17);
    for (long long ord = 0; ord < win.finest_cell_count(); ++ord) {
        DyadicIndex idx = win.finest_index(ord);
        os << idx.level;
        for (long long k : idx.pos) os << ' ' << k;
        os << ' ' << f.values[static_cast<size_t>(ord)] << '\n';
    }
}

inline CellFunction read_cell_function(std::istream& is) {
    std::string tag;
    int d = 0, j_max = 0;
    long long k_half = 0;
    if (!(is >> tag >> d >> j_max >> k_half) || tag != "window")
        throw std::runtime_error("cell-function parse error: expected header 'window d J K'");
    Window win(d, j_max, k_half);
    std::vector<double> values(static_cast<size_t>(win.finest_cell_count()), 0.0);
    int level;
    while (is >> level) {
        DyadicIndex idx;
        idx.level = level;
        idx.pos.resize(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i)
            if (!(is >> idx.pos[static_cast<size_t>(i)]))
                throw std::runtime_error("cell-function parse error: truncated record");
        double value;
        if (!(is >> value)) throw std::runtime_error("cell-function parse error: missing value");
        if (level != j_max) throw std::runtime_error("cell-function parse error: record not at finest level");
        values[static_cast<size_t>(win.finest_ordinal(idx))] = value;
    }
    return CellFunction(win, std::move(values));
}

/// Empirical constant of the vector-valued maximal inequality for one family:
/// || (sum_j (M^loc f_j)^q)^{1/q} | L_p(w) || / || (sum_j f_j^q)^{1/q} | L_p(w) ||.
inline double vv_maximal_constant(const std::vector<CellFunction>& family, double p, double q,
                                  const Weight& w, double quad_tol = 1e-8) {
    if (family.empty()) throw std::invalid_argument("vv_maximal_constant: empty family");
    if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("vv_maximal_constant: need 1 < p < inf");
    if (!(q > 1.0)) throw std::invalid_argument("vv_maximal_constant: need 1 < q <= inf");
    const Window& win = family.front().window;
    const size_t n_cells = family.front().values.size();

    auto stack_norm = [&](const std::vector<CellFunction>& fs) {
        CellFunction stack = CellFunction::constant(win, 0.0);
        for (size_t i = 0; i < n_cells; ++i) {
            double acc = 0.0;
            for (const CellFunction& f : fs)
                acc = std::isinf(q) ? std::max(acc, f.values[i]) : acc + std::pow(f.values[i], q);
            stack.values[i] = std::isinf(q) || acc == 0.0 ? acc : std::pow(acc, 1.0 / q);
        }
        return stack;
    };

    const std::vector<double> masses = finest_masses(w, win, quad_tol);
    const double denom = lp_norm(stack_norm(family), p, masses);
    if (denom == 0.0) throw std::invalid_argument("vv_maximal_constant: zero family");

    std::vector<CellFunction> maxed;
    maxed.reserve(family.size());
    for (const CellFunction& f : family) maxed.push_back(m_loc(f));
    return lp_norm(stack_norm(maxed), p, masses) / denom;
}

}  // namespace calprod
