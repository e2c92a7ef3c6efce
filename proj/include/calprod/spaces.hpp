#pragma once

// Quasi-norms of the weighted sequence spaces.
//
// The F-scale norm stacks levels per point and integrates in L_p(w); the
// B-scale norm takes per-level L_p(w) norms and an outer little-l_q norm. Both
// are computed exactly on the window: the stack function is constant on
// finest-level cells, so the L_p integral is a finite weighted sum. The
// "s-y" variant replaces cube masses by an arbitrary table of positive reals.
//
// Conventions at infinite exponents: p = inf makes the inner norm a supremum
// and drops the weight; q = inf makes the outer norm a supremum over levels.
// All norms below draw every cube mass from one finest-cell mass table per
// (weight, window) pair, so cross-identities between the scales hold to
// rounding rather than to quadrature error.

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "calprod/sequence.hpp"
#include "calprod/weight.hpp"

namespace calprod {

enum class Scale { F, B };

/// (s, p, q, scale, weight) identifying one quasi-normed sequence space.
struct SpaceParams {
    double s = 0.0;
    double p = 2.0;
    double q = 2.0;
    Scale scale = Scale::F;
    Weight weight = Weight::constant(1.0);

    void validate() const {
        if (scale == Scale::F && std::isinf(p))
            throw std::invalid_argument("SpaceParams: the F scale is not defined for p = inf");
        if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("SpaceParams: p and q must be positive");
    }
};

struct InterpolatedExponents {
    double s = 0.0, p = 0.0, q = 0.0;
};

/// s affine, 1/p and 1/q harmonic with 1/inf = 0.
inline InterpolatedExponents interpolate_params(const SpaceParams& P0, const SpaceParams& P1, double theta) {
    InterpolatedExponents r;
    r.s = (1.0 - theta) * P0.s + theta * P1.s;
    r.p = interpolate_exponent(P0.p, P1.p, theta);
    r.q = interpolate_exponent(P0.q, P1.q, theta);
    return r;
}

/// 2^e, exact for integral e.
inline double pow2(double e) {
    if (e == std::nearbyint(e) && std::fabs(e) < 1000.0) return std::ldexp(1.0, static_cast<int>(e));
    return std::exp2(e);
}

/// Per-index masses summed from the finest-cell table (block-ascending), so
/// that every norm in this module sees one consistent mass assignment.
inline std::map<DyadicIndex, double> all_cell_masses(const Weight& w, const Window& window,
                                                     double quad_tol = 1e-8) {
    const std::vector<double> fine = finest_masses(w, window, quad_tol);
    std::map<DyadicIndex, double> out;
    std::vector<long long> block;
    for (const DyadicIndex& idx : window.all_indices()) {
        finest_ordinal_block(idx, window, block);
        double s = 0.0;
        for (long long ord : block) s += fine[static_cast<size_t>(ord)];
        out[idx] = s;
    }
    return out;
}

/// Table of positive reals y_{j,k} replacing cube masses.
struct YTable {
    Window window;
    std::map<DyadicIndex, double> values;

    double at(const DyadicIndex& idx) const {
        auto it = values.find(idx);
        if (it == values.end()) throw std::invalid_argument("YTable: missing entry on the support");
        return it->second;
    }
    void set(const DyadicIndex& idx, double y) {
        if (!(y > 0.0) || !std::isfinite(y)) throw std::invalid_argument("YTable: entries must be positive finite");
        values[idx] = y;
    }
};

inline YTable y_from_weight(const Weight& w, const Window& window, double quad_tol = 1e-8) {
    YTable t;
    t.window = window;
    t.values = all_cell_masses(w, window, quad_tol);
    return t;
}

inline YTable y_volumes(const Window& window) {
    YTable t;
    t.window = window;
    for (const DyadicIndex& idx : window.all_indices())
        t.values[idx] = std::ldexp(1.0, -idx.level * window.dim);
    return t;
}

namespace detail {

/// Stack values (sum_{j} 2^{jsq} |coef|^q)^{1/q} per finest ordinal (sup over
/// levels when q = inf). Zero everywhere off the support blocks.
inline std::vector<double> stack_values(const Sequence& seq, double s, double q) {
    const Window& win = seq.window;
    std::vector<double> acc(static_cast<size_t>(win.finest_cell_count()), 0.0);
    std::vector<long long> block;
    const bool sup = std::isinf(q);
    for (const auto& [idx, value] : seq.entries) {
        const double a = std::abs(value);
        if (a == 0.0) continue;
        const double term = sup ? pow2(static_cast<double>(idx.level) * s) * a
                                : pow2(static_cast<double>(idx.level) * s * q) * std::pow(a, q);
        finest_ordinal_block(idx, win, block);
        for (long long ord : block) {
            double& cell = acc[static_cast<size_t>(ord)];
            cell = sup ? std::max(cell, term) : cell + term;
        }
    }
    if (!sup)
        for (double& v : acc) v = v == 0.0 ? 0.0 : std::pow(v, 1.0 / q);
    return acc;
}

}  // namespace detail

/// F-scale quasi-norm; requires p < inf.
inline double f_norm(const Sequence& seq, const SpaceParams& P, double quad_tol = 1e-8) {
    P.validate();
    if (P.scale != Scale::F) throw std::invalid_argument("f_norm: scale mismatch");
    const std::vector<double> stack = detail::stack_values(seq, P.s, P.q);
    const std::vector<double> mass = finest_masses(P.weight, seq.window, quad_tol);
    double sum = 0.0;
    for (size_t i = 0; i < stack.size(); ++i)
        if (stack[i] != 0.0) sum += std::pow(stack[i], P.p) * mass[i];
    return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / P.p);
}

namespace detail {

inline double outer_lq(const std::vector<double>& level_values, double q) {
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : level_values) m = std::max(m, v);
        return m;
    }
    double sum = 0.0;
    for (double v : level_values)
        if (v != 0.0) sum += std::pow(v, q);
    return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / q);
}

/// Inner level norms against a mass lookup; p = inf takes the sup and ignores
/// the masses.
template <class MassFn>
std::vector<double> level_norms(const Sequence& seq, double s, double p, MassFn&& mass_of) {
    std::vector<double> levels(static_cast<size_t>(seq.window.max_level + 1), 0.0);
    const bool sup = std::isinf(p);
    for (const auto& [idx, value] : seq.entries) {
        const double a = std::abs(value);
        if (a == 0.0) continue;
        double& lvl = levels[static_cast<size_t>(idx.level)];
        if (sup)
            lvl = std::max(lvl, pow2(static_cast<double>(idx.level) * s) * a);
        else
            lvl += pow2(static_cast<double>(idx.level) * s * p) * std::pow(a, p) * mass_of(idx);
    }
    if (!sup)
        for (double& v : levels) v = v == 0.0 ? 0.0 : std::pow(v, 1.0 / p);
    return levels;
}

}  // namespace detail

/// B-scale quasi-norm.
inline double b_norm(const Sequence& seq, const SpaceParams& P, double quad_tol = 1e-8) {
    P.validate();
    if (P.scale != Scale::B) throw std::invalid_argument("b_norm: scale mismatch");
    std::map<DyadicIndex, double> masses;
    if (!std::isinf(P.p)) masses = all_cell_masses(P.weight, seq.window, quad_tol);
    auto levels = detail::level_norms(seq, P.s, P.p, [&](const DyadicIndex& idx) { return masses.at(idx); });
    return detail::outer_lq(levels, P.q);
}

/// B-scale quasi-norm with masses replaced by a y-table.
inline double b_norm_y(const Sequence& seq, double s, double p, double q, const YTable& y) {
    auto levels = detail::level_norms(seq, s, p, [&](const DyadicIndex& idx) { return y.at(idx); });
    return detail::outer_lq(levels, q);
}

inline double space_norm(const Sequence& seq, const SpaceParams& P, double quad_tol = 1e-8) {
    return P.scale == Scale::F ? f_norm(seq, P, quad_tol) : b_norm(seq, P, quad_tol);
}

/// M-cutoff: zero out levels > M and positions with sup-coordinate > M.
inline Sequence cutoff(const Sequence& seq, long long M) {
    if (M < 0) throw std::invalid_argument("cutoff: M must be >= 0");
    Sequence out(seq.window);
    for (const auto& [idx, value] : seq.entries) {
        if (idx.level > M) continue;
        bool keep = true;
        for (long long k : idx.pos)
            if (std::llabs(k) > M) keep = false;
        if (keep) out.entries[idx] = value;
    }
    return out;
}

/// Norms of the cutoff tails ||seq - seq^{(M)}||, one per M. A profile decaying
/// to zero evidences membership in the closure of the finite sequences at
/// window scale; a plateau evidences non-membership.
inline std::vector<double> ring_convergence_profile(const Sequence& seq, const SpaceParams& P,
                                                    const std::vector<long long>& m_list,
                                                    double quad_tol = 1e-8) {
    std::vector<double> out;
    out.reserve(m_list.size());
    for (long long m : m_list) out.push_back(space_norm(seq - cutoff(seq, m), P, quad_tol));
    return out;
}

/// Sequence-level lift: entry at level j is multiplied by 2^{j sigma}; an
/// isometry from (s, p, q, w) onto (s - sigma, p, q, w) on both scales.
inline Sequence lift_seq(const Sequence& seq, double sigma) {
    Sequence out(seq.window);
    for (const auto& [idx, value] : seq.entries)
        out.entries[idx] = value * pow2(static_cast<double>(idx.level) * sigma);
    return out;
}

}  // namespace calprod
