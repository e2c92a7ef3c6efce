#pragma once

// Calderon-product machinery: the Hoelder direction with constant 1, exact
// L_p factorization, the F-scale factorization driven by level sets and the
// majority partition, the exact B-scale factorization, and a brute-force
// minimizer of the Calderon-product quasi-norm on tiny supports.
//
// Discretization convention: wherever a construction uses the pointwise ratio
// of the interpolated weight to a factor weight, the ratio is taken between
// cell-averaged densities at the finest level, and the interpolated weight
// enters all norms through the per-cell mass products
//     w(Q) := w0(Q)^{(1-Theta)p/p0} * w1(Q)^{Theta p/p1}.
// With this convention the level sets are unions of finest cells, every
// measure comparison is an exact integer test, and the Hoelder direction and
// the exact factorizations hold up to floating-point rounding alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "calprod/maximal.hpp"
#include "calprod/sequence.hpp"
#include "calprod/spaces.hpp"
#include "calprod/weight.hpp"

namespace calprod {

// ---------------------------------------------------------------------------
// Level sets and the majority partition
// ---------------------------------------------------------------------------

/// Super-level sets A_l = { g > 2^l } of the weighted stack function, stored
/// through log2(g) per finest cell, together with the partition class of each
/// in-window cube: a cube belongs to class l iff A_l covers more than half of
/// it and A_{l+1} does not. The classes are pairwise disjoint by construction
/// and every cube meeting the support lands in exactly one class.
struct LevelSets {
    long long ell_min = 0;
    long long ell_max = -1;  // empty range when ell_min > ell_max
    std::vector<double> log2_g;                  // per finest ordinal; -inf off the support
    std::map<DyadicIndex, long long> cube_class;  // C_l membership
    std::vector<DyadicIndex> unassigned_support;  // support indices in no class
    Window window;

    bool empty() const { return ell_min > ell_max; }

    /// Largest l with 2^l < g, or LLONG_MIN where g = 0.
    long long threshold_level(long long ordinal) const {
        const double lg = log2_g[static_cast<size_t>(ordinal)];
        if (!(lg > -std::numeric_limits<double>::infinity())) return std::numeric_limits<long long>::min();
        const double fl = std::floor(lg);
        return fl == lg ? static_cast<long long>(fl) - 1 : static_cast<long long>(fl);
    }

    /// Finest ordinals in A_l.
    std::vector<long long> a_set(long long ell) const {
        std::vector<long long> out;
        for (long long ord = 0; ord < static_cast<long long>(log2_g.size()); ++ord)
            if (threshold_level(ord) >= ell) out.push_back(ord);
        return out;
    }

    std::vector<DyadicIndex> c_set(long long ell) const {
        std::vector<DyadicIndex> out;
        for (const auto& [idx, l] : cube_class)
            if (l == ell) out.push_back(idx);
        return out;
    }
};

/// Build the level sets of g = stack * (w(Q)/w0(Q))^{ratio_exponent} from a
/// sequence, the target space (supplying s, q and the interpolated weight)
/// and the factor weight w0. Exact majority tests via finest-cell counts.
inline LevelSets build_level_sets(const Sequence& seq, const SpaceParams& target, const Weight& w0,
                                  double ratio_exponent, double quad_tol = 1e-8) {
    const Window& win = seq.window;
    LevelSets ls;
    ls.window = win;

    const std::vector<double> stack = detail::stack_values(seq, target.s, target.q);
    std::vector<double> ratio_log(stack.size(), 0.0);
    if (ratio_exponent != 0.0) {
        const std::vector<double> mw = finest_masses(target.weight, win, quad_tol);
        const std::vector<double> mw0 = finest_masses(w0, win, quad_tol);
        for (size_t i = 0; i < stack.size(); ++i) ratio_log[i] = std::log2(mw[i]) - std::log2(mw0[i]);
    }

    ls.log2_g.assign(stack.size(), -std::numeric_limits<double>::infinity());
    double lg_min = std::numeric_limits<double>::infinity();
    double lg_max = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < stack.size(); ++i) {
        if (stack[i] == 0.0) continue;
        const double lg = std::log2(stack[i]) + ratio_exponent * ratio_log[i];
        if (std::fabs(lg) > 1e15) throw std::domain_error("build_level_sets: level-set exponent overflow");
        ls.log2_g[i] = lg;
        lg_min = std::min(lg_min, lg);
        lg_max = std::max(lg_max, lg);
    }
    if (!(lg_min <= lg_max)) return ls;  // all-zero input: empty level sets
    ls.ell_min = static_cast<long long>(std::floor(lg_min)) - 1;
    ls.ell_max = static_cast<long long>(std::ceil(lg_max));

    // Class of a cube with n descendants: the (floor(n/2)+1)-th largest
    // threshold level among them. This is the unique l with
    // |Q cap A_l| > |Q|/2 >= |Q cap A_{l+1}| since the counts are monotone.
    std::vector<long long> block, levels;
    for (const DyadicIndex& idx : win.all_indices()) {
        finest_ordinal_block(idx, win, block);
        levels.clear();
        for (long long ord : block) levels.push_back(ls.threshold_level(ord));
        const size_t k = levels.size() / 2;  // index of the (n/2+1)-th largest
        std::nth_element(levels.begin(), levels.begin() + static_cast<std::ptrdiff_t>(k), levels.end(),
                         std::greater<long long>());
        const long long cls = levels[k];
        if (cls != std::numeric_limits<long long>::min()) ls.cube_class[idx] = cls;
    }
    for (const auto& [idx, value] : seq.entries)
        if (std::abs(value) != 0.0 && ls.cube_class.find(idx) == ls.cube_class.end())
            ls.unassigned_support.push_back(idx);
    return ls;
}

// ---------------------------------------------------------------------------
// Factorization record
// ---------------------------------------------------------------------------

struct FactorizationMetrics {
    double recon_max_rel_err = 0.0;
    double norm0 = 0.0;
    double norm1 = 0.0;
    double norm_target = 0.0;
    double achieved_constant = 0.0;  // (norm0^{1-Theta} norm1^{Theta}) / norm_target
    long long unassigned_support = 0;
};

/// A pair of sequences factoring the source through the Calderon product,
/// with the parameters of both factor spaces and of the target space. The
/// B-scale construction records its y-tables; when present they define the
/// norms (the SpaceParams weights are ignored on that path).
struct Factorization {
    double theta = 0.5;
    Sequence source;
    Sequence part0, part1;
    SpaceParams space0, space1, target;
    std::optional<YTable> y0, y1, y_target;
    FactorizationMetrics metrics;
};

inline double reconstruction_error(const Sequence& source, const Sequence& part0, const Sequence& part1,
                                   double theta) {
    double worst = 0.0;
    for (const auto& [idx, value] : source.entries) {
        const double a = std::abs(value);
        if (a == 0.0) continue;
        const double rebuilt =
            std::pow(std::abs(part0.at(idx)), 1.0 - theta) * std::pow(std::abs(part1.at(idx)), theta);
        worst = std::max(worst, std::fabs(rebuilt - a) / a);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Hoelder direction (constant 1)
// ---------------------------------------------------------------------------

struct HolderCheck {
    Sequence product;
    double lhs = 0.0;  // || |part0|^{1-Theta} |part1|^{Theta} ||_target
    double rhs = 0.0;  // norm0^{1-Theta} * norm1^{Theta}
    bool ok = false;
};

inline Sequence pointwise_product(const Sequence& part0, const Sequence& part1, double theta) {
    Sequence out(part0.window);
    for (const auto& [idx, v0] : part0.entries) {
        const double a1 = std::abs(part1.at(idx));
        if (a1 == 0.0) continue;
        out.entries[idx] = std::pow(std::abs(v0), 1.0 - theta) * std::pow(a1, theta);
    }
    return out;
}

/// Checks || |λ0|^{1-Θ} |λ1|^Θ ||_P <= ||λ0||_{P0}^{1-Θ} ||λ1||_{P1}^Θ (1+tol).
/// The caller supplies the target space; its parameters must match the
/// interpolation of (P0, P1).
inline HolderCheck holder_product_bound(const Sequence& part0, const Sequence& part1, double theta,
                                        const SpaceParams& P0, const SpaceParams& P1, const SpaceParams& P,
                                        double assert_tol = 1e-10, double quad_tol = 1e-8) {
    const InterpolatedExponents ie = interpolate_params(P0, P1, theta);
    auto matches = [](double a, double b) {
        if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
        return std::fabs(a - b) <= 1e-9 * (1.0 + std::fabs(a) + std::fabs(b));
    };
    if (!matches(P.s, ie.s) || !matches(P.p, ie.p) || !matches(P.q, ie.q) || P.scale != P0.scale ||
        P0.scale != P1.scale)
        throw std::invalid_argument("holder_product_bound: target parameters do not interpolate the sources");

    HolderCheck hc;
    hc.product = pointwise_product(part0, part1, theta);
    hc.lhs = space_norm(hc.product, P, quad_tol);
    hc.rhs = std::pow(space_norm(part0, P0, quad_tol), 1.0 - theta) *
             std::pow(space_norm(part1, P1, quad_tol), theta);
    hc.ok = hc.lhs <= hc.rhs * (1.0 + assert_tol);
    return hc;
}

/// Same check on the B scale with y-tables; the target table is the pointwise
/// product y0^{(1-Theta)p/p0} y1^{Theta p/p1}.
inline HolderCheck holder_product_bound_y(const Sequence& part0, const Sequence& part1, double theta,
                                          double s0, double p0, double q0, const YTable& y0, double s1,
                                          double p1, double q1, const YTable& y1, double assert_tol = 1e-10) {
    const double p = interpolate_exponent(p0, p1, theta);
    const double q = interpolate_exponent(q0, q1, theta);
    const double s = (1.0 - theta) * s0 + theta * s1;
    const double e0 = std::isinf(p0) ? 0.0 : (1.0 - theta) * p / p0;
    const double e1 = std::isinf(p1) ? 0.0 : theta * p / p1;

    HolderCheck hc;
    hc.product = pointwise_product(part0, part1, theta);
    YTable y;
    y.window = part0.window;
    for (const auto& [idx, value] : hc.product.entries) {
        (void)value;
        y.set(idx, std::pow(y0.at(idx), e0) * std::pow(y1.at(idx), e1));
    }
    hc.lhs = b_norm_y(hc.product, s, p, q, y);
    hc.rhs = std::pow(b_norm_y(part0, s0, p0, q0, y0), 1.0 - theta) *
             std::pow(b_norm_y(part1, s1, p1, q1, y1), theta);
    hc.ok = hc.lhs <= hc.rhs * (1.0 + assert_tol);
    return hc;
}

// ---------------------------------------------------------------------------
// Exact L_p factorization
// ---------------------------------------------------------------------------

struct LpFactorization {
    CellFunction part0, part1;
    double norm0 = 0.0, norm1 = 0.0, norm_target = 0.0;
    double recon_max_rel_err = 0.0;
};

/// Splits a nonnegative finest-cell function as f = f0^{1-Theta} f1^{Theta}
/// with coincidence of the quasi-norms:
///   f0 = f^{p/p0} (w/w0)^{1/p0},  f1 = f^{p/p1} (w/w1)^{1/p1},
/// weight ratios taken between cell-averaged densities. When exactly one
/// exponent is infinite the corresponding factor is identically 1; when both
/// are infinite f0 = f1 = f and the norms are sups.
inline LpFactorization lp_factorize(const CellFunction& f, const Weight& w0, const Weight& w1, double theta,
                                    double p0, double p1, double quad_tol = 1e-8) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("lp_factorize: Theta must lie in (0,1)");
    const Window& win = f.window;
    const double p = interpolate_exponent(p0, p1, theta);
    const bool i0 = std::isinf(p0), i1 = std::isinf(p1);

    std::vector<double> m0, m1, mw;
    if (!i0 || !i1) {
        m0 = finest_masses(w0, win, quad_tol);
        m1 = finest_masses(w1, win, quad_tol);
        const double e0 = i0 ? 0.0 : (1.0 - theta) * p / p0;
        const double e1 = i1 ? 0.0 : theta * p / p1;
        mw.resize(m0.size());
        for (size_t i = 0; i < m0.size(); ++i) {
            if (!(m0[i] > 0.0) || !(m1[i] > 0.0)) throw std::invalid_argument("lp_factorize: zero-mass cell");
            mw[i] = std::pow(m0[i], e0) * std::pow(m1[i], e1);
        }
    }

    LpFactorization out;
    out.part0 = f;
    out.part1 = f;
    if (i0 && i1) {
        out.norm0 = out.norm1 = out.norm_target = lp_norm(f, kInf, {});
        return out;
    }
    for (size_t i = 0; i < f.values.size(); ++i) {
        const double v = f.values[i];
        out.part0.values[i] = i0 ? 1.0 : std::pow(v, p / p0) * std::pow(mw[i] / m0[i], 1.0 / p0);
        out.part1.values[i] = i1 ? 1.0 : std::pow(v, p / p1) * std::pow(mw[i] / m1[i], 1.0 / p1);
        if (v > 0.0) {
            const double rebuilt =
                std::pow(out.part0.values[i], 1.0 - theta) * std::pow(out.part1.values[i], theta);
            out.recon_max_rel_err = std::max(out.recon_max_rel_err, std::fabs(rebuilt - v) / v);
        }
    }
    out.norm0 = lp_norm(out.part0, p0, m0);
    out.norm1 = lp_norm(out.part1, p1, m1);
    out.norm_target = lp_norm(f, p, mw);
    return out;
}

// ---------------------------------------------------------------------------
// F-scale factorization
// ---------------------------------------------------------------------------

/// The constants of the F-scale construction in its canonical orientation
/// (no role swap applied). branch: 0 both q finite, 1 for q0 = inf > q1,
/// 2 for q0 = q1 = inf. mod_exp0/1 are the exponents applied to the source
/// modulus in part0/part1 (0 means the factor is a masked pure power of 2).
struct FBranchExponents {
    double p = 0.0, q = 0.0, s = 0.0;
    double gamma = 0.0, delta = 0.0, u = 0.0, v = 0.0;
    double mod_exp0 = 0.0, mod_exp1 = 0.0;
    int branch = 0;
};

inline FBranchExponents f_branch_exponents(double s0, double p0, double q0, double s1, double p1, double q1,
                                           double theta) {
    FBranchExponents e;
    e.p = interpolate_exponent(p0, p1, theta);
    e.q = interpolate_exponent(q0, q1, theta);
    e.s = (1.0 - theta) * s0 + theta * s1;
    const bool j0 = std::isinf(q0), j1 = std::isinf(q1);
    if (!j0 && !j1) {
        e.branch = 0;
        e.gamma = e.p / p0 - e.q / q0;
        e.delta = e.p / p1 - e.q / q1;
        e.u = e.q * theta * (s1 / q0 - s0 / q1);
        e.v = e.q * (1.0 - theta) * (s0 / q1 - s1 / q0);
        e.mod_exp0 = e.q / q0;
        e.mod_exp1 = e.q / q1;
    } else if (j0 && !j1) {
        e.branch = 1;
        e.gamma = e.p / p0;
        e.delta = e.p / p1 - e.q / q1;
        e.u = -e.q * theta * s0 / q1;
        e.v = e.q * (1.0 - theta) * s0 / q1;
        e.mod_exp0 = 0.0;
        e.mod_exp1 = e.q / q1;
    } else if (j0 && j1) {
        e.branch = 2;
        e.gamma = e.p / p0 - 1.0;
        e.delta = e.p / p1 - 1.0;
        e.u = theta * (s1 - s0);
        e.v = (1.0 - theta) * (s0 - s1);
        e.mod_exp0 = 1.0;
        e.mod_exp1 = 1.0;
    } else {
        throw std::invalid_argument("f_branch_exponents: q0 finite with q1 = inf needs the role swap");
    }
    return e;
}

namespace detail {

inline Factorization f_factorize_oriented(const Sequence& seq, const SpaceParams& P0, const SpaceParams& P1,
                                          double theta, double quad_tol) {
    const Window& win = seq.window;
    const FBranchExponents e = f_branch_exponents(P0.s, P0.p, P0.q, P1.s, P1.p, P1.q, theta);
    const double tiny = 1e-14 * (std::fabs(e.p / P0.p) + (std::isinf(P0.q) ? 1.0 : std::fabs(e.q / P0.q)));
    if (e.gamma < -tiny) throw std::logic_error("f_factorize_oriented: expects gamma >= 0 after orientation");

    // Target space carries the per-cell mass products as a cell-measure weight.
    const std::vector<double> m0 = finest_masses(P0.weight, win, quad_tol);
    const std::vector<double> m1 = finest_masses(P1.weight, win, quad_tol);
    const double e0 = (1.0 - theta) * e.p / P0.p;
    const double e1 = theta * e.p / P1.p;
    std::vector<double> mw(m0.size());
    for (size_t i = 0; i < m0.size(); ++i) mw[i] = std::pow(m0[i], e0) * std::pow(m1[i], e1);

    Factorization F;
    F.theta = theta;
    F.source = seq.abs();
    F.space0 = P0;
    F.space1 = P1;
    F.target = SpaceParams{e.s, e.p, e.q, Scale::F, Weight::cell_measure(win, mw)};
    F.part0 = Sequence(win);
    F.part1 = Sequence(win);

    // gamma = delta = 0 (iff p0/q0 = p1/q1 off the sup branches, iff p0 = p1
    // on the double-sup branch) makes the level exponent singular, but
    // 2^{l gamma} = 1, so the pointwise l-free formulas apply whenever both
    // factor weights carry the same cell masses.
    const bool degenerate = std::fabs(e.gamma) <= tiny;
    LevelSets ls;
    if (degenerate) {
        for (size_t i = 0; i < m0.size(); ++i)
            if (std::fabs(m0[i] - m1[i]) > 1e-12 * std::max(m0[i], m1[i]))
                throw std::domain_error(
                    "f_factorize: degenerate-singular (vanishing level exponent with distinct weights); "
                    "use oracle_calderon_norm");
    } else {
        ls = build_level_sets(F.source, F.target, P0.weight, 1.0 / (P0.p * e.gamma), quad_tol);
        F.metrics.unassigned_support = static_cast<long long>(ls.unassigned_support.size());
    }

    for (const auto& [idx, value] : seq.entries) {
        const double a = std::abs(value);
        if (a == 0.0) continue;
        double ell_gamma = 0.0, ell_delta = 0.0;
        if (!degenerate) {
            auto it = ls.cube_class.find(idx);
            if (it == ls.cube_class.end()) continue;  // reported via unassigned_support
            ell_gamma = static_cast<double>(it->second) * e.gamma;
            ell_delta = static_cast<double>(it->second) * e.delta;
        }
        const double j = static_cast<double>(idx.level);
        const double v0 = pow2(ell_gamma + j * e.u) * (e.mod_exp0 == 0.0 ? 1.0 : std::pow(a, e.mod_exp0));
        const double v1 = pow2(ell_delta + j * e.v) * (e.mod_exp1 == 0.0 ? 1.0 : std::pow(a, e.mod_exp1));
        F.part0.entries[idx] = v0;
        F.part1.entries[idx] = v1;
    }

    F.metrics.recon_max_rel_err = reconstruction_error(F.source, F.part0, F.part1, theta);
    F.metrics.norm0 = f_norm(F.part0, P0, quad_tol);
    F.metrics.norm1 = f_norm(F.part1, P1, quad_tol);
    F.metrics.norm_target = f_norm(F.source, F.target, quad_tol);
    F.metrics.achieved_constant = std::pow(F.metrics.norm0, 1.0 - theta) *
                                  std::pow(F.metrics.norm1, theta) / F.metrics.norm_target;
    return F;
}

}  // namespace detail

/// F-scale factorization of the Calderon product. Requires p0, p1 < inf and
/// Theta in (0,1). When the canonical orientation fails (gamma < 0, or only
/// q1 infinite, or p0 > p1 in the double-sup branch) the roles of the two
/// spaces are swapped via Theta -> 1 - Theta and the outputs relabeled.
inline Factorization f_factorize(const Sequence& seq, const SpaceParams& P0, const SpaceParams& P1,
                                 double theta, double quad_tol = 1e-8) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("f_factorize: Theta must lie in (0,1)");
    P0.validate();
    P1.validate();
    if (P0.scale != Scale::F || P1.scale != Scale::F)
        throw std::invalid_argument("f_factorize: both spaces must be on the F scale");

    const double p = interpolate_exponent(P0.p, P1.p, theta);
    const double q = interpolate_exponent(P0.q, P1.q, theta);
    const bool j0 = std::isinf(P0.q), j1 = std::isinf(P1.q);
    bool swap = false;
    if (!j0 && !j1)
        swap = p / P0.p - q / P0.q < -1e-14 * (p / P0.p + q / P0.q);
    else if (!j0 && j1)
        swap = true;
    else if (j0 && j1)
        swap = P0.p > P1.p;

    if (!swap) return detail::f_factorize_oriented(seq, P0, P1, theta, quad_tol);
    Factorization F = detail::f_factorize_oriented(seq, P1, P0, 1.0 - theta, quad_tol);
    std::swap(F.part0, F.part1);
    std::swap(F.space0, F.space1);
    std::swap(F.metrics.norm0, F.metrics.norm1);
    F.theta = theta;
    return F;
}

// ---------------------------------------------------------------------------
// Exact B-scale factorization
// ---------------------------------------------------------------------------

namespace detail {

/// a/b with the sup-limit conventions: 1 when both are infinite, 0 when only
/// the denominator is.
inline double exponent_ratio(double a, double b) {
    if (std::isinf(b)) return std::isinf(a) ? 1.0 : 0.0;
    return a / b;
}

}  // namespace detail

/// Exact factorization on the B scale with y-tables: with
/// y = y0^{(1-Theta)p/p0} y1^{Theta p/p1} and the level norms
/// m_j = (sum_k 2^{jsp} |lambda|^p y_{j,k})^{1/p} (sups at infinite
/// exponents), the parts are
///   part0 = 2^{-j s0} (2^{js}|lambda|)^{p/p0} (y/y0)^{1/p0} m_j^{q/q0-p/p0}
/// and symmetrically part1. The construction attains the infimum: the norm
/// product equals the target norm exactly.
inline Factorization b_factorize(const Sequence& seq, double s0, double p0, double q0, double s1, double p1,
                                 double q1, double theta, const YTable& y0, const YTable& y1) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("b_factorize: Theta must lie in (0,1)");
    const Window& win = seq.window;
    const double p = interpolate_exponent(p0, p1, theta);
    const double q = interpolate_exponent(q0, q1, theta);
    const double s = (1.0 - theta) * s0 + theta * s1;
    const double ey0 = std::isinf(p0) ? 0.0 : (1.0 - theta) * p / p0;
    const double ey1 = std::isinf(p1) ? 0.0 : theta * p / p1;

    Factorization F;
    F.theta = theta;
    F.source = seq.abs();
    F.part0 = Sequence(win);
    F.part1 = Sequence(win);
    F.space0 = SpaceParams{s0, p0, q0, Scale::B, Weight::constant(1.0)};
    F.space1 = SpaceParams{s1, p1, q1, Scale::B, Weight::constant(1.0)};
    F.target = SpaceParams{s, p, q, Scale::B, Weight::constant(1.0)};
    F.y0 = y0;
    F.y1 = y1;

    YTable y;
    y.window = win;
    for (const auto& [idx, value] : F.source.entries) {
        (void)value;
        y.set(idx, std::pow(y0.at(idx), ey0) * std::pow(y1.at(idx), ey1));
    }
    F.y_target = y;

    const auto level = detail::level_norms(F.source, s, p, [&](const DyadicIndex& idx) { return y.at(idx); });

    const double cp0 = detail::exponent_ratio(p, p0), cq0 = detail::exponent_ratio(q, q0);
    const double cp1 = detail::exponent_ratio(p, p1), cq1 = detail::exponent_ratio(q, q1);
    for (const auto& [idx, value] : F.source.entries) {
        const double a = std::abs(value);
        if (a == 0.0) continue;
        const double m = level[static_cast<size_t>(idx.level)];
        const double j = static_cast<double>(idx.level);
        const double base = pow2(j * s) * a;
        const double r0 = std::isinf(p0) ? 1.0 : std::pow(y.at(idx) / y0.at(idx), 1.0 / p0);
        const double r1 = std::isinf(p1) ? 1.0 : std::pow(y.at(idx) / y1.at(idx), 1.0 / p1);
        F.part0.entries[idx] = pow2(-j * s0) * std::pow(base, cp0) * r0 * std::pow(m, cq0 - cp0);
        F.part1.entries[idx] = pow2(-j * s1) * std::pow(base, cp1) * r1 * std::pow(m, cq1 - cp1);
    }

    F.metrics.recon_max_rel_err = reconstruction_error(F.source, F.part0, F.part1, theta);
    F.metrics.norm0 = b_norm_y(F.part0, s0, p0, q0, y0);
    F.metrics.norm1 = b_norm_y(F.part1, s1, p1, q1, y1);
    F.metrics.norm_target = b_norm_y(F.source, s, p, q, y);
    F.metrics.achieved_constant = std::pow(F.metrics.norm0, 1.0 - theta) *
                                  std::pow(F.metrics.norm1, theta) / F.metrics.norm_target;
    return F;
}

// ---------------------------------------------------------------------------
// Brute-force oracle for the Calderon-product quasi-norm
// ---------------------------------------------------------------------------

struct OracleResult {
    double value = 0.0;
    std::vector<DyadicIndex> support;
    std::vector<double> ratios;  // argmin per support index
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// (1/q) log sum_i exp(q x_i), the log-domain l_q norm of (e^{x_i});
/// max-stabilized so arbitrarily large q stays finite.
inline double log_lq(const std::vector<double>& xs, double q) {
    double top = kNegInf;
    for (double x : xs) top = std::max(top, x);
    if (top == kNegInf) return kNegInf;
    if (std::isinf(q)) return top;
    double sum = 0.0;
    for (double x : xs)
        if (x != kNegInf) sum += std::exp(q * (x - top));
    return top + std::log(sum) / q;
}

/// Cached log-domain norm evaluator for repeatedly re-norming sequences
/// supported on a fixed index set with varying magnitudes. Infinite inner or
/// outer exponents can be smoothed to a finite q (the weight-dropping
/// convention of the sup norms is preserved: smoothed sups stay unweighted),
/// which turns the objective into a smooth one for homotopy minimization.
class SparseNormEvaluator {
public:
    SparseNormEvaluator(const std::vector<DyadicIndex>& support, const SpaceParams& P, const Window& win,
                        double quad_tol)
        : P_(P) {
        P_.validate();
        if (P.scale == Scale::F) {
            const auto masses = finest_masses(P.weight, win, quad_tol);
            blocks_.resize(support.size());
            std::map<long long, size_t> remap;
            for (size_t i = 0; i < support.size(); ++i) {
                std::vector<long long> block;
                finest_ordinal_block(support[i], win, block);
                for (long long ord : block) {
                    auto [it, fresh] = remap.emplace(ord, remap.size());
                    if (fresh) log_mass_.push_back(std::log(masses[static_cast<size_t>(ord)]));
                    blocks_[i].push_back(static_cast<long long>(it->second));
                }
            }
            n_cells_ = remap.size();
        } else if (!std::isinf(P.p)) {
            const auto table = all_cell_masses(P.weight, win, quad_tol);
            for (const auto& idx : support) log_mass_.push_back(std::log(table.at(idx)));
        }
        levels_.reserve(support.size());
        for (const auto& idx : support) levels_.push_back(static_cast<double>(idx.level));
        max_level_ = win.max_level;
    }

    /// log of the norm; smooth_q replaces infinite exponents when finite.
    double log_norm(const std::vector<double>& log_mag, double smooth_q = kInf) const {
        const double p_eff = std::isinf(P_.p) ? smooth_q : P_.p;
        const double q_eff = std::isinf(P_.q) ? smooth_q : P_.q;
        return P_.scale == Scale::F ? f_eval(log_mag, q_eff) : b_eval(log_mag, p_eff, q_eff);
    }

private:
    static constexpr double kLog2 = 0.6931471805599453;

    double f_eval(const std::vector<double>& la, double q_eff) const {
        // per-cell stacks in log domain, then the L_p(w) sum
        std::vector<double> top(n_cells_, kNegInf), sum(n_cells_, 0.0);
        const bool finite_q = !std::isinf(q_eff);
        for (size_t pass = 0; pass < (finite_q ? 2u : 1u); ++pass) {
            for (size_t i = 0; i < la.size(); ++i) {
                if (la[i] == kNegInf) continue;
                const double term = levels_[i] * P_.s * kLog2 + la[i];
                for (long long cell : blocks_[i]) {
                    auto c = static_cast<size_t>(cell);
                    if (pass == 0)
                        top[c] = std::max(top[c], term);
                    else
                        sum[c] += std::exp(q_eff * (term - top[c]));
                }
            }
        }
        std::vector<double> cell_terms;
        cell_terms.reserve(n_cells_);
        for (size_t c = 0; c < n_cells_; ++c) {
            if (top[c] == kNegInf) continue;
            const double log_stack = finite_q ? top[c] + std::log(sum[c]) / q_eff : top[c];
            cell_terms.push_back(log_stack + log_mass_[c] / P_.p);
        }
        return log_lq(cell_terms, P_.p);
    }

    double b_eval(const std::vector<double>& la, double p_eff, double q_eff) const {
        const bool weighted = !std::isinf(P_.p);  // sup convention drops masses
        std::vector<std::vector<double>> per_level(static_cast<size_t>(max_level_ + 1));
        for (size_t i = 0; i < la.size(); ++i) {
            if (la[i] == kNegInf) continue;
            double term = levels_[i] * P_.s * kLog2 + la[i];
            if (weighted) term += log_mass_[i] / P_.p;
            per_level[static_cast<size_t>(levels_[i])].push_back(term);
        }
        std::vector<double> level_norms;
        for (const auto& terms : per_level) {
            if (terms.empty()) continue;
            level_norms.push_back(log_lq(terms, p_eff));
        }
        return log_lq(level_norms, q_eff);
    }

    SpaceParams P_;
    std::vector<std::vector<long long>> blocks_;
    std::vector<double> log_mass_;
    std::vector<double> levels_;
    size_t n_cells_ = 0;
    int max_level_ = 0;
};

inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double xtol) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Numerical Calderon-product quasi-norm on a tiny support: parameterize
///   part0 = |lambda| r^{Theta},  part1 = |lambda| r^{-(1-Theta)}
/// with one positive ratio per support index (every exact-reconstruction pair
/// arises this way), and minimize norm0^{1-Theta} norm1^{Theta} by multi-start
/// cyclic coordinate descent with golden-section line searches on log r.
/// The value always dominates the target norm (Hoelder lower bound).
inline OracleResult oracle_calderon_norm(const Sequence& seq, const SpaceParams& P0, const SpaceParams& P1,
                                         double theta, double tol = 1e-6, size_t support_cap = 8,
                                         int starts = 8, std::uint64_t seed = 0x5EEDCA1DE401ULL,
                                         double quad_tol = 1e-8) {
    OracleResult res;
    std::vector<double> magnitudes;
    for (const auto& [idx, value] : seq.entries) {
        const double a = std::abs(value);
        if (a == 0.0) continue;
        res.support.push_back(idx);
        magnitudes.push_back(a);
    }
    const size_t n = res.support.size();
    if (n > support_cap) throw std::invalid_argument("oracle_calderon_norm: support exceeds the cap");
    if (n == 0) return res;

    const detail::SparseNormEvaluator norm0(res.support, P0, seq.window, quad_tol);
    const detail::SparseNormEvaluator norm1(res.support, P1, seq.window, quad_tol);

    std::vector<double> log_mag(n), la0(n), la1(n);
    for (size_t i = 0; i < n; ++i) log_mag[i] = std::log(magnitudes[i]);
    auto objective = [&](const std::vector<double>& t, double smooth_q) {
        for (size_t i = 0; i < n; ++i) {
            la0[i] = log_mag[i] + t[i] * theta;
            la1[i] = log_mag[i] - t[i] * (1.0 - theta);
        }
        return (1.0 - theta) * norm0.log_norm(la0, smooth_q) + theta * norm1.log_norm(la1, smooth_q);
    };

    // Sup-shaped norms leave the objective nonsmooth with descent cones the
    // direction set can miss, so those are minimized through a smoothing
    // homotopy l_inf <- l_Q. Since l_Q dominates l_inf, the exact objective
    // at the l_Q optimum is within (log #terms)/Q of the true infimum.
    std::vector<double> smoothing_stages;
    if (std::isinf(P0.p) || std::isinf(P0.q) || std::isinf(P1.p) || std::isinf(P1.q))
        for (double q_s = 8.0; q_s <= 9.0e6; q_s *= 8.0) smoothing_stages.push_back(q_s);
    smoothing_stages.push_back(kInf);

    // Axis sweeps stall on the sup branches where terms tie: per-cell stack
    // sups tie two entries (pairwise directions resolve those) and per-level
    // sups tie whole levels (level-block directions resolve those), so the
    // cycle visits all three families.
    std::vector<std::vector<double>> directions;
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> d(n, 0.0);
        d[i] = 1.0;
        directions.push_back(d);
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (double sign : {1.0, -1.0}) {
                std::vector<double> d(n, 0.0);
                d[i] = 1.0;
                d[j] = sign;
                directions.push_back(d);
            }
    {
        std::vector<int> levels;
        for (const DyadicIndex& idx : res.support)
            if (std::find(levels.begin(), levels.end(), idx.level) == levels.end())
                levels.push_back(idx.level);
        auto block = [&](int level) {
            std::vector<double> d(n, 0.0);
            for (size_t i = 0; i < n; ++i)
                if (res.support[i].level == level) d[i] = 1.0;
            return d;
        };
        for (size_t a = 0; a < levels.size(); ++a)
            for (size_t b = a + 1; b < levels.size(); ++b) {
                std::vector<double> d = block(levels[a]);
                const std::vector<double> other = block(levels[b]);
                for (size_t i = 0; i < n; ++i) d[i] -= other[i];
                directions.push_back(d);
            }
    }
    // The objective is invariant under a common shift of all log-ratios
    // (uniform rescaling of r). Project that flat direction out of every
    // search direction; otherwise line searches drift along the valley.
    auto gauge_fix = [&](std::vector<double>& d) {
        double mean = 0.0;
        for (double x : d) mean += x;
        mean /= static_cast<double>(n);
        double norm = 0.0;
        for (double& x : d) {
            x -= mean;
            norm += x * x;
        }
        return norm > 1e-24;
    };
    {
        std::vector<std::vector<double>> kept;
        for (std::vector<double>& d : directions)
            if (gauge_fix(d)) kept.push_back(std::move(d));
        directions = std::move(kept);
    }

    double best_g = std::numeric_limits<double>::infinity();
    std::vector<double> best_t(n, 0.0);
    const double stage_tol = std::max(tol * 0.1, 1e-13);
    for (int start = 0; start < starts; ++start) {
        std::uint64_t state = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(start + 1);
        std::vector<double> t(n);
        for (size_t i = 0; i < n; ++i) t[i] = start == 0 ? 0.0 : -4.0 + 8.0 * detail::uniform01(state);
        for (double smooth_q : smoothing_stages) {
            double g = objective(t, smooth_q);
            for (int sweep = 0; sweep < 400; ++sweep) {
                const double g_before = g;
                const std::vector<double> t_before = t;
                for (const std::vector<double>& dir : directions) {
                    std::function<double(double)> line = [&](double x) {
                        std::vector<double> tt = t;
                        for (size_t i = 0; i < n; ++i) tt[i] += x * dir[i];
                        return objective(tt, smooth_q);
                    };
                    const double step = detail::golden_min(line, -60.0, 60.0, 1e-10);
                    for (size_t i = 0; i < n; ++i) t[i] += step * dir[i];
                }
                // pattern move: accelerate along the sweep's net displacement
                std::vector<double> pattern(n);
                for (size_t i = 0; i < n; ++i) pattern[i] = t[i] - t_before[i];
                if (gauge_fix(pattern)) {
                    std::function<double(double)> line = [&](double x) {
                        std::vector<double> tt = t;
                        for (size_t i = 0; i < n; ++i) tt[i] += x * pattern[i];
                        return objective(tt, smooth_q);
                    };
                    const double step = detail::golden_min(line, -60.0, 60.0, 1e-10);
                    for (size_t i = 0; i < n; ++i) t[i] += step * pattern[i];
                }
                g = objective(t, smooth_q);
                if (g_before - g < stage_tol) break;
            }
        }
        const double g_exact = objective(t, kInf);
        if (g_exact < best_g) {
            best_g = g_exact;
            best_t = t;
        }
    }
    res.value = std::exp(best_g);
    res.ratios.resize(n);
    for (size_t i = 0; i < n; ++i) res.ratios[i] = std::exp(best_t[i]);
    return res;
}

// ---------------------------------------------------------------------------
// Verification and export
// ---------------------------------------------------------------------------

struct FactorizationReport {
    bool reconstruction_ok = false;
    bool holder_ok = false;
    double recon_max_rel_err = 0.0;
    double norm0 = 0.0, norm1 = 0.0, norm_target = 0.0;
    double achieved_constant = 0.0;
};

/// Recomputes every metric of a factorization from scratch.
inline FactorizationReport verify_factorization(const Factorization& F, double tol = 1e-9,
                                                double quad_tol = 1e-8) {
    FactorizationReport r;
    r.recon_max_rel_err = reconstruction_error(F.source, F.part0, F.part1, F.theta);
    r.reconstruction_ok = r.recon_max_rel_err <= tol;
    if (F.y0 && F.y1 && F.y_target) {
        r.norm0 = b_norm_y(F.part0, F.space0.s, F.space0.p, F.space0.q, *F.y0);
        r.norm1 = b_norm_y(F.part1, F.space1.s, F.space1.p, F.space1.q, *F.y1);
        r.norm_target = b_norm_y(F.source, F.target.s, F.target.p, F.target.q, *F.y_target);
    } else {
        r.norm0 = space_norm(F.part0, F.space0, quad_tol);
        r.norm1 = space_norm(F.part1, F.space1, quad_tol);
        r.norm_target = space_norm(F.source, F.target, quad_tol);
    }
    const double product = std::pow(r.norm0, 1.0 - F.theta) * std::pow(r.norm1, F.theta);
    r.achieved_constant = product / r.norm_target;
    r.holder_ok = r.norm_target <= product * (1.0 + tol);
    return r;
}

/// Structured text export; the metric field names are fixed.
inline void write_factorization(std::ostream& os, const Factorization& F) {
    os.precision(17);
    os << "theta " << F.theta << '\n';
    os << "p0 " << F.space0.p << '\n' << "q0 " << F.space0.q << '\n' << "s0 " << F.space0.s << '\n';
    os << "p1 " << F.space1.p << '\n' << "q1 " << F.space1.q << '\n' << "s1 " << F.space1.s << '\n';
    os << "norm0 " << F.metrics.norm0 << '\n';
    os << "norm1 " << F.metrics.norm1 << '\n';
    os << "norm_target " << F.metrics.norm_target << '\n';
    os << "achieved_constant " << F.metrics.achieved_constant << '\n';
    os << "recon_err " << F.metrics.recon_max_rel_err << '\n';
    os << "sequence0\n";
    write_sequence(os, F.part0);
    os << "end\n";
    os << "sequence1\n";
    write_sequence(os, F.part1);
    os << "end\n";
}

}  // namespace calprod
