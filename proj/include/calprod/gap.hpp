#pragma once

// Boundary phenomena: the gap sequence witnessing strictness of the
// interpolation inclusion for two non-separable spaces, and empirical
// embedding-chain constants.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "calprod/sequence.hpp"
#include "calprod/spaces.hpp"

namespace calprod {

/// Parameters of the gap construction. The witness regime requires
/// 1 <= p0 < p1 <= inf and s0 - d/p0 <= s1 - d/p1.
struct GapSpec {
    int d = 1;
    double s0 = 0.0, p0 = 1.0;
    double s1 = 0.0, p1 = 2.0;
    double theta = 0.5;

    void validate() const {
        if (!(p0 >= 1.0) || !(p1 > p0)) throw std::invalid_argument("GapSpec: need 1 <= p0 < p1 <= inf");
        if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("GapSpec: Theta must lie in (0,1)");
        const double lhs = s0 - static_cast<double>(d) / p0;
        const double rhs = s1 - (std::isinf(p1) ? 0.0 : static_cast<double>(d) / p1);
        if (lhs > rhs + 1e-12)
            throw std::invalid_argument("GapSpec: witness regime requires s0 - d/p0 <= s1 - d/p1");
    }
};

/// Cardinality of the level-j index set: ceil(2^{-j[(s1-s0)/(1/p1-1/p0) - d]}).
inline long long gap_cardinality(const GapSpec& spec, int level) {
    const double inv_diff = (std::isinf(spec.p1) ? 0.0 : 1.0 / spec.p1) - 1.0 / spec.p0;
    const double exponent =
        -static_cast<double>(level) * ((spec.s1 - spec.s0) / inv_diff - static_cast<double>(spec.d));
    if (exponent > 62.0) throw std::invalid_argument("gap_cardinality: index set exceeds desk scale");
    return static_cast<long long>(std::ceil(std::exp2(exponent)));
}

/// Entry value on the level-j index set: 2^{j (p1 s1 - p0 s0)/(p0 - p1)}.
inline double gap_value(const GapSpec& spec, int level) {
    double exponent;
    if (std::isinf(spec.p1))
        exponent = -spec.s1;  // limit of (p1 s1 - p0 s0)/(p0 - p1)
    else
        exponent = (spec.p1 * spec.s1 - spec.p0 * spec.s0) / (spec.p0 - spec.p1);
    return std::exp2(static_cast<double>(level) * exponent);
}

/// The witness sequence: at each level the first #K_j nonnegative positions in
/// lexicographic order carry the level value, everything else is zero. The
/// norms depend on the cardinalities only, so any other choice of positions
/// gives the same profile.
inline Sequence gap_sequence(const GapSpec& spec, const Window& window) {
    spec.validate();
    if (window.dim != spec.d) throw std::invalid_argument("gap_sequence: window dimension mismatch");
    Sequence seq(window);
    for (int j = 0; j <= window.max_level; ++j) {
        const long long count = gap_cardinality(spec, j);
        const long long side = window.half_extent << j;  // nonnegative positions per axis
        long long capacity = 1;
        for (int i = 0; i < spec.d; ++i) capacity *= side;
        if (count > capacity)
            throw std::invalid_argument("gap_sequence: window too small for the required cardinality");
        const double value = gap_value(spec, j);
        for (long long n = 0; n < count; ++n) {
            DyadicIndex idx;
            idx.level = j;
            idx.pos.assign(static_cast<size_t>(spec.d), 0);
            long long rem = n;
            for (int i = spec.d - 1; i >= 0; --i) {
                idx.pos[static_cast<size_t>(i)] = rem % side;
                rem /= side;
            }
            seq.entries[idx] = value;
        }
    }
    return seq;
}

struct ChainConstants {
    double c01 = 0.0;  // ||.||_{f^s_{p,1}} / ||.||_{f^{s0}_{p0,inf}}
    double c12 = 0.0;  // ||.||_{f^{s1}_{p1,inf}} / ||.||_{f^s_{p,1}}
};

/// Empirical constants of the chain f^{s0}_{p0,inf} -> f^{s}_{p,1} ->
/// f^{s1}_{p1,inf} (all with the same weight). Refuses parameter ranges where
/// the chain is false; returns nothing for the zero sequence.
inline std::optional<ChainConstants> embedding_chain_check(const Sequence& seq, double s0, double p0,
                                                           double s1, double p1, double theta,
                                                           const Weight& w, double quad_tol = 1e-8) {
    const int d = seq.window.dim;
    const bool same_p = p0 == p1 && s0 > s1;
    const bool increasing_p = p0 < p1 && s0 - d / p0 >= s1 - d / p1 - 1e-12;
    if (!same_p && !increasing_p)
        throw std::invalid_argument("embedding_chain_check: parameters violate the embedding conditions");
    if (std::isinf(p0) || std::isinf(p1))
        throw std::invalid_argument("embedding_chain_check: the F scale requires finite p");

    const double p = interpolate_exponent(p0, p1, theta);
    const double s = (1.0 - theta) * s0 + theta * s1;
    const SpaceParams mid{s, p, 1.0, Scale::F, w};
    const SpaceParams left{s0, p0, kInf, Scale::F, w};
    const SpaceParams right{s1, p1, kInf, Scale::F, w};

    const double n_left = f_norm(seq, left, quad_tol);
    if (n_left == 0.0) return std::nullopt;
    ChainConstants c;
    const double n_mid = f_norm(seq, mid, quad_tol);
    c.c01 = n_mid / n_left;
    c.c12 = f_norm(seq, right, quad_tol) / n_mid;
    return c;
}

struct GapReport {
    GapSpec spec;
    double interp_p = 0.0, interp_s = 0.0;
    double norm_target = 0.0;  // b^{s}_{p,inf}
    double norm0 = 0.0;        // b^{s0}_{p0,inf}
    double norm1 = 0.0;        // b^{s1}_{p1,inf}
    std::vector<long long> m_list;
    std::vector<double> profile;  // ||seq - cutoff_M(seq)||_{b^s_{p,inf}}
    bool norms_finite = false;
    bool non_convergent = false;  // profile stays >= 0.9 on the whole list
    bool gap_witnessed = false;
    std::vector<long long> cardinalities;
};

/// Assembles the witness: finite intersection norms plus a ring-convergence
/// profile pinned near 1 certify the strict inclusion; a decaying profile
/// (e.g. for a finite substitute sequence) reports no gap.
inline GapReport gap_report(const GapSpec& spec, const Window& window, const std::vector<long long>& m_list,
                            const Sequence* substitute = nullptr) {
    spec.validate();
    GapReport rep;
    rep.spec = spec;
    rep.m_list = m_list;
    const Sequence seq = substitute ? *substitute : gap_sequence(spec, window);
    for (int j = 0; j <= window.max_level; ++j) rep.cardinalities.push_back(gap_cardinality(spec, j));

    rep.interp_p = interpolate_exponent(spec.p0, spec.p1, spec.theta);
    rep.interp_s = (1.0 - spec.theta) * spec.s0 + spec.theta * spec.s1;
    const Weight one = Weight::constant(1.0);
    const SpaceParams target{rep.interp_s, rep.interp_p, kInf, Scale::B, one};
    const SpaceParams b0{spec.s0, spec.p0, kInf, Scale::B, one};
    const SpaceParams b1{spec.s1, spec.p1, kInf, Scale::B, one};

    rep.norm_target = b_norm(seq, target);
    rep.norm0 = b_norm(seq, b0);
    rep.norm1 = b_norm(seq, b1);
    rep.norms_finite = std::isfinite(rep.norm_target) && std::isfinite(rep.norm0) && std::isfinite(rep.norm1);

    rep.profile = ring_convergence_profile(seq, target, m_list);
    rep.non_convergent = !rep.profile.empty();
    for (double v : rep.profile)
        if (!(v >= 0.9)) rep.non_convergent = false;
    rep.gap_witnessed = rep.norms_finite && rep.non_convergent;
    return rep;
}

}  // namespace calprod
