#pragma once

// Weights and per-cell masses.
//
// A Weight is either an analytic formula (constant, power of |x| or |x_1|,
// exponential of |x|, or a finite product of powers of such) or a table of
// per-cell masses at the finest level of a window. Cell masses w(Q) are exact
// for cell tables and for the 1D closed forms (powers, exponentials); all
// other cases use adaptive dyadic bisection with Richardson stopping at a
// relative tolerance (default 1e-8).
//
// Muckenhoupt estimates sample the A_p expression over a deterministic set of
// balls. In dimension one a ball is the exact interval [c-r, c+r]; in higher
// dimensions we use the sup-norm ball (an axis-parallel cube), which changes
// the constant only by a dimensional factor. Estimates are maxima over the
// sample, hence lower bounds for the true constant. Divergence is reported
// when the expression is non-integrable on a sampled ball, exceeds a cap, or
// keeps growing by a factor >= 1.5 over the last three radius stages.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "calprod/dyadic.hpp"

namespace calprod {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when an integral is provably infinite (e.g. |x|^a with a <= -1 on an
/// interval touching the origin).
class DivergentIntegral : public std::runtime_error {
public:
    explicit DivergentIntegral(const std::string& what) : std::runtime_error(what) {}
};

/// Axis-parallel box with double endpoints (exact for dyadic data).
struct Box {
    std::vector<double> lo, hi;
    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const {
        double v = 1.0;
        for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
        return v;
    }
};

inline Box cube_box(const DyadicIndex& idx) {
    Box b;
    const double scale = std::ldexp(1.0, -idx.level);
    for (long long k : idx.pos) {
        b.lo.push_back(static_cast<double>(k) * scale);
        b.hi.push_back(static_cast<double>(k + 1) * scale);
    }
    return b;
}

class Weight {
public:
    enum class Kind { Constant, Power, PowerFirst, Exponential, PowerProduct, CellMeasure };

    Weight() : kind_(Kind::Constant), param_(1.0) {}

    static Weight constant(double c) {
        if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("constant weight must be positive finite");
        Weight w;
        w.kind_ = Kind::Constant;
        w.param_ = c;
        return w;
    }
    /// w(x) = |x|^alpha (Euclidean norm).
    static Weight power(double alpha) {
        Weight w;
        w.kind_ = Kind::Power;
        w.param_ = alpha;
        return w;
    }
    /// w(x) = |x_1|^alpha (first coordinate only).
    static Weight power_first(double alpha) {
        Weight w;
        w.kind_ = Kind::PowerFirst;
        w.param_ = alpha;
        return w;
    }
    /// w(x) = exp(a |x|).
    static Weight exponential(double a) {
        Weight w;
        w.kind_ = Kind::Exponential;
        w.param_ = a;
        return w;
    }
    /// The radial-trace weight |t|^{d-1} on the line, the 1D image of the
    /// d-dimensional volume element.
    static Weight radial_trace(int d) {
        if (d < 2) throw std::invalid_argument("radial_trace: needs dimension >= 2");
        return power(static_cast<double>(d - 1));
    }
    static Weight power_product(std::vector<Weight> bases, std::vector<double> exponents) {
        if (bases.size() != exponents.size()) throw std::invalid_argument("power_product: size mismatch");
        Weight w;
        w.kind_ = Kind::PowerProduct;
        w.bases_ = std::move(bases);
        w.exponents_ = std::move(exponents);
        return w;
    }
    /// Per-finest-cell masses on a window; pointwise value is the cell-averaged
    /// density mass/volume.
    static Weight cell_measure(const Window& window, std::vector<double> masses) {
        if (static_cast<long long>(masses.size()) != window.finest_cell_count())
            throw std::invalid_argument("cell_measure: need one mass per finest cell");
        for (double m : masses)
            if (!(m > 0.0) || !std::isfinite(m))
                throw std::invalid_argument("cell_measure: masses must be positive and finite");
        Weight w;
        w.kind_ = Kind::CellMeasure;
        w.window_ = std::make_shared<Window>(window);
        w.masses_ = std::make_shared<std::vector<double>>(std::move(masses));
        return w;
    }

    Kind kind() const { return kind_; }
    double param() const { return param_; }
    const Window& cell_window() const {
        require(kind_ == Kind::CellMeasure, "not a cell-measure weight");
        return *window_;
    }
    const std::vector<double>& cell_masses() const {
        require(kind_ == Kind::CellMeasure, "not a cell-measure weight");
        return *masses_;
    }
    const std::vector<Weight>& factor_bases() const { return bases_; }
    const std::vector<double>& factor_exponents() const { return exponents_; }

    /// Pointwise density. CellMeasure returns mass/volume of the finest cell
    /// containing x (throws outside its window).
    double density(const std::vector<double>& x) const {
        switch (kind_) {
            case Kind::Constant:
                return param_;
            case Kind::Power:
                return std::pow(norm2(x), param_);
            case Kind::PowerFirst:
                return std::pow(std::fabs(x[0]), param_);
            case Kind::Exponential:
                return std::exp(param_ * norm2(x));
            case Kind::PowerProduct: {
                double v = 1.0;
                for (size_t i = 0; i < bases_.size(); ++i) v *= std::pow(bases_[i].density(x), exponents_[i]);
                return v;
            }
            case Kind::CellMeasure: {
                const Window& win = *window_;
                if (static_cast<int>(x.size()) != win.dim) throw std::invalid_argument("density: dimension mismatch");
                DyadicIndex cell;
                cell.level = win.max_level;
                const double scale = std::ldexp(1.0, win.max_level);
                for (double xi : x) cell.pos.push_back(static_cast<long long>(std::floor(xi * scale)));
                if (!win.contains(cell)) throw std::domain_error("cell-measure density: point outside window");
                const double vol = std::ldexp(1.0, -win.max_level * win.dim);
                return (*masses_)[static_cast<size_t>(win.finest_ordinal(cell))] / vol;
            }
        }
        return 0.0;
    }

private:
    static void require(bool ok, const char* msg) {
        if (!ok) throw std::logic_error(msg);
    }
    static double norm2(const std::vector<double>& x) {
        double s = 0.0;
        for (double xi : x) s += xi * xi;
        return std::sqrt(s);
    }

    Kind kind_;
    double param_ = 0.0;
    std::vector<Weight> bases_;
    std::vector<double> exponents_;
    std::shared_ptr<Window> window_;
    std::shared_ptr<std::vector<double>> masses_;
};

namespace detail {

struct FlatWeight {
    double alpha_radial = 0.0;  // summed exponents of |x|^a factors
    double alpha_first = 0.0;   // summed exponents of |x_1|^a factors
    double exp_rate = 0.0;      // summed rates of exp(a|x|) factors
    double log_const = 0.0;
    bool has_cell = false;
};

inline void flatten(const Weight& w, double outer, FlatWeight& f) {
    switch (w.kind()) {
        case Weight::Kind::Constant:
            f.log_const += outer * std::log(w.param());
            break;
        case Weight::Kind::Power:
            f.alpha_radial += outer * w.param();
            break;
        case Weight::Kind::PowerFirst:
            f.alpha_first += outer * w.param();
            break;
        case Weight::Kind::Exponential:
            f.exp_rate += outer * w.param();
            break;
        case Weight::Kind::PowerProduct:
            for (size_t i = 0; i < w.factor_bases().size(); ++i)
                flatten(w.factor_bases()[i], outer * w.factor_exponents()[i], f);
            break;
        case Weight::Kind::CellMeasure:
            f.has_cell = true;
            break;
    }
}

inline bool interval_touches_zero(double lo, double hi) { return lo <= 0.0 && 0.0 <= hi; }

inline bool box_touches_origin(const Box& b) {
    for (int i = 0; i < b.dim(); ++i)
        if (!interval_touches_zero(b.lo[i], b.hi[i])) return false;
    return true;
}

/// integral of t^alpha over [0, x], x >= 0 (alpha > -1).
inline double power_primitive(double x, double alpha) {
    return std::pow(x, alpha + 1.0) / (alpha + 1.0);
}

/// Exact integral of |t|^alpha over [lo, hi]. Throws when divergent.
inline double integrate_abs_power_1d(double lo, double hi, double alpha) {
    if (alpha == 0.0) return hi - lo;
    auto one_side = [&](double a, double b) {  // 0 <= a <= b
        if (a == b) return 0.0;
        if (alpha <= -1.0 && a == 0.0) throw DivergentIntegral("|x|^a with a <= -1 on an interval touching 0");
        if (alpha == -1.0) return std::log(b / a);
        return power_primitive(b, alpha) - power_primitive(a, alpha);
    };
    if (lo >= 0.0) return one_side(lo, hi);
    if (hi <= 0.0) return one_side(-hi, -lo);
    return one_side(0.0, -lo) + one_side(0.0, hi);
}

/// Exact integral of exp(a|t|) over [lo, hi].
inline double integrate_abs_exp_1d(double lo, double hi, double a) {
    if (a == 0.0) return hi - lo;
    auto one_side = [&](double u, double v) {  // 0 <= u <= v
        return (std::exp(a * v) - std::exp(a * u)) / a;
    };
    if (lo >= 0.0) return one_side(lo, hi);
    if (hi <= 0.0) return one_side(-hi, -lo);
    return one_side(0.0, -lo) + one_side(0.0, hi);
}

struct QuadContext {
    const Weight* w;
    double rel_tol;
    double abs_floor;  // nodes below this magnitude are accepted as-is
};

/// Tensor-product two-point Gauss rule (exact through cubics per axis).
inline double gauss_estimate(const QuadContext& ctx, const Box& b) {
    const int d = b.dim();
    const double offset = 0.28867513459481287;  // 1/(2 sqrt 3)
    const int n_points = 1 << d;
    std::vector<double> x(static_cast<size_t>(d));
    double sum = 0.0;
    for (int c = 0; c < n_points; ++c) {
        for (int i = 0; i < d; ++i) {
            const double mid = 0.5 * (b.lo[i] + b.hi[i]);
            const double h = b.hi[i] - b.lo[i];
            x[static_cast<size_t>(i)] = mid + ((c >> i) & 1 ? offset : -offset) * h;
        }
        sum += ctx.w->density(x);
    }
    return sum * b.volume() / static_cast<double>(n_points);
}

inline double adaptive_node(const QuadContext& ctx, const Box& b, double coarse, int depth) {
    const int d = b.dim();
    const int n_children = 1 << d;
    double fine = 0.0;
    std::vector<Box> children(static_cast<size_t>(n_children));
    for (int c = 0; c < n_children; ++c) {
        Box& cb = children[static_cast<size_t>(c)];
        cb.lo.resize(d);
        cb.hi.resize(d);
        for (int i = 0; i < d; ++i) {
            double mid = 0.5 * (b.lo[i] + b.hi[i]);
            if (c & (1 << i)) {
                cb.lo[i] = mid;
                cb.hi[i] = b.hi[i];
            } else {
                cb.lo[i] = b.lo[i];
                cb.hi[i] = mid;
            }
        }
        fine += gauss_estimate(ctx, cb);
    }
    if (!std::isfinite(fine)) return fine;
    const double diff = std::fabs(fine - coarse);
    if (diff <= ctx.rel_tol * std::fabs(fine) || std::fabs(fine) + diff <= ctx.abs_floor || depth > 600)
        return fine + (fine - coarse) / 15.0;  // Richardson on the order-4 pair
    double sum = 0.0;
    for (int c = 0; c < n_children; ++c)
        sum += adaptive_node(ctx, children[static_cast<size_t>(c)], gauss_estimate(ctx, children[static_cast<size_t>(c)]), depth + 1);
    return sum;
}

/// Split a box at coordinate hyperplanes through 0 so that no sub-box has the
/// origin in its interior (quadrature sample points then stay off the
/// singular set of power weights).
inline void split_at_zero(const Box& b, int coord, std::vector<Box>& out) {
    if (coord == b.dim()) {
        out.push_back(b);
        return;
    }
    if (b.lo[coord] < 0.0 && 0.0 < b.hi[coord]) {
        Box left = b, right = b;
        left.hi[coord] = 0.0;
        right.lo[coord] = 0.0;
        split_at_zero(left, coord + 1, out);
        split_at_zero(right, coord + 1, out);
    } else {
        split_at_zero(b, coord + 1, out);
    }
}

}  // namespace detail

/// Integral of w over an axis-parallel box. Exact closed forms for constants,
/// 1D powers/exponentials and separable |x_1|^a; adaptive bisection otherwise.
/// Throws DivergentIntegral for provably infinite integrals.
inline double integrate_weight(const Weight& w, const Box& box, double rel_tol = 1e-8) {
    const int d = box.dim();
    for (int i = 0; i < d; ++i)
        if (!(box.lo[i] <= box.hi[i])) throw std::invalid_argument("integrate_weight: malformed box");
    if (box.volume() == 0.0) return 0.0;

    detail::FlatWeight flat;
    detail::flatten(w, 1.0, flat);
    const double coeff = std::exp(flat.log_const);

    // Integrability of the power singularities.
    if (flat.alpha_first <= -1.0 && detail::interval_touches_zero(box.lo[0], box.hi[0]) &&
        flat.alpha_radial == 0.0)
        throw DivergentIntegral("first-coordinate power with exponent <= -1 touching {x_1 = 0}");
    if (flat.alpha_radial != 0.0 && detail::box_touches_origin(box)) {
        const double total = flat.alpha_radial + std::min(flat.alpha_first, 0.0);
        if (total <= -static_cast<double>(d)) throw DivergentIntegral("radial power with exponent <= -d touching the origin");
    }

    if (!flat.has_cell && flat.exp_rate == 0.0 && flat.alpha_radial == 0.0) {
        // c * |x_1|^a: separable closed form.
        double v = coeff * detail::integrate_abs_power_1d(box.lo[0], box.hi[0], flat.alpha_first);
        for (int i = 1; i < d; ++i) v *= box.hi[i] - box.lo[i];
        return v;
    }
    if (!flat.has_cell && d == 1) {
        const double alpha = flat.alpha_radial + flat.alpha_first;  // |x| == |x_1| in 1D
        if (alpha == 0.0) return coeff * detail::integrate_abs_exp_1d(box.lo[0], box.hi[0], flat.exp_rate);
        if (flat.exp_rate == 0.0) return coeff * detail::integrate_abs_power_1d(box.lo[0], box.hi[0], alpha);
    }

    const bool singular = flat.alpha_radial < 0.0 || flat.alpha_first < 0.0;
    std::vector<Box> parts;
    if (singular)
        detail::split_at_zero(box, 0, parts);
    else
        parts.push_back(box);

    // Two passes: a coarse one to learn the magnitude, then the real one with
    // an absolute floor that truncates singular tails at the requested
    // relative accuracy.
    double total = 0.0;
    detail::QuadContext coarse_ctx{&w, 1e-3, 0.0};
    double rough = 0.0;
    for (const Box& part : parts) rough += detail::adaptive_node(coarse_ctx, part, detail::gauss_estimate(coarse_ctx, part), 0);
    detail::QuadContext ctx{&w, rel_tol, 0.05 * rel_tol * std::fabs(rough)};
    for (const Box& part : parts) total += detail::adaptive_node(ctx, part, detail::gauss_estimate(ctx, part), 0);
    return total;
}

/// Mass w(Q) = integral of w over the cube. Exact finest-cell sums for
/// cell-measure weights (whose window must agree with `window`).
inline double cell_mass(const Weight& w, const DyadicIndex& idx, const Window& window, double rel_tol = 1e-8) {
    if (!window.contains(idx)) throw std::invalid_argument("cell_mass: index outside window");
    if (w.kind() == Weight::Kind::CellMeasure) {
        const Window& own = w.cell_window();
        if (own.dim != window.dim || own.max_level != window.max_level || own.half_extent != window.half_extent)
            throw std::invalid_argument("cell_mass: cell-measure window mismatch");
        std::vector<long long> block;
        finest_ordinal_block(idx, window, block);
        double s = 0.0;
        for (long long ord : block) s += w.cell_masses()[static_cast<size_t>(ord)];
        return s;
    }
    return integrate_weight(w, cube_box(idx), rel_tol);
}

/// All finest-cell masses of a window, indexed by finest ordinal.
inline std::vector<double> finest_masses(const Weight& w, const Window& window, double rel_tol = 1e-8) {
    if (w.kind() == Weight::Kind::CellMeasure) {
        const Window& own = w.cell_window();
        if (own.dim != window.dim || own.max_level != window.max_level || own.half_extent != window.half_extent)
            throw std::invalid_argument("finest_masses: cell-measure window mismatch");
        return w.cell_masses();
    }
    const long long n = window.finest_cell_count();
    std::vector<double> out(static_cast<size_t>(n));
    for (long long ord = 0; ord < n; ++ord)
        out[static_cast<size_t>(ord)] = integrate_weight(w, cube_box(window.finest_index(ord)), rel_tol);
    return out;
}

/// Reciprocal-sum interpolation with 1/inf = 0; returns inf when the sum is 0.
inline double interpolate_exponent(double e0, double e1, double theta) {
    const double inv = (std::isinf(e0) ? 0.0 : (1.0 - theta) / e0) + (std::isinf(e1) ? 0.0 : theta / e1);
    return inv == 0.0 ? kInf : 1.0 / inv;
}

/// The interpolated weight w = w0^{(1-Theta)p/p0} w1^{Theta p/p1}.
/// Conventions: p0 = p1 = inf gives the constant weight 1; if exactly one
/// exponent is infinite the other factor enters with exponent 1.
inline Weight combine(const Weight& w0, const Weight& w1, double theta, double p0, double p1) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("combine: Theta must lie in (0,1)");
    const bool i0 = std::isinf(p0), i1 = std::isinf(p1);
    if (i0 && i1) return Weight::constant(1.0);
    const double p = interpolate_exponent(p0, p1, theta);
    if (i1) return Weight::power_product({w0}, {1.0});  // (1-Theta)p/p0 == 1
    if (i0) return Weight::power_product({w1}, {1.0});
    return Weight::power_product({w0, w1}, {(1.0 - theta) * p / p0, theta * p / p1});
}

// ---------------------------------------------------------------------------
// Muckenhoupt estimates
// ---------------------------------------------------------------------------

/// Deterministic ball sample: every center is paired with every radius; the
/// radii (in increasing order) define the refinement stages used for the
/// divergence heuristic.
struct BallSampling {
    std::vector<std::vector<double>> centers;
    std::vector<double> radii;
};

/// Centers on the dyadic grid (m / 2^center_shift) covering [-extent, extent]
/// per coordinate.
inline BallSampling dyadic_ball_grid(int dim, double extent, int center_shift, std::vector<double> radii) {
    BallSampling s;
    s.radii = std::move(radii);
    std::sort(s.radii.begin(), s.radii.end());
    const double step = std::ldexp(1.0, -center_shift);
    const long long n = static_cast<long long>(std::floor(extent / step));
    std::vector<long long> digit(static_cast<size_t>(dim), -n);
    while (true) {
        std::vector<double> c(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i) c[static_cast<size_t>(i)] = static_cast<double>(digit[static_cast<size_t>(i)]) * step;
        s.centers.push_back(std::move(c));
        int i = dim - 1;
        while (i >= 0) {
            if (++digit[static_cast<size_t>(i)] <= n) break;
            digit[static_cast<size_t>(i)] = -n;
            --i;
        }
        if (i < 0) break;
    }
    return s;
}

struct ApEstimate {
    double p = 2.0;
    double constant = 0.0;  // max over sampled balls; a lower bound for A_p
    long long n_balls = 0;
    bool local = false;  // balls restricted to volume <= 1
    bool diverging = false;
    std::vector<double> stage_estimates;  // running max after each radius stage
};

/// Sampled A_p expression max_B (avg_B w)^{1/p} (avg_B w^{-p'/p})^{1/p'}.
inline ApEstimate ap_constant(const Weight& w, double p, const BallSampling& balls, bool local,
                              double divergence_cap = 1e12, double quad_tol = 1e-8) {
    if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("ap_constant: need 1 < p < inf");
    const double p_dual = p / (p - 1.0);
    Weight dual = Weight::power_product({w}, {-p_dual / p});

    ApEstimate est;
    est.p = p;
    est.local = local;
    double best = 0.0;
    for (double r : balls.radii) {
        for (const auto& c : balls.centers) {
            Box b;
            for (double ci : c) {
                b.lo.push_back(ci - r);
                b.hi.push_back(ci + r);
            }
            if (local && b.volume() > 1.0 + 1e-12)
                throw std::invalid_argument("ap_constant: local estimate requires ball volume <= 1");
            ++est.n_balls;
            double value;
            try {
                const double vol = b.volume();
                const double avg_w = integrate_weight(w, b, quad_tol) / vol;
                const double avg_dual = integrate_weight(dual, b, quad_tol) / vol;
                value = std::pow(avg_w, 1.0 / p) * std::pow(avg_dual, 1.0 / p_dual);
            } catch (const DivergentIntegral&) {
                est.diverging = true;
                continue;
            }
            if (!std::isfinite(value)) {
                est.diverging = true;
                value = divergence_cap;
            }
            best = std::max(best, value);
        }
        est.stage_estimates.push_back(best);
    }
    est.constant = best;
    if (best > divergence_cap) est.diverging = true;
    const size_t n = est.stage_estimates.size();
    if (n >= 4) {
        bool growing = true;
        for (size_t i = n - 3; i < n; ++i)
            if (!(est.stage_estimates[i] >= 1.5 * est.stage_estimates[i - 1])) growing = false;
        if (growing) est.diverging = true;
    }
    return est;
}

// ---------------------------------------------------------------------------
// Weight-pair comparability
// ---------------------------------------------------------------------------

struct WClassRatio {
    double min_ratio = kInf;
    double max_ratio = 0.0;
    DyadicIndex argmin, argmax;
};

/// Per-cube ratio  w(Q) / [ w0(Q)^{(1-Theta)p/p0} w1(Q)^{Theta p/p1} ]  with
/// w = w0^{(1-Theta)p/p0} w1^{Theta p/p1}, over all in-window cubes. Hoelder
/// gives max_ratio <= 1; min_ratio bounded away from 0 is the comparability
/// that identifies the weighted space with its mass-sequence counterpart.
inline WClassRatio w_class_ratio(const Weight& w0, const Weight& w1, double theta, double p0, double p1,
                                 const Window& window, double quad_tol = 1e-8) {
    const Weight w = combine(w0, w1, theta, p0, p1);
    const double p = interpolate_exponent(p0, p1, theta);
    const double e0 = std::isinf(p0) ? 0.0 : (1.0 - theta) * p / p0;
    const double e1 = std::isinf(p1) ? 0.0 : theta * p / p1;

    WClassRatio out;
    for (const DyadicIndex& idx : window.all_indices()) {
        const double num = cell_mass(w, idx, window, quad_tol);
        const double den = std::pow(cell_mass(w0, idx, window, quad_tol), e0) *
                           std::pow(cell_mass(w1, idx, window, quad_tol), e1);
        const double ratio = num / den;
        if (ratio < out.min_ratio) {
            out.min_ratio = ratio;
            out.argmin = idx;
        }
        if (ratio > out.max_ratio) {
            out.max_ratio = ratio;
            out.argmax = idx;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cell-measure text format: header "window d J K", then one record
// "j k_1 ... k_d mass" per finest cell.
// ---------------------------------------------------------------------------

inline void write_cell_measure(std::ostream& os, const Weight& w) {
    const Window& win = w.cell_window();
    os << "window " << win.dim << ' ' << win.max_level << ' ' << win.half_extent << '\n';
    const long long n = win.finest_cell_count();
    os.precision(17);
    for (long long ord = 0; ord < n; ++ord) {
        DyadicIndex idx = win.finest_index(ord);
        os << idx.level;
        for (long long k : idx.pos) os << ' ' << k;
        os << ' ' << w.cell_masses()[static_cast<size_t>(ord)] << '\n';
    }
}

inline Weight read_cell_measure(std::istream& is) {
    std::string tag;
    int d = 0, j_max = 0;
    long long k_half = 0;
    if (!(is >> tag >> d >> j_max >> k_half) || tag != "window")
        throw std::runtime_error("cell-measure parse error: expected header 'window d J K'");
    Window win(d, j_max, k_half);
    std::vector<double> masses(static_cast<size_t>(win.finest_cell_count()), 0.0);
    std::vector<bool> seen(masses.size(), false);
    int level;
    while (is >> level) {
        DyadicIndex idx;
        idx.level = level;
        idx.pos.resize(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i)
            if (!(is >> idx.pos[static_cast<size_t>(i)])) throw std::runtime_error("cell-measure parse error: truncated record");
        double mass;
        if (!(is >> mass)) throw std::runtime_error("cell-measure parse error: missing mass");
        if (level != j_max) throw std::runtime_error("cell-measure parse error: record not at finest level");
        const long long ord = win.finest_ordinal(idx);
        masses[static_cast<size_t>(ord)] = mass;
        seen[static_cast<size_t>(ord)] = true;
    }
    for (bool s : seen)
        if (!s) throw std::runtime_error("cell-measure parse error: missing finest cells");
    return Weight::cell_measure(win, std::move(masses));
}

}  // namespace calprod
