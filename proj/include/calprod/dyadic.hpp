#pragma once

// Dyadic cube geometry on finite windows.
//
// A dyadic cube at level j >= 0 with position k in Z^d is the half-open box
//   [2^{-j} k_i, 2^{-j} (k_i + 1))  per coordinate.
// All coordinates are dyadic rationals (integer mantissa + power-of-two
// denominator), never floats, so cube membership, ancestry and measure
// comparisons are exact. A Window truncates the index set N_0 x Z^d to the
// levels 0..J and to cubes contained in the centered box [-K, K)^d; the
// finest-level cells tile that box exactly.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace calprod {

/// Exact dyadic rational: value = num / 2^shift, shift >= 0.
struct DyadicRational {
    long long num = 0;
    int shift = 0;

    double to_double() const { return static_cast<double>(num) / static_cast<double>(1LL << shift); }

    /// Normalize so that num is odd or zero.
    DyadicRational normalized() const {
        DyadicRational r = *this;
        if (r.num == 0) return {0, 0};
        while (r.shift > 0 && (r.num % 2) == 0) {
            r.num /= 2;
            --r.shift;
        }
        return r;
    }

    friend DyadicRational operator+(DyadicRational a, DyadicRational b) {
        int s = a.shift > b.shift ? a.shift : b.shift;
        long long na = a.num << (s - a.shift);
        long long nb = b.num << (s - b.shift);
        return DyadicRational{na + nb, s}.normalized();
    }

    friend bool operator==(DyadicRational a, DyadicRational b) {
        a = a.normalized();
        b = b.normalized();
        return a.num == b.num && a.shift == b.shift;
    }

    /// Exact comparison via common denominator.
    friend bool operator<(DyadicRational a, DyadicRational b) {
        int s = a.shift > b.shift ? a.shift : b.shift;
        return (a.num << (s - a.shift)) < (b.num << (s - b.shift));
    }
    friend bool operator<=(DyadicRational a, DyadicRational b) { return a < b || a == b; }
};

/// Address of the dyadic cube Q at level `level` and position `pos` (one entry
/// per coordinate).
struct DyadicIndex {
    int level = 0;
    std::vector<long long> pos;

    int dim() const { return static_cast<int>(pos.size()); }

    friend bool operator==(const DyadicIndex& a, const DyadicIndex& b) {
        return a.level == b.level && a.pos == b.pos;
    }
    /// Level-major, then lexicographic in position; fixes all summation orders.
    friend bool operator<(const DyadicIndex& a, const DyadicIndex& b) {
        if (a.level != b.level) return a.level < b.level;
        return a.pos < b.pos;
    }
};

struct CubeBounds {
    std::vector<DyadicRational> lower;
    std::vector<DyadicRational> upper;  // exclusive
};

/// Exact bounds [2^{-j} k_i, 2^{-j}(k_i+1)) per coordinate.
inline CubeBounds cube_bounds(const DyadicIndex& idx) {
    CubeBounds b;
    b.lower.reserve(idx.pos.size());
    b.upper.reserve(idx.pos.size());
    for (long long k : idx.pos) {
        b.lower.push_back(DyadicRational{k, idx.level}.normalized());
        b.upper.push_back(DyadicRational{k + 1, idx.level}.normalized());
    }
    return b;
}

/// Exact volume 2^{-jd}.
inline DyadicRational cube_volume(const DyadicIndex& idx) {
    return DyadicRational{1, idx.level * idx.dim()};
}

/// The unique ancestor cube at `level` <= idx.level containing idx.
/// Positions floor toward -infinity (arithmetic shift).
inline DyadicIndex ancestor(const DyadicIndex& idx, int level) {
    if (level < 0 || level > idx.level)
        throw std::invalid_argument("ancestor: level must lie in [0, idx.level]");
    DyadicIndex out;
    out.level = level;
    out.pos.reserve(idx.pos.size());
    const int s = idx.level - level;
    for (long long k : idx.pos) out.pos.push_back(k >> s);
    return out;
}

/// Does the closed hull of the cube contain the point x (given as exact dyadic
/// coordinates)? Membership in the half-open cube itself when `half_open`.
inline bool cube_contains(const DyadicIndex& idx, const std::vector<DyadicRational>& x,
                          bool half_open = true) {
    if (static_cast<int>(x.size()) != idx.dim())
        throw std::invalid_argument("cube_contains: dimension mismatch");
    for (int i = 0; i < idx.dim(); ++i) {
        DyadicRational lo{idx.pos[i], idx.level};
        DyadicRational hi{idx.pos[i] + 1, idx.level};
        if (x[i] < lo) return false;
        if (half_open ? !(x[i] < hi) : hi < x[i]) return false;
    }
    return true;
}

/// Finite truncation of the dyadic index set: levels 0..max_level, cubes
/// contained in [-half_extent, half_extent)^d.
struct Window {
    int dim = 1;
    int max_level = 0;          // J
    long long half_extent = 1;  // K

    Window() = default;
    Window(int d, int j_max, long long k_half) : dim(d), max_level(j_max), half_extent(k_half) {
        if (d < 1) throw std::invalid_argument("Window: dimension must be >= 1");
        if (j_max < 0) throw std::invalid_argument("Window: max_level must be >= 0");
        if (k_half < 1) throw std::invalid_argument("Window: half_extent must be >= 1");
        if (finest_cells_per_side() > (1LL << 24) || finest_cell_count() > (1LL << 26))
            throw std::invalid_argument("Window: too large for exact desk-scale enumeration");
    }

    long long cells_per_side(int level) const { return 2 * half_extent * (1LL << level); }
    long long finest_cells_per_side() const { return cells_per_side(max_level); }

    long long cell_count(int level) const {
        long long n = 1;
        for (int i = 0; i < dim; ++i) n *= cells_per_side(level);
        return n;
    }
    long long finest_cell_count() const { return cell_count(max_level); }

    bool contains(const DyadicIndex& idx) const {
        if (idx.dim() != dim) return false;
        if (idx.level < 0 || idx.level > max_level) return false;
        const long long lim = half_extent << idx.level;  // K * 2^j
        for (long long k : idx.pos)
            if (k < -lim || k >= lim) return false;
        return true;
    }

    /// Linear ordinal of a level-max_level cell, row-major over coordinates.
    long long finest_ordinal(const DyadicIndex& idx) const {
        if (idx.level != max_level || !contains(idx))
            throw std::invalid_argument("finest_ordinal: not an in-window finest cell");
        const long long lim = half_extent << max_level;
        const long long side = 2 * lim;
        long long ord = 0;
        for (int i = 0; i < dim; ++i) ord = ord * side + (idx.pos[i] + lim);
        return ord;
    }

    DyadicIndex finest_index(long long ordinal) const {
        const long long lim = half_extent << max_level;
        const long long side = 2 * lim;
        DyadicIndex idx;
        idx.level = max_level;
        idx.pos.assign(dim, 0);
        for (int i = dim - 1; i >= 0; --i) {
            idx.pos[i] = (ordinal % side) - lim;
            ordinal /= side;
        }
        return idx;
    }

    /// All in-window indices at one level, in lexicographic position order.
    std::vector<DyadicIndex> level_indices(int level) const {
        if (level < 0 || level > max_level)
            throw std::invalid_argument("level_indices: level out of window");
        const long long lim = half_extent << level;
        std::vector<DyadicIndex> out;
        out.reserve(static_cast<size_t>(cell_count(level)));
        DyadicIndex idx;
        idx.level = level;
        idx.pos.assign(dim, -lim);
        while (true) {
            out.push_back(idx);
            int i = dim - 1;
            while (i >= 0) {
                if (++idx.pos[i] < lim) break;
                idx.pos[i] = -lim;
                --i;
            }
            if (i < 0) break;
        }
        return out;
    }

    /// All in-window indices, level-major then lexicographic.
    std::vector<DyadicIndex> all_indices() const {
        std::vector<DyadicIndex> out;
        for (int j = 0; j <= max_level; ++j) {
            auto lvl = level_indices(j);
            out.insert(out.end(), lvl.begin(), lvl.end());
        }
        return out;
    }
};

/// The 2^{(J-j)d} level-J descendants of an in-window cube; disjoint, their
/// union is the cube.
inline std::vector<DyadicIndex> finest_cells(const DyadicIndex& idx, const Window& window) {
    if (!window.contains(idx)) throw std::invalid_argument("finest_cells: index outside window");
    const int s = window.max_level - idx.level;
    const long long per_side = 1LL << s;
    long long total = 1;
    for (int i = 0; i < window.dim; ++i) total *= per_side;
    std::vector<DyadicIndex> out;
    out.reserve(static_cast<size_t>(total));
    DyadicIndex cell;
    cell.level = window.max_level;
    cell.pos.assign(window.dim, 0);
    std::vector<long long> offset(window.dim, 0);
    while (true) {
        for (int i = 0; i < window.dim; ++i) cell.pos[i] = (idx.pos[i] << s) + offset[i];
        out.push_back(cell);
        int i = window.dim - 1;
        while (i >= 0) {
            if (++offset[i] < per_side) break;
            offset[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

/// First in-window finest-cell ordinal under idx plus iteration strides: the
/// descendants of idx form a contiguous row-major block at the finest level.
/// Cheap enumeration without materializing DyadicIndex objects.
inline void finest_ordinal_block(const DyadicIndex& idx, const Window& window,
                                 std::vector<long long>& out) {
    const int s = window.max_level - idx.level;
    const long long per_side = 1LL << s;
    const long long lim = window.half_extent << window.max_level;
    const long long side = 2 * lim;
    out.clear();
    std::vector<long long> offset(window.dim, 0);
    while (true) {
        long long ord = 0;
        for (int i = 0; i < window.dim; ++i) ord = ord * side + ((idx.pos[i] << s) + offset[i] + lim);
        out.push_back(ord);
        int i = window.dim - 1;
        while (i >= 0) {
            if (++offset[i] < per_side) break;
            offset[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
}

}  // namespace calprod
