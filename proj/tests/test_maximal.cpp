#include <doctest.h>

#include <cmath>
#include <sstream>

#include "calprod/instances.hpp"
#include "calprod/maximal.hpp"

using namespace calprod;

TEST_CASE("cell functions round-trip through the shared text format") {
    Window win(1, 2, 1);
    CellFunction f = CellFunction::constant(win, 0.0);
    f.values[1] = 2.5;
    f.values[6] = 0.125;
    std::stringstream ss;
    write_cell_function(ss, f);
    CellFunction back = read_cell_function(ss);
    CHECK(back.values == f.values);
    CHECK(back.window.max_level == win.max_level);

    // a cell-measure table parses as a cell function (mass column as value)
    Weight w = Weight::cell_measure(win, std::vector<double>(8, 0.5));
    std::stringstream ms;
    write_cell_measure(ms, w);
    CellFunction from_measure = read_cell_function(ms);
    CHECK(from_measure.values == std::vector<double>(8, 0.5));
}

TEST_CASE("m_loc: constants, indicators, pointwise domination") {
    Window win(1, 3, 1);

    CellFunction c = CellFunction::constant(win, 2.5);
    CellFunction mc = m_loc(c);
    for (double v : mc.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));

    // indicator of one finest cell: value 2^{-(J-j)} on cells sharing the
    // level-j ancestor, zero on cells sharing none
    CellFunction ind = CellFunction::constant(win, 0.0);
    const DyadicIndex target = win.finest_index(5);
    ind.values[5] = 1.0;
    CellFunction mi = m_loc(ind);
    for (long long ord = 0; ord < win.finest_cell_count(); ++ord) {
        DyadicIndex cell = win.finest_index(ord);
        int shared = -1;
        for (int j = win.max_level; j >= 0; --j)
            if (ancestor(cell, j) == ancestor(target, j)) {
                shared = j;
                break;
            }
        if (shared < 0)
            CHECK(mi.values[static_cast<size_t>(ord)] == 0.0);
        else
            CHECK(mi.values[static_cast<size_t>(ord)] ==
                  doctest::Approx(std::exp2(-(win.max_level - shared))).epsilon(1e-13));
    }

    CellFunction f = generate_cell_function(3, 0, win);
    CellFunction mf = m_loc(f);
    for (size_t i = 0; i < f.values.size(); ++i) CHECK(mf.values[i] >= f.values[i]);
}

TEST_CASE("m_loc is sublinear, homogeneous, monotone") {
    Window win(1, 3, 1);
    CellFunction f = generate_cell_function(5, 0, win);
    CellFunction g = generate_cell_function(5, 1, win);

    CellFunction sum = f;
    for (size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += g.values[i];
    CellFunction msum = m_loc(sum), mf = m_loc(f), mg = m_loc(g);
    for (size_t i = 0; i < msum.values.size(); ++i)
        CHECK(msum.values[i] <= mf.values[i] + mg.values[i] + 1e-12);

    CellFunction scaled = f;
    for (double& v : scaled.values) v *= 3.0;
    CellFunction ms = m_loc(scaled);
    for (size_t i = 0; i < ms.values.size(); ++i) CHECK(ms.values[i] == doctest::Approx(3.0 * mf.values[i]));

    CellFunction bigger = f;
    for (size_t i = 0; i < bigger.values.size(); ++i) bigger.values[i] += g.values[i];
    CellFunction mb = m_loc(bigger);
    for (size_t i = 0; i < mb.values.size(); ++i) CHECK(mb.values[i] >= mf.values[i] - 1e-12);
}

TEST_CASE("m_loc works in two dimensions") {
    Window win(2, 2, 1);
    CellFunction ind = CellFunction::constant(win, 0.0);
    ind.values[0] = 1.0;
    CellFunction mi = m_loc(ind);
    // the cell itself keeps value 1; within its level-0 cube the smallest
    // value is the level-0 average 2^{-Jd}
    CHECK(mi.values[0] == doctest::Approx(1.0));
    const DyadicIndex target = win.finest_index(0);
    double minv = 1.0;
    for (long long ord = 0; ord < win.finest_cell_count(); ++ord)
        if (ancestor(win.finest_index(ord), 0) == ancestor(target, 0))
            minv = std::min(minv, mi.values[static_cast<size_t>(ord)]);
    CHECK(minv == doctest::Approx(std::exp2(-2.0 * 2.0)).epsilon(1e-13));
}

TEST_CASE("vv_maximal_constant: identity on constant families, >= 1 always") {
    Window win(1, 4, 1);
    std::vector<CellFunction> constant_family{CellFunction::constant(win, 1.0),
                                              CellFunction::constant(win, 3.0)};
    CHECK(vv_maximal_constant(constant_family, 2.0, 2.0, Weight::constant(1.0)) ==
          doctest::Approx(1.0).epsilon(1e-12));

    CellFunction ind = CellFunction::constant(win, 0.0);
    ind.values[3] = 1.0;
    const double c = vv_maximal_constant({ind}, 2.0, 2.0, Weight::constant(1.0));
    CHECK(std::isfinite(c));
    CHECK(c >= 1.0);

    for (std::uint64_t i = 0; i < 10; ++i) {
        std::vector<CellFunction> family;
        for (std::uint64_t j = 0; j < 4; ++j) family.push_back(generate_cell_function(7, 4 * i + j, win, 0.5));
        const double r = vv_maximal_constant(family, 2.0, kInf, Weight::power(0.5));
        CHECK(r >= 1.0 - 1e-12);
        CHECK(std::isfinite(r));
    }

    CHECK_THROWS_AS(vv_maximal_constant({CellFunction::constant(win, 0.0)}, 2.0, 2.0, Weight::constant(1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(vv_maximal_constant({}, 2.0, 2.0, Weight::constant(1.0)), std::invalid_argument);
}
