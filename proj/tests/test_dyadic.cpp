#include <doctest.h>

#include "calprod/dyadic.hpp"

using namespace calprod;

namespace {
DyadicIndex make_index(int level, std::vector<long long> pos) {
    DyadicIndex idx;
    idx.level = level;
    idx.pos = std::move(pos);
    return idx;
}
}  // namespace

TEST_CASE("cube_bounds on worked examples") {
    auto b = cube_bounds(make_index(0, {0}));
    CHECK(b.lower[0] == DyadicRational{0, 0});
    CHECK(b.upper[0] == DyadicRational{1, 0});

    b = cube_bounds(make_index(2, {-1}));
    CHECK(b.lower[0] == DyadicRational{-1, 2});  // -1/4
    CHECK(b.upper[0] == DyadicRational{0, 0});

    b = cube_bounds(make_index(1, {1, -2}));
    CHECK(b.lower[0] == DyadicRational{1, 1});   // 1/2
    CHECK(b.upper[0] == DyadicRational{1, 0});   // 1
    CHECK(b.lower[1] == DyadicRational{-1, 0});  // -1
    CHECK(b.upper[1] == DyadicRational{-1, 1});  // -1/2
}

TEST_CASE("ancestor floors toward -infinity") {
    CHECK(ancestor(make_index(2, {3}), 1) == make_index(1, {1}));
    CHECK(ancestor(make_index(2, {-1}), 0) == make_index(0, {-1}));
    CHECK(ancestor(make_index(3, {5, -6}), 3) == make_index(3, {5, -6}));
    CHECK_THROWS_AS(ancestor(make_index(2, {0}), 3), std::invalid_argument);
    CHECK_THROWS_AS(ancestor(make_index(2, {0}), -1), std::invalid_argument);
}

TEST_CASE("finest_cells tiles the cube") {
    Window w1(1, 1, 1);
    auto cells = finest_cells(make_index(0, {0}), w1);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0] == make_index(1, {0}));
    CHECK(cells[1] == make_index(1, {1}));

    Window w2(1, 2, 2);
    cells = finest_cells(make_index(2, {3}), w2);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0] == make_index(2, {3}));

    Window w3(2, 1, 1);
    cells = finest_cells(make_index(0, {0, 0}), w3);
    CHECK(cells.size() == 4);

    CHECK_THROWS_AS(finest_cells(make_index(0, {5}), w1), std::invalid_argument);
}

TEST_CASE("volumes of finest cells sum exactly to the cube volume") {
    Window win(2, 3, 1);
    const DyadicIndex idx = make_index(1, {-1, 0});
    DyadicRational sum{0, 0};
    for (const DyadicIndex& cell : finest_cells(idx, win)) sum = sum + cube_volume(cell);
    CHECK(sum == cube_volume(idx));
}

TEST_CASE("ancestors contain every point of the cube and stay in-window") {
    Window win(1, 4, 2);
    for (const DyadicIndex& idx : win.all_indices()) {
        auto bounds = cube_bounds(idx);
        for (int j = 0; j <= idx.level; ++j) {
            const DyadicIndex anc = ancestor(idx, j);
            CHECK(win.contains(anc));
            CHECK(cube_contains(anc, bounds.lower));
            // the midpoint as an exact dyadic rational
            std::vector<DyadicRational> mid{DyadicRational{2 * idx.pos[0] + 1, idx.level + 1}};
            CHECK(cube_contains(anc, mid));
        }
    }
}

TEST_CASE("window membership matches the centered box") {
    Window win(1, 2, 1);
    CHECK(win.contains(make_index(0, {-1})));
    CHECK(win.contains(make_index(0, {0})));
    CHECK_FALSE(win.contains(make_index(0, {1})));  // [1,2) leaves [-1,1)
    CHECK(win.contains(make_index(2, {3})));
    CHECK_FALSE(win.contains(make_index(2, {4})));
    CHECK_FALSE(win.contains(make_index(3, {0})));  // level above J
    CHECK(win.finest_cell_count() == 8);
}

TEST_CASE("finest ordinals are a bijection and blocks are contiguous rows") {
    Window win(2, 2, 1);
    for (long long ord = 0; ord < win.finest_cell_count(); ++ord)
        CHECK(win.finest_ordinal(win.finest_index(ord)) == ord);

    std::vector<long long> block;
    finest_ordinal_block(make_index(0, {0, 0}), win, block);
    CHECK(block.size() == 16);
    auto cells = finest_cells(make_index(0, {0, 0}), win);
    for (size_t i = 0; i < cells.size(); ++i) CHECK(win.finest_ordinal(cells[i]) == block[i]);
}
