#include <doctest.h>

#include <cmath>

#include "calprod/gap.hpp"
#include "calprod/instances.hpp"

using namespace calprod;

namespace {
const GapSpec canonical{1, 0.0, 1.0, 0.0, 2.0, 0.5};

DyadicIndex make_index(int level, std::vector<long long> pos) {
    DyadicIndex idx;
    idx.level = level;
    idx.pos = std::move(pos);
    return idx;
}
}  // namespace

TEST_CASE("gap_sequence: canonical cardinalities and values") {
    Window win(1, 6, 1);
    Sequence seq = gap_sequence(canonical, win);
    for (int j = 0; j <= win.max_level; ++j) {
        CHECK(gap_cardinality(canonical, j) == (1LL << j));
        long long count = 0;
        for (const auto& [idx, v] : seq.entries)
            if (idx.level == j) {
                ++count;
                CHECK(std::abs(v) == doctest::Approx(1.0));
                CHECK(idx.pos[0] >= 0);
            }
        CHECK(count == (1LL << j));
    }
}

TEST_CASE("gap_sequence: all three norms equal one at every window size") {
    for (int jmax : {4, 5, 6, 7}) {
        Window win(1, jmax, 1);
        Sequence seq = gap_sequence(canonical, win);
        const Weight one = Weight::constant(1.0);
        // interpolated pair (s, p) = (0, 4/3)
        CHECK(b_norm(seq, SpaceParams{0.0, 4.0 / 3.0, kInf, Scale::B, one}) ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b_norm(seq, SpaceParams{0.0, 1.0, kInf, Scale::B, one}) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b_norm(seq, SpaceParams{0.0, 2.0, kInf, Scale::B, one}) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gap_report: canonical witness and negative control") {
    Window win(1, 6, 1);
    std::vector<long long> ms;
    for (long long m = 0; m < win.max_level; ++m) ms.push_back(m);

    GapReport rep = gap_report(canonical, win, ms);
    CHECK(rep.norms_finite);
    for (double v : rep.profile) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.non_convergent);
    CHECK(rep.gap_witnessed);

    // finite substitute: the profile must hit zero and the report must say no
    Sequence finite(win);
    finite.set(make_index(1, {1}), 1.0);
    GapReport neg = gap_report(canonical, win, ms, &finite);
    CHECK_FALSE(neg.gap_witnessed);
    CHECK(neg.profile.back() == 0.0);
}

TEST_CASE("gap spec validation refuses the embedding regime") {
    GapSpec bad{1, 1.0, 1.0, 0.0, 2.0, 0.5};  // s0 - d/p0 = 0 > s1 - d/p1 = -1/2
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    GapSpec bad_order{1, 0.0, 2.0, 0.0, 1.0, 0.5};
    CHECK_THROWS_AS(bad_order.validate(), std::invalid_argument);

    // cutoff of the gap sequence leaves exactly the deep levels
    Window win(1, 5, 1);
    Sequence seq = gap_sequence(canonical, win);
    Sequence tail = seq - cutoff(seq, 3);
    for (const auto& [idx, v] : tail.entries) {
        (void)v;
        bool beyond = idx.level > 3;
        for (long long k : idx.pos) beyond = beyond || std::llabs(k) > 3;
        CHECK(beyond);
    }
}

TEST_CASE("gap_sequence with p1 = inf uses the limit exponents") {
    GapSpec spec{1, 0.0, 1.0, 1.5, kInf, 0.5};
    spec.validate();
    // #K_j = ceil(2^{-j(-p0(s1-s0) - d)}) = ceil(2^{-j(-1.5-1)}) = ceil(2^{2.5 j})
    CHECK(gap_cardinality(spec, 2) == static_cast<long long>(std::ceil(std::exp2(5.0))));
    CHECK(gap_value(spec, 2) == doctest::Approx(std::exp2(-3.0)));
    Window win(1, 3, 32);  // level 3 needs ceil(2^{7.5}) = 182 nonnegative slots
    Sequence seq = gap_sequence(spec, win);
    CHECK(seq.support_size() > 0);
    Window small(1, 3, 8);
    CHECK_THROWS_AS(gap_sequence(spec, small), std::invalid_argument);
}

TEST_CASE("embedding_chain_check: closed form, preconditions, zero skip") {
    Window win(1, 4, 1);
    const Weight one = Weight::constant(1.0);

    Sequence single(win);
    single.set(make_index(0, {0}), 1.0);
    // s0=1,p0=1 vs s1=0,p1=2 satisfies s0 - 1/p0 >= s1 - 1/p1
    auto c = embedding_chain_check(single, 1.0, 1.0, 0.0, 2.0, 0.5, one);
    REQUIRE(c.has_value());
    // all three norms of a unit entry at (0,0) are 1
    CHECK(c->c01 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c->c12 == doctest::Approx(1.0).epsilon(1e-13));

    InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
    for (std::uint64_t i = 0; i < 10; ++i) {
        Sequence seq = generate_instance(7, i, shape);
        if (seq.support_size() == 0) continue;
        auto cc = embedding_chain_check(seq, 1.0, 1.0, 0.0, 2.0, 0.5, one);
        REQUIRE(cc.has_value());
        CHECK(std::isfinite(cc->c01));
        CHECK(std::isfinite(cc->c12));
        CHECK(cc->c01 > 0.0);
        CHECK(cc->c12 > 0.0);
    }

    Sequence zero(win);
    CHECK_FALSE(embedding_chain_check(zero, 1.0, 1.0, 0.0, 2.0, 0.5, one).has_value());

    CHECK_THROWS_AS(embedding_chain_check(single, 0.0, 1.0, 1.0, 2.0, 0.5, one), std::invalid_argument);
    CHECK_THROWS_AS(embedding_chain_check(single, 0.0, 2.0, 1.0, 2.0, 0.5, one), std::invalid_argument);
}

TEST_CASE("embedding-chain batch maxima are stable under window refinement") {
    const Weight one = Weight::constant(1.0);
    double max01[2] = {0.0, 0.0}, max12[2] = {0.0, 0.0};
    for (int wi = 0; wi < 2; ++wi) {
        Window win(1, 4 + wi, 1);
        for (std::uint64_t i = 0; i < 100; ++i) {
            InstanceShape base{Window(1, 3, 1), 0, -1, 0.4, -1, false, true};
            Sequence gen = generate_instance(11, i, base);
            Sequence seq(win);
            for (const auto& [idx, v] : gen.entries) seq.set(idx, v);
            auto cc = embedding_chain_check(seq, 1.0, 1.0, 0.0, 2.0, 0.5, one);
            if (!cc) continue;
            max01[wi] = std::max(max01[wi], cc->c01);
            max12[wi] = std::max(max12[wi], cc->c12);
        }
    }
    CHECK(std::fabs(max01[0] - max01[1]) <= 0.25 * std::max(max01[0], max01[1]));
    CHECK(std::fabs(max12[0] - max12[1]) <= 0.25 * std::max(max12[0], max12[1]));
}
