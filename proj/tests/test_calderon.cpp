#include <doctest.h>

#include <cmath>
#include <sstream>

#include "calprod/calderon.hpp"
#include "calprod/instances.hpp"

using namespace calprod;

namespace {
DyadicIndex make_index(int level, std::vector<long long> pos) {
    DyadicIndex idx;
    idx.level = level;
    idx.pos = std::move(pos);
    return idx;
}
}  // namespace

TEST_CASE("holder_product_bound: equality, random instances, disjoint support") {
    Window win(1, 4, 1);
    const Weight w = Weight::power(0.5);
    InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
    Sequence seq = generate_instance(11, 0, shape);

    SpaceParams P{0.4, 1.5, 2.0, Scale::F, w};
    HolderCheck eq = holder_product_bound(seq, seq, 0.4, P, P, P);
    CHECK(eq.ok);
    CHECK(eq.lhs == doctest::Approx(eq.rhs).epsilon(1e-12));

    // random pairs across both scales with the discrete interpolated weight
    Rng rng(3);
    for (std::uint64_t i = 1; i <= 40; ++i) {
        Sequence a = generate_instance(11, 2 * i, shape);
        Sequence b = generate_instance(11, 2 * i + 1, shape);
        const double theta = rng.uniform(0.1, 0.9);
        const Scale scale = i % 2 == 0 ? Scale::F : Scale::B;
        SpaceParams P0{0.0, 1.0, 4.0, scale, Weight::power(0.5)};
        SpaceParams P1{1.0, 2.0, 2.0, scale, Weight::constant(1.0)};
        auto ie = interpolate_params(P0, P1, theta);
        const double e0 = (1.0 - theta) * ie.p / P0.p, e1 = theta * ie.p / P1.p;
        const auto m0 = finest_masses(P0.weight, win);
        const auto m1 = finest_masses(P1.weight, win);
        std::vector<double> mw(m0.size());
        for (size_t c = 0; c < m0.size(); ++c) mw[c] = std::pow(m0[c], e0) * std::pow(m1[c], e1);
        SpaceParams Pt{ie.s, ie.p, ie.q, scale, Weight::cell_measure(win, mw)};
        HolderCheck hc = holder_product_bound(a, b, theta, P0, P1, Pt);
        CHECK(hc.ok);
    }

    Sequence left(win), right(win);
    left.set(make_index(1, {0}), 2.0);
    right.set(make_index(1, {1}), 3.0);
    HolderCheck disjoint = holder_product_bound(left, right, 0.5, P, P, P);
    CHECK(disjoint.lhs == 0.0);
    CHECK(disjoint.ok);

    SpaceParams wrong{2.0, 1.5, 2.0, Scale::F, w};
    CHECK_THROWS_AS(holder_product_bound(seq, seq, 0.4, P, P, wrong), std::invalid_argument);
}

TEST_CASE("lp_factorize: unweighted exponent split and norm coincidence") {
    Window win(1, 3, 1);
    const Weight one = Weight::constant(1.0);
    CellFunction f = generate_cell_function(7, 0, win);

    LpFactorization lf = lp_factorize(f, one, one, 0.5, 1.0, 2.0);  // p = 4/3
    const double p = 4.0 / 3.0;
    for (size_t i = 0; i < f.values.size(); ++i) {
        CHECK(lf.part0.values[i] == doctest::Approx(std::pow(f.values[i], p / 1.0)).epsilon(1e-12));
        CHECK(lf.part1.values[i] == doctest::Approx(std::pow(f.values[i], p / 2.0)).epsilon(1e-12));
    }
    CHECK(lf.recon_max_rel_err < 1e-12);
    CHECK(std::pow(lf.norm0, 0.5) * std::pow(lf.norm1, 0.5) ==
          doctest::Approx(lf.norm_target).epsilon(1e-12));
}

TEST_CASE("lp_factorize: one-cell closed form") {
    Window win(1, 0, 1);  // cells [-1,0) and [0,1), volume 1 each
    CellFunction f = CellFunction::constant(win, 0.0);
    f.values[1] = 2.0;
    const Weight one = Weight::constant(1.0);
    LpFactorization lf = lp_factorize(f, one, one, 0.5, 1.0, 2.0);
    CHECK(lf.part0.values[1] == doctest::Approx(std::pow(2.0, 4.0 / 3.0)).epsilon(1e-13));
    CHECK(lf.part1.values[1] == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-13));
    CHECK(lf.norm_target == doctest::Approx(2.0).epsilon(1e-13));  // unit volume
    CHECK(std::pow(lf.norm0, 0.5) * std::pow(lf.norm1, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("lp_factorize: infinite-exponent conventions") {
    Window win(1, 2, 1);
    CellFunction f = generate_cell_function(9, 1, win);
    const Weight w0 = Weight::power(0.5);
    const Weight w1 = Weight::exponential(0.3);

    LpFactorization lf = lp_factorize(f, w0, w1, 0.25, 2.0, kInf);
    for (double v : lf.part1.values) CHECK(v == 1.0);
    CHECK(std::pow(lf.norm0, 0.75) * std::pow(lf.norm1, 0.25) ==
          doctest::Approx(lf.norm_target).epsilon(1e-10));

    lf = lp_factorize(f, w0, w1, 0.25, kInf, kInf);
    double sup = 0.0;
    for (double v : f.values) sup = std::max(sup, v);
    CHECK(lf.norm_target == doctest::Approx(sup));
    CHECK(lf.norm0 == doctest::Approx(sup));
    CHECK(lf.part0.values == f.values);
    CHECK(lf.part1.values == f.values);
}

TEST_CASE("build_level_sets: single unit entry and equal weights") {
    Window win(1, 3, 1);
    const Weight one = Weight::constant(1.0);
    Sequence seq(win);
    seq.set(make_index(0, {0}), 1.0);
    SpaceParams target{0.0, 1.5, 2.0, Scale::F, one};

    LevelSets ls = build_level_sets(seq, target, one, 0.7);  // ratio == 1, any exponent
    CHECK(ls.ell_min == -1);
    CHECK(ls.ell_max == 0);
    // g = 1 on [0,1): in A_l for l < 0, not for l >= 0
    CHECK(ls.a_set(-1).size() == static_cast<size_t>(win.finest_cell_count()) / 2);
    CHECK(ls.a_set(0).empty());
    auto cls = ls.cube_class.find(make_index(0, {0}));
    REQUIRE(cls != ls.cube_class.end());
    CHECK(cls->second == -1);
    CHECK(ls.unassigned_support.empty());
}

TEST_CASE("build_level_sets: nesting and single-class capture on random data") {
    Window win(1, 4, 1);
    InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
    const Weight w0 = Weight::power(0.5);
    const Weight wt = Weight::exponential(0.4);
    for (std::uint64_t i = 0; i < 10; ++i) {
        Sequence seq = generate_instance(19, i, shape);
        SpaceParams target{0.3, 1.2, 2.5, Scale::F, wt};
        LevelSets ls = build_level_sets(seq, target, w0, 0.9);
        for (long long ell = ls.ell_min; ell < ls.ell_max; ++ell) {
            auto inner = ls.a_set(ell + 1);
            auto outer = ls.a_set(ell);
            CHECK(std::includes(outer.begin(), outer.end(), inner.begin(), inner.end()));
        }
        CHECK(ls.a_set(ls.ell_max + 1).empty());
        CHECK(ls.unassigned_support.empty());  // every support index in exactly one class
        // pairwise disjoint by construction: cube_class is a map
        for (const auto& [idx, value] : seq.entries) {
            (void)value;
            CHECK(ls.cube_class.count(idx) == 1);
        }
    }

    Sequence zero(win);
    LevelSets ls = build_level_sets(zero, SpaceParams{0.0, 1.0, 2.0, Scale::F, w0}, w0, 1.0);
    CHECK(ls.empty());
    CHECK(ls.cube_class.empty());
}

TEST_CASE("f-branch exponents: worked example and identities over random draws") {
    FBranchExponents e = f_branch_exponents(0.0, 1.0, 4.0, 1.0, 2.0, 2.0, 0.5);
    CHECK(e.p == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(e.q == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK(e.s == doctest::Approx(0.5));
    CHECK(e.gamma == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(e.delta == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(e.u == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(e.v == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(e.u + 0.0 == doctest::Approx(e.s * e.q / 4.0).epsilon(1e-14));
    CHECK(e.v + 1.0 == doctest::Approx(e.s * e.q / 2.0).epsilon(1e-14));

    Rng rng(29);
    for (int i = 0; i < 200; ++i) {
        const double theta = rng.uniform(0.05, 0.95);
        const double p0 = rng.uniform(0.5, 4.0), p1 = rng.uniform(0.5, 4.0);
        const double q0 = rng.uniform(0.5, 4.0), q1 = rng.uniform(0.5, 4.0);
        const double s0 = rng.uniform(-2.0, 2.0), s1 = rng.uniform(-2.0, 2.0);
        FBranchExponents r = f_branch_exponents(s0, p0, q0, s1, p1, q1, theta);
        CHECK(std::fabs((1.0 - theta) * r.gamma + theta * r.delta) < 1e-12);
        CHECK(std::fabs((1.0 - theta) * r.u + theta * r.v) < 1e-12);
        CHECK(std::fabs(r.u + s0 - r.s * r.q / q0) < 1e-12);
        CHECK(std::fabs(r.v + s1 - r.s * r.q / q1) < 1e-12);
        // gamma = delta = 0 exactly when p0/q0 = p1/q1
        if (std::fabs(r.gamma) < 1e-13) CHECK(p0 / q0 == doctest::Approx(p1 / q1).epsilon(1e-10));
    }
}

TEST_CASE("f_factorize: identical spaces collapse to the degenerate branch") {
    Window win(1, 4, 1);
    const Weight w = Weight::power(0.5);
    SpaceParams P{0.5, 1.5, 3.0, Scale::F, w};
    InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
    Sequence seq = generate_instance(37, 0, shape);

    Factorization F = f_factorize(seq, P, P, 0.3);
    CHECK(F.metrics.recon_max_rel_err < 1e-13);
    CHECK(F.metrics.achieved_constant == doctest::Approx(1.0).epsilon(0.1));
    CHECK(F.metrics.unassigned_support == 0);
    for (const auto& [idx, v] : F.part0.entries) CHECK(std::abs(v - seq.at(idx)) < 1e-12);
}

TEST_CASE("f_factorize: finite-q branch with distinct weights reconstructs exactly") {
    Window win(1, 4, 1);
    SpaceParams P0{0.0, 1.0, 4.0, Scale::F, Weight::power(0.5)};
    SpaceParams P1{1.0, 2.0, 2.0, Scale::F, Weight::constant(1.0)};
    InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
    for (std::uint64_t i = 0; i < 20; ++i) {
        Sequence seq = generate_instance(41, i, shape);
        if (seq.support_size() == 0) continue;
        Factorization F = f_factorize(seq, P0, P1, 0.5);
        CHECK(F.metrics.recon_max_rel_err < 1e-12);
        CHECK(F.metrics.unassigned_support == 0);
        CHECK(F.metrics.achieved_constant >= 1.0 - 1e-10);  // Hoelder direction
        FactorizationReport rep = verify_factorization(F, 1e-9);
        CHECK(rep.reconstruction_ok);
        CHECK(rep.holder_ok);
    }
}

TEST_CASE("f_factorize: role swap when gamma < 0") {
    Window win(1, 4, 1);
    // p/p0 - q/q0 < 0 here, so the construction must swap orientations.
    SpaceParams P0{0.5, 2.0, 1.0, Scale::F, Weight::exponential(0.5)};
    SpaceParams P1{-0.5, 1.0, 2.0, Scale::F, Weight::power(-0.5)};
    const double theta = 0.3;
    const auto ie = interpolate_params(P0, P1, theta);
    REQUIRE(ie.p / P0.p - ie.q / P0.q < 0.0);

    InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
    for (std::uint64_t i = 0; i < 10; ++i) {
        Sequence seq = generate_instance(43, i, shape);
        if (seq.support_size() == 0) continue;
        Factorization F = f_factorize(seq, P0, P1, theta);
        CHECK(F.theta == theta);
        CHECK(F.space0.s == P0.s);  // outputs relabeled back
        CHECK(F.metrics.recon_max_rel_err < 1e-12);
        CHECK(F.metrics.achieved_constant >= 1.0 - 1e-10);
    }
}

TEST_CASE("f_factorize: the three sup branches") {
    Window win(1, 4, 1);
    InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
    const Weight w0 = Weight::power(0.5);
    const Weight w1 = Weight::constant(1.0);

    SUBCASE("q0 = inf > q1") {
        SpaceParams P0{0.0, 1.0, kInf, Scale::F, w0};
        SpaceParams P1{1.0, 2.0, 2.0, Scale::F, w1};
        for (std::uint64_t i = 0; i < 10; ++i) {
            Sequence seq = generate_instance(53, i, shape);
            if (seq.support_size() == 0) continue;
            Factorization F = f_factorize(seq, P0, P1, 0.5);
            CHECK(F.metrics.recon_max_rel_err < 1e-12);
            // part0 is masked to the support
            CHECK(F.part0.support_size() == F.source.support_size());
            CHECK(F.metrics.achieved_constant >= 1.0 - 1e-10);
        }
    }
    SUBCASE("q1 = inf > q0 (swapped internally)") {
        SpaceParams P0{1.0, 2.0, 2.0, Scale::F, w1};
        SpaceParams P1{0.0, 1.0, kInf, Scale::F, w0};
        Sequence seq = generate_instance(59, 0, shape);
        Factorization F = f_factorize(seq, P0, P1, 0.4);
        CHECK(F.metrics.recon_max_rel_err < 1e-12);
        CHECK(F.space1.q == kInf);
        CHECK(F.metrics.achieved_constant >= 1.0 - 1e-10);
    }
    SUBCASE("q0 = q1 = inf") {
        SpaceParams P0{0.0, 1.0, kInf, Scale::F, w1};
        SpaceParams P1{1.0, 2.0, kInf, Scale::F, w1};
        const double p = interpolate_exponent(1.0, 2.0, 0.5);
        for (std::uint64_t i = 0; i < 100; ++i) {
            Sequence seq = generate_instance(61, i, shape);
            if (seq.support_size() == 0) continue;
            Factorization F = f_factorize(seq, P0, P1, 0.5);
            CHECK(F.metrics.recon_max_rel_err < 1e-12);
            // double-sup branch: ||part0|| is controlled by ||seq||^{p/p0}
            const double lhs = F.metrics.norm0;
            const double rhs = std::pow(F.metrics.norm_target, p / 1.0);
            CHECK(lhs <= 16.0 * rhs);
        }
    }
}

TEST_CASE("f_factorize: degenerate exponent with distinct weights is refused") {
    Window win(1, 3, 1);
    // p0/q0 == p1/q1 forces gamma = 0; distinct weights have no pointwise form.
    SpaceParams P0{0.0, 2.0, 2.0, Scale::F, Weight::power(0.5)};
    SpaceParams P1{1.0, 1.0, 1.0, Scale::F, Weight::constant(1.0)};
    Sequence seq(win);
    seq.set(make_index(1, {0}), 1.0);
    CHECK_THROWS_AS(f_factorize(seq, P0, P1, 0.5), std::domain_error);

    // but with equal weights the pointwise formula applies
    SpaceParams P1e{1.0, 1.0, 1.0, Scale::F, Weight::power(0.5)};
    Factorization F = f_factorize(seq, P0, P1e, 0.5);
    CHECK(F.metrics.recon_max_rel_err < 1e-13);

    // the double-sup branch degenerates the same way when p0 = p1
    SpaceParams S0{0.0, 2.0, kInf, Scale::F, Weight::power(0.5)};
    SpaceParams S1{1.0, 2.0, kInf, Scale::F, Weight::constant(1.0)};
    CHECK_THROWS_AS(f_factorize(seq, S0, S1, 0.5), std::domain_error);
    SpaceParams S1e{1.0, 2.0, kInf, Scale::F, Weight::power(0.5)};
    Factorization G = f_factorize(seq, S0, S1e, 0.5);
    CHECK(G.metrics.recon_max_rel_err < 1e-13);
    CHECK(G.metrics.achieved_constant >= 1.0 - 1e-10);
}

TEST_CASE("b_factorize: collapse, one-term closed form, exact optimality") {
    Window win(1, 4, 1);
    const YTable vols = y_volumes(win);

    SUBCASE("all exponents equal collapse to the identity") {
        InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
        Sequence seq = generate_instance(67, 0, shape);
        Factorization F = b_factorize(seq, 0.5, 1.5, 2.5, 0.5, 1.5, 2.5, 0.3, vols, vols);
        for (const auto& [idx, v] : F.part0.entries) CHECK(std::abs(v - std::abs(seq.at(idx))) < 1e-12);
        for (const auto& [idx, v] : F.part1.entries) CHECK(std::abs(v - std::abs(seq.at(idx))) < 1e-12);
        CHECK(F.metrics.achieved_constant == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("single entry: both identities in closed form") {
        Sequence seq(win);
        const DyadicIndex idx = make_index(2, {1});
        seq.set(idx, 0.8);
        YTable y0;
        y0.window = win;
        y0.set(idx, 3.0);
        YTable y1;
        y1.window = win;
        y1.set(idx, 0.25);
        const double s0 = 0.0, p0 = 1.0, q0 = 1.0, s1 = 1.0, p1 = 2.0, q1 = 2.0, theta = 0.5;
        Factorization F = b_factorize(seq, s0, p0, q0, s1, p1, q1, theta, y0, y1);
        const double p = 4.0 / 3.0, s = 0.5;
        const double y = std::pow(3.0, (1.0 - theta) * p / p0) * std::pow(0.25, theta * p / p1);
        const double m = std::pow(std::exp2(2.0 * s * p) * std::pow(0.8, p) * y, 1.0 / p);
        const double expect0 = std::pow(std::exp2(2.0 * s) * 0.8, p / p0) * std::pow(y / 3.0, 1.0 / p0) *
                               std::pow(m, 4.0 / 3.0 / q0 - p / p0);
        CHECK(std::abs(F.part0.at(idx)) == doctest::Approx(expect0).epsilon(1e-12));
        CHECK(F.metrics.recon_max_rel_err < 1e-13);
        CHECK(F.metrics.achieved_constant == doctest::Approx(1.0).epsilon(1e-11));
    }

    SUBCASE("random tables at the worked parameter pair") {
        InstanceShape shape{win, 0, -1, 0.5, -1, false, true};
        for (std::uint64_t i = 0; i < 20; ++i) {
            Sequence seq = generate_instance(71, i, shape);
            if (seq.support_size() == 0) continue;
            YTable y0 = generate_y_table(71, 2 * i, win);
            YTable y1 = generate_y_table(71, 2 * i + 1, win);
            Factorization F = b_factorize(seq, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 0.5, y0, y1);
            CHECK(F.metrics.recon_max_rel_err < 1e-12);
            CHECK(F.metrics.achieved_constant == doctest::Approx(1.0).epsilon(1e-9));
            FactorizationReport rep = verify_factorization(F, 1e-9);
            CHECK(rep.reconstruction_ok);
            CHECK(rep.holder_ok);
        }
    }

    SUBCASE("sup branches stay exact") {
        InstanceShape shape{win, 0, -1, 0.4, -1, false, true};
        Rng rng(73);
        for (std::uint64_t i = 0; i < 40; ++i) {
            Sequence seq = generate_instance(79, i, shape);
            if (seq.support_size() == 0) continue;
            YTable y0 = generate_y_table(79, 2 * i, win);
            YTable y1 = generate_y_table(79, 2 * i + 1, win);
            double p0 = rng.uniform(0.5, 3.0), p1 = rng.uniform(0.5, 3.0);
            double q0 = rng.uniform(0.5, 3.0), q1 = rng.uniform(0.5, 3.0);
            switch (i % 4) {
                case 0: q0 = kInf; break;
                case 1: p0 = kInf; break;
                case 2: p0 = p1 = kInf; break;
                default: q0 = q1 = kInf; break;
            }
            Factorization F = b_factorize(seq, rng.uniform(-1.0, 1.0), p0, q0, rng.uniform(-1.0, 1.0), p1,
                                          q1, rng.uniform(0.2, 0.8), y0, y1);
            CHECK(F.metrics.recon_max_rel_err < 1e-12);
            CHECK(F.metrics.achieved_constant == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("oracle: degenerate couple, L_p cross-check, B-scale cross-check") {
    Window win(1, 3, 1);

    SUBCASE("identical spaces: optimum at unit ratios") {
        SpaceParams P{0.3, 1.5, 2.0, Scale::F, Weight::power(0.5)};
        InstanceShape shape{win, 0, -1, 1.0, 5, false, true};
        Sequence seq = generate_instance(83, 0, shape);
        OracleResult res = oracle_calderon_norm(seq, P, P, 0.4, 1e-8);
        CHECK(res.value == doctest::Approx(f_norm(seq, P)).epsilon(1e-6));
        for (double r : res.ratios) CHECK(std::log(r) == doctest::Approx(0.0).epsilon(1e-3));
    }

    SUBCASE("level-0 B instance matches lp_factorize") {
        // J = 0 so that cubes and finest cells coincide: the sequence-level
        // problem with s = 0, q = 1 is then exactly the weighted L_p one.
        Window flat(1, 0, 2);
        const Weight w0 = Weight::power(0.5);
        const Weight w1 = Weight::constant(2.0);
        Sequence seq(flat);
        seq.set(make_index(0, {-1}), 0.7);
        seq.set(make_index(0, {0}), 2.2);
        seq.set(make_index(0, {1}), 0.1);
        const double theta = 0.35, p0 = 1.0, p1 = 2.5;
        SpaceParams B0{0.0, p0, 1.0, Scale::B, w0};
        SpaceParams B1{0.0, p1, 1.0, Scale::B, w1};
        OracleResult res = oracle_calderon_norm(seq, B0, B1, theta, 1e-9);

        CellFunction f = CellFunction::constant(flat, 0.0);
        for (const auto& [idx, v] : seq.entries)
            f.values[static_cast<size_t>(flat.finest_ordinal(idx))] = std::abs(v);
        LpFactorization lf = lp_factorize(f, w0, w1, theta, p0, p1);
        const double product = std::pow(lf.norm0, 1.0 - theta) * std::pow(lf.norm1, theta);
        CHECK(res.value == doctest::Approx(product).epsilon(2e-6));
    }

    SUBCASE("random B instances match the exact-optimal construction") {
        InstanceShape shape{win, 0, -1, 1.0, 5, false, true};
        const Weight w0 = Weight::power(0.5);
        const Weight w1 = Weight::exponential(0.4);
        const YTable y0 = y_from_weight(w0, win);
        const YTable y1 = y_from_weight(w1, win);
        for (std::uint64_t i = 0; i < 5; ++i) {
            Sequence seq = generate_instance(89, i, shape);
            if (seq.support_size() == 0) continue;
            const double theta = 0.5;
            Factorization F = b_factorize(seq, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, theta, y0, y1);
            SpaceParams B0{0.0, 1.0, 1.0, Scale::B, w0};
            SpaceParams B1{1.0, 2.0, 2.0, Scale::B, w1};
            OracleResult res = oracle_calderon_norm(seq, B0, B1, theta, 1e-9);
            const double product = std::pow(F.metrics.norm0, 1.0 - theta) * std::pow(F.metrics.norm1, theta);
            CHECK(res.value == doctest::Approx(product).epsilon(2e-6));
        }
    }

    SUBCASE("support cap enforced") {
        InstanceShape shape{win, 0, -1, 1.0, -1, false, true};
        Sequence seq = generate_instance(97, 0, shape);
        REQUIRE(seq.support_size() > 8);
        SpaceParams P{0.0, 2.0, 2.0, Scale::F, Weight::constant(1.0)};
        CHECK_THROWS_AS(oracle_calderon_norm(seq, P, P, 0.5), std::invalid_argument);
    }
}

TEST_CASE("factorizations work in two dimensions") {
    Window win(2, 2, 1);
    InstanceShape shape{win, 0, -1, 0.3, -1, false, true};
    SpaceParams P0{0.0, 1.0, 4.0, Scale::F, Weight::power(0.5)};
    SpaceParams P1{1.0, 2.0, 2.0, Scale::F, Weight::constant(1.0)};
    for (std::uint64_t i = 0; i < 5; ++i) {
        Sequence seq = generate_instance(113, i, shape);
        if (seq.support_size() == 0) continue;
        Factorization F = f_factorize(seq, P0, P1, 0.5);
        CHECK(F.metrics.recon_max_rel_err < 1e-12);
        CHECK(F.metrics.unassigned_support == 0);
        CHECK(F.metrics.achieved_constant >= 1.0 - 1e-10);

        YTable y0 = generate_y_table(113, 2 * i, win);
        YTable y1 = generate_y_table(113, 2 * i + 1, win);
        Factorization G = b_factorize(seq, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 0.5, y0, y1);
        CHECK(G.metrics.achieved_constant == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("complex coefficients factor through their moduli") {
    Window win(1, 3, 1);
    InstanceShape shape{win, 0, -1, 0.5, -1, true, true};  // random phases
    SpaceParams P0{0.0, 1.0, 4.0, Scale::F, Weight::power(0.5)};
    SpaceParams P1{1.0, 2.0, 2.0, Scale::F, Weight::constant(1.0)};
    Sequence seq = generate_instance(127, 0, shape);
    Factorization F = f_factorize(seq, P0, P1, 0.5);
    CHECK(F.metrics.recon_max_rel_err < 1e-12);
    for (const auto& [idx, v] : F.part0.entries) {
        CHECK(v.imag() == 0.0);
        CHECK(v.real() > 0.0);
    }
    // the factorization of |seq| coincides with that of seq
    Factorization G = f_factorize(seq.abs(), P0, P1, 0.5);
    CHECK(G.part0.entries == F.part0.entries);
}

TEST_CASE("verify_factorization flags corrupted parts") {
    Window win(1, 3, 1);
    InstanceShape shape{win, 0, -1, 0.6, -1, false, true};
    Sequence seq = generate_instance(101, 0, shape);
    YTable y0 = generate_y_table(101, 0, win);
    YTable y1 = generate_y_table(101, 1, win);
    Factorization F = b_factorize(seq, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 0.5, y0, y1);
    REQUIRE(verify_factorization(F, 1e-9).reconstruction_ok);

    Factorization bad = F;
    bad.part0.entries.begin()->second *= 1.05;
    CHECK_FALSE(verify_factorization(bad, 1e-9).reconstruction_ok);
}

TEST_CASE("factorization text export carries the fixed field names") {
    Window win(1, 2, 1);
    Sequence seq(win);
    seq.set(make_index(1, {0}), 1.5);
    YTable y0 = y_volumes(win), y1 = y_volumes(win);
    Factorization F = b_factorize(seq, 0.0, 1.0, 1.0, 0.5, 2.0, 2.0, 0.5, y0, y1);
    std::stringstream ss;
    write_factorization(ss, F);
    const std::string text = ss.str();
    for (const char* field : {"theta", "p0", "q0", "s0", "p1", "q1", "s1", "norm0", "norm1", "norm_target",
                              "achieved_constant", "recon_err", "sequence0", "sequence1"})
        CHECK(text.find(field) != std::string::npos);
}
