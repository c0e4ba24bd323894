#include "doctest.h"

#include "shp/market.hpp"
#include "shp/polyhedron.hpp"
#include "shp/solvency.hpp"
#include "shp/superhedge.hpp"

using namespace shp;

namespace {

PriceTree one_period_tree() {
    PriceTree t;
    t.d = 2;
    t.m = 1;
    t.periods = 1;
    t.branch = 2;
    t.horizon = 1;
    t.times = {Rat(0), Rat(1)};
    t.child_prob = Rat(1, 2);
    t.prices_rat = {{{Rat(1), Rat(1)}},
                    {{Rat(1), Rat(1, 2)}, {Rat(1), Rat(3, 2)}}};
    t.prices.resize(2);
    for (int l = 0; l < 2; ++l)
        for (auto& row : t.prices_rat[l]) {
            std::vector<double> f;
            for (auto& q : row) f.push_back(rat_to_double(q));
            t.prices[l].push_back(f);
        }
    t.path_prob = {{Rat(1)}, {Rat(1, 2), Rat(1, 2)}};
    return t;
}

SolvencyCone flat_cone() {
    return build_cone(
        exchange_from_mu(RatMat{{Rat(0), Rat(1, 10)}, {Rat(1, 10), Rat(0)}}));
}

MarketModel two_asset_market(const Rat& b, const Rat& sig) {
    MarketModel m;
    m.d = 2;
    m.m = 1;
    m.s0 = {Rat(1), Rat(1)};
    m.horizon = 1;
    m.cuts = {Rat(1)};
    m.r_seg = {Rat(0)};
    m.b_seg = {{b}};
    m.sigma_seg = {{{sig}}};
    return m;
}

Claim unit_call() {
    Claim c;
    c.kind = ClaimKind::vanilla_call;
    c.call_asset = 2;
    c.strike = 1;
    return c;
}

} // namespace

TEST_CASE("one-period constant claim shifts the root cone") {
    SolvencyCone sc = flat_cone();
    PriceTree t1 = one_period_tree();
    RatMat pay = {{Rat(1), Rat(0)}, {Rat(1), Rat(0)}};
    SuperhedgeResult res = backward_sets(t1, sc, pay);
    Polyhedron want =
        translate(physical_cone(sc, {Rat(1), Rat(1)}), {Rat(1), Rat(0)});
    CHECK(set_equal(res.sets[0][0], want));
    CHECK(res.leaf_payoffs == pay);
}

TEST_CASE("one-period call has the computed root vertex") {
    SolvencyCone sc = flat_cone();
    PriceTree t1 = one_period_tree();
    RatMat pay = tree_leaf_payoffs(t1, unit_call());
    CHECK(pay[0] == RatVec{Rat(0), Rat(0)});        // out of the money
    CHECK(pay[1] == RatVec{Rat(1, 2), Rat(0)});     // intrinsic value
    SuperhedgeResult res = backward_sets(t1, sc, pay);
    Polyhedron want = translate(physical_cone(sc, {Rat(1), Rat(1)}),
                                {Rat(-1, 4), Rat(5, 9)});
    CHECK(set_equal(res.sets[0][0], want));

    SUBCASE("root set is an upper set stable under its cone") {
        Polyhedron orth =
            Polyhedron::cone_from_rays(2, {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
        CHECK(set_equal(minkowski_sum(res.sets[0][0], orth), res.sets[0][0]));
        CHECK(set_equal(minkowski_sum(res.sets[0][0], res.cones[0][0]),
                        res.sets[0][0]));
    }
    SUBCASE("the point oracle agrees around the vertex") {
        SuperhedgeOracle oracle(t1, sc, pay);
        CHECK(oracle.contains({Rat(-1, 4), Rat(5, 9)}));
        CHECK_FALSE(oracle.contains(
            {Rat(-1, 4) - Rat(1, 100), Rat(5, 9) - Rat(1, 100)}));
        CHECK(oracle.contains({Rat(1), Rat(1)}));
        CHECK_FALSE(oracle.contains({Rat(0), Rat(0)}));
    }
    SUBCASE("exact members pass the relaxed test at every level") {
        RatVec vert = {Rat(-1, 4), Rat(5, 9)};
        for (Rat e : {Rat(1, 20), Rat(1, 10), Rat(1, 5), Rat(2, 5)}) {
            CAPTURE(rat_to_string(e));
            CHECK(eps_membership_tree(t1, sc, pay, Rat(1), vert, e));
        }
        // (0,0) fails while every leaf must be covered, passes once the
        // relaxation budget lets one of the two leaves drop
        CHECK_FALSE(
            eps_membership_tree(t1, sc, pay, Rat(1), {Rat(0), Rat(0)}, Rat(1, 20)));
        CHECK(eps_membership_tree(t1, sc, pay, Rat(1), {Rat(0), Rat(0)}, Rat(3, 5)));
    }
    SUBCASE("sampled relaxed membership matches") {
        EpsMcReport mc =
            eps_membership_mc(t1, sc, pay, Rat(1), {Rat(-1, 4), Rat(5, 9)},
                              Rat(1, 10), 2000, 7);
        CHECK(mc.accepted);
        CHECK(mc.success_prob == 1.0);
        EpsMcReport far = eps_membership_mc(t1, sc, pay, Rat(1),
                                            {Rat(-5, 4), Rat(-5, 9)},
                                            Rat(1, 100), 2000, 7);
        CHECK_FALSE(far.accepted);
        CHECK(far.success_prob < 1.0);
    }
}

TEST_CASE("the zero claim is hedged by the zero portfolio") {
    SolvencyCone sc = flat_cone();
    PriceTree t1 = one_period_tree();
    RatMat pay = {{Rat(0), Rat(0)}, {Rat(0), Rat(0)}};
    SuperhedgeResult res = backward_sets(t1, sc, pay);
    CHECK(res.sets[0][0].contains_point({Rat(0), Rat(0)}));
    SuperhedgeOracle oracle(t1, sc, pay);
    CHECK(oracle.contains({Rat(0), Rat(0)}));
}

TEST_CASE("two-period recursion satisfies the intermediate-step identity") {
    SolvencyCone sc = flat_cone();
    PriceTree t2 = build_tree(two_asset_market(Rat(1, 20), Rat(1, 2)), 2);
    RatMat pay = tree_leaf_payoffs(t2, unit_call());
    SuperhedgeResult res = backward_sets(t2, sc, pay);
    CHECK(dpp_check(t2, res, 1));

    SUBCASE("translating one intermediate set breaks the identity") {
        std::vector<Polyhedron> mut = res.sets[1];
        mut[0] = translate(mut[0], {Rat(100), Rat(0)});
        CHECK_FALSE(dpp_check_with_terminal(t2, res, 1, mut));
    }
    SUBCASE("adjoining a ray outside the recession cone breaks the identity") {
        std::vector<Polyhedron> mut = res.sets[1];
        Polyhedron bad_ray = Polyhedron::cone_from_rays(2, {{Rat(0), Rat(-1)}});
        mut[0] = minkowski_sum(mut[0], bad_ray);
        CHECK_FALSE(dpp_check_with_terminal(t2, res, 1, mut));
    }
    SUBCASE("oracle and recursion agree on a grid and near vertices") {
        SuperhedgeOracle oracle(t2, sc, pay);
        const Polyhedron& root = res.sets[0][0];
        for (const auto& v : root.v().vertices) {
            CHECK(oracle.contains(v));
            RatVec below = v, above = v;
            for (auto& q : below) q -= Rat(1, 50);
            for (auto& q : above) q += Rat(1, 50);
            CHECK_FALSE(oracle.contains(below));
            CHECK(oracle.contains(above));
        }
        for (int i = -3; i <= 3; ++i)
            for (int j = -3; j <= 3; ++j) {
                RatVec p = {Rat(i, 2), Rat(j, 2)};
                CAPTURE(i);
                CAPTURE(j);
                CHECK(root.contains_point(p) == oracle.contains(p));
            }
    }
}

TEST_CASE("level guards on the intermediate-step identity") {
    SolvencyCone sc = flat_cone();
    PriceTree t2 = build_tree(two_asset_market(Rat(1, 20), Rat(1, 2)), 2);
    RatMat pay = tree_leaf_payoffs(t2, unit_call());
    SuperhedgeResult res = backward_sets(t2, sc, pay);
    CHECK_THROWS_AS(dpp_check(t2, res, 0), Error);
    CHECK_THROWS_AS(dpp_check(t2, res, 2), Error);
}

TEST_CASE("payoff grids must match the tree") {
    SolvencyCone sc = flat_cone();
    PriceTree t1 = one_period_tree();
    RatMat short_pay = {{Rat(0), Rat(0)}};
    CHECK_THROWS_AS(backward_sets(t1, sc, short_pay), Error);
    RatMat ragged = {{Rat(0), Rat(0)}, {Rat(0)}};
    CHECK_THROWS_AS(backward_sets(t1, sc, ragged), Error);
}

TEST_CASE("resource budgets bound the exact recursion") {
    SUBCASE("more than three assets are refused") {
        RatMat mu(4, RatVec(4, Rat(1, 10)));
        for (int i = 0; i < 4; ++i) mu[i][i] = 0;
        SolvencyCone sc4 = build_cone(exchange_from_mu(mu));
        MarketModel m;
        m.d = 4;
        m.m = 3;
        m.s0 = {Rat(1), Rat(1), Rat(1), Rat(1)};
        m.horizon = 1;
        m.cuts = {Rat(1)};
        m.r_seg = {Rat(0)};
        m.b_seg = {{Rat(0), Rat(0), Rat(0)}};
        m.sigma_seg = {{{Rat(1, 5), Rat(0), Rat(0)},
                        {Rat(0), Rat(1, 5), Rat(0)},
                        {Rat(0), Rat(0), Rat(1, 5)}}};
        PriceTree t = build_tree(m, 1);
        RatMat pay(t.nodes_at(1), RatVec(4, Rat(0)));
        try {
            backward_sets(t, sc4, pay);
            FAIL("expected rejection");
        } catch (const Error& e) {
            CHECK(e.kind() == "UnsupportedDimension");
        }
    }
    SUBCASE("more than one thousand nodes are refused") {
        SolvencyCone sc = flat_cone();
        PriceTree t = build_tree(two_asset_market(Rat(0), Rat(1, 5)), 10);
        RatMat pay(t.nodes_at(10), RatVec(2, Rat(0)));
        try {
            backward_sets(t, sc, pay);
            FAIL("expected rejection");
        } catch (const Error& e) {
            CHECK(e.kind() == "BudgetExceeded");
        }
    }
}

TEST_CASE("relaxed membership validates its inputs") {
    SolvencyCone sc = flat_cone();
    PriceTree t1 = one_period_tree();
    RatMat pay = tree_leaf_payoffs(t1, unit_call());
    CHECK_THROWS_AS(
        eps_membership_tree(t1, sc, pay, Rat(1), {Rat(0), Rat(0)}, Rat(0)), Error);
    CHECK_THROWS_AS(
        eps_membership_tree(t1, sc, pay, Rat(1), {Rat(0), Rat(0)}, Rat(2)), Error);
    CHECK_THROWS_AS(
        eps_membership_tree(t1, sc, pay, Rat(1, 2), {Rat(0), Rat(0)}, Rat(1, 10)),
        Error);   // growth constant below one
    CHECK_THROWS_AS(
        eps_membership_tree(t1, sc, pay, Rat(1), {Rat(0)}, Rat(1, 10)), Error);
    CHECK_THROWS_AS(eps_membership_mc(t1, sc, pay, Rat(1), {Rat(0), Rat(0)},
                                      Rat(1, 10), 0, 7),
                    Error);
}

TEST_CASE("tail-event concentration on the eight-leaf tree") {
    PriceTree t3 = build_tree(two_asset_market(Rat(0), Rat(1, 2)), 3);
    REQUIRE(t3.nodes_at(3) == 8);
    CHECK(concentration_check(t3, {}, Rat(1, 8), 1));
    for (int u : {0, 1, 2, 3}) {
        CAPTURE(u);
        CHECK(concentration_check(t3, {0}, Rat(1, 8), u));
    }
    SUBCASE("events larger than the bound are rejected") {
        try {
            concentration_check(t3, {0, 1, 2}, Rat(1, 8), 1);
            FAIL("expected rejection");
        } catch (const Error& e) {
            CHECK(e.kind() == "BadEvent");
        }
    }
    SUBCASE("event indices must be valid and distinct") {
        CHECK_THROWS_AS(concentration_check(t3, {99}, Rat(1, 2), 1), Error);
        CHECK_THROWS_AS(concentration_check(t3, {0, 0}, Rat(1, 2), 1), Error);
        CHECK_THROWS_AS(concentration_check(t3, {0}, Rat(1, 8), 4), Error);
        CHECK_THROWS_AS(concentration_check(t3, {0}, Rat(2), 1), Error);
    }
}
