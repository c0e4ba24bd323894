#include "doctest.h"

#include "shp/market.hpp"
#include "shp/errors.hpp"

#include <algorithm>
#include <cmath>

using namespace shp;

namespace {

MarketModel simple2(const Rat& r, const Rat& b, const Rat& sig, const Rat& T) {
    MarketModel m;
    m.d = 2;
    m.m = 1;
    m.s0 = {Rat(1), Rat(1)};
    m.horizon = T;
    m.cuts = {T};
    m.r_seg = {r};
    m.b_seg = {{b}};
    m.sigma_seg = {{{sig}}};
    return m;
}

} // namespace

TEST_CASE("model validation rejects malformed inputs") {
    MarketModel good = simple2(Rat(1, 20), Rat(1, 20), Rat(1, 5), Rat(1));
    CHECK_NOTHROW(validate_model(good));

    MarketModel bad = good;
    bad.s0 = {Rat(2), Rat(1)};
    CHECK_THROWS_AS(validate_model(bad), Error);   // numeraire must start at one

    bad = good;
    bad.s0 = {Rat(1), Rat(0)};
    CHECK_THROWS_AS(validate_model(bad), Error);   // strictly positive prices

    bad = good;
    bad.horizon = Rat(0);
    CHECK_THROWS_AS(validate_model(bad), Error);

    bad = good;
    bad.cuts = {Rat(1, 2)};
    CHECK_THROWS_AS(validate_model(bad), Error);   // grid must end at the horizon

    bad = good;
    bad.d = 1;
    bad.m = 0;
    CHECK_THROWS_AS(validate_model(bad), Error);
}

TEST_CASE("zero volatility reproduces the exponential exactly") {
    MarketModel m0 = simple2(Rat(1, 20), Rat(1, 20), Rat(0), Rat(1));
    PathSet p0 = simulate_paths(m0, 3, 4, 7);
    double want = std::exp(0.05);
    for (int p = 0; p < 3; ++p) {
        CHECK(p0.s[p][4][0] == doctest::Approx(want).epsilon(1e-14));
        CHECK(p0.s[p][4][1] == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("simulated terminal mean matches the lognormal moment") {
    MarketModel m1 = simple2(Rat(0), Rat(0), Rat(1, 5), Rat(1));
    const int n = 100000;
    PathSet p1 = simulate_paths(m1, n, 8, 12345);
    double mean = 0;
    for (int p = 0; p < n; ++p) mean += p1.s[p][8][1];
    mean /= n;
    double var = std::exp(0.04) - 1.0;
    double se = std::sqrt(var / n);
    CHECK(std::fabs(mean - 1.0) <= 4 * se);
}

TEST_CASE("path simulation is deterministic in the seed") {
    MarketModel m1 = simple2(Rat(0), Rat(0), Rat(1, 5), Rat(1));
    PathSet a = simulate_paths(m1, 10, 8, 12345);
    PathSet b = simulate_paths(m1, 10, 8, 12345);
    for (int p = 0; p < 10; ++p)
        for (int k = 0; k <= 8; ++k)
            for (int c = 0; c < 2; ++c) CHECK(a.s[p][k][c] == b.s[p][k][c]);
    PathSet c = simulate_paths(m1, 10, 8, 54321);
    bool differs = false;
    for (int p = 0; p < 10 && !differs; ++p)
        if (a.s[p][8][1] != c.s[p][8][1]) differs = true;
    CHECK(differs);
}

TEST_CASE("binary tree shape and probabilities") {
    MarketModel m1 = simple2(Rat(0), Rat(0), Rat(1, 5), Rat(1));
    PriceTree t = build_tree(m1, 3);
    int total = 0;
    for (int l = 0; l <= 3; ++l) total += t.nodes_at(l);
    CHECK(total == 15);
    CHECK(t.nodes_at(3) == 8);
    CHECK(t.branch == 2);
    CHECK(t.child_prob == Rat(1, 2));
    CHECK(t.path_prob[3][0] == Rat(1, 8));
    CHECK(t.parent_of(5) == 2);
    CHECK(t.child_of(2, 1) == 5);
}

TEST_CASE("one-step branch factors match the closed form") {
    MarketModel m1 = simple2(Rat(0), Rat(0), Rat(1, 5), Rat(1));
    PriceTree t1 = build_tree(m1, 1);
    double dn = std::exp(-0.02 - 0.2);   // drift minus half-variance, minus move
    double up = std::exp(-0.02 + 0.2);
    CHECK(t1.prices[1][0][1] == doctest::Approx(dn).epsilon(1e-15));
    CHECK(t1.prices[1][1][1] == doctest::Approx(up).epsilon(1e-15));
    // snapped rational prices track the floats tightly
    for (int i = 0; i < 2; ++i) {
        CHECK(std::fabs(rat_to_double(t1.prices_rat[1][i][1]) - t1.prices[1][i][1]) <
              1e-9);
        CHECK(t1.prices_rat[1][i][0] > 0);
    }
    // branch mean of the log increment equals the drift term exactly in floats
    double mean_inc =
        0.5 * (std::log(t1.prices[1][0][1]) + std::log(t1.prices[1][1][1]));
    CHECK(mean_inc == doctest::Approx(-0.02).epsilon(1e-12));
}

TEST_CASE("zero volatility collapses siblings") {
    MarketModel m0 = simple2(Rat(1, 20), Rat(1, 20), Rat(0), Rat(1));
    PriceTree t0 = build_tree(m0, 2);
    CHECK(t0.prices[1][0] == t0.prices[1][1]);
    CHECK(t0.prices_rat[1][0] == t0.prices_rat[1][1]);
}

TEST_CASE("node budget is enforced") {
    MarketModel m1 = simple2(Rat(0), Rat(0), Rat(1, 5), Rat(1));
    try {
        build_tree(m1, 21);   // 2^22 - 1 nodes exceeds the cap
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.kind() == "BudgetExceeded");
    }
    CHECK_THROWS_AS(build_tree(m1, 0), Error);
}

TEST_CASE("claim payoffs") {
    SUBCASE("constant bundle ignores prices") {
        Claim cc;
        cc.kind = ClaimKind::constant_physical;
        cc.constant = {Rat(1), Rat(0)};
        RatVec x = claim_payoff(cc, {Rat(2), Rat(3)});
        CHECK(x == RatVec{Rat(1), Rat(0)});
        CHECK(claim_lipschitz(cc) == Rat(1));
    }
    SUBCASE("call pays intrinsic value in units of the numeraire") {
        Claim call;
        call.kind = ClaimKind::vanilla_call;
        call.call_asset = 2;
        call.strike = Rat(1);
        RatVec in = claim_payoff(call, {Rat(1), Rat(3, 2)});
        CHECK(in == RatVec{Rat(1, 2), Rat(0)});
        RatVec out = claim_payoff(call, {Rat(1), Rat(1, 2)});
        CHECK(out == RatVec{Rat(0), Rat(0)});
        CHECK(claim_lipschitz(call) == Rat(1));
    }
    SUBCASE("basket weights scale the payoff and the growth bound") {
        Claim bask;
        bask.kind = ClaimKind::linear_basket;
        bask.weights = {Rat(0), Rat(2)};
        RatVec x = claim_payoff(bask, {Rat(2), Rat(3)});
        CHECK(x[0] == Rat(3));   // weights dot discounted prices
        CHECK(claim_lipschitz(bask) == Rat(2));
    }
    SUBCASE("validation catches bad shapes") {
        Claim call;
        call.kind = ClaimKind::vanilla_call;
        call.call_asset = 3;
        call.strike = Rat(1);
        CHECK_THROWS_AS(validate_claim(call, 2), Error);
        call.call_asset = 2;
        call.strike = Rat(0);
        CHECK_THROWS_AS(validate_claim(call, 2), Error);
        Claim cc;
        cc.kind = ClaimKind::constant_physical;
        cc.constant = {Rat(1)};
        CHECK_THROWS_AS(validate_claim(cc, 2), Error);
    }
}

TEST_CASE("path export is a csv table") {
    MarketModel m0 = simple2(Rat(1, 20), Rat(1, 20), Rat(0), Rat(1));
    PathSet p0 = simulate_paths(m0, 2, 4, 7);
    std::string csv = paths_csv(p0, 0);
    CHECK(csv.find(',') != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);   // header + 5 rows
    CHECK_THROWS_AS(paths_csv(p0, 5), Error);
}

TEST_CASE("piecewise coefficients integrate segment by segment") {
    MarketModel mp = simple2(Rat(0), Rat(0), Rat(1, 5), Rat(1));
    mp.cuts = {Rat(1, 2), Rat(1)};
    mp.r_seg = {Rat(1, 10), Rat(3, 10)};
    mp.b_seg = {{Rat(0)}, {Rat(0)}};
    mp.sigma_seg = {{{Rat(1, 5)}}, {{Rat(2, 5)}}};
    CHECK(rate_integral(mp, Rat(0), Rat(1)) == Rat(1, 5));
    CHECK(rate_integral(mp, Rat(1, 4), Rat(3, 4)) == Rat(1, 10));
    CHECK(sigma_average(mp, Rat(0), Rat(1))[0][0] == Rat(3, 10));
    // integral of b - |sigma|^2/2: -(1/2)(1/50) - (1/2)(4/50) = -1/20
    CHECK(drift_integral(mp, Rat(0), Rat(1))[0] == Rat(-1, 20));
    // a single step across the cut still lands on the exact exponential
    PathSet pp = simulate_paths(mp, 2, 1, 3);
    CHECK(pp.s[0][1][0] == doctest::Approx(std::exp(0.2)).epsilon(1e-14));
    CHECK_THROWS_AS(rate_integral(mp, Rat(-1, 10), Rat(1, 2)), Error);
}
