#include "doctest.h"

#include "shp/portfolio.hpp"

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

// restrict a simulated path set to a coarser dyadic grid, summing the
// driver increments so both grids describe the same Brownian path
PathSet coarsen(const PathSet& fine, int factor) {
    PathSet out;
    out.d = fine.d;
    out.n_steps = fine.n_steps / factor;
    for (int k = 0; k <= out.n_steps; ++k) out.grid.push_back(fine.grid[k * factor]);
    out.s.resize(fine.s.size());
    out.dw.resize(fine.s.size());
    for (size_t p = 0; p < fine.s.size(); ++p) {
        for (int k = 0; k <= out.n_steps; ++k)
            out.s[p].push_back(fine.s[p][k * factor]);
        for (int k = 0; k < out.n_steps; ++k) {
            std::vector<double> acc(fine.dw[p][0].size(), 0.0);
            for (int j = 0; j < factor; ++j)
                for (size_t l = 0; l < acc.size(); ++l)
                    acc[l] += fine.dw[p][k * factor + j][l];
            out.dw[p].push_back(std::move(acc));
        }
    }
    return out;
}

ExchangeMatrix ref_exchange() {
    return exchange_from_mu(RatMat{{Rat(0), Rat(1, 10)}, {Rat(1, 10), Rat(0)}});
}

} // namespace

TEST_CASE("transfer-matrix strategies map to cone increments") {
    ExchangeMatrix ex = ref_exchange();
    ThetaStrategy th;
    th.steps = {RatMat{{Rat(0), Rat(1)}, {Rat(0), Rat(0)}},
                RatMat{{Rat(0), Rat(1)}, {Rat(1), Rat(0)}},
                RatMat{{Rat(0), Rat(0)}, {Rat(0), Rat(0)}}};
    KStrategy k = theta_to_k(ex, th);
    REQUIRE(k.steps.size() == 3);
    CHECK(k.steps[0] == RatVec{Rat(11, 10), Rat(-1)});
    // a unit round trip burns the two-way cost and nothing else
    CHECK(k.steps[1] == RatVec{Rat(1, 5), Rat(0)});
    CHECK(k.steps[2] == RatVec{Rat(0), Rat(0)});
    CHECK_NOTHROW(validate_theta(th, 2));
    ThetaStrategy bad;
    bad.steps = {RatMat{{Rat(0), Rat(-1)}, {Rat(0), Rat(0)}}};
    CHECK_THROWS_AS(validate_theta(bad, 2), Error);
}

TEST_CASE("cone increments map back to minimal transfers") {
    ExchangeMatrix ex = ref_exchange();
    ThetaStrategy th;
    th.steps = {RatMat{{Rat(0), Rat(1)}, {Rat(0), Rat(0)}},
                RatMat{{Rat(0), Rat(1)}, {Rat(1), Rat(0)}},
                RatMat{{Rat(0), Rat(0)}, {Rat(0), Rat(0)}}};
    KStrategy k = theta_to_k(ex, th);
    ThetaStrategy th2 = k_to_theta(ex, k);
    // the pure transfer is recovered and the round trip is not reintroduced
    CHECK(th2.steps[0][0][1] == Rat(1));
    CHECK(th2.steps[0][1][0] == Rat(0));
    CHECK(th2.steps[2][0][1] == Rat(0));
    CHECK(th2.steps[2][1][0] == Rat(0));
    KStrategy k2 = theta_to_k(ex, th2);
    for (int i = 0; i < 3; ++i) CHECK(k2.steps[i] == k.steps[i]);
}

TEST_CASE("a diverted burn round-trips exactly") {
    ExchangeMatrix ex = ref_exchange();
    KStrategy ke;
    ke.steps = {RatVec{Rat(1, 5), Rat(0)}};
    ThetaStrategy th = k_to_theta(ex, ke);
    KStrategy kb = theta_to_k(ex, th);
    CHECK(kb.steps[0] == ke.steps[0]);
}

TEST_CASE("increments outside the cone are rejected") {
    ExchangeMatrix ex = ref_exchange();
    KStrategy kb;
    kb.steps = {RatVec{Rat(-1), Rat(0)}};
    try {
        k_to_theta(ex, kb);
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.kind() == "NotInCone");
    }
}

TEST_CASE("steady consumption drains value linearly") {
    MarketModel m0 = simple2(Rat(0), Rat(0), Rat(0), Rat(1));
    PathSet p0 = simulate_paths(m0, 1, 8, 3);
    KhatPath kh;
    kh.steps.assign(8, {1.0, 0.0});
    ValuePaths vp = simulate_value(m0, p0, 0, kh, {5.0, 2.0});
    CHECK(vp.vhat[8][0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(vp.vhat[8][1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(vp.v_stepped[8][0] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("no trading means buy and hold") {
    MarketModel m0 = simple2(Rat(0), Rat(0), Rat(0), Rat(1));
    PathSet p0 = simulate_paths(m0, 1, 8, 3);
    KhatPath kz;
    kz.steps.assign(8, {0.0, 0.0});
    ValuePaths vz = simulate_value(m0, p0, 0, kz, {5.0, 2.0});
    for (int k = 0; k <= 8; ++k) CHECK(vz.vhat[k] == vz.vhat[0]);
}

TEST_CASE("stepped valuation converges with order at least 0.9") {
    MarketModel mv = simple2(Rat(1, 20), Rat(1, 10), Rat(1, 4), Rat(1));
    PathSet fine = simulate_paths(mv, 1, 128, 99);
    std::vector<double> errs;
    for (int n : {8, 16, 32, 64, 128}) {
        PathSet ps = coarsen(fine, 128 / n);
        KStrategy ks;
        for (int i = 0; i < n; ++i)
            ks.steps.push_back(RatVec{Rat(11, 10), Rat(-1)});
        KhatPath khs = khat_on_path(ks, ps, 0);
        ValuePaths v = simulate_value(mv, ps, 0, khs, {3.0, 1.0});
        double e = 0;
        for (int k = 0; k <= n; ++k)
            for (int c = 0; c < 2; ++c)
                e = std::max(e, std::fabs(v.v_direct[k][c] - v.v_stepped[k][c]));
        errs.push_back(e);
    }
    double order = 0;
    for (size_t i = 1; i < errs.size(); ++i)
        order += std::log2(errs[i - 1] / errs[i]);
    order /= static_cast<double>(errs.size() - 1);
    CHECK(order >= 0.9);
    // error shrinks monotonically across the refinements
    for (size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] < errs[i - 1]);
}
