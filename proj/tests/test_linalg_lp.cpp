#include "doctest.h"

#include "shp/linalg.hpp"
#include "shp/lp.hpp"
#include "shp/rng.hpp"

using shp::Rat;
using shp::RatMat;
using shp::RatVec;

TEST_CASE("vector helpers behave componentwise") {
    RatVec a{Rat(1), Rat(2), Rat(-3)};
    RatVec b{Rat(4), Rat(-1), Rat(1, 2)};
    CHECK(shp::dot(a, b) == Rat(1, 2));
    CHECK(shp::add(a, b) == RatVec{Rat(5), Rat(1), Rat(-5, 2)});
    CHECK(shp::sub(a, b) == RatVec{Rat(-3), Rat(3), Rat(-7, 2)});
    CHECK(shp::scale(a, Rat(2)) == RatVec{Rat(2), Rat(4), Rat(-6)});
    CHECK(shp::is_zero_vec(RatVec{Rat(0), Rat(0)}));
    CHECK_FALSE(shp::is_zero_vec(a));
    CHECK(shp::lex_less(RatVec{Rat(1), Rat(0)}, RatVec{Rat(1), Rat(1)}));
    CHECK_FALSE(shp::lex_less(a, a));
}

TEST_CASE("primitive scaling clears denominators and common factors") {
    RatVec v{Rat(2, 3), Rat(-4, 3)};
    CHECK(shp::primitive(v) == RatVec{Rat(1), Rat(-2)});
    CHECK(shp::primitive(RatVec{Rat(6), Rat(9)}) == RatVec{Rat(2), Rat(3)});
    CHECK(shp::primitive(RatVec{Rat(0), Rat(0)}) == RatVec{Rat(0), Rat(0)});
    // sign of the vector is preserved, not normalized
    CHECK(shp::primitive(RatVec{Rat(-2), Rat(4)}) == RatVec{Rat(-1), Rat(2)});
}

TEST_CASE("scale_first_nonzero pins the leading coordinate to one") {
    CHECK(shp::scale_first_nonzero(RatVec{Rat(0), Rat(2), Rat(4)}) ==
          RatVec{Rat(0), Rat(1), Rat(2)});
    CHECK(shp::scale_first_nonzero(RatVec{Rat(10), Rat(9)}) ==
          RatVec{Rat(1), Rat(9, 10)});
    CHECK(shp::scale_first_nonzero(RatVec{Rat(0), Rat(0)}) ==
          RatVec{Rat(0), Rat(0)});
}

TEST_CASE("rref reports pivots and rank") {
    RatMat m{{Rat(1), Rat(2), Rat(3)}, {Rat(2), Rat(4), Rat(7)}};
    shp::Rref r = shp::rref(m, 3);
    CHECK(r.rank == 2);
    CHECK(r.pivots == std::vector<int>{0, 2});
    CHECK(r.rows[0] == RatVec{Rat(1), Rat(2), Rat(0)});
    CHECK(r.rows[1] == RatVec{Rat(0), Rat(0), Rat(1)});
    CHECK(shp::rank_of(m, 3) == 2);
    RatMat dep{{Rat(1), Rat(1)}, {Rat(2), Rat(2)}};
    CHECK(shp::rank_of(dep, 2) == 1);
}

TEST_CASE("nullspace spans the kernel") {
    RatMat m{{Rat(1), Rat(1), Rat(0)}, {Rat(0), Rat(0), Rat(1)}};
    RatMat ns = shp::nullspace(m, 3);
    REQUIRE(ns.size() == 1);
    for (const RatVec& v : ns) {
        CHECK_FALSE(shp::is_zero_vec(v));
        for (const RatVec& row : m) CHECK(shp::dot(row, v) == Rat(0));
    }
    // full-rank square matrix has a trivial kernel
    RatMat full{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    CHECK(shp::nullspace(full, 2).empty());
}

TEST_CASE("solve_square and invert agree and detect singularity") {
    RatMat a{{Rat(1), Rat(2)}, {Rat(3), Rat(4)}};
    RatVec b{Rat(5), Rat(6)};
    auto x = shp::solve_square(a, b);
    REQUIRE(x.has_value());
    CHECK((*x)[0] == Rat(-4));
    CHECK((*x)[1] == Rat(9, 2));
    auto inv = shp::invert(a);
    REQUIRE(inv.has_value());
    CHECK((*inv)[0] == RatVec{Rat(-2), Rat(1)});
    CHECK((*inv)[1] == RatVec{Rat(3, 2), Rat(-1, 2)});
    // A * A^{-1} = I
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Rat s = 0;
            for (int k = 0; k < 2; ++k) s += a[i][k] * (*inv)[k][j];
            CHECK(s == (i == j ? Rat(1) : Rat(0)));
        }
    }
    RatMat sing{{Rat(1), Rat(2)}, {Rat(2), Rat(4)}};
    CHECK_FALSE(shp::solve_square(sing, b).has_value());
    CHECK_FALSE(shp::invert(sing).has_value());
}

TEST_CASE("small LPs solve exactly") {
    SUBCASE("minimize over a simplex face") {
        shp::LpProblem lp(2);
        lp.add_row({Rat(1), Rat(1)}, shp::RowRel::ge, Rat(1));
        auto r = lp.minimize({Rat(1), Rat(1)});
        REQUIRE(r.status == shp::LpStatus::optimal);
        CHECK(r.obj == Rat(1));
    }
    SUBCASE("maximize under capacity rows") {
        shp::LpProblem lp(2);
        lp.add_row({Rat(1), Rat(1)}, shp::RowRel::le, Rat(4));
        lp.add_row({Rat(1), Rat(0)}, shp::RowRel::le, Rat(2));
        auto r = lp.maximize({Rat(1), Rat(2)});
        REQUIRE(r.status == shp::LpStatus::optimal);
        CHECK(r.obj == Rat(8));
        CHECK(r.x == RatVec{Rat(0), Rat(4)});
    }
    SUBCASE("free variables can go negative") {
        shp::LpProblem lp(1);
        lp.set_free(0);
        lp.add_row({Rat(1)}, shp::RowRel::ge, Rat(-5));
        auto r = lp.minimize({Rat(1)});
        REQUIRE(r.status == shp::LpStatus::optimal);
        CHECK(r.obj == Rat(-5));
    }
    SUBCASE("equality rows pin the solution") {
        shp::LpProblem lp(2);
        lp.add_row({Rat(1), Rat(1)}, shp::RowRel::eq, Rat(3));
        lp.add_row({Rat(1), Rat(-1)}, shp::RowRel::eq, Rat(1));
        auto r = lp.minimize({Rat(0), Rat(0)});
        REQUIRE(r.status == shp::LpStatus::optimal);
        CHECK(r.x == RatVec{Rat(2), Rat(1)});
    }
    SUBCASE("conflicting rows are infeasible") {
        shp::LpProblem lp(1);
        lp.add_row({Rat(1)}, shp::RowRel::le, Rat(-1));
        auto r = lp.minimize({Rat(1)});
        CHECK(r.status == shp::LpStatus::infeasible);
        CHECK_FALSE(lp.feasible());
    }
    SUBCASE("unbounded directions are reported") {
        shp::LpProblem lp(1);
        auto r = lp.maximize({Rat(1)});
        CHECK(r.status == shp::LpStatus::unbounded);
        CHECK(lp.feasible());
    }
}

TEST_CASE("lex_minimize picks a canonical optimum") {
    // every point of {x + y = 1, x,y >= 0} minimizes the zero cost;
    // the lexicographic pass then drives x to 0, forcing y = 1.
    shp::LpProblem lp(2);
    lp.add_row({Rat(1), Rat(1)}, shp::RowRel::eq, Rat(1));
    auto r = lp.lex_minimize({Rat(0), Rat(0)}, {0, 1});
    REQUIRE(r.status == shp::LpStatus::optimal);
    CHECK(r.x == RatVec{Rat(0), Rat(1)});
    CHECK(r.obj == Rat(0));
    // reversing the order flips the representative
    auto r2 = lp.lex_minimize({Rat(0), Rat(0)}, {1, 0});
    REQUIRE(r2.status == shp::LpStatus::optimal);
    CHECK(r2.x == RatVec{Rat(1), Rat(0)});
}

TEST_CASE("standard-form solver handles equality systems") {
    // min x0 + x1 subject to x0 + x1 = 2, x0 - x1 = 0, x >= 0
    RatMat A{{Rat(1), Rat(1)}, {Rat(1), Rat(-1)}};
    RatVec b{Rat(2), Rat(0)};
    RatVec c{Rat(1), Rat(1)};
    auto r = shp::lp_solve_standard(A, b, c);
    REQUIRE(r.status == shp::LpStatus::optimal);
    CHECK(r.obj == Rat(2));
    CHECK(r.x == RatVec{Rat(1), Rat(1)});
    auto inf = shp::lp_solve_standard(RatMat{{Rat(1)}}, RatVec{Rat(-1)},
                                      RatVec{Rat(0)});
    CHECK(inf.status == shp::LpStatus::infeasible);
}

TEST_CASE("feasibility oracle matches a fresh LP over many right-hand sides") {
    // Ax = b, x >= 0 with A = [[1, 1, 0], [0, 1, 1]]
    RatMat A{{Rat(1), Rat(1), Rat(0)}, {Rat(0), Rat(1), Rat(1)}};
    shp::FeasibilityOracle oracle(A, 3);
    shp::CounterRng rng(31, 0);
    for (int t = 0; t < 60; ++t) {
        Rat b0(static_cast<long>(rng.next_below(9)) - 4);
        Rat b1(static_cast<long>(rng.next_below(9)) - 4);
        RatVec b{b0, b1};
        shp::LpProblem lp(3);
        lp.add_row({Rat(1), Rat(1), Rat(0)}, shp::RowRel::eq, b0);
        lp.add_row({Rat(0), Rat(1), Rat(1)}, shp::RowRel::eq, b1);
        CHECK(oracle.feasible_for(b) == lp.feasible());
    }
    // a dependent-row system must reject inconsistent right-hand sides
    RatMat dep{{Rat(1), Rat(0)}, {Rat(2), Rat(0)}};
    shp::FeasibilityOracle dor(dep, 2);
    CHECK(dor.feasible_for({Rat(1), Rat(2)}));
    CHECK_FALSE(dor.feasible_for({Rat(1), Rat(3)}));
}
