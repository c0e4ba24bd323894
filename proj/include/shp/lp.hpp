#pragma once

#include <optional>

#include "shp/linalg.hpp"

namespace shp {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    RatVec x;   // original variable order
    Rat obj = 0;
};

enum class RowRel { le, ge, eq };

// Small dense exact-rational LP. Bland pivoting, so deterministic and
// cycle-free. Built for desk-scale systems (hundreds of rows/columns).
class LpProblem {
public:
    explicit LpProblem(int nvars);

    // variables are nonnegative unless marked free
    void set_free(int var);
    void add_row(const RatVec& coeffs, RowRel rel, const Rat& rhs);

    LpResult minimize(const RatVec& cost) const;
    LpResult maximize(const RatVec& cost) const;
    bool feasible() const;

    // Minimize cost; among optima, sequentially minimize vars in the given
    // order. Deterministic representative of the optimal face.
    LpResult lex_minimize(const RatVec& cost, const std::vector<int>& order) const;

    int nvars() const { return nvars_; }

private:
    struct Row {
        RatVec a;
        RowRel rel;
        Rat rhs;
    };
    int nvars_;
    std::vector<char> free_;
    std::vector<Row> rows_;

    LpResult minimize_impl(const RatVec& cost, const std::vector<Row>& extra) const;
};

// min c.x  s.t.  A x = b, x >= 0
LpResult lp_solve_standard(const RatMat& A, const RatVec& b, const RatVec& c);

// Repeated feasibility of {x >= 0 : A x = b} for many right-hand sides over a
// fixed A. First call row-reduces A once; subsequent calls re-solve by dual
// simplex from the previous basis, which is cheap when probes are related.
class FeasibilityOracle {
public:
    FeasibilityOracle(RatMat A, int ncols);
    bool feasible_for(const RatVec& b);

private:
    int n_;                    // columns
    int r_ = 0;                // working rows (rank)
    RatMat reduced_;           // r x n, full row rank, starts in RREF
    RatMat transform_;         // m x m row-op tracker: reduced = transform * A on kept rows
    std::vector<int> kept_, dropped_; // original row indices
    RatMat tableau_;           // r x n, equals Binv * reduced_
    RatMat binv_;              // r x r
    std::vector<int> basis_;   // column index per row
    long pivots_ = 0;

    void pivot(int row, int col);
};

} // namespace shp
