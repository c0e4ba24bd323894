#include "shp/lp.hpp"

#include <algorithm>

namespace shp {

namespace {

// Dense tableau simplex on min c.x, A x = b, x >= 0. Two phases, Bland rule.
class Tableau {
public:
    Tableau(const RatMat& A, const RatVec& b, const RatVec& c)
        : m_(static_cast<int>(A.size())), n_(static_cast<int>(c.size())) {
        rows_ = A;
        rhs_ = b;
        cost_ = c;
        for (int i = 0; i < m_; ++i) {
            if (rhs_[i] < 0) {
                for (auto& v : rows_[i]) v = -v;
                rhs_[i] = -rhs_[i];
            }
        }
    }

    LpResult run() {
        if (!phase1()) {
            LpResult r;
            r.status = LpStatus::infeasible;
            return r;
        }
        return phase2();
    }

private:
    int m_, n_;
    RatMat rows_;
    RatVec rhs_;
    RatVec cost_;
    std::vector<int> basis_;

    // reduced cost of column j given duals are implicit in eliminated rows
    // (we keep the objective row explicitly instead)
    RatVec obj_;
    Rat obj_val_ = 0;

    void price_out(int n_total) {
        // rebuild objective row from scratch for current basis
        obj_.assign(n_total, Rat(0));
        obj_val_ = 0;
        for (int j = 0; j < n_total; ++j) obj_[j] = cur_cost_[j];
        for (int i = 0; i < m_; ++i) {
            const Rat& cb = cur_cost_[basis_[i]];
            if (cb == 0) continue;
            for (int j = 0; j < n_total; ++j) obj_[j] -= cb * rows_[i][j];
            obj_val_ -= cb * rhs_[i];
        }
    }

    RatVec cur_cost_;

    // returns false on infeasible
    bool phase1() {
        int n_total = n_ + m_;
        for (int i = 0; i < m_; ++i) {
            rows_[i].resize(n_total, Rat(0));
            rows_[i][n_ + i] = 1;
        }
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
        cur_cost_.assign(n_total, Rat(0));
        for (int i = 0; i < m_; ++i) cur_cost_[n_ + i] = 1;
        price_out(n_total);
        iterate(n_total);
        if (obj_val_ != 0) return false; // leftover infeasibility (obj_val_ = -sum)
        // drive artificials out of the basis where possible, drop redundant rows
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            int piv = -1;
            for (int j = 0; j < n_; ++j) {
                if (rows_[i][j] != 0) {
                    piv = j;
                    break;
                }
            }
            if (piv >= 0) {
                pivot(i, piv, n_total);
            }
        }
        // rows still based on artificials are redundant constraints; drop them
        RatMat nr;
        RatVec nb;
        std::vector<int> nbasis;
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] >= n_) continue;
            nr.push_back(rows_[i]);
            nb.push_back(rhs_[i]);
            nbasis.push_back(basis_[i]);
        }
        rows_ = std::move(nr);
        rhs_ = std::move(nb);
        basis_ = std::move(nbasis);
        m_ = static_cast<int>(rows_.size());
        for (auto& r : rows_) r.resize(n_);
        return true;
    }

    LpResult phase2() {
        cur_cost_ = cost_;
        price_out(n_);
        bool bounded = iterate(n_);
        LpResult res;
        if (!bounded) {
            res.status = LpStatus::unbounded;
            return res;
        }
        res.status = LpStatus::optimal;
        res.x.assign(n_, Rat(0));
        for (int i = 0; i < m_; ++i) res.x[basis_[i]] = rhs_[i];
        res.obj = 0;
        for (int j = 0; j < n_; ++j) res.obj += cost_[j] * res.x[j];
        return res;
    }

    // Bland: entering = smallest index with negative reduced cost.
    // returns false iff unbounded
    bool iterate(int n_total) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < n_total; ++j) {
                if (obj_[j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            Rat best;
            for (int i = 0; i < m_; ++i) {
                if (rows_[i][enter] <= 0) continue;
                Rat ratio = rhs_[i] / rows_[i][enter];
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter, n_total);
        }
    }

    void pivot(int row, int col, int n_total) {
        Rat p = rows_[row][col];
        for (int j = 0; j < n_total; ++j) rows_[row][j] /= p;
        rhs_[row] /= p;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            const Rat f = rows_[i][col];
            if (f == 0) continue;
            for (int j = 0; j < n_total; ++j) rows_[i][j] -= f * rows_[row][j];
            rhs_[i] -= f * rhs_[row];
        }
        const Rat f = obj_[col];
        if (f != 0) {
            for (int j = 0; j < n_total; ++j) obj_[j] -= f * rows_[row][j];
            obj_val_ -= f * rhs_[row];
        }
        basis_[row] = col;
    }
};

} // namespace

LpResult lp_solve_standard(const RatMat& A, const RatVec& b, const RatVec& c) {
    Tableau t(A, b, c);
    return t.run();
}

LpProblem::LpProblem(int nvars) : nvars_(nvars), free_(nvars, 0) {}

void LpProblem::set_free(int var) { free_[var] = 1; }

void LpProblem::add_row(const RatVec& coeffs, RowRel rel, const Rat& rhs) {
    rows_.push_back(Row{coeffs, rel, rhs});
}

LpResult LpProblem::minimize_impl(const RatVec& cost, const std::vector<Row>& extra) const {
    // standard-form layout: for each original var one column (nonneg) or two
    // (free, split p-n); one slack column per inequality row.
    std::vector<int> pos(nvars_), neg(nvars_, -1);
    int ncols = 0;
    for (int v = 0; v < nvars_; ++v) {
        pos[v] = ncols++;
        if (free_[v]) neg[v] = ncols++;
    }
    int nslack = 0;
    for (const auto& r : rows_)
        if (r.rel != RowRel::eq) ++nslack;
    for (const auto& r : extra)
        if (r.rel != RowRel::eq) ++nslack;
    int total = ncols + nslack;

    RatMat A;
    RatVec b;
    int slack_at = ncols;
    auto emit = [&](const Row& r) {
        RatVec row(total, Rat(0));
        for (int v = 0; v < nvars_; ++v) {
            if (r.a[v] == 0) continue;
            row[pos[v]] = r.a[v];
            if (neg[v] >= 0) row[neg[v]] = -r.a[v];
        }
        if (r.rel == RowRel::le)
            row[slack_at++] = 1;
        else if (r.rel == RowRel::ge)
            row[slack_at++] = -1;
        A.push_back(std::move(row));
        b.push_back(r.rhs);
    };
    for (const auto& r : rows_) emit(r);
    for (const auto& r : extra) emit(r);

    RatVec c(total, Rat(0));
    for (int v = 0; v < nvars_; ++v) {
        c[pos[v]] = cost[v];
        if (neg[v] >= 0) c[neg[v]] = -cost[v];
    }

    LpResult std_res = lp_solve_standard(A, b, c);
    LpResult res;
    res.status = std_res.status;
    if (std_res.status != LpStatus::optimal) return res;
    res.obj = std_res.obj;
    res.x.assign(nvars_, Rat(0));
    for (int v = 0; v < nvars_; ++v) {
        res.x[v] = std_res.x[pos[v]];
        if (neg[v] >= 0) res.x[v] -= std_res.x[neg[v]];
    }
    return res;
}

LpResult LpProblem::minimize(const RatVec& cost) const { return minimize_impl(cost, {}); }

LpResult LpProblem::maximize(const RatVec& cost) const {
    RatVec neg(cost.size());
    for (size_t i = 0; i < cost.size(); ++i) neg[i] = -cost[i];
    LpResult r = minimize_impl(neg, {});
    if (r.status == LpStatus::optimal) r.obj = -r.obj;
    return r;
}

bool LpProblem::feasible() const {
    RatVec zero(nvars_, Rat(0));
    return minimize(zero).status == LpStatus::optimal;
}

LpResult LpProblem::lex_minimize(const RatVec& cost, const std::vector<int>& order) const {
    std::vector<Row> extra;
    LpResult r = minimize_impl(cost, extra);
    if (r.status != LpStatus::optimal) return r;
    extra.push_back(Row{cost, RowRel::eq, r.obj});
    for (int v : order) {
        RatVec e(nvars_, Rat(0));
        e[v] = 1;
        LpResult s = minimize_impl(e, extra);
        if (s.status != LpStatus::optimal) return s; // cannot happen on a bounded face
        extra.push_back(Row{e, RowRel::eq, s.obj});
        r = s;
    }
    // final solve pins every ordered var; r.x is the representative
    r.obj = 0;
    for (int v = 0; v < nvars_; ++v) r.obj += cost[v] * r.x[v];
    return r;
}

FeasibilityOracle::FeasibilityOracle(RatMat A, int ncols) : n_(ncols) {
    int m = static_cast<int>(A.size());
    // row-reduce [A | I] to find rank, a transform, and dependent rows
    RatMat aug = A;
    for (int i = 0; i < m; ++i) {
        aug[i].resize(n_ + m, Rat(0));
        aug[i][n_ + i] = 1;
    }
    // manual elimination so we can split kept/dropped rows afterwards
    int lead = 0, rr = 0;
    for (; rr < m && lead < n_; ) {
        int piv = -1;
        for (int i = rr; i < m; ++i) {
            if (aug[i][lead] != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) {
            ++lead;
            continue;
        }
        std::swap(aug[rr], aug[piv]);
        Rat f = aug[rr][lead];
        for (int j = 0; j < n_ + m; ++j) aug[rr][j] /= f;
        for (int i = 0; i < m; ++i) {
            if (i == rr || aug[i][lead] == 0) continue;
            Rat g = aug[i][lead];
            for (int j = 0; j < n_ + m; ++j) aug[i][j] -= g * aug[rr][j];
        }
        basis_.push_back(lead);
        ++rr;
        ++lead;
    }
    r_ = rr;
    reduced_.assign(r_, RatVec(n_));
    transform_.assign(m, RatVec(m));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n_; ++j)
            if (i < r_) reduced_[i][j] = aug[i][j];
        for (int j = 0; j < m; ++j) transform_[i][j] = aug[i][n_ + j];
    }
    tableau_ = reduced_;
    binv_.assign(r_, RatVec(r_, Rat(0)));
    for (int i = 0; i < r_; ++i) binv_[i][i] = 1;
}

void FeasibilityOracle::pivot(int row, int col) {
    Rat p = tableau_[row][col];
    for (auto& v : tableau_[row]) v /= p;
    for (auto& v : binv_[row]) v /= p;
    for (int i = 0; i < r_; ++i) {
        if (i == row) continue;
        const Rat f = tableau_[i][col];
        if (f == 0) continue;
        for (int j = 0; j < n_; ++j) tableau_[i][j] -= f * tableau_[row][j];
        for (int j = 0; j < r_; ++j) binv_[i][j] -= f * binv_[row][j];
    }
    basis_[row] = col;
    ++pivots_;
}

bool FeasibilityOracle::feasible_for(const RatVec& b) {
    int m = static_cast<int>(transform_.size());
    // consistency of dropped rows: transform rows r_..m-1 annihilate A
    for (int i = r_; i < m; ++i) {
        Rat s = 0;
        for (int j = 0; j < m; ++j) s += transform_[i][j] * b[j];
        if (s != 0) return false;
    }
    RatVec bp(r_);
    for (int i = 0; i < r_; ++i) {
        Rat s = 0;
        for (int j = 0; j < m; ++j) s += transform_[i][j] * b[j];
        bp[i] = s;
    }
    RatVec xb(r_);
    for (int i = 0; i < r_; ++i) {
        Rat s = 0;
        for (int j = 0; j < r_; ++j) s += binv_[i][j] * bp[j];
        xb[i] = s;
    }
    // dual simplex with zero objective: every basis is dual-feasible; Bland
    // style selection for termination
    long guard = 0;
    for (;;) {
        int row = -1;
        for (int i = 0; i < r_; ++i) {
            if (xb[i] < 0 && (row < 0 || basis_[i] < basis_[row])) row = i;
        }
        if (row < 0) return true;
        int col = -1;
        for (int j = 0; j < n_; ++j) {
            if (tableau_[row][j] < 0) {
                col = j;
                break;
            }
        }
        if (col < 0) return false; // nonneg row with negative rhs
        pivot(row, col);
        // refresh xb for the new basis
        for (int i = 0; i < r_; ++i) {
            Rat s = 0;
            for (int j = 0; j < r_; ++j) s += binv_[i][j] * bp[j];
            xb[i] = s;
        }
        if (++guard > 200000)
            fail_internal("PivotGuard", "dual simplex terminates", "pivot limit exceeded");
    }
}

} // namespace shp
