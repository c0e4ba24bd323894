#include "shp/linalg.hpp"

namespace shp {

Rat dot(const RatVec& a, const RatVec& b) {
    Rat s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

RatVec add(const RatVec& a, const RatVec& b) {
    RatVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

RatVec sub(const RatVec& a, const RatVec& b) {
    RatVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

RatVec scale(const RatVec& a, const Rat& s) {
    RatVec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

bool is_zero_vec(const RatVec& a) {
    for (const auto& x : a)
        if (x != 0) return false;
    return true;
}

bool lex_less(const RatVec& a, const RatVec& b) {
    for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
        int c = cmp(a[i], b[i]);
        if (c != 0) return c < 0;
    }
    return a.size() < b.size();
}

RatVec primitive(const RatVec& v) {
    mpz_class num_gcd = 0, den_lcm = 1;
    for (const auto& q : v) {
        if (q == 0) continue;
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), q.get_num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.get_den().get_mpz_t());
    }
    if (num_gcd == 0) return v; // zero vector
    Rat factor(den_lcm, num_gcd);
    factor.canonicalize();
    RatVec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i] * factor;
        out[i].canonicalize();
    }
    return out;
}

RatVec scale_first_nonzero(const RatVec& v) {
    for (const auto& q : v) {
        if (q != 0) {
            Rat f = abs(q);
            RatVec out(v.size());
            for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / f;
            return out;
        }
    }
    return v;
}

Rref rref(const RatMat& m, int ncols) {
    RatMat a = m;
    Rref out;
    int nrows = static_cast<int>(a.size());
    int lead = 0;
    for (int r = 0; r < nrows && lead < ncols; ++r) {
        int piv = -1;
        while (lead < ncols) {
            for (int i = r; i < nrows; ++i) {
                if (a[i][lead] != 0) {
                    piv = i;
                    break;
                }
            }
            if (piv >= 0) break;
            ++lead;
        }
        if (piv < 0) break;
        std::swap(a[r], a[piv]);
        Rat f = a[r][lead];
        for (int j = 0; j < ncols; ++j) a[r][j] /= f;
        for (int i = 0; i < nrows; ++i) {
            if (i == r || a[i][lead] == 0) continue;
            Rat g = a[i][lead];
            for (int j = 0; j < ncols; ++j) a[i][j] -= g * a[r][j];
        }
        out.pivots.push_back(lead);
        ++lead;
    }
    out.rank = static_cast<int>(out.pivots.size());
    for (int r = 0; r < out.rank; ++r) out.rows.push_back(a[r]);
    return out;
}

int rank_of(const RatMat& m, int ncols) { return rref(m, ncols).rank; }

RatMat nullspace(const RatMat& m, int ncols) {
    Rref r = rref(m, ncols);
    std::vector<char> is_pivot(ncols, 0);
    for (int p : r.pivots) is_pivot[p] = 1;
    RatMat basis;
    for (int j = 0; j < ncols; ++j) {
        if (is_pivot[j]) continue;
        RatVec v(ncols, Rat(0));
        v[j] = 1;
        for (int i = 0; i < r.rank; ++i) v[r.pivots[i]] = -r.rows[i][j];
        basis.push_back(primitive(v));
    }
    return basis;
}

std::optional<RatVec> solve_square(const RatMat& a, const RatVec& b) {
    int n = static_cast<int>(a.size());
    RatMat aug = a;
    for (int i = 0; i < n; ++i) aug[i].push_back(b[i]);
    Rref r = rref(aug, n + 1);
    if (r.rank < n) return std::nullopt;
    // pivots must be the first n columns, otherwise the system is inconsistent
    for (int i = 0; i < n; ++i)
        if (r.pivots[i] != i) return std::nullopt;
    RatVec x(n);
    for (int i = 0; i < n; ++i) x[i] = r.rows[i][n];
    return x;
}

std::optional<RatMat> invert(const RatMat& a) {
    int n = static_cast<int>(a.size());
    RatMat aug = a;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug[i].push_back(i == j ? Rat(1) : Rat(0));
    }
    Rref r = rref(aug, 2 * n);
    if (r.rank < n) return std::nullopt;
    for (int i = 0; i < n; ++i)
        if (r.pivots[i] != i) return std::nullopt;
    RatMat inv(n, RatVec(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv[i][j] = r.rows[i][n + j];
    return inv;
}

} // namespace shp
