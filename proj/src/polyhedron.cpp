#include "shp/polyhedron.hpp"

#include <algorithm>
#include <cassert>

#include "shp/lp.hpp"

namespace shp {

namespace {

void check_dim(int dim) {
    if (dim < 1)
        fail_validation("EmptyInput", "dimension >= 1", "polyhedron dimension must be positive");
    if (dim > kMaxDim)
        fail_validation("DimensionTooLarge", "dimension <= 6 for representation conversion",
                        "dimension " + std::to_string(dim) + " exceeds supported bound");
}

RatMat sorted_unique(RatMat rows) {
    std::sort(rows.begin(), rows.end(), lex_less);
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

} // namespace

HRep canonical(HRep h) {
    check_dim(h.dim);
    std::vector<RatVec> packed;
    for (auto& r : h.rows) {
        if (static_cast<int>(r.normal.size()) != h.dim)
            fail_validation("DimensionMismatch", "normal length equals dim",
                            "inequality normal has wrong length");
        if (is_zero_vec(r.normal))
            fail_validation("EmptyInput", "no zero-normal inequality rows",
                            "zero normal in inequality");
        RatVec row = r.normal;
        row.push_back(r.offset);
        // positive scaling: first nonzero *of the normal* gets absolute value 1
        Rat f;
        for (const auto& q : r.normal) {
            if (q != 0) {
                f = abs(q);
                break;
            }
        }
        for (auto& q : row) q /= f;
        packed.push_back(std::move(row));
    }
    packed = sorted_unique(std::move(packed));
    HRep out;
    out.dim = h.dim;
    for (auto& row : packed) {
        HalfSpace hs;
        hs.offset = row.back();
        row.pop_back();
        hs.normal = std::move(row);
        out.rows.push_back(std::move(hs));
    }
    return out;
}

VRep canonical(VRep v) {
    check_dim(v.dim);
    for (const auto& x : v.vertices)
        if (static_cast<int>(x.size()) != v.dim)
            fail_validation("DimensionMismatch", "vertex length equals dim",
                            "vertex has wrong length");
    VRep out;
    out.dim = v.dim;
    out.vertices = sorted_unique(v.vertices);
    RatMat rays;
    for (const auto& r : v.rays) {
        if (static_cast<int>(r.size()) != v.dim)
            fail_validation("DimensionMismatch", "ray length equals dim", "ray has wrong length");
        if (is_zero_vec(r))
            fail_validation("EmptyInput", "rays are nonzero", "zero ray");
        rays.push_back(scale_first_nonzero(r));
    }
    out.rays = sorted_unique(std::move(rays));
    return out;
}

// ---------------------------------------------------------------------------
// double description on a pointed cone

namespace {

struct PointedDd {
    int k;            // ambient (pointed) dimension
    const RatMat& N;  // constraint rows, rank k
    std::vector<RatVec> rays;
    std::vector<std::vector<char>> tight; // [ray][row]
    std::vector<char> processed;

    PointedDd(const RatMat& n, int kk) : k(kk), N(n) {}

    void run() {
        int nrows = static_cast<int>(N.size());
        processed.assign(nrows, 0);
        // initial simplicial cone from k independent rows
        std::vector<int> bidx;
        {
            RatMat elim;
            for (int i = 0; i < nrows && static_cast<int>(bidx.size()) < k; ++i) {
                RatMat trial = elim;
                trial.push_back(N[i]);
                if (rank_of(trial, k) > static_cast<int>(elim.size())) {
                    elim = std::move(trial);
                    bidx.push_back(i);
                }
            }
        }
        assert(static_cast<int>(bidx.size()) == k);
        RatMat B(k, RatVec(k));
        for (int i = 0; i < k; ++i) B[i] = N[bidx[i]];
        auto binv = invert(B);
        assert(binv.has_value());
        for (int j = 0; j < k; ++j) {
            RatVec u(k);
            for (int i = 0; i < k; ++i) u[i] = (*binv)[i][j];
            rays.push_back(primitive(u));
        }
        for (int i : bidx) processed[i] = 1;
        tight.assign(rays.size(), std::vector<char>(nrows, 0));
        for (size_t r = 0; r < rays.size(); ++r) refresh_tight(r);

        for (int i = 0; i < nrows; ++i) {
            if (!processed[i]) insert_row(i);
        }
    }

    void refresh_tight(size_t r) {
        int nrows = static_cast<int>(N.size());
        for (int i = 0; i < nrows; ++i)
            tight[r][i] = processed[i] && dot(N[i], rays[r]) == 0 ? 1 : 0;
    }

    bool adjacent(size_t p, size_t q) const {
        int nrows = static_cast<int>(N.size());
        for (size_t t = 0; t < rays.size(); ++t) {
            if (t == p || t == q) continue;
            bool covers = true;
            for (int i = 0; i < nrows; ++i) {
                if (processed[i] && tight[p][i] && tight[q][i] && !tight[t][i]) {
                    covers = false;
                    break;
                }
            }
            if (covers) return false;
        }
        return true;
    }

    void insert_row(int row) {
        std::vector<int> sgn(rays.size());
        std::vector<Rat> val(rays.size());
        bool any_neg = false;
        for (size_t r = 0; r < rays.size(); ++r) {
            val[r] = dot(N[row], rays[r]);
            sgn[r] = rat_sign(val[r]);
            if (sgn[r] < 0) any_neg = true;
        }
        if (!any_neg) {
            processed[row] = 1;
            for (size_t r = 0; r < rays.size(); ++r)
                tight[r][row] = sgn[r] == 0 ? 1 : 0;
            return;
        }
        std::vector<RatVec> next;
        for (size_t p = 0; p < rays.size(); ++p) {
            if (sgn[p] >= 0) next.push_back(rays[p]);
        }
        for (size_t p = 0; p < rays.size(); ++p) {
            if (sgn[p] <= 0) continue;
            for (size_t q = 0; q < rays.size(); ++q) {
                if (sgn[q] >= 0) continue;
                if (!adjacent(p, q)) continue;
                RatVec w(k);
                for (int j = 0; j < k; ++j) w[j] = val[p] * rays[q][j] - val[q] * rays[p][j];
                next.push_back(primitive(w));
            }
        }
        processed[row] = 1;
        std::sort(next.begin(), next.end(), lex_less);
        next.erase(std::unique(next.begin(), next.end()), next.end());
        rays = std::move(next);
        tight.assign(rays.size(), std::vector<char>(N.size(), 0));
        for (size_t r = 0; r < rays.size(); ++r) refresh_tight(r);
    }
};

} // namespace

ConeGenerators dd_cone(const RatMat& M, int dim) {
    ConeGenerators out;
    RatMat rows;
    for (const auto& r : M) {
        if (static_cast<int>(r.size()) != dim)
            fail_validation("DimensionMismatch", "constraint row length equals dim",
                            "bad constraint row length");
        if (!is_zero_vec(r)) rows.push_back(primitive(r));
    }
    rows = sorted_unique(std::move(rows));

    out.lineality = nullspace(rows, dim);
    Rref rs = rref(rows, dim);
    int k = rs.rank;
    if (k == 0) return out; // whole space: lineality only

    // pointed part lives in the row space; x = W^T u
    const RatMat& W = rs.rows; // k x dim
    RatMat N;
    N.reserve(rows.size());
    for (const auto& r : rows) {
        RatVec nr(k);
        for (int i = 0; i < k; ++i) nr[i] = dot(r, W[i]);
        N.push_back(primitive(nr));
    }
    PointedDd dd(N, k);
    dd.run();
    for (const auto& u : dd.rays) {
        RatVec x(dim, Rat(0));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < dim; ++j) x[j] += u[i] * W[i][j];
        out.rays.push_back(primitive(x));
    }
    std::sort(out.rays.begin(), out.rays.end(), lex_less);
    return out;
}

VRep dd_h_to_v(const HRep& h_in) {
    HRep h = canonical(h_in);
    int dim = h.dim;
    RatMat M;
    for (const auto& r : h.rows) {
        RatVec row;
        row.reserve(dim + 1);
        row.push_back(-r.offset);
        for (const auto& q : r.normal) row.push_back(q);
        M.push_back(std::move(row));
    }
    RatVec pos(dim + 1, Rat(0));
    pos[0] = 1;
    M.push_back(pos);

    ConeGenerators cg = dd_cone(M, dim + 1);
    VRep v;
    v.dim = dim;
    for (const auto& u : cg.rays) {
        if (u[0] > 0) {
            RatVec x(dim);
            for (int j = 0; j < dim; ++j) x[j] = u[j + 1] / u[0];
            v.vertices.push_back(std::move(x));
        } else {
            // u[0] == 0 by the added nonnegativity row
            RatVec x(u.begin() + 1, u.end());
            v.rays.push_back(std::move(x));
        }
    }
    for (const auto& l : cg.lineality) {
        assert(l[0] == 0);
        RatVec x(l.begin() + 1, l.end());
        RatVec nx = scale(x, Rat(-1));
        v.rays.push_back(std::move(x));
        v.rays.push_back(std::move(nx));
    }
    if (v.vertices.empty()) {
        v.rays.clear(); // infeasible system
        return v;
    }
    return canonical(std::move(v));
}

HRep dd_v_to_h(const VRep& v_in) {
    VRep v = canonical(v_in);
    if (v.vertices.empty())
        fail_validation("EmptyInput", "at least one vertex present",
                        "cannot convert an empty vertex set");
    int dim = v.dim;
    RatMat M;
    for (const auto& x : v.vertices) {
        RatVec row;
        row.reserve(dim + 1);
        row.push_back(Rat(1));
        for (const auto& q : x) row.push_back(q);
        M.push_back(std::move(row));
    }
    for (const auto& r : v.rays) {
        RatVec row;
        row.reserve(dim + 1);
        row.push_back(Rat(0));
        for (const auto& q : r) row.push_back(q);
        M.push_back(std::move(row));
    }
    ConeGenerators cg = dd_cone(M, dim + 1);
    HRep h;
    h.dim = dim;
    auto push_row = [&](const RatVec& a, bool negate) {
        RatVec normal(a.begin() + 1, a.end());
        Rat offset = -a[0];
        if (negate) {
            normal = scale(normal, Rat(-1));
            offset = -offset;
        }
        if (is_zero_vec(normal)) return; // vacuous 0 >= -a0
        h.rows.push_back(HalfSpace{std::move(normal), std::move(offset)});
    };
    for (const auto& a : cg.rays) push_row(a, false);
    for (const auto& l : cg.lineality) {
        push_row(l, false);
        push_row(l, true);
    }
    return canonical(std::move(h));
}

// ---------------------------------------------------------------------------
// irredundancy via LP

std::vector<int> redundant_h_rows(const HRep& h) {
    std::vector<int> out;
    int n = static_cast<int>(h.rows.size());
    std::vector<char> removed(n, 0);
    for (int i = 0; i < n; ++i) {
        LpProblem lp(h.dim);
        for (int v = 0; v < h.dim; ++v) lp.set_free(v);
        for (int j = 0; j < n; ++j) {
            if (j == i || removed[j]) continue;
            lp.add_row(h.rows[j].normal, RowRel::ge, h.rows[j].offset);
        }
        LpResult r = lp.minimize(h.rows[i].normal);
        if (r.status == LpStatus::optimal && r.obj >= h.rows[i].offset) {
            removed[i] = 1;
            out.push_back(i);
        }
    }
    return out;
}

std::vector<int> redundant_v_rays(const VRep& v) {
    std::vector<int> out;
    int n = static_cast<int>(v.rays.size());
    std::vector<char> removed(n, 0);
    for (int i = 0; i < n; ++i) {
        std::vector<int> others;
        for (int j = 0; j < n; ++j)
            if (j != i && !removed[j]) others.push_back(j);
        if (others.empty()) continue;
        LpProblem lp(static_cast<int>(others.size()));
        for (int c = 0; c < v.dim; ++c) {
            RatVec coeffs(others.size());
            for (size_t j = 0; j < others.size(); ++j) coeffs[j] = v.rays[others[j]][c];
            lp.add_row(coeffs, RowRel::eq, v.rays[i][c]);
        }
        if (lp.feasible()) {
            removed[i] = 1;
            out.push_back(i);
        }
    }
    return out;
}

bool contains_point_by_lp(const VRep& v, const RatVec& x) {
    int nv = static_cast<int>(v.vertices.size());
    int nr = static_cast<int>(v.rays.size());
    if (nv == 0) return false;
    LpProblem lp(nv + nr);
    for (int c = 0; c < v.dim; ++c) {
        RatVec coeffs(nv + nr);
        for (int i = 0; i < nv; ++i) coeffs[i] = v.vertices[i][c];
        for (int i = 0; i < nr; ++i) coeffs[nv + i] = v.rays[i][c];
        lp.add_row(coeffs, RowRel::eq, x[c]);
    }
    RatVec conv(nv + nr, Rat(0));
    for (int i = 0; i < nv; ++i) conv[i] = 1;
    lp.add_row(conv, RowRel::eq, Rat(1));
    return lp.feasible();
}

// ---------------------------------------------------------------------------
// Polyhedron

namespace {

HRep prune_h(const HRep& h) {
    if (h.rows.size() < 2) return h;
    auto red = redundant_h_rows(h);
    if (red.empty()) return h;
    std::vector<char> removed(h.rows.size(), 0);
    for (int i : red) removed[i] = 1;
    HRep out;
    out.dim = h.dim;
    for (size_t i = 0; i < h.rows.size(); ++i)
        if (!removed[i]) out.rows.push_back(h.rows[i]);
    return out;
}

} // namespace

Polyhedron Polyhedron::from_h(HRep h_in) {
    Polyhedron p;
    HRep h = canonical(std::move(h_in));
    p.dim_ = h.dim;
    p.v_ = dd_h_to_v(h);
    if (p.v_.vertices.empty()) {
        p.empty_ = true;
        p.h_ = std::move(h);
        return p;
    }
    p.h_ = prune_h(dd_v_to_h(p.v_));
    return p;
}

Polyhedron Polyhedron::from_v(VRep v_in) {
    Polyhedron p;
    VRep v = canonical(std::move(v_in));
    if (v.vertices.empty())
        fail_validation("EmptyInput", "at least one vertex present",
                        "vertex representation needs a vertex");
    p.dim_ = v.dim;
    p.h_ = prune_h(dd_v_to_h(v));
    p.v_ = dd_h_to_v(p.h_);
    return p;
}

Polyhedron Polyhedron::cone_from_rays(int dim, RatMat rays) {
    VRep v;
    v.dim = dim;
    v.vertices.push_back(RatVec(dim, Rat(0)));
    v.rays = std::move(rays);
    return from_v(std::move(v));
}

bool Polyhedron::is_cone() const {
    return !empty_ && v_.vertices.size() == 1 && is_zero_vec(v_.vertices[0]);
}

bool Polyhedron::contains_point(const RatVec& x) const {
    if (empty_) return false;
    if (static_cast<int>(x.size()) != dim_)
        fail_validation("DimensionMismatch", "point length equals dim", "bad point length");
    for (const auto& r : h_.rows)
        if (dot(r.normal, x) < r.offset) return false;
    return true;
}

Polyhedron minkowski_sum(const Polyhedron& a, const Polyhedron& b) {
    if (a.dim() != b.dim())
        fail_validation("DimensionMismatch", "operands share dimension",
                        "minkowski sum dimension mismatch");
    if (a.is_empty()) return a;
    if (b.is_empty()) return b;
    VRep v;
    v.dim = a.dim();
    for (const auto& x : a.v().vertices)
        for (const auto& y : b.v().vertices) v.vertices.push_back(add(x, y));
    v.rays = a.v().rays;
    for (const auto& r : b.v().rays) v.rays.push_back(r);
    return Polyhedron::from_v(std::move(v));
}

Polyhedron intersect(const Polyhedron& a, const Polyhedron& b) {
    if (a.dim() != b.dim())
        fail_validation("DimensionMismatch", "operands share dimension",
                        "intersection dimension mismatch");
    HRep h;
    h.dim = a.dim();
    h.rows = a.h().rows;
    for (const auto& r : b.h().rows) h.rows.push_back(r);
    return Polyhedron::from_h(std::move(h));
}

bool poly_contains(const Polyhedron& a, const Polyhedron& b) {
    if (b.is_empty()) return true;
    if (a.is_empty()) return false;
    for (const auto& x : b.v().vertices)
        if (!a.contains_point(x)) return false;
    for (const auto& r : b.v().rays) {
        for (const auto& row : a.h().rows)
            if (dot(row.normal, r) < 0) return false;
    }
    return true;
}

bool set_equal(const Polyhedron& a, const Polyhedron& b) {
    return poly_contains(a, b) && poly_contains(b, a);
}

Polyhedron translate(const Polyhedron& a, const RatVec& t) {
    if (static_cast<int>(t.size()) != a.dim())
        fail_validation("DimensionMismatch", "translation length equals dim",
                        "bad translation length");
    if (a.is_empty()) return a;
    VRep v = a.v();
    for (auto& x : v.vertices) x = add(x, t);
    return Polyhedron::from_v(std::move(v));
}

Polyhedron scale_poly(const Polyhedron& a, const Rat& s) {
    if (s <= 0)
        fail_validation("EmptyInput", "scale factor positive", "nonpositive scale factor");
    if (a.is_empty()) return a;
    VRep v = a.v();
    for (auto& x : v.vertices) x = scale(x, s);
    return Polyhedron::from_v(std::move(v));
}

} // namespace shp
