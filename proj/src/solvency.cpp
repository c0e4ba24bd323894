#include "shp/solvency.hpp"

#include <algorithm>
#include <cmath>

#include "shp/lp.hpp"
#include "shp/rng.hpp"

namespace shp {

ExchangeMatrix exchange_from_mu(RatMat mu) {
    ExchangeMatrix ex;
    ex.d = static_cast<int>(mu.size());
    ex.mu = std::move(mu);
    return ex;
}

void validate_exchange(const ExchangeMatrix& ex, bool allow_degenerate) {
    if (ex.d < 2)
        fail_validation("InvalidCostMatrix", "at least two assets", "need d >= 2");
    if (static_cast<int>(ex.mu.size()) != ex.d)
        fail_validation("InvalidCostMatrix", "cost matrix is d x d", "bad row count");
    for (int i = 0; i < ex.d; ++i) {
        if (static_cast<int>(ex.mu[i].size()) != ex.d)
            fail_validation("InvalidCostMatrix", "cost matrix is d x d", "bad column count");
        for (int j = 0; j < ex.d; ++j) {
            if (i == j) {
                if (ex.mu[i][j] != 0)
                    fail_validation("InvalidCostMatrix", "zero diagonal",
                                    "nonzero diagonal cost");
            } else if (ex.mu[i][j] < 0 || ex.mu[i][j] >= 1) {
                fail_validation("InvalidCostMatrix", "costs lie in [0,1)",
                                "cost out of range");
            }
        }
    }
    for (int i = 0; i < ex.d; ++i)
        for (int j = 0; j < ex.d; ++j)
            for (int k = 0; k < ex.d; ++k) {
                if (i == j || j == k || i == k) continue;
                if (Rat(1) + ex.mu[i][j] > (Rat(1) + ex.mu[i][k]) * (Rat(1) + ex.mu[k][j]))
                    fail_validation("InvalidCostMatrix",
                                    "direct exchange never beats a two-step route",
                                    "triangle consistency violated");
            }
    if (!allow_degenerate) {
        for (int j = 1; j < ex.d; ++j)
            if (ex.mu[0][j] + ex.mu[j][0] == 0)
                fail_validation("DegenerateCone",
                                "round trips through asset 1 carry positive cost",
                                "free round trip for asset " + std::to_string(j + 1));
    }
}

RatMat exchange_pi(const ExchangeMatrix& ex) {
    RatMat pi(ex.d, RatVec(ex.d, Rat(0)));
    pi[0][0] = 1;
    for (int j = 1; j < ex.d; ++j) {
        pi[0][j] = Rat(1) + ex.mu[0][j];
        pi[j][0] = -(Rat(1) - ex.mu[j][0]);
    }
    for (int i = 1; i < ex.d; ++i)
        for (int j = 1; j < ex.d; ++j)
            if (i != j) pi[i][j] = ex.mu[i][j];
    return pi;
}

RatVec aggregate_transfers(const ExchangeMatrix& ex, const RatMat& b) {
    if (static_cast<int>(b.size()) != ex.d)
        fail_validation("DimensionMismatch", "transfer matrix is d x d", "bad transfer shape");
    RatMat pi = exchange_pi(ex);
    RatVec k(ex.d, Rat(0));
    for (int i = 0; i < ex.d; ++i) {
        if (static_cast<int>(b[i].size()) != ex.d)
            fail_validation("DimensionMismatch", "transfer matrix is d x d",
                            "bad transfer shape");
        for (int j = 0; j < ex.d; ++j) {
            if (i == j) {
                if (b[i][j] != 0)
                    fail_validation("DimensionMismatch", "zero transfer diagonal",
                                    "nonzero diagonal transfer");
                continue;
            }
            if (b[i][j] < 0)
                fail_validation("DimensionMismatch", "transfers are nonnegative",
                                "negative transfer");
            k[0] += b[i][j] * pi[i][j];
            if (i >= 1) k[i] += b[i][j];
            if (j >= 1) k[j] -= b[i][j];
        }
    }
    return k;
}

namespace {

// smallest rational on the 2^-32 grid that dominates the Euclidean norm
Rat norm_upper_bound(const RatVec& w) {
    Rat nsq = 0;
    for (const auto& q : w) nsq += q * q;
    double approx = std::sqrt(rat_to_double(nsq));
    Rat q(static_cast<long>(std::ceil(approx * 4294967296.0)), 4294967296L);
    q.canonicalize();
    const Rat step(1, 4294967296L);
    while (q * q < nsq) q += step;
    while (q > step && (q - step) * (q - step) >= nsq) q -= step;
    return q;
}

} // namespace

SolvencyCone build_cone(const ExchangeMatrix& ex, bool allow_degenerate) {
    validate_exchange(ex, allow_degenerate);
    SolvencyCone sc;
    sc.ex = ex;
    RatMat pi = exchange_pi(ex);
    for (int i = 0; i < ex.d; ++i)
        for (int j = 0; j < ex.d; ++j) {
            if (i == j) continue;
            RatVec g(ex.d, Rat(0));
            g[0] = pi[i][j];
            if (i >= 1) g[i] += 1;
            if (j >= 1) g[j] -= 1;
            sc.generators.push_back(std::move(g));
            sc.generator_ids.emplace_back(i, j);
        }
    RatMat rays = sc.generators;
    {
        // disposal direction in asset 1; redundant unless round trips are free
        RatVec e0(ex.d, Rat(0));
        e0[0] = 1;
        rays.push_back(std::move(e0));
    }
    sc.cone = Polyhedron::cone_from_rays(ex.d, std::move(rays));
    for (const auto& row : sc.cone.h().rows) {
        if (row.offset != 0)
            fail_internal("InternalCheck", "cone facets pass through the origin",
                         "nonzero facet offset");
        sc.dual_generators.push_back(row.normal);
        sc.dual_unit_rational.push_back(scale(row.normal, Rat(1) / norm_upper_bound(row.normal)));
        double n2 = 0;
        std::vector<double> f(row.normal.size());
        for (size_t c = 0; c < f.size(); ++c) {
            f[c] = rat_to_double(row.normal[c]);
            n2 += f[c] * f[c];
        }
        double inv = 1.0 / std::sqrt(n2);
        for (auto& x : f) x *= inv;
        sc.unit_normals.push_back(std::move(f));
    }
    return sc;
}

std::optional<RatMat> transfer_witness(const ExchangeMatrix& ex, const RatVec& target) {
    if (static_cast<int>(target.size()) != ex.d)
        fail_validation("DimensionMismatch", "target length equals d", "bad target length");
    int d = ex.d;
    int nv = d * (d - 1);
    RatMat pi = exchange_pi(ex);
    // column layout: row-major off-diagonal pairs
    std::vector<std::pair<int, int>> ids;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) ids.emplace_back(i, j);

    LpProblem lp(nv);
    for (int c = 0; c < d; ++c) {
        RatVec coeffs(nv, Rat(0));
        for (int v = 0; v < nv; ++v) {
            auto [i, j] = ids[v];
            if (c == 0) coeffs[v] = pi[i][j];
            else {
                if (i == c) coeffs[v] += 1;
                if (j == c) coeffs[v] -= 1;
            }
        }
        lp.add_row(coeffs, RowRel::eq, target[c]);
    }
    RatVec ones(nv, Rat(1));
    std::vector<int> order(nv);
    for (int v = 0; v < nv; ++v) order[v] = v;
    LpResult r = lp.lex_minimize(ones, order);
    if (r.status != LpStatus::optimal) return std::nullopt;
    RatMat b(d, RatVec(d, Rat(0)));
    for (int v = 0; v < nv; ++v) b[ids[v].first][ids[v].second] = r.x[v];
    return b;
}

RatMat decompose(const SolvencyCone& sc, const RatVec& alpha) {
    if (static_cast<int>(alpha.size()) != sc.ex.d)
        fail_validation("DimensionMismatch", "alpha length equals d", "bad alpha length");
    for (const auto& a : alpha)
        if (a < 0)
            fail_validation("DimensionMismatch", "alpha is componentwise nonnegative",
                            "negative alpha component");
    auto b = transfer_witness(sc.ex, alpha);
    if (!b)
        fail_runtime("NotInCone", "nonnegative targets admit a transfer witness",
                     "decomposition infeasible");
    return *b;
}

RatMat physical_generators(const SolvencyCone& sc, const RatVec& y) {
    if (static_cast<int>(y.size()) != sc.ex.d)
        fail_validation("DimensionMismatch", "price length equals d", "bad price length");
    for (const auto& q : y)
        if (q <= 0)
            fail_validation("NonPositivePrice", "prices are strictly positive",
                            "nonpositive price");
    RatMat out;
    out.reserve(sc.generators.size());
    for (const auto& g : sc.generators) {
        RatVec gh(g.size());
        for (size_t c = 0; c < g.size(); ++c) gh[c] = g[c] / y[c];
        out.push_back(std::move(gh));
    }
    return out;
}

Polyhedron physical_cone(const SolvencyCone& sc, const RatVec& y) {
    if (static_cast<int>(y.size()) != sc.ex.d)
        fail_validation("DimensionMismatch", "price length equals d", "bad price length");
    for (const auto& q : y)
        if (q <= 0)
            fail_validation("NonPositivePrice", "prices are strictly positive",
                            "nonpositive price");
    RatMat rays;
    for (const auto& r : sc.cone.v().rays) {
        RatVec rh(r.size());
        for (size_t c = 0; c < r.size(); ++c) rh[c] = r[c] / y[c];
        rays.push_back(std::move(rh));
    }
    return Polyhedron::cone_from_rays(sc.ex.d, std::move(rays));
}

bool dual_membership(const SolvencyCone& sc, const RatVec& y, const RatVec& z) {
    int d = sc.ex.d;
    if (static_cast<int>(y.size()) != d || static_cast<int>(z.size()) != d)
        fail_validation("DimensionMismatch", "vector lengths equal d", "bad vector length");
    for (const auto& q : y)
        if (q <= 0)
            fail_validation("NonPositivePrice", "prices are strictly positive",
                            "nonpositive price");
    Rat base = z[0] / y[0];
    if (base < 0) return false;
    for (int i = 1; i < d; ++i) {
        Rat ri = z[i] / y[i];
        if (ri < (Rat(1) - sc.ex.mu[i][0]) * base) return false;
        if (ri > (Rat(1) + sc.ex.mu[0][i]) * base) return false;
    }
    for (int i = 1; i < d; ++i)
        for (int j = 1; j < d; ++j) {
            if (i == j) continue;
            if (z[j] / y[j] - z[i] / y[i] > sc.ex.mu[i][j] * base) return false;
        }
    return true;
}

bool dual_membership_by_generators(const SolvencyCone& sc, const RatVec& y, const RatVec& z) {
    for (const auto& g : physical_generators(sc, y))
        if (dot(z, g) < 0) return false;
    return z[0] >= 0;
}

RatVec dual_interior_point(const SolvencyCone& sc, const RatVec& y) {
    RatVec z(sc.ex.d, Rat(0));
    for (const auto& w : sc.dual_generators) {
        RatVec ws = scale_first_nonzero(w);
        for (int c = 0; c < sc.ex.d; ++c) z[c] += ws[c];
    }
    for (int c = 0; c < sc.ex.d; ++c) z[c] *= y[c];
    if (z[0] <= 0)
        fail_internal("InternalCheck", "dual cone has interior with positive asset-1 weight",
                     "degenerate dual interior");
    Rat f = z[0];
    for (auto& q : z) q /= f;
    return z;
}

EpsCone make_eps_cone(const SolvencyCone& sc, const std::vector<double>& y, double eps) {
    if (static_cast<int>(y.size()) != sc.ex.d)
        fail_validation("DimensionMismatch", "price length equals d", "bad price length");
    if (eps < 0)
        fail_validation("DimensionMismatch", "relaxation is nonnegative", "negative eps");
    EpsCone kc;
    kc.y = y;
    kc.eps = eps;
    for (const auto& w : sc.unit_normals) {
        std::vector<double> row(w.size());
        for (size_t c = 0; c < w.size(); ++c) row[c] = w[c] * y[c];
        kc.scaled_normals.push_back(std::move(row));
    }
    return kc;
}

bool eps_membership(const EpsCone& kc, const std::vector<double>& x) {
    double xinf = 0;
    for (double v : x) xinf = std::max(xinf, std::fabs(v));
    double slack = 1e-12 * (1.0 + xinf);
    for (const auto& a : kc.scaled_normals) {
        double s = 0;
        for (size_t c = 0; c < x.size(); ++c) s += a[c] * x[c];
        if (s < -kc.eps * xinf - slack) return false;
    }
    return true;
}

bool eps_inclusion_check(const SolvencyCone& sc, const std::vector<double>& y,
                         const std::vector<double>& y2, double eps1, double eps2,
                         int n_samples, uint64_t seed) {
    double dist2 = 0;
    for (size_t c = 0; c < y.size(); ++c) dist2 += (y[c] - y2[c]) * (y[c] - y2[c]);
    if (std::sqrt(dist2) > eps1 + 1e-15)
        fail_validation("PreconditionViolated", "price shift bounded by eps1",
                        "prices farther apart than eps1");

    RatVec yr(y.size()), dummy;
    for (size_t c = 0; c < y.size(); ++c) yr[c] = rat_from_double(y[c]);
    RatMat gens = physical_generators(sc, yr);
    std::vector<std::vector<double>> gflt;
    for (const auto& g : gens) {
        std::vector<double> f(g.size());
        for (size_t c = 0; c < g.size(); ++c) f[c] = rat_to_double(g[c]);
        gflt.push_back(std::move(f));
    }
    EpsCone inner = make_eps_cone(sc, y, eps2);
    EpsCone outer = make_eps_cone(sc, y2, eps1 + eps2);

    CounterRng rng(seed, 0);
    int d = sc.ex.d;
    int produced = 0;
    long budget = 200L * n_samples;
    while (produced < n_samples && budget-- > 0) {
        std::vector<double> x(d, 0.0);
        if (produced % 2 == 0) {
            // interior family: conic combination of generators
            for (const auto& g : gflt) {
                double c = rng.next_uniform();
                c = c * c * 3.0;
                for (int k = 0; k < d; ++k) x[k] += c * g[k];
            }
        } else {
            // boundary-slack family: rejection-sampled box points
            double sc_f = 1.0 + 3.0 * rng.next_uniform();
            for (int k = 0; k < d; ++k) x[k] = sc_f * (2.0 * rng.next_uniform() - 1.0);
            if (!eps_membership(inner, x)) continue;
        }
        ++produced;
        if (!eps_membership(outer, x)) return false;
    }
    return true;
}

std::vector<Polyhedron> eps_cone_pieces(const SolvencyCone& sc, const RatVec& y,
                                        const Rat& eps) {
    int d = sc.ex.d;
    if (static_cast<int>(y.size()) != d)
        fail_validation("DimensionMismatch", "price length equals d", "bad price length");
    RatMat base;
    for (const auto& w : sc.dual_unit_rational) {
        RatVec a(d);
        for (int c = 0; c < d; ++c) a[c] = w[c] * y[c];
        base.push_back(std::move(a));
    }
    std::vector<Polyhedron> pieces;
    auto add_piece = [&](const Polyhedron& p) {
        for (const auto& q : pieces)
            if (poly_contains(q, p)) return;
        std::vector<Polyhedron> kept;
        for (auto& q : pieces)
            if (!poly_contains(p, q)) kept.push_back(std::move(q));
        kept.push_back(p);
        pieces = std::move(kept);
    };
    if (eps == 0) {
        HRep h;
        h.dim = d;
        for (const auto& a : base) h.rows.push_back(HalfSpace{a, Rat(0)});
        pieces.push_back(Polyhedron::from_h(std::move(h)));
        return pieces;
    }
    for (int i = 0; i < d; ++i) {
        for (int s = -1; s <= 1; s += 2) {
            HRep h;
            h.dim = d;
            for (const auto& a : base) {
                RatVec row = a;
                row[i] += Rat(s) * eps;
                if (is_zero_vec(row)) continue;
                h.rows.push_back(HalfSpace{std::move(row), Rat(0)});
            }
            add_piece(Polyhedron::from_h(std::move(h)));
        }
    }
    return pieces;
}

} // namespace shp
