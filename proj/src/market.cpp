#include "shp/market.hpp"

#include <cmath>
#include <cstdio>
#include <tuple>

#include "shp/rng.hpp"

namespace shp {

void validate_model(const MarketModel& model) {
    if (model.d < 2)
        fail_validation("InvalidModel", "at least two assets", "need d >= 2");
    if (model.m != model.d - 1)
        fail_validation("InvalidModel", "driver count equals d-1", "bad driver count");
    if (static_cast<int>(model.s0.size()) != model.d)
        fail_validation("InvalidModel", "initial price length equals d", "bad s0 length");
    if (model.s0[0] != 1)
        fail_validation("InvalidModel", "numeraire starts at one", "s0[0] != 1");
    for (const auto& p : model.s0)
        if (p <= 0)
            fail_validation("InvalidModel", "initial prices strictly positive",
                            "nonpositive s0 entry");
    if (model.horizon <= 0)
        fail_validation("InvalidModel", "horizon positive", "T <= 0");
    size_t ns = model.cuts.size();
    if (ns == 0 || model.cuts.back() != model.horizon)
        fail_validation("InvalidModel", "segments cover [0,T]", "segment grid misses T");
    Rat prev(0);
    for (const auto& c : model.cuts) {
        if (c <= prev)
            fail_validation("InvalidModel", "segment ends strictly increase",
                            "non-increasing segment end");
        prev = c;
    }
    if (model.r_seg.size() != ns || model.b_seg.size() != ns || model.sigma_seg.size() != ns)
        fail_validation("InvalidModel", "one coefficient value per segment",
                        "coefficient count mismatch");
    for (size_t k = 0; k < ns; ++k) {
        if (static_cast<int>(model.b_seg[k].size()) != model.d - 1)
            fail_validation("InvalidModel", "drift rows cover assets 2..d",
                            "bad drift row count");
        if (static_cast<int>(model.sigma_seg[k].size()) != model.d - 1)
            fail_validation("InvalidModel", "volatility rows cover assets 2..d",
                            "bad volatility row count");
        for (const auto& row : model.sigma_seg[k])
            if (static_cast<int>(row.size()) != model.m)
                fail_validation("InvalidModel", "volatility rows have one column per driver",
                                "bad volatility row length");
    }
}

std::vector<std::tuple<Rat, Rat, int>> subsegments(const MarketModel& model, const Rat& a,
                                                   const Rat& b) {
    if (a < 0 || b > model.horizon || a > b)
        fail_validation("InvalidModel", "integration window inside [0,T]",
                        "bad integration window");
    std::vector<std::tuple<Rat, Rat, int>> out;
    Rat lo(0);
    for (size_t k = 0; k < model.cuts.size(); ++k) {
        Rat hi = model.cuts[k];
        Rat s = std::max(a, lo);
        Rat e = std::min(b, hi);
        if (s < e) out.emplace_back(s, e, static_cast<int>(k));
        lo = hi;
    }
    return out;
}

int segment_at(const MarketModel& model, const Rat& t) {
    if (t < 0 || t > model.horizon)
        fail_validation("InvalidModel", "time inside [0,T]", "time out of range");
    for (size_t k = 0; k < model.cuts.size(); ++k)
        if (t < model.cuts[k]) return static_cast<int>(k);
    return static_cast<int>(model.cuts.size()) - 1;
}

Rat rate_integral(const MarketModel& model, const Rat& a, const Rat& b) {
    Rat acc(0);
    for (const auto& [s, e, k] : subsegments(model, a, b)) acc += (e - s) * model.r_seg[k];
    return acc;
}

RatVec drift_integral(const MarketModel& model, const Rat& a, const Rat& b) {
    RatVec acc(model.d - 1, Rat(0));
    for (const auto& [s, e, k] : subsegments(model, a, b)) {
        Rat len = e - s;
        for (int i = 0; i < model.d - 1; ++i) {
            Rat s2(0);
            for (const auto& v : model.sigma_seg[k][i]) s2 += v * v;
            acc[i] += len * (model.b_seg[k][i] - s2 / 2);
        }
    }
    return acc;
}

RatMat sigma_average(const MarketModel& model, const Rat& a, const Rat& b) {
    RatMat acc(model.d - 1, RatVec(model.m, Rat(0)));
    for (const auto& [s, e, k] : subsegments(model, a, b)) {
        Rat len = e - s;
        for (int i = 0; i < model.d - 1; ++i)
            for (int l = 0; l < model.m; ++l) acc[i][l] += len * model.sigma_seg[k][i][l];
    }
    Rat width = b - a;
    if (width > 0)
        for (auto& row : acc)
            for (auto& v : row) v /= width;
    return acc;
}

PathSet simulate_paths(const MarketModel& model, int n_paths, int n_steps, uint64_t seed) {
    validate_model(model);
    if (n_paths < 1 || n_steps < 1)
        fail_validation("InvalidModel", "path and step counts positive",
                        "need n_paths, n_steps >= 1");
    PathSet out;
    out.d = model.d;
    out.n_steps = n_steps;
    out.grid.reserve(n_steps + 1);
    for (int i = 0; i <= n_steps; ++i)
        out.grid.push_back(model.horizon * Rat(i) / Rat(n_steps));

    // precompute per-step exact coefficients shared by all paths
    struct Sub {
        double len;
        double r;
        std::vector<double> drift;           // per risky asset
        std::vector<std::vector<double>> sg; // per risky asset, per driver
    };
    std::vector<std::vector<Sub>> step_subs(n_steps);
    for (int k = 0; k < n_steps; ++k) {
        for (const auto& [s, e, seg] : subsegments(model, out.grid[k], out.grid[k + 1])) {
            Sub sub;
            Rat len = e - s;
            sub.len = rat_to_double(len);
            sub.r = rat_to_double(model.r_seg[seg]);
            for (int i = 0; i < model.d - 1; ++i) {
                Rat s2(0);
                for (const auto& v : model.sigma_seg[seg][i]) s2 += v * v;
                sub.drift.push_back(rat_to_double(len * (model.b_seg[seg][i] - s2 / 2)));
                std::vector<double> row;
                for (const auto& v : model.sigma_seg[seg][i]) row.push_back(rat_to_double(v));
                sub.sg.push_back(std::move(row));
            }
            step_subs[k].push_back(std::move(sub));
        }
    }

    std::vector<double> start(model.d);
    for (int c = 0; c < model.d; ++c) start[c] = rat_to_double(model.s0[c]);

    out.s.resize(n_paths);
    out.dw.resize(n_paths);
    for (int p = 0; p < n_paths; ++p) {
        CounterRng rng(seed, static_cast<uint64_t>(p));
        auto& sp = out.s[p];
        auto& wp = out.dw[p];
        sp.resize(n_steps + 1);
        wp.resize(n_steps);
        sp[0] = start;
        std::vector<double> logs(model.d - 1, 0.0);
        double log1 = 0.0;
        for (int k = 0; k < n_steps; ++k) {
            wp[k].assign(model.m, 0.0);
            for (const auto& sub : step_subs[k]) {
                double sq = std::sqrt(sub.len);
                std::vector<double> dwl(model.m);
                for (int l = 0; l < model.m; ++l) {
                    dwl[l] = sq * rng.next_normal();
                    wp[k][l] += dwl[l];
                }
                log1 += sub.r * sub.len;
                for (int i = 0; i < model.d - 1; ++i) {
                    double inc = sub.drift[i];
                    for (int l = 0; l < model.m; ++l) inc += sub.sg[i][l] * dwl[l];
                    logs[i] += inc;
                }
            }
            sp[k + 1].resize(model.d);
            sp[k + 1][0] = start[0] * std::exp(log1);
            for (int i = 0; i < model.d - 1; ++i)
                sp[k + 1][i + 1] = start[i + 1] * std::exp(logs[i]);
        }
    }
    return out;
}

std::string paths_csv(const PathSet& paths, int path_index) {
    if (path_index < 0 || path_index >= static_cast<int>(paths.s.size()))
        fail_validation("InvalidModel", "path index within the simulated set",
                        "path index out of range");
    std::string out = "time";
    for (int c = 1; c <= paths.d; ++c) out += ",S" + std::to_string(c);
    out += "\n";
    char buf[64];
    for (int k = 0; k <= paths.n_steps; ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", rat_to_double(paths.grid[k]));
        out += buf;
        for (int c = 0; c < paths.d; ++c) {
            std::snprintf(buf, sizeof(buf), ",%.17g", paths.s[path_index][k][c]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

namespace {

// nearest rational on the 2^-32 grid (ties round up)
Rat snap_price(double p) {
    Rat scaled = rat_from_double(p) * Rat(4294967296L);
    mpz_class num = 2 * scaled.get_num() + scaled.get_den();
    mpz_class den = 2 * scaled.get_den();
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    Rat out(q, mpz_class(4294967296L));
    out.canonicalize();
    return out;
}

} // namespace

PriceTree build_tree(const MarketModel& model, int periods) {
    validate_model(model);
    if (periods < 1)
        fail_validation("InvalidModel", "at least one period", "periods < 1");
    PriceTree tree;
    tree.d = model.d;
    tree.m = model.m;
    tree.periods = periods;
    tree.branch = 1 << model.m;
    tree.horizon = model.horizon;
    tree.child_prob = Rat(1, tree.branch);

    long long total = 0, level_nodes = 1;
    for (int l = 0; l <= periods; ++l) {
        total += level_nodes;
        if (total > 1000000)
            fail_runtime("BudgetExceeded", "tree holds at most 1e6 nodes",
                         "node budget exceeded");
        level_nodes *= tree.branch;
    }

    for (int p = 0; p <= periods; ++p)
        tree.times.push_back(model.horizon * Rat(p) / Rat(periods));

    tree.prices.resize(periods + 1);
    tree.prices_rat.resize(periods + 1);
    tree.path_prob.resize(periods + 1);
    tree.prices[0].push_back(std::vector<double>(model.d));
    for (int c = 0; c < model.d; ++c) tree.prices[0][0][c] = rat_to_double(model.s0[c]);
    tree.path_prob[0].push_back(Rat(1));

    for (int p = 0; p < periods; ++p) {
        const Rat& a = tree.times[p];
        const Rat& b = tree.times[p + 1];
        double rint = rat_to_double(rate_integral(model, a, b));
        RatVec drift = drift_integral(model, a, b);
        RatMat sbar = sigma_average(model, a, b);
        std::vector<double> drift_d(model.d - 1);
        std::vector<std::vector<double>> sbar_d(model.d - 1, std::vector<double>(model.m));
        for (int i = 0; i < model.d - 1; ++i) {
            drift_d[i] = rat_to_double(drift[i]);
            for (int l = 0; l < model.m; ++l) sbar_d[i][l] = rat_to_double(sbar[i][l]);
        }
        double sqdt = std::sqrt(rat_to_double(b - a));
        size_t parents = tree.prices[p].size();
        tree.prices[p + 1].resize(parents * tree.branch);
        tree.path_prob[p + 1].resize(parents * tree.branch);
        for (size_t i = 0; i < parents; ++i) {
            const auto& par = tree.prices[p][i];
            for (int c = 0; c < tree.branch; ++c) {
                std::vector<double> child(model.d);
                child[0] = par[0] * std::exp(rint);
                for (int k = 0; k < model.d - 1; ++k) {
                    double inc = drift_d[k];
                    for (int l = 0; l < model.m; ++l) {
                        double sign = ((c >> l) & 1) ? 1.0 : -1.0;
                        inc += sbar_d[k][l] * sign * sqdt;
                    }
                    child[k + 1] = par[k + 1] * std::exp(inc);
                }
                size_t idx = i * tree.branch + c;
                tree.prices[p + 1][idx] = std::move(child);
                tree.path_prob[p + 1][idx] = tree.path_prob[p][i] * tree.child_prob;
            }
        }
    }

    for (int p = 0; p <= periods; ++p) {
        tree.prices_rat[p].resize(tree.prices[p].size());
        for (size_t i = 0; i < tree.prices[p].size(); ++i) {
            RatVec pr(model.d);
            for (int c = 0; c < model.d; ++c) {
                pr[c] = snap_price(tree.prices[p][i][c]);
                if (pr[c] <= 0)
                    fail_runtime("NonpositivePrice",
                                 "tree prices stay strictly positive after rounding",
                                 "price collapsed to the grid origin");
            }
            tree.prices_rat[p][i] = std::move(pr);
        }
    }
    return tree;
}

void validate_claim(const Claim& claim, int d) {
    if (claim.lipschitz < 1)
        fail_validation("InvalidModel", "Lipschitz constant at least one", "L < 1");
    switch (claim.kind) {
    case ClaimKind::constant_physical:
        if (static_cast<int>(claim.constant.size()) != d)
            fail_validation("InvalidModel", "constant claim length equals d",
                            "bad claim vector length");
        break;
    case ClaimKind::vanilla_call:
        if (claim.call_asset < 2 || claim.call_asset > d)
            fail_validation("InvalidModel", "call asset lies in 2..d", "bad call asset");
        if (claim.strike <= 0)
            fail_validation("InvalidModel", "strike positive", "strike <= 0");
        break;
    case ClaimKind::linear_basket:
        if (static_cast<int>(claim.weights.size()) != d)
            fail_validation("InvalidModel", "basket weight length equals d",
                            "bad weight length");
        break;
    }
}

Rat claim_lipschitz(const Claim& claim) {
    Rat base(1);
    if (claim.kind == ClaimKind::linear_basket) {
        Rat s(0);
        for (const auto& w : claim.weights) s += abs(w);
        if (s > base) base = s;
    }
    return std::max(base, claim.lipschitz);
}

RatVec claim_payoff(const Claim& claim, const RatVec& leaf_prices) {
    int d = static_cast<int>(leaf_prices.size());
    for (const auto& p : leaf_prices)
        if (p <= 0)
            fail_validation("NonpositivePrice", "leaf prices strictly positive",
                            "nonpositive leaf price");
    validate_claim(claim, d);
    RatVec x(d, Rat(0));
    switch (claim.kind) {
    case ClaimKind::constant_physical:
        return claim.constant;
    case ClaimKind::vanilla_call: {
        Rat pay = leaf_prices[claim.call_asset - 1] - claim.strike;
        if (pay < 0) pay = 0;
        x[0] = pay / leaf_prices[0];
        return x;
    }
    case ClaimKind::linear_basket: {
        Rat pay(0);
        for (int c = 0; c < d; ++c) pay += claim.weights[c] * leaf_prices[c];
        x[0] = pay / leaf_prices[0];
        return x;
    }
    }
    fail_internal("InternalCheck", "claim kind handled", "unreachable claim kind");
}

std::vector<double> claim_payoff_f(const Claim& claim, const std::vector<double>& leaf_prices) {
    int d = static_cast<int>(leaf_prices.size());
    for (double p : leaf_prices)
        if (!(p > 0))
            fail_validation("NonpositivePrice", "leaf prices strictly positive",
                            "nonpositive leaf price");
    validate_claim(claim, d);
    std::vector<double> x(d, 0.0);
    switch (claim.kind) {
    case ClaimKind::constant_physical:
        for (int c = 0; c < d; ++c) x[c] = rat_to_double(claim.constant[c]);
        return x;
    case ClaimKind::vanilla_call: {
        double pay = leaf_prices[claim.call_asset - 1] - rat_to_double(claim.strike);
        if (pay < 0) pay = 0;
        x[0] = pay / leaf_prices[0];
        return x;
    }
    case ClaimKind::linear_basket: {
        double pay = 0;
        for (int c = 0; c < d; ++c) pay += rat_to_double(claim.weights[c]) * leaf_prices[c];
        x[0] = pay / leaf_prices[0];
        return x;
    }
    }
    fail_internal("InternalCheck", "claim kind handled", "unreachable claim kind");
}

} // namespace shp
