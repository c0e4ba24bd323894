#include "shp/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "shp/errors.hpp"
#include "shp/portfolio.hpp"
#include "shp/pricing.hpp"
#include "shp/rng.hpp"
#include "shp/superhedge.hpp"

namespace shp {

namespace {

// ---------------------------------------------------------------- parsing

void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known)
            fail_validation("BadConfig", "only documented keys are accepted",
                            "unknown key \"" + it.key() + "\" in " + where);
    }
}

const Json& need_key(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key))
        fail_validation("BadConfig", "required key is present",
                        "missing key \"" + std::string(key) + "\" in " + where);
    return obj.at(key);
}

long int_from_json(const Json& j, const std::string& where) {
    if (!j.is_number_integer())
        fail_validation("BadConfig", "value is an integer", where + " must be an integer");
    return j.get<long>();
}

bool bool_from_json(const Json& j, const std::string& where) {
    if (!j.is_boolean())
        fail_validation("BadConfig", "value is a boolean", where + " must be a boolean");
    return j.get<bool>();
}

// piecewise coefficient: either a bare value (one segment to T) or an array of
// {"until": t, "value": v} objects with increasing end times, the last at T
struct SegList {
    std::vector<Rat> until;
    std::vector<Json> value;
};

SegList parse_seglist(const Json& j, const Rat& horizon, const std::string& key) {
    SegList out;
    if (j.is_array() && !j.empty() && j.front().is_object()) {
        for (const auto& seg : j) {
            if (!seg.is_object())
                fail_validation("BadConfig", "segments are {until, value} objects",
                                "mixed segment forms in \"" + key + "\"");
            reject_unknown(seg, {"until", "value"}, "\"" + key + "\" segment");
            out.until.push_back(rat_from_json(need_key(seg, "until", key)));
            out.value.push_back(need_key(seg, "value", key));
        }
        for (size_t i = 0; i < out.until.size(); ++i) {
            if (out.until[i] <= (i == 0 ? Rat(0) : out.until[i - 1]))
                fail_validation("BadConfig", "segment end times increase strictly",
                                "non-increasing \"until\" in \"" + key + "\"");
        }
        if (out.until.back() != horizon)
            fail_validation("BadConfig", "the last segment ends at the horizon",
                            "\"" + key + "\" does not cover [0, T]");
    } else {
        out.until = {horizon};
        out.value = {j};
    }
    return out;
}

// value of a piecewise list on the segment ending at cut (cuts refine untils)
const Json& seg_value_at(const SegList& s, const Rat& cut) {
    for (size_t i = 0; i < s.until.size(); ++i)
        if (cut <= s.until[i]) return s.value[i];
    return s.value.back();
}

MarketModel parse_market(const Json& j) {
    if (!j.is_object())
        fail_validation("BadConfig", "\"market\" is an object", "market block is not an object");
    reject_unknown(j, {"s0", "T", "r", "b", "sigma"}, "\"market\"");
    MarketModel m;
    m.s0 = rat_vec_from_json(need_key(j, "s0", "market"));
    m.d = static_cast<int>(m.s0.size());
    m.m = m.d - 1;
    m.horizon = rat_from_json(need_key(j, "T", "market"));
    if (m.horizon <= 0)
        fail_validation("BadConfig", "horizon is positive", "nonpositive horizon");

    SegList r_list = parse_seglist(need_key(j, "r", "market"), m.horizon, "r");
    SegList b_list = parse_seglist(need_key(j, "b", "market"), m.horizon, "b");
    SegList s_list = parse_seglist(need_key(j, "sigma", "market"), m.horizon, "sigma");

    // shared cut grid: the sorted union of all segment ends
    std::vector<Rat> cuts;
    for (const auto* l : {&r_list, &b_list, &s_list})
        cuts.insert(cuts.end(), l->until.begin(), l->until.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    m.cuts = cuts;

    for (const Rat& cut : cuts) {
        Rat r = rat_from_json(seg_value_at(r_list, cut));
        m.r_seg.push_back(r);

        RatVec b = rat_vec_from_json(seg_value_at(b_list, cut));
        if (static_cast<int>(b.size()) == m.d) {
            if (b[0] != r)
                fail_validation("BadConfig",
                                "a d-long drift row starts with the riskless rate",
                                "drift row disagrees with r on asset 1");
            b.erase(b.begin());
        }
        if (static_cast<int>(b.size()) != m.d - 1)
            fail_validation("BadConfig", "drift rows have d-1 (or d) entries",
                            "bad drift row length");
        m.b_seg.push_back(std::move(b));

        RatMat sig = rat_mat_from_json(seg_value_at(s_list, cut));
        if (static_cast<int>(sig.size()) == m.d) {
            for (const Rat& q : sig.front())
                if (q != 0)
                    fail_validation("BadConfig",
                                    "a d-row volatility block starts with a zero row",
                                    "nonzero volatility on asset 1");
            sig.erase(sig.begin());
        }
        if (static_cast<int>(sig.size()) != m.d - 1)
            fail_validation("BadConfig", "volatility blocks have d-1 (or d) rows",
                            "bad volatility row count");
        for (const auto& row : sig)
            if (static_cast<int>(row.size()) != m.m)
                fail_validation("BadConfig", "volatility rows have one entry per driver",
                                "bad volatility row length");
        m.sigma_seg.push_back(std::move(sig));
    }
    validate_model(m);
    return m;
}

Claim parse_claim(const Json& j, int d) {
    if (!j.is_object())
        fail_validation("BadConfig", "\"claim\" is an object", "claim block is not an object");
    reject_unknown(j, {"kind", "constant", "asset", "strike", "weights", "lipschitz"},
                   "\"claim\"");
    Claim c;
    std::string kind = need_key(j, "kind", "claim").get<std::string>();
    if (kind == "constant_physical")
        c.kind = ClaimKind::constant_physical;
    else if (kind == "vanilla_call")
        c.kind = ClaimKind::vanilla_call;
    else if (kind == "linear_basket")
        c.kind = ClaimKind::linear_basket;
    else
        fail_validation("BadConfig",
                        "claim kind is constant_physical, vanilla_call, or linear_basket",
                        "unknown claim kind \"" + kind + "\"");
    if (j.contains("constant")) c.constant = rat_vec_from_json(j.at("constant"));
    if (j.contains("asset"))
        c.call_asset = static_cast<int>(int_from_json(j.at("asset"), "claim.asset"));
    if (j.contains("strike")) c.strike = rat_from_json(j.at("strike"));
    if (j.contains("weights")) c.weights = rat_vec_from_json(j.at("weights"));
    if (j.contains("lipschitz")) c.lipschitz = rat_from_json(j.at("lipschitz"));
    validate_claim(c, d);
    return c;
}

uint64_t seed_from_json(const Json& j) {
    if (j.is_number_unsigned()) return j.get<uint64_t>();
    if (j.is_number_integer()) {
        long v = j.get<long>();
        if (v >= 0) return static_cast<uint64_t>(v);
    }
    if (j.is_string()) {
        try {
            return std::stoull(j.get<std::string>());
        } catch (...) {
        }
    }
    fail_validation("BadConfig", "seed is an unsigned 64-bit integer", "bad seed value");
}

} // namespace

RunConfig parse_config(const Json& doc) {
    if (!doc.is_object())
        fail_validation("BadConfig", "config is a JSON object", "config root is not an object");
    reject_unknown(doc,
                   {"market", "mu", "claim", "periods", "eps", "seed", "out",
                    "allow_degenerate", "mode", "alpha", "xi", "quick", "paths", "steps",
                    "samples"},
                   "config");
    RunConfig cfg;
    if (doc.contains("allow_degenerate"))
        cfg.allow_degenerate = bool_from_json(doc.at("allow_degenerate"), "allow_degenerate");
    if (doc.contains("quick")) cfg.quick = bool_from_json(doc.at("quick"), "quick");
    if (doc.contains("seed")) cfg.seed = seed_from_json(doc.at("seed"));
    if (doc.contains("out")) {
        if (!doc.at("out").is_string())
            fail_validation("BadConfig", "\"out\" is a directory path string", "bad out value");
        cfg.out_dir = doc.at("out").get<std::string>();
    }
    if (doc.contains("mode")) {
        if (!doc.at("mode").is_string())
            fail_validation("BadConfig", "mode is \"tree\" or \"mc\"", "bad mode value");
        cfg.mode = doc.at("mode").get<std::string>();
    }
    if (cfg.mode != "tree" && cfg.mode != "mc")
        fail_validation("BadConfig", "mode is \"tree\" or \"mc\"",
                        "unknown mode \"" + cfg.mode + "\"");

    if (doc.contains("periods")) {
        long p = int_from_json(doc.at("periods"), "periods");
        if (p < 1 || p > 16)
            fail_validation("BadConfig", "periods lies in [1, 16]", "periods out of range");
        cfg.periods = static_cast<int>(p);
    }
    auto positive_int = [&](const char* key, int def, long cap) {
        if (!doc.contains(key)) return def;
        long v = int_from_json(doc.at(key), key);
        if (v < 1 || v > cap)
            fail_validation("BadConfig", std::string(key) + " lies in [1, " +
                                             std::to_string(cap) + "]",
                            std::string(key) + " out of range");
        return static_cast<int>(v);
    };
    cfg.n_paths = positive_int("paths", cfg.n_paths, 2000000);
    cfg.n_steps = positive_int("steps", cfg.n_steps, 100000);
    cfg.n_samples = positive_int("samples", cfg.n_samples, 10000000);

    if (doc.contains("eps")) {
        const Json& e = doc.at("eps");
        if (!e.is_array() || e.empty())
            fail_validation("BadConfig", "eps is a nonempty array", "bad eps grid");
        cfg.eps_grid.clear();
        for (const auto& q : e) {
            Rat v = rat_from_json(q);
            if (v <= 0 || v > 1)
                fail_validation("BadConfig", "eps values lie in (0, 1]", "eps out of range");
            cfg.eps_grid.push_back(v);
        }
        std::sort(cfg.eps_grid.begin(), cfg.eps_grid.end());
        cfg.eps_grid.erase(std::unique(cfg.eps_grid.begin(), cfg.eps_grid.end()),
                           cfg.eps_grid.end());
    } else {
        cfg.eps_grid = {Rat(1, 20), Rat(1, 10), Rat(1, 5), Rat(2, 5)};
    }

    if (doc.contains("mu")) {
        cfg.mu = exchange_from_mu(rat_mat_from_json(doc.at("mu")));
        validate_exchange(cfg.mu, cfg.allow_degenerate);
        cfg.has_mu = true;
    }
    if (doc.contains("market")) {
        cfg.market = parse_market(doc.at("market"));
        cfg.has_market = true;
    }
    if (cfg.has_mu && cfg.has_market && cfg.mu.d != cfg.market.d)
        fail_validation("BadConfig", "cost matrix and market agree on d",
                        "mu is " + std::to_string(cfg.mu.d) + "x" + std::to_string(cfg.mu.d) +
                            " but the market has d = " + std::to_string(cfg.market.d));

    if (doc.contains("claim")) {
        if (!cfg.has_market)
            fail_validation("BadConfig", "a claim needs a market block",
                            "claim given without market");
        cfg.claim = parse_claim(doc.at("claim"), cfg.market.d);
        cfg.has_claim = true;
    }
    if (doc.contains("alpha")) {
        if (!cfg.has_mu)
            fail_validation("BadConfig", "alpha needs a cost matrix", "alpha given without mu");
        cfg.alpha = rat_vec_from_json(doc.at("alpha"));
        if (static_cast<int>(cfg.alpha.size()) != cfg.mu.d)
            fail_validation("BadConfig", "alpha has length d", "bad alpha length");
        cfg.has_alpha = true;
    }
    if (doc.contains("xi")) {
        int d = cfg.has_market ? cfg.market.d : (cfg.has_mu ? cfg.mu.d : 0);
        if (d == 0)
            fail_validation("BadConfig", "xi needs a market or cost matrix",
                            "xi given without dimension context");
        cfg.xi = rat_vec_from_json(doc.at("xi"));
        if (static_cast<int>(cfg.xi.size()) != d)
            fail_validation("BadConfig", "xi has length d", "bad xi length");
        cfg.has_xi = true;
    }
    return cfg;
}

RunConfig parse_config_text(const std::string& text) {
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded())
        fail_validation("BadConfig", "config is valid JSON", "config does not parse as JSON");
    return parse_config(doc);
}

namespace {

// ---------------------------------------------------------------- artifacts

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        fail_runtime("IoError", "output directory is writable",
                     "cannot create \"" + dir + "\": " + ec.message());
    std::filesystem::path p = std::filesystem::path(dir) / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f)
        fail_runtime("IoError", "output directory is writable", "cannot open " + p.string());
    f << text;
    if (!f)
        fail_runtime("IoError", "output directory is writable", "cannot write " + p.string());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json tree_to_json(const PriceTree& tree, const TreePriceProcess* z) {
    Json out;
    out["d"] = tree.d;
    out["m"] = tree.m;
    out["periods"] = tree.periods;
    out["branch"] = tree.branch;
    out["horizon"] = rat_to_string(tree.horizon);
    Json times = Json::array();
    for (const auto& t : tree.times) times.push_back(rat_to_string(t));
    out["times"] = times;
    Json levels = Json::array();
    for (int l = 0; l <= tree.periods; ++l) {
        Json nodes = Json::array();
        for (int i = 0; i < tree.nodes_at(l); ++i) {
            Json node;
            node["prices"] = rat_vec_to_json(tree.prices_rat[l][i]);
            node["prob"] = rat_to_string(tree.path_prob[l][i]);
            if (z) node["Z"] = rat_vec_to_json(z->z[l][i]);
            nodes.push_back(std::move(node));
        }
        levels.push_back(std::move(nodes));
    }
    out["levels"] = std::move(levels);
    return out;
}

// ---------------------------------------------------------------- fixtures

// mpq construction from two integers skips gcd reduction; arithmetic and
// comparisons need canonical operands, so reduce explicitly
Rat frac(long num, long den) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

Rat rand_cost(CounterRng& rng) { return frac(1 + static_cast<long>(rng.next_below(29)), 100); }

RatMat random_mu(CounterRng& rng, int d) {
    RatMat mu(d, RatVec(d, Rat(0)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) mu[i][j] = rand_cost(rng);
    // shortest-route closure of the gross prices keeps the triangle rule tight
    RatMat p(d, RatVec(d, Rat(1)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) p[i][j] = Rat(1) + mu[i][j];
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j && p[i][k] * p[k][j] < p[i][j]) p[i][j] = p[i][k] * p[k][j];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) mu[i][j] = (i == j) ? Rat(0) : p[i][j] - 1;
    return mu;
}

MarketModel random_market(CounterRng& rng, int d) {
    MarketModel m;
    m.d = d;
    m.m = d - 1;
    m.s0.assign(d, Rat(1));
    for (int i = 1; i < d; ++i) m.s0[i] = frac(75 + static_cast<long>(rng.next_below(51)), 100);
    m.horizon = 1;
    m.cuts = {Rat(1)};
    m.r_seg = {frac(static_cast<long>(rng.next_below(5)), 100)};
    RatVec b(d - 1);
    for (auto& q : b) q = frac(static_cast<long>(rng.next_below(11)), 100);
    m.b_seg = {b};
    RatMat sig(d - 1, RatVec(d - 1, Rat(0)));
    for (int i = 0; i < d - 1; ++i) {
        sig[i][i] = frac(10 + static_cast<long>(rng.next_below(31)), 100);
        for (int j = 0; j < i; ++j) sig[i][j] = frac(static_cast<long>(rng.next_below(11)), 100);
    }
    m.sigma_seg = {sig};
    validate_model(m);
    return m;
}

// wide cost band, capped drift, volatility floor: families in this range
// always admit a strictly consistent price process on short trees
RatMat pricing_mu(CounterRng& rng, int d) {
    RatMat mu(d, RatVec(d, Rat(0)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) mu[i][j] = frac(5 + static_cast<long>(rng.next_below(26)), 100);
    RatMat p(d, RatVec(d, Rat(1)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) p[i][j] = Rat(1) + mu[i][j];
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j && p[i][k] * p[k][j] < p[i][j]) p[i][j] = p[i][k] * p[k][j];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) mu[i][j] = (i == j) ? Rat(0) : p[i][j] - 1;
    return mu;
}

MarketModel pricing_market(CounterRng& rng, int d) {
    MarketModel m;
    m.d = d;
    m.m = d - 1;
    m.s0.assign(d, Rat(1));
    for (int i = 1; i < d; ++i) m.s0[i] = frac(80 + static_cast<long>(rng.next_below(41)), 100);
    m.horizon = 1;
    m.cuts = {Rat(1)};
    m.r_seg = {frac(static_cast<long>(rng.next_below(3)), 100)};
    RatVec b(d - 1);
    for (auto& q : b) q = frac(static_cast<long>(rng.next_below(6)), 100);
    m.b_seg = {b};
    RatMat sig(d - 1, RatVec(d - 1, Rat(0)));
    for (int i = 0; i < d - 1; ++i) {
        sig[i][i] = frac(15 + static_cast<long>(rng.next_below(16)), 100);
        for (int j = 0; j < i; ++j) sig[i][j] = frac(static_cast<long>(rng.next_below(6)), 100);
    }
    m.sigma_seg = {sig};
    validate_model(m);
    return m;
}

Claim random_claim(CounterRng& rng, int d) {
    Claim c;
    if (rng.next_below(2) == 0) {
        c.kind = ClaimKind::vanilla_call;
        c.call_asset = 2;
        c.strike = frac(80 + static_cast<long>(rng.next_below(41)), 100);
    } else {
        c.kind = ClaimKind::constant_physical;
        c.constant.assign(d, Rat(0));
        c.constant[0] = Rat(1 + static_cast<long>(rng.next_below(3)));
    }
    validate_claim(c, d);
    return c;
}

// ---------------------------------------------------------------- commands

Json cmd_cone(const RunConfig& cfg) {
    if (!cfg.has_mu)
        fail_validation("BadConfig", "cone needs a cost matrix", "config lacks \"mu\"");
    SolvencyCone sc = build_cone(cfg.mu, cfg.allow_degenerate);

    Json pairs = Json::array();
    for (const auto& [i, j] : sc.generator_ids) pairs.push_back(Json::array({i + 1, j + 1}));
    RatMat dual_scaled;
    for (const auto& w : sc.dual_generators) dual_scaled.push_back(scale_first_nonzero(w));

    Json out;
    out["command"] = "cone";
    out["d"] = cfg.mu.d;
    out["generators"] = rat_mat_to_json(sc.generators);
    out["generator_pairs"] = pairs;
    out["dual_generators"] = rat_mat_to_json(dual_scaled);
    out["vertex_count"] = sc.cone.v().vertices.size();
    out["ray_count"] = sc.cone.v().rays.size();
    out["facet_count"] = sc.cone.h().rows.size();

    if (!cfg.out_dir.empty()) {
        Json art;
        art["mu"] = rat_mat_to_json(cfg.mu.mu);
        art["cone"] = poly_to_json(sc.cone);
        art["generators"] = rat_mat_to_json(sc.generators);
        art["generator_pairs"] = pairs;
        art["dual_generators"] = rat_mat_to_json(dual_scaled);
        art["dual_unit_scaled"] = rat_mat_to_json(sc.dual_unit_rational);
        write_text(cfg.out_dir, "cone.json", dump_json(art));
    }
    return out;
}

Json cmd_decompose(const RunConfig& cfg) {
    if (!cfg.has_mu)
        fail_validation("BadConfig", "decompose needs a cost matrix", "config lacks \"mu\"");
    if (!cfg.has_alpha)
        fail_validation("BadConfig", "decompose needs a target vector",
                        "config lacks \"alpha\"");
    SolvencyCone sc = build_cone(cfg.mu, cfg.allow_degenerate);
    RatMat b = decompose(sc, cfg.alpha);
    RatVec agg = aggregate_transfers(cfg.mu, b);
    if (agg != cfg.alpha)
        fail_internal("InternalCheck", "decomposition reconstructs its target",
                      "aggregate of the witness differs from alpha");
    Json out;
    out["command"] = "decompose";
    out["alpha"] = rat_vec_to_json(cfg.alpha);
    out["transfers"] = rat_mat_to_json(b);
    out["aggregate"] = rat_vec_to_json(agg);
    out["exact"] = true;
    if (!cfg.out_dir.empty()) write_text(cfg.out_dir, "decompose.json", dump_json(out));
    return out;
}

Json cmd_tree(const RunConfig& cfg) {
    if (!cfg.has_market)
        fail_validation("BadConfig", "tree needs a market block", "config lacks \"market\"");
    PriceTree tree = build_tree(cfg.market, cfg.periods);
    long nodes = 0;
    for (int l = 0; l <= tree.periods; ++l) nodes += tree.nodes_at(l);

    Json out;
    out["command"] = "tree";
    out["d"] = tree.d;
    out["periods"] = tree.periods;
    out["branch"] = tree.branch;
    out["leaf_count"] = tree.nodes_at(tree.periods);
    out["node_count"] = nodes;
    Json times = Json::array();
    for (const auto& t : tree.times) times.push_back(rat_to_string(t));
    out["times"] = times;

    if (!cfg.out_dir.empty()) {
        write_text(cfg.out_dir, "tree.json", dump_json(tree_to_json(tree, nullptr)));
        PathSet paths = simulate_paths(cfg.market, 1, cfg.n_steps, cfg.seed);
        write_text(cfg.out_dir, "paths.csv", paths_csv(paths, 0));
    }
    return out;
}

struct SuperData {
    PriceTree tree;
    SolvencyCone sc;
    RatMat pay;
    SuperhedgeResult res;
};

SuperData build_super(const RunConfig& cfg) {
    if (!cfg.has_market || !cfg.has_mu || !cfg.has_claim)
        fail_validation("BadConfig", "superhedging needs market, mu, and claim blocks",
                        "config lacks market, mu, or claim");
    SuperData s{build_tree(cfg.market, cfg.periods),
                build_cone(cfg.mu, cfg.allow_degenerate),
                {},
                {}};
    s.pay = tree_leaf_payoffs(s.tree, cfg.claim);
    s.res = backward_sets(s.tree, s.sc, s.pay);
    return s;
}

Json cmd_superhedge(const RunConfig& cfg) {
    SuperData s = build_super(cfg);
    const Polyhedron& root = s.res.sets[0][0];

    Json dpp = Json::object();
    for (int u = 1; u < s.tree.periods; ++u) {
        bool ok = dpp_check(s.tree, s.res, u);
        dpp[std::to_string(u)] = ok;
        if (!ok)
            fail_internal("InternalCheck", "two-stage recomposition matches the root set",
                          "level " + std::to_string(u) + " recomposition differs");
    }

    // spot checks: the independent feasibility oracle must agree with the
    // recursion on the root vertices and on nearby shifted probes
    SuperhedgeOracle oracle(s.tree, s.sc, s.pay);
    int checked = 0;
    for (const auto& v : root.v().vertices) {
        for (const Rat& shift : {Rat(0), Rat(-1, 50), Rat(1, 50)}) {
            RatVec probe = v;
            for (auto& q : probe) q += shift;
            bool by_set = root.contains_point(probe);
            bool by_lp = oracle.contains(probe);
            if (by_set != by_lp)
                fail_internal("InternalCheck",
                              "recursion membership equals feasibility membership",
                              "oracle disagreement near a root vertex");
            ++checked;
        }
    }

    Json out;
    out["command"] = "superhedge";
    out["root_vertices"] = rat_mat_to_json(root.v().vertices);
    out["root_rays"] = rat_mat_to_json(root.v().rays);
    out["dpp"] = dpp;
    out["oracle_spot_checks"] = checked;

    if (!cfg.out_dir.empty()) {
        Json nodes = Json::object();
        for (int l = 0; l <= s.tree.periods; ++l)
            for (int i = 0; i < s.tree.nodes_at(l); ++i)
                nodes[std::to_string(l) + "/" + std::to_string(i)] =
                    poly_to_json(s.res.sets[l][i]);
        Json art;
        art["nodes"] = std::move(nodes);
        write_text(cfg.out_dir, "superhedge.json", dump_json(art));

        std::string csv;
        for (int k = 0; k < s.tree.d; ++k) csv += (k ? ",x" : "x") + std::to_string(k + 1);
        csv += "\n";
        for (const auto& v : root.v().vertices) {
            for (int k = 0; k < s.tree.d; ++k)
                csv += (k ? "," : "") + fmt_double(rat_to_double(v[k]));
            csv += "\n";
        }
        write_text(cfg.out_dir, "root_vertices.csv", csv);
    }
    return out;
}

Json cmd_eps(const RunConfig& cfg) {
    SuperData s = build_super(cfg);
    RatVec xi;
    if (cfg.has_xi) {
        xi = cfg.xi;
    } else {
        const RatMat& verts = s.res.sets[0][0].v().vertices;
        if (verts.empty())
            fail_internal("InternalCheck", "root sets have at least one vertex",
                          "vertex-free root set");
        xi = verts.front();
    }
    Rat lip = claim_lipschitz(cfg.claim);

    Json sweep = Json::array();
    bool prev = false;
    bool have_prev = false;
    for (const Rat& eps : cfg.eps_grid) {
        Json row;
        row["eps"] = rat_to_string(eps);
        if (cfg.mode == "tree") {
            bool acc = eps_membership_tree(s.tree, s.sc, s.pay, lip, xi, eps);
            if (have_prev && prev && !acc)
                fail_internal("InternalCheck",
                              "membership is monotone along the relaxation grid",
                              "acceptance lost while relaxing");
            prev = acc;
            have_prev = true;
            row["accepted"] = acc;
        } else {
            EpsMcReport rep =
                eps_membership_mc(s.tree, s.sc, s.pay, lip, xi, eps, cfg.n_samples, cfg.seed);
            row["success_prob"] = rep.success_prob;
            row["accepted"] = rep.accepted;
        }
        sweep.push_back(std::move(row));
    }

    Json out;
    out["command"] = "eps";
    out["mode"] = cfg.mode;
    out["xi"] = rat_vec_to_json(xi);
    out["lipschitz"] = rat_to_string(lip);
    out["sweep"] = sweep;

    if (!cfg.out_dir.empty()) {
        std::string csv = cfg.mode == "tree" ? "eps,accepted\n" : "eps,success_prob,accepted\n";
        for (const auto& row : out["sweep"]) {
            csv += row["eps"].get<std::string>();
            if (cfg.mode == "mc") csv += "," + fmt_double(row["success_prob"].get<double>());
            csv += row["accepted"].get<bool>() ? ",1\n" : ",0\n";
        }
        write_text(cfg.out_dir, "eps_sweep.csv", csv);
    }
    return out;
}

Json cmd_price(const RunConfig& cfg) {
    if (!cfg.has_market || !cfg.has_mu)
        fail_validation("BadConfig", "price needs market and mu blocks",
                        "config lacks market or mu");
    SolvencyCone sc = build_cone(cfg.mu, cfg.allow_degenerate);
    Json out;
    out["command"] = "price";
    out["mode"] = cfg.mode;

    if (cfg.mode == "tree") {
        PriceTree tree = build_tree(cfg.market, cfg.periods);
        TreePriceProcess z = find_consistent_z(tree, sc);
        validate_consistent_z(tree, sc, z);

        TreeStrategy zero;
        zero.khat.resize(tree.periods);
        for (int l = 0; l < tree.periods; ++l)
            zero.khat[l].assign(tree.nodes_at(l), RatVec(tree.d, Rat(0)));
        RatVec v0(tree.d, Rat(0));
        v0[0] = 1;
        TreeValue val = tree_value(tree, zero, v0);
        SupermartReport rep = supermartingale_check_tree(tree, z, val);
        if (!rep.ok)
            fail_internal("InternalCheck",
                          "the deflated value of a valid strategy never drifts up",
                          "supermartingale violation on the zero strategy");

        out["root_z"] = rat_vec_to_json(z.z[0][0]);
        Json sm;
        sm["ok"] = rep.ok;
        sm["worst_margin"] = rat_to_string(rep.worst_margin);
        sm["worst_level"] = rep.worst_level;
        sm["worst_node"] = rep.worst_node;
        out["supermartingale"] = sm;
        if (!cfg.out_dir.empty())
            write_text(cfg.out_dir, "tree.json", dump_json(tree_to_json(tree, &z)));
    } else {
        PathSet paths = simulate_paths(cfg.market, cfg.n_paths, cfg.n_steps, cfg.seed);
        // loadings: zero row for the numeraire, the volatility row per risky
        // asset; exactly consistent when b = r and s0 = 1
        RatMat sig = sigma_average(cfg.market, Rat(0), cfg.market.horizon);
        std::vector<std::vector<double>> eta(cfg.market.d,
                                             std::vector<double>(cfg.market.m, 0.0));
        for (int i = 1; i < cfg.market.d; ++i)
            for (int k = 0; k < cfg.market.m; ++k) eta[i][k] = rat_to_double(sig[i - 1][k]);
        PathPriceProcess z = z_on_paths(cfg.market, paths, eta);
        validate_z_on_paths(sc, paths, z, 1e-6);

        KStrategy zero;
        zero.steps.assign(cfg.n_steps, RatVec(cfg.market.d, Rat(0)));
        std::vector<double> v0(cfg.market.d, 0.0);
        v0[0] = 1.0;
        McSupermartReport rep = supermartingale_check_mc(paths, z, zero, v0);
        if (!rep.ok)
            fail_internal("InternalCheck",
                          "the deflated value of a valid strategy never drifts up",
                          "sample mean exceeds the initial value by more than 3 SE");
        Json sm;
        sm["ok"] = rep.ok;
        sm["terminal_mean"] = rep.terminal_mean;
        sm["initial_value"] = rep.initial_value;
        sm["std_error"] = rep.std_error;
        out["paths"] = cfg.n_paths;
        out["steps"] = cfg.n_steps;
        out["supermartingale"] = sm;
    }
    return out;
}

// ---------------------------------------------------------------- verify

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

void check_cone_reference(const RunConfig&) {
    RatMat mu = {{Rat(0), Rat(1, 10)}, {Rat(1, 10), Rat(0)}};
    SolvencyCone sc = build_cone(exchange_from_mu(mu));
    RatMat want_gen = {{Rat(11, 10), Rat(-1)}, {Rat(-9, 10), Rat(1)}};
    if (sc.generators != want_gen)
        fail_internal("VerifyFailed", "reference generators match", "generator mismatch");
    RatMat duals;
    for (const auto& w : sc.dual_generators) duals.push_back(scale_first_nonzero(w));
    std::sort(duals.begin(), duals.end(), lex_less);
    RatMat want_dual = {{Rat(1), Rat(9, 10)}, {Rat(1), Rat(11, 10)}};
    if (duals != want_dual)
        fail_internal("VerifyFailed", "reference dual generators match", "dual mismatch");
    // inequality characterization against the generator route, on a small grid
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) {
            RatVec z = {Rat(a), Rat(b)};
            RatVec y = {Rat(1), Rat(1)};
            if (dual_membership(sc, y, z) != dual_membership_by_generators(sc, y, z))
                fail_internal("VerifyFailed", "both dual membership routes agree",
                              "dual route mismatch");
        }
    RatMat b5 = decompose(sc, {Rat(1), Rat(0)});
    if (b5[0][1] != Rat(5) || b5[1][0] != Rat(5))
        fail_internal("VerifyFailed", "reference decomposition matches", "decompose mismatch");
}

void check_decompose_roundtrip(const RunConfig& cfg) {
    CounterRng rng(cfg.seed, 101);
    int n = cfg.quick ? 60 : 200;
    for (int t = 0; t < n; ++t) {
        int d = 2 + static_cast<int>(t % 3);
        SolvencyCone sc = build_cone(exchange_from_mu(random_mu(rng, d)));
        RatVec alpha(d);
        for (auto& q : alpha) q = frac(static_cast<long>(rng.next_below(2000)), 100);
        RatMat b = decompose(sc, alpha);
        if (aggregate_transfers(sc.ex, b) != alpha)
            fail_internal("VerifyFailed", "decomposition reconstructs its target",
                          "round trip failed");
    }
    bool rejected = false;
    try {
        build_cone(exchange_from_mu(RatMat(2, RatVec(2, Rat(0)))));
    } catch (const Error& e) {
        rejected = (e.kind() == "DegenerateCone");
    }
    if (!rejected)
        fail_internal("VerifyFailed", "free round trips are rejected",
                      "degenerate cone accepted");
}

void check_dual_positivity(const RunConfig& cfg) {
    CounterRng rng(cfg.seed, 102);
    int n = cfg.quick ? 20 : 60;
    for (int t = 0; t < n; ++t) {
        int d = 2 + static_cast<int>(t % 3);
        SolvencyCone sc = build_cone(exchange_from_mu(random_mu(rng, d)));
        for (const auto& w : sc.dual_generators)
            for (const auto& q : w)
                if (q <= 0)
                    fail_internal("VerifyFailed", "dual generators are strictly positive",
                                  "nonpositive dual coordinate");
        RatVec y(d);
        for (auto& q : y) q = frac(50 + static_cast<long>(rng.next_below(101)), 100);
        RatVec z = dual_interior_point(sc, y);
        if (!dual_membership(sc, y, z))
            fail_internal("VerifyFailed", "the interior point lies in the dual cone",
                          "interior point outside");
    }
}

void check_strategy_roundtrip(const RunConfig& cfg) {
    CounterRng rng(cfg.seed, 103);
    int n = cfg.quick ? 10 : 30;
    for (int t = 0; t < n; ++t) {
        int d = 2 + static_cast<int>(t % 3);
        ExchangeMatrix ex = exchange_from_mu(random_mu(rng, d));
        validate_exchange(ex, false);
        ThetaStrategy theta;
        for (int s = 0; s < 4; ++s) {
            RatMat b(d, RatVec(d, Rat(0)));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    if (i != j) b[i][j] = frac(static_cast<long>(rng.next_below(300)), 100);
            theta.steps.push_back(std::move(b));
        }
        KStrategy k = theta_to_k(ex, theta);
        ThetaStrategy theta2 = k_to_theta(ex, k);
        KStrategy k2 = theta_to_k(ex, theta2);
        for (size_t s = 0; s < k.steps.size(); ++s)
            if (k.steps[s] != k2.steps[s])
                fail_internal("VerifyFailed",
                              "strategy representations agree after a round trip",
                              "aggregate rates changed");
    }
}

void check_tree_dpp(const RunConfig& cfg) {
    CounterRng rng(cfg.seed, 104);
    std::vector<std::pair<int, int>> shapes =
        cfg.quick ? std::vector<std::pair<int, int>>{{2, 2}}
                  : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}};
    int draws = cfg.quick ? 1 : 2;
    for (auto [d, P] : shapes) {
        for (int t = 0; t < draws; ++t) {
            SolvencyCone sc = build_cone(exchange_from_mu(random_mu(rng, d)));
            PriceTree tree = build_tree(random_market(rng, d), P);
            RatMat pay = tree_leaf_payoffs(tree, random_claim(rng, d));
            SuperhedgeResult res = backward_sets(tree, sc, pay);
            for (int u = 1; u < P; ++u)
                if (!dpp_check(tree, res, u))
                    fail_internal("VerifyFailed", "two-stage recomposition matches",
                                  "recomposition differs");
            std::vector<Polyhedron> mut = res.sets[1];
            RatVec shift(d, Rat(0));
            shift[0] = 100;
            mut[0] = translate(mut[0], shift);
            if (dpp_check_with_terminal(tree, res, 1, mut))
                fail_internal("VerifyFailed", "a mutated terminal layer breaks equality",
                              "mutation not detected");
        }
    }
}

void check_oracle_agreement(const RunConfig& cfg) {
    CounterRng rng(cfg.seed, 105);
    std::vector<std::pair<int, int>> shapes =
        cfg.quick ? std::vector<std::pair<int, int>>{{2, 2}}
                  : std::vector<std::pair<int, int>>{{2, 2}, {3, 1}};
    int probes = cfg.quick ? 30 : 50;
    for (auto [d, P] : shapes) {
        SolvencyCone sc = build_cone(exchange_from_mu(random_mu(rng, d)));
        PriceTree tree = build_tree(random_market(rng, d), P);
        RatMat pay = tree_leaf_payoffs(tree, random_claim(rng, d));
        SuperhedgeResult res = backward_sets(tree, sc, pay);
        SuperhedgeOracle oracle(tree, sc, pay);
        for (int q = 0; q < probes; ++q) {
            RatVec xi(d);
            for (auto& v : xi) v = frac(static_cast<long>(rng.next_below(801)) - 200, 100);
            if (res.sets[0][0].contains_point(xi) != oracle.contains(xi))
                fail_internal("VerifyFailed",
                              "recursion membership equals feasibility membership",
                              "oracle disagreement");
        }
    }
}

void check_eps_monotone(const RunConfig& cfg) {
    CounterRng rng(cfg.seed, 106);
    int d = 2;
    int P = cfg.quick ? 1 : 2;
    SolvencyCone sc = build_cone(exchange_from_mu(random_mu(rng, d)));
    PriceTree tree = build_tree(random_market(rng, d), P);
    RatMat pay = tree_leaf_payoffs(tree, random_claim(rng, d));
    SuperhedgeResult res = backward_sets(tree, sc, pay);
    RatVec anchor = res.sets[0][0].v().vertices.front();
    std::vector<Rat> grid = {Rat(1, 20), Rat(1, 10), Rat(1, 5), Rat(2, 5)};
    int queries = cfg.quick ? 3 : 6;
    for (int q = 0; q < queries; ++q) {
        RatVec xi = anchor;
        for (auto& v : xi) v += frac(static_cast<long>(rng.next_below(161)) - 80, 100);
        bool prev = false;
        bool have = false;
        for (const Rat& eps : grid) {
            bool acc = eps_membership_tree(tree, sc, pay, Rat(1), xi, eps);
            if (have && prev && !acc)
                fail_internal("VerifyFailed", "membership is monotone in the relaxation",
                              "acceptance lost while relaxing");
            prev = acc;
            have = true;
        }
        // exact members stay accepted at every relaxation level
        if (res.sets[0][0].contains_point(xi))
            for (const Rat& eps : grid)
                if (!eps_membership_tree(tree, sc, pay, Rat(1), xi, eps))
                    fail_internal("VerifyFailed", "relaxations only loosen the constraint",
                                  "exact member rejected");
    }
}

void check_concentration(const RunConfig& cfg) {
    CounterRng rng(cfg.seed, 107);
    MarketModel m;
    m.d = 2;
    m.m = 1;
    m.s0 = {Rat(1), Rat(1)};
    m.horizon = 1;
    m.cuts = {Rat(1)};
    m.r_seg = {Rat(0)};
    m.b_seg = {{Rat(0)}};
    m.sigma_seg = {{{Rat(1, 4)}}};
    PriceTree tree = build_tree(m, 3);
    int n_leaves = tree.nodes_at(3);
    int n = cfg.quick ? 100 : 300;
    for (int t = 0; t < n; ++t) {
        int size = static_cast<int>(rng.next_below(n_leaves + 1));
        std::vector<int> leaves(n_leaves);
        for (int i = 0; i < n_leaves; ++i) leaves[i] = i;
        for (int i = 0; i < size; ++i)
            std::swap(leaves[i], leaves[i + static_cast<int>(
                                               rng.next_below(n_leaves - i))]);
        leaves.resize(size);
        Rat pa = frac(size, n_leaves);
        Rat eps = pa + frac(1 + static_cast<long>(rng.next_below(100)), 400);
        if (eps > 1) eps = 1;
        int u = static_cast<int>(rng.next_below(4));
        if (!concentration_check(tree, leaves, eps, u))
            fail_internal("VerifyFailed", "the conditional-mass bound holds",
                          "concentration bound violated");
    }
}

void check_risk_axioms(const RunConfig& cfg) {
    CounterRng rng(cfg.seed, 108);
    int n = cfg.quick ? 2 : 4;
    for (int t = 0; t < n; ++t) {
        int d = 2;
        SolvencyCone sc = build_cone(exchange_from_mu(random_mu(rng, d)));
        PriceTree tree = build_tree(random_market(rng, d), 2);
        RatMat pay = tree_leaf_payoffs(tree, random_claim(rng, d));
        SuperhedgeResult base = backward_sets(tree, sc, pay);

        // shifting the claim shifts the set
        RatVec c(d);
        for (auto& q : c) q = frac(static_cast<long>(rng.next_below(200)) - 100, 100);
        RatMat shifted = pay;
        for (auto& row : shifted)
            for (int k = 0; k < d; ++k) row[k] += c[k];
        SuperhedgeResult res_sh = backward_sets(tree, sc, shifted);
        if (!set_equal(res_sh.sets[0][0], translate(base.sets[0][0], c)))
            fail_internal("VerifyFailed", "shifting the claim translates the set",
                          "translativity failed");

        // a larger claim has a smaller set
        RatMat bigger = pay;
        for (auto& row : bigger) row[0] += Rat(1, 2);
        SuperhedgeResult res_big = backward_sets(tree, sc, bigger);
        if (!poly_contains(base.sets[0][0], res_big.sets[0][0]))
            fail_internal("VerifyFailed", "larger claims have smaller sets",
                          "monotone containment failed");

        // positive rational scaling
        Rat lam(3, 2);
        RatMat scaled = pay;
        for (auto& row : scaled)
            for (auto& q : row) q *= lam;
        SuperhedgeResult res_sc = backward_sets(tree, sc, scaled);
        if (!set_equal(res_sc.sets[0][0], scale_poly(base.sets[0][0], lam)))
            fail_internal("VerifyFailed", "scaling the claim scales the set",
                          "homogeneity failed");

        // stability under the root trading cone and the orthant
        if (!set_equal(minkowski_sum(base.sets[0][0], base.cones[0][0]), base.sets[0][0]))
            fail_internal("VerifyFailed", "sets absorb the root trading cone",
                          "cone stability failed");
    }
}

void check_price_supermartingale(const RunConfig& cfg) {
    CounterRng rng(cfg.seed, 109);
    int n = cfg.quick ? 1 : 2;
    for (int t = 0; t < n; ++t) {
        int d = 2;
        SolvencyCone sc = build_cone(exchange_from_mu(pricing_mu(rng, d)));
        PriceTree tree = build_tree(pricing_market(rng, d), 2);
        TreePriceProcess z = find_consistent_z(tree, sc);
        validate_consistent_z(tree, sc, z);
        TreeStrategy strat;
        strat.khat.resize(tree.periods);
        for (int l = 0; l < tree.periods; ++l) {
            strat.khat[l].assign(tree.nodes_at(l), RatVec(d, Rat(0)));
            for (int i = 0; i < tree.nodes_at(l); ++i) {
                RatMat pg = physical_generators(sc, tree.prices_rat[l][i]);
                RatVec k(d, Rat(0));
                for (const auto& g : pg) {
                    Rat w = frac(static_cast<long>(rng.next_below(5)), 10);
                    for (int a = 0; a < d; ++a) k[a] += w * g[a];
                }
                strat.khat[l][i] = k;
            }
        }
        RatVec v0(d, Rat(0));
        v0[0] = 2;
        TreeValue val = tree_value(tree, strat, v0);
        SupermartReport rep = supermartingale_check_tree(tree, z, val);
        if (!rep.ok)
            fail_internal("VerifyFailed",
                          "the deflated value of a valid strategy never drifts up",
                          "supermartingale violation");
    }
}

void check_mc_consistency(const RunConfig& cfg) {
    MarketModel m;
    m.d = 2;
    m.m = 1;
    m.s0 = {Rat(1), Rat(1)};
    m.horizon = 1;
    m.cuts = {Rat(1)};
    m.r_seg = {Rat(1, 20)};
    m.b_seg = {{Rat(1, 20)}};
    m.sigma_seg = {{{Rat(1, 5)}}};
    SolvencyCone sc =
        build_cone(exchange_from_mu(RatMat{{Rat(0), Rat(1, 10)}, {Rat(1, 10), Rat(0)}}));
    PathSet paths = simulate_paths(m, 20000, 8, cfg.seed + 11);
    std::vector<std::vector<double>> eta = {{0.0}, {0.2}};
    PathPriceProcess z = z_on_paths(m, paths, eta);
    validate_z_on_paths(sc, paths, z, 1e-9);
    KStrategy zero;
    zero.steps.assign(8, RatVec(2, Rat(0)));
    McSupermartReport rep = supermartingale_check_mc(paths, z, zero, {2.0, 1.0});
    if (!rep.ok)
        fail_internal("VerifyFailed", "sampled deflated values stay within 3 SE",
                      "sample mean drifted up");
    if (std::abs(rep.terminal_mean - rep.initial_value) > 3 * rep.std_error)
        fail_internal("VerifyFailed", "the zero strategy is a sampled martingale",
                      "zero-strategy mean off by more than 3 SE");
}

Json cmd_verify(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::function<void(const RunConfig&)>>> checks = {
        {"cone_reference", check_cone_reference},
        {"decompose_roundtrip", check_decompose_roundtrip},
        {"dual_positivity", check_dual_positivity},
        {"strategy_roundtrip", check_strategy_roundtrip},
        {"tree_dpp", check_tree_dpp},
        {"oracle_agreement", check_oracle_agreement},
        {"eps_monotone", check_eps_monotone},
        {"concentration", check_concentration},
        {"risk_axioms", check_risk_axioms},
        {"price_supermartingale", check_price_supermartingale},
    };
    if (!cfg.quick) checks.emplace_back("mc_consistency", check_mc_consistency);

    Json list = Json::array();
    std::string failed;
    for (auto& [name, fn] : checks) {
        Json row;
        row["name"] = name;
        try {
            fn(cfg);
            row["ok"] = true;
        } catch (const Error& e) {
            row["ok"] = false;
            row["error"] = std::string(e.what());
            failed += (failed.empty() ? "" : ", ") + name;
        }
        list.push_back(std::move(row));
    }
    Json out;
    out["command"] = "verify";
    out["quick"] = cfg.quick;
    out["checks"] = list;
    out["all_ok"] = failed.empty();
    if (!cfg.out_dir.empty()) write_text(cfg.out_dir, "verify.json", dump_json(out));
    if (!failed.empty())
        fail_internal("VerifyFailed", "the full property suite passes",
                      "failing checks: " + failed);
    return out;
}

} // namespace

Json run_command(const std::string& command, const RunConfig& cfg) {
    if (command == "cone") return cmd_cone(cfg);
    if (command == "decompose") return cmd_decompose(cfg);
    if (command == "tree") return cmd_tree(cfg);
    if (command == "superhedge") return cmd_superhedge(cfg);
    if (command == "eps") return cmd_eps(cfg);
    if (command == "price") return cmd_price(cfg);
    if (command == "verify") return cmd_verify(cfg);
    fail_validation("UnknownCommand",
                    "command is cone, decompose, tree, superhedge, eps, price, or verify",
                    "unknown command \"" + command + "\"");
}

} // namespace shp
