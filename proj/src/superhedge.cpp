#include "shp/superhedge.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "shp/errors.hpp"
#include "shp/rng.hpp"

namespace shp {

namespace {

constexpr long kMaxTreeNodes = 1000;
constexpr int kMaxEnumLeaves = 12;
constexpr long kMaxPatternLps = 20000;

long total_nodes(const PriceTree& tree) {
    long total = 0;
    for (int l = 0; l < tree.levels(); ++l) total += tree.nodes_at(l);
    return total;
}

void check_tree_budget(const PriceTree& tree) {
    if (tree.d > 3)
        fail_validation("UnsupportedDimension", "exact set recursion supports d <= 3",
                        "dimension too large for exact set recursion");
    if (total_nodes(tree) > kMaxTreeNodes)
        fail_runtime("BudgetExceeded", "tree has at most 1000 nodes",
                     "tree too large for exact set recursion");
}

void check_payoffs(const PriceTree& tree, const RatMat& leaf_payoffs) {
    int n_leaves = tree.nodes_at(tree.periods);
    if (static_cast<int>(leaf_payoffs.size()) != n_leaves)
        fail_validation("GridMismatch", "one payoff row per leaf", "payoff row count mismatch");
    for (const auto& row : leaf_payoffs)
        if (static_cast<int>(row.size()) != tree.d)
            fail_validation("GridMismatch", "payoff rows have length d", "payoff row length mismatch");
}

// leaf index range covered by node i at the given level
std::pair<long, long> leaf_span(const PriceTree& tree, int level, int node) {
    long width = 1;
    for (int l = level; l < tree.periods; ++l) width *= tree.branch;
    return {static_cast<long>(node) * width, (static_cast<long>(node) + 1) * width};
}

} // namespace

RatMat tree_leaf_payoffs(const PriceTree& tree, const Claim& claim) {
    validate_claim(claim, tree.d);
    const auto& leaves = tree.prices_rat[tree.periods];
    RatMat out;
    out.reserve(leaves.size());
    for (const auto& y : leaves) out.push_back(claim_payoff(claim, y));
    return out;
}

SuperhedgeResult backward_sets(const PriceTree& tree, const SolvencyCone& sc,
                               const RatMat& leaf_payoffs) {
    check_tree_budget(tree);
    check_payoffs(tree, leaf_payoffs);
    const int P = tree.periods;

    SuperhedgeResult res;
    res.leaf_payoffs = leaf_payoffs;
    res.cones.resize(P + 1);
    res.sets.resize(P + 1);
    for (int l = 0; l <= P; ++l) {
        int n = tree.nodes_at(l);
        res.cones[l].reserve(n);
        for (int i = 0; i < n; ++i)
            res.cones[l].push_back(physical_cone(sc, tree.prices_rat[l][i]));
    }

    int n_leaves = tree.nodes_at(P);
    res.sets[P].reserve(n_leaves);
    for (int i = 0; i < n_leaves; ++i) {
        Polyhedron s = translate(res.cones[P][i], leaf_payoffs[i]);
        if (s.is_empty())
            fail_runtime("EmptySet", "node sets are nonempty", "empty leaf set");
        res.sets[P].push_back(std::move(s));
    }
    for (int l = P - 1; l >= 0; --l) {
        int n = tree.nodes_at(l);
        res.sets[l].reserve(n);
        for (int i = 0; i < n; ++i) {
            Polyhedron inter = res.sets[l + 1][tree.child_of(i, 0)];
            for (int s = 1; s < tree.branch && !inter.is_empty(); ++s)
                inter = intersect(inter, res.sets[l + 1][tree.child_of(i, s)]);
            if (inter.is_empty())
                fail_runtime("EmptySet", "node sets are nonempty", "empty child intersection");
            Polyhedron set = minkowski_sum(res.cones[l][i], inter);
            if (set.is_empty())
                fail_runtime("EmptySet", "node sets are nonempty", "empty node set");
            res.sets[l].push_back(std::move(set));
        }
    }
    return res;
}

bool dpp_check_with_terminal(const PriceTree& tree, const SuperhedgeResult& result,
                             int level_u, const std::vector<Polyhedron>& terminal) {
    const int P = tree.periods;
    if (level_u <= 0 || level_u >= P)
        fail_validation("LevelOutOfRange", "intermediate level satisfies 0 < u < periods",
                        "intermediate level out of range");
    if (static_cast<int>(result.sets.size()) != P + 1 ||
        static_cast<int>(result.cones.size()) != P + 1)
        fail_validation("GridMismatch", "result covers every tree level",
                        "recursion result does not match the tree");
    if (static_cast<int>(terminal.size()) != tree.nodes_at(level_u))
        fail_validation("GridMismatch", "one terminal set per node at the chosen level",
                        "terminal set count mismatch");
    for (const auto& p : terminal)
        if (p.dim() != tree.d)
            fail_validation("GridMismatch", "terminal sets live in dimension d",
                            "terminal set dimension mismatch");

    std::vector<Polyhedron> cur = terminal;
    for (int l = level_u - 1; l >= 0; --l) {
        std::vector<Polyhedron> nxt;
        int n = tree.nodes_at(l);
        nxt.reserve(n);
        for (int i = 0; i < n; ++i) {
            Polyhedron inter = cur[tree.child_of(i, 0)];
            for (int s = 1; s < tree.branch && !inter.is_empty(); ++s)
                inter = intersect(inter, cur[tree.child_of(i, s)]);
            if (inter.is_empty())
                nxt.push_back(std::move(inter));
            else
                nxt.push_back(minkowski_sum(result.cones[l][i], inter));
        }
        cur = std::move(nxt);
    }
    if (cur[0].is_empty()) return result.sets[0][0].is_empty();
    return set_equal(cur[0], result.sets[0][0]);
}

bool dpp_check(const PriceTree& tree, const SuperhedgeResult& result, int level_u) {
    if (level_u <= 0 || level_u >= tree.periods)
        fail_validation("LevelOutOfRange", "intermediate level satisfies 0 < u < periods",
                        "intermediate level out of range");
    if (level_u >= static_cast<int>(result.sets.size()))
        fail_validation("GridMismatch", "result covers every tree level",
                        "recursion result does not match the tree");
    return dpp_check_with_terminal(tree, result, level_u, result.sets[level_u]);
}

namespace {

// Columns: for every node (level-major), the raw exchange directions of its
// trading cone in physical units; then one slack column per (leaf, asset)
// row. Row (leaf, asset) states: sum of path trades + slack = xi - payoff.
FeasibilityOracle build_membership_oracle(const PriceTree& tree, const SolvencyCone& sc,
                                          const RatMat& leaf_payoffs) {
    check_tree_budget(tree);
    check_payoffs(tree, leaf_payoffs);
    const int P = tree.periods;
    const int d = tree.d;
    const int n_leaves = tree.nodes_at(P);
    const int n_rows = n_leaves * d;

    long gen_cols = 0;
    for (int l = 0; l <= P; ++l) gen_cols += static_cast<long>(tree.nodes_at(l)) * d * (d - 1);
    const long n_cols = gen_cols + n_rows;

    RatMat a(n_rows, RatVec(n_cols, Rat(0)));
    long col = 0;
    for (int l = 0; l <= P; ++l) {
        for (int i = 0; i < tree.nodes_at(l); ++i) {
            RatMat gens = physical_generators(sc, tree.prices_rat[l][i]);
            auto [lo, hi] = leaf_span(tree, l, i);
            for (const auto& g : gens) {
                for (long leaf = lo; leaf < hi; ++leaf)
                    for (int k = 0; k < d; ++k) a[leaf * d + k][col] = g[k];
                ++col;
            }
        }
    }
    for (int r = 0; r < n_rows; ++r) a[r][gen_cols + r] = Rat(1);
    return FeasibilityOracle(std::move(a), static_cast<int>(n_cols));
}

} // namespace

SuperhedgeOracle::SuperhedgeOracle(const PriceTree& tree, const SolvencyCone& sc,
                                   const RatMat& leaf_payoffs)
    : d_(tree.d), n_leaves_(tree.nodes_at(tree.periods)), leaf_payoffs_(leaf_payoffs),
      oracle_(build_membership_oracle(tree, sc, leaf_payoffs)) {}

bool SuperhedgeOracle::contains(const RatVec& xi) {
    if (static_cast<int>(xi.size()) != d_)
        fail_validation("DimensionMismatch", "query portfolio has length d",
                        "query length mismatch");
    RatVec b(static_cast<size_t>(n_leaves_) * d_);
    for (int leaf = 0; leaf < n_leaves_; ++leaf)
        for (int k = 0; k < d_; ++k)
            b[static_cast<size_t>(leaf) * d_ + k] = xi[k] - leaf_payoffs_[leaf][k];
    return oracle_.feasible_for(b);
}

namespace {

struct EpsCommon {
    int P = 0;
    int d = 0;
    int n_leaves = 0;
    Rat cushion;                   // lipschitz * eps, added to every component
};

EpsCommon eps_validate(const PriceTree& tree, const RatMat& leaf_payoffs,
                       const Rat& lipschitz, const RatVec& xi, const Rat& eps) {
    check_tree_budget(tree);
    check_payoffs(tree, leaf_payoffs);
    if (static_cast<int>(xi.size()) != tree.d)
        fail_validation("DimensionMismatch", "query portfolio has length d",
                        "query length mismatch");
    if (eps <= 0 || eps > 1)
        fail_validation("PreconditionViolated", "relaxation lies in (0, 1]",
                        "relaxation out of range");
    if (lipschitz < 1)
        fail_validation("PreconditionViolated", "growth constant is at least 1",
                        "growth constant below one");
    EpsCommon c;
    c.P = tree.periods;
    c.d = tree.d;
    c.n_leaves = tree.nodes_at(tree.periods);
    c.cushion = lipschitz * eps;
    return c;
}

// floor(eps * n) = largest number of leaves whose uniform mass fits under eps
long excluded_quota(const Rat& eps, int n_leaves) {
    Rat q = eps * Rat(static_cast<long>(n_leaves));
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return f.get_si();
}

} // namespace

bool eps_membership_tree(const PriceTree& tree, const SolvencyCone& sc,
                         const RatMat& leaf_payoffs, const Rat& lipschitz,
                         const RatVec& xi, const Rat& eps) {
    EpsCommon c = eps_validate(tree, leaf_payoffs, lipschitz, xi, eps);
    if (c.n_leaves > kMaxEnumLeaves)
        fail_runtime("BudgetExceeded", "leaf subset enumeration supports at most 12 leaves",
                     "too many leaves for subset enumeration");
    long K = excluded_quota(eps, c.n_leaves);
    if (K >= c.n_leaves) return true; // every leaf may be dropped
    K = std::max(K, 0L);

    // relaxed cone pieces per node; each piece is kept as its ray matrix
    std::vector<std::vector<std::vector<RatMat>>> node_pieces(c.P + 1);
    for (int l = 0; l <= c.P; ++l) {
        int n = tree.nodes_at(l);
        node_pieces[l].resize(n);
        for (int i = 0; i < n; ++i) {
            std::vector<Polyhedron> pieces = eps_cone_pieces(sc, tree.prices_rat[l][i], eps);
            for (const auto& p : pieces) node_pieces[l][i].push_back(p.v().rays);
        }
    }

    // enumerate excluded subsets of size exactly K (dropping fewer never helps)
    std::vector<int> comb(K);
    for (long j = 0; j < K; ++j) comb[j] = static_cast<int>(j);
    bool first = true;
    std::vector<char> excluded(c.n_leaves, 0);
    while (true) {
        if (!first) {
            // next K-combination of {0..n_leaves-1}
            long j = K - 1;
            while (j >= 0 && comb[j] == c.n_leaves - K + j) --j;
            if (j < 0) break;
            ++comb[j];
            for (long t = j + 1; t < K; ++t) comb[t] = comb[t - 1] + 1;
        }
        first = false;
        std::fill(excluded.begin(), excluded.end(), 0);
        for (long j = 0; j < K; ++j) excluded[comb[j]] = 1;

        // nodes with at least one retained descendant leaf
        std::vector<std::vector<char>> active(c.P + 1);
        active[c.P].resize(c.n_leaves);
        for (int i = 0; i < c.n_leaves; ++i) active[c.P][i] = !excluded[i];
        for (int l = c.P - 1; l >= 0; --l) {
            active[l].assign(tree.nodes_at(l), 0);
            for (int i = 0; i < tree.nodes_at(l); ++i)
                for (int s = 0; s < tree.branch; ++s)
                    if (active[l + 1][tree.child_of(i, s)]) { active[l][i] = 1; break; }
        }

        // mixed-radix enumeration of one relaxed-cone piece per active node
        struct ActiveNode { int level; int node; };
        std::vector<ActiveNode> order;
        long combos = 1;
        bool over_budget = false;
        for (int l = 0; l <= c.P; ++l)
            for (int i = 0; i < tree.nodes_at(l); ++i)
                if (active[l][i]) {
                    order.push_back({l, i});
                    combos *= static_cast<long>(node_pieces[l][i].size());
                    if (combos > kMaxPatternLps) { over_budget = true; break; }
                }
        if (over_budget)
            fail_runtime("BudgetExceeded", "piece-pattern enumeration stays under budget",
                         "too many relaxed-cone piece patterns");

        std::vector<size_t> choice(order.size(), 0);
        while (true) {
            // assemble the feasibility system for this (subset, pattern) pair
            std::vector<long> var_off(order.size() + 1, 0);
            for (size_t t = 0; t < order.size(); ++t) {
                const RatMat& rays = node_pieces[order[t].level][order[t].node][choice[t]];
                var_off[t + 1] = var_off[t] + static_cast<long>(rays.size());
            }
            long nvars = var_off[order.size()];
            LpProblem lp(static_cast<int>(std::max(nvars, 1L)));
            for (int leaf = 0; leaf < c.n_leaves; ++leaf) {
                if (excluded[leaf]) continue;
                for (int k = 0; k < c.d; ++k) {
                    RatVec row(std::max(nvars, 1L), Rat(0));
                    for (size_t t = 0; t < order.size(); ++t) {
                        auto [lo, hi] = leaf_span(tree, order[t].level, order[t].node);
                        if (leaf < lo || leaf >= hi) continue;
                        const RatMat& rays = node_pieces[order[t].level][order[t].node][choice[t]];
                        for (size_t rr = 0; rr < rays.size(); ++rr)
                            row[var_off[t] + static_cast<long>(rr)] = rays[rr][k];
                    }
                    lp.add_row(row, RowRel::le, xi[k] + c.cushion - leaf_payoffs[leaf][k]);
                }
            }
            if (lp.feasible()) return true;

            // advance the pattern
            size_t t = 0;
            while (t < choice.size()) {
                if (++choice[t] < node_pieces[order[t].level][order[t].node].size()) break;
                choice[t] = 0;
                ++t;
            }
            if (t == choice.size()) break;
        }
    }
    return false;
}

EpsMcReport eps_membership_mc(const PriceTree& tree, const SolvencyCone& sc,
                              const RatMat& leaf_payoffs, const Rat& lipschitz,
                              const RatVec& xi, const Rat& eps, int n_samples,
                              uint64_t seed) {
    EpsCommon c = eps_validate(tree, leaf_payoffs, lipschitz, xi, eps);
    if (n_samples < 1)
        fail_validation("PreconditionViolated", "sample count is positive",
                        "nonpositive sample count");

    // fit the minimal uniform-shortfall strategy without relaxation:
    // minimize t subject to, for every leaf and asset,
    //   sum of path trades - t <= xi - payoff
    const int P = c.P;
    const int d = c.d;
    std::vector<std::vector<RatMat>> gens(P + 1);
    std::vector<std::vector<long>> off(P + 1);
    long nvars = 0;
    for (int l = 0; l <= P; ++l) {
        int n = tree.nodes_at(l);
        gens[l].reserve(n);
        off[l].resize(n);
        for (int i = 0; i < n; ++i) {
            off[l][i] = nvars;
            gens[l].push_back(physical_generators(sc, tree.prices_rat[l][i]));
            nvars += static_cast<long>(gens[l].back().size());
        }
    }
    const long t_var = nvars;
    LpProblem lp(static_cast<int>(nvars + 1));
    lp.set_free(static_cast<int>(t_var));
    for (int leaf = 0; leaf < c.n_leaves; ++leaf) {
        int node = leaf;
        std::vector<std::pair<int, int>> path(P + 1); // (level, node)
        for (int l = P; l >= 0; --l) {
            path[l] = {l, node};
            node /= tree.branch;
        }
        for (int k = 0; k < d; ++k) {
            RatVec row(nvars + 1, Rat(0));
            for (const auto& [l, i] : path) {
                const RatMat& g = gens[l][i];
                for (size_t rr = 0; rr < g.size(); ++rr)
                    row[off[l][i] + static_cast<long>(rr)] = g[rr][k];
            }
            row[t_var] = Rat(-1);
            lp.add_row(row, RowRel::le, xi[k] - leaf_payoffs[leaf][k]);
        }
    }
    RatVec cost(nvars + 1, Rat(0));
    cost[t_var] = Rat(1);
    LpResult sol = lp.minimize(cost);

    std::vector<char> ok(c.n_leaves, 1);
    if (sol.status == LpStatus::optimal) {
        // exact per-leaf cushioned dominance under the fitted strategy
        std::vector<std::vector<RatVec>> acc(P + 1); // summed trades on the path so far
        acc[0].assign(1, RatVec(d, Rat(0)));
        for (int l = 0; l <= P; ++l) {
            int n = tree.nodes_at(l);
            for (int i = 0; i < n; ++i) {
                RatVec& here = acc[l][i];
                const RatMat& g = gens[l][i];
                for (size_t rr = 0; rr < g.size(); ++rr) {
                    const Rat& lam = sol.x[off[l][i] + static_cast<long>(rr)];
                    if (lam == 0) continue;
                    for (int k = 0; k < d; ++k) here[k] += lam * g[rr][k];
                }
                if (l < P) {
                    if (acc[l + 1].empty())
                        acc[l + 1].assign(tree.nodes_at(l + 1), RatVec());
                    for (int s = 0; s < tree.branch; ++s)
                        acc[l + 1][tree.child_of(i, s)] = here;
                }
            }
        }
        for (int leaf = 0; leaf < c.n_leaves; ++leaf) {
            for (int k = 0; k < d; ++k) {
                if (xi[k] - acc[P][leaf][k] + c.cushion < leaf_payoffs[leaf][k]) {
                    ok[leaf] = 0;
                    break;
                }
            }
        }
    } else if (sol.status == LpStatus::infeasible) {
        fail_internal("InternalCheck", "shortfall fit is always feasible",
                      "uniform-shortfall system reported infeasible");
    }
    // unbounded: the shortfall can be driven arbitrarily low, every leaf passes

    CounterRng rng(seed, 0);
    long hits = 0;
    for (int s = 0; s < n_samples; ++s)
        hits += ok[rng.next_below(static_cast<uint64_t>(c.n_leaves))];

    EpsMcReport rep;
    rep.success_prob = static_cast<double>(hits) / static_cast<double>(n_samples);
    rep.accepted = Rat(hits) >= (Rat(1) - eps) * Rat(static_cast<long>(n_samples));
    return rep;
}

bool concentration_check(const PriceTree& tree, const std::vector<int>& event_leaves,
                         const Rat& eps, int level_u) {
    const int P = tree.periods;
    if (level_u < 0 || level_u > P)
        fail_validation("LevelOutOfRange", "conditioning level lies in [0, periods]",
                        "conditioning level out of range");
    if (eps < 0 || eps > 1)
        fail_validation("BadEvent", "probability bound lies in [0, 1]",
                        "probability bound out of range");
    const int n_leaves = tree.nodes_at(P);
    std::vector<char> in_event(n_leaves, 0);
    for (int idx : event_leaves) {
        if (idx < 0 || idx >= n_leaves)
            fail_validation("BadEvent", "event leaves are valid leaf indices",
                            "event leaf index out of range");
        if (in_event[idx])
            fail_validation("BadEvent", "event leaves are distinct",
                            "duplicate event leaf");
        in_event[idx] = 1;
    }
    Rat p_event(0);
    for (int leaf = 0; leaf < n_leaves; ++leaf)
        if (in_event[leaf]) p_event += tree.path_prob[P][leaf];
    if (p_event > eps)
        fail_validation("BadEvent", "event probability is at most the bound",
                        "event mass exceeds the bound");

    // flag level-u nodes whose conditional event probability is at least
    // sqrt(eps); compare squares so everything stays rational
    Rat flagged_mass(0);
    for (int i = 0; i < tree.nodes_at(level_u); ++i) {
        auto [lo, hi] = leaf_span(tree, level_u, i);
        Rat p_node = tree.path_prob[level_u][i];
        Rat p_joint(0);
        for (long leaf = lo; leaf < hi; ++leaf)
            if (in_event[leaf]) p_joint += tree.path_prob[P][leaf];
        if (p_joint * p_joint >= eps * p_node * p_node) flagged_mass += p_node;
    }
    return flagged_mass * flagged_mass <= eps;
}

} // namespace shp
