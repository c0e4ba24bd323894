#include "shp/pricing.hpp"

#include <cmath>

#include "shp/lp.hpp"

namespace shp {

TreePriceProcess find_consistent_z(const PriceTree& tree, const SolvencyCone& sc) {
    if (tree.d != sc.ex.d)
        fail_validation("DimensionMismatch", "tree and cone share the asset count",
                        "asset count mismatch");
    int d = tree.d;
    int B = tree.branch;
    TreePriceProcess out;
    out.z.resize(tree.levels());
    out.z[0].push_back(dual_interior_point(sc, tree.prices_rat[0][0]));

    for (int level = 0; level + 1 < tree.levels(); ++level) {
        out.z[level + 1].resize(tree.prices_rat[level + 1].size());
        for (int node = 0; node < tree.nodes_at(level); ++node) {
            const RatVec& parent = out.z[level][node];
            // variables: B child vectors then the slack s
            int nv = B * d + 1;
            LpProblem lp(nv);
            for (int v = 0; v < nv; ++v) lp.set_free(v);
            int sv = B * d;
            for (int c = 0; c < B; ++c) {
                int child = tree.child_of(node, c);
                RatMat gens = physical_generators(sc, tree.prices_rat[level + 1][child]);
                for (const auto& g : gens) {
                    RatVec row(nv, Rat(0));
                    for (int i = 0; i < d; ++i) row[c * d + i] = g[i];
                    row[sv] = -1;
                    lp.add_row(row, RowRel::ge, Rat(0));
                }
                RatVec row(nv, Rat(0));
                row[c * d] = 1;
                row[sv] = -1;
                lp.add_row(row, RowRel::ge, Rat(0));
            }
            for (int i = 0; i < d; ++i) {
                RatVec row(nv, Rat(0));
                for (int c = 0; c < B; ++c) row[c * d + i] = tree.child_prob;
                lp.add_row(row, RowRel::eq, parent[i]);
            }
            RatVec obj(nv, Rat(0));
            obj[sv] = 1;
            LpResult res = lp.maximize(obj);
            if (res.status != LpStatus::optimal || res.obj <= 0)
                fail_runtime("Infeasible",
                             "every node family admits strictly dual-valued children "
                             "averaging to the parent",
                             "no consistent price process on this tree");
            for (int c = 0; c < B; ++c) {
                RatVec zc(d);
                for (int i = 0; i < d; ++i) zc[i] = res.x[c * d + i];
                out.z[level + 1][tree.child_of(node, c)] = std::move(zc);
            }
        }
    }
    return out;
}

void validate_consistent_z(const PriceTree& tree, const SolvencyCone& sc,
                           const TreePriceProcess& z) {
    int d = tree.d;
    if (static_cast<int>(z.z.size()) != tree.levels())
        fail_runtime("InconsistentZ", "one price-process level per tree level",
                     "level count mismatch");
    for (int level = 0; level < tree.levels(); ++level) {
        if (static_cast<int>(z.z[level].size()) != tree.nodes_at(level))
            fail_runtime("InconsistentZ", "one price-process vector per node",
                         "node count mismatch");
        for (int node = 0; node < tree.nodes_at(level); ++node) {
            const RatVec& zn = z.z[level][node];
            if (static_cast<int>(zn.size()) != d)
                fail_runtime("InconsistentZ", "process vectors have length d",
                             "bad vector length");
            for (const auto& v : zn)
                if (v <= 0)
                    fail_runtime("InconsistentZ",
                                 "process vectors are componentwise strictly positive",
                                 "nonpositive component");
            if (!dual_membership(sc, tree.prices_rat[level][node], zn))
                fail_runtime("InconsistentZ", "process vectors lie in the node dual cone",
                             "dual membership fails");
        }
    }
    for (int level = 0; level + 1 < tree.levels(); ++level)
        for (int node = 0; node < tree.nodes_at(level); ++node)
            for (int i = 0; i < d; ++i) {
                Rat avg(0);
                for (int c = 0; c < tree.branch; ++c)
                    avg += tree.child_prob * z.z[level + 1][tree.child_of(node, c)][i];
                if (avg != z.z[level][node][i])
                    fail_runtime("InconsistentZ",
                                 "conditional average of children equals the parent",
                                 "martingale equality fails");
            }
}

TreeValue tree_value(const PriceTree& tree, const TreeStrategy& strategy, const RatVec& v0hat) {
    int d = tree.d;
    if (static_cast<int>(v0hat.size()) != d)
        fail_validation("GridMismatch", "initial holding length equals d",
                        "bad initial holding length");
    if (static_cast<int>(strategy.khat.size()) != tree.periods)
        fail_validation("GridMismatch", "one strategy level per period",
                        "strategy level count mismatch");
    TreeValue out;
    out.vhat.resize(tree.levels());
    out.vhat[0].push_back(v0hat);
    for (int level = 0; level < tree.periods; ++level) {
        if (static_cast<int>(strategy.khat[level].size()) != tree.nodes_at(level))
            fail_validation("GridMismatch", "one strategy vector per node",
                            "strategy node count mismatch");
        Rat dt = tree.times[level + 1] - tree.times[level];
        out.vhat[level + 1].resize(tree.nodes_at(level + 1));
        for (int node = 0; node < tree.nodes_at(level); ++node) {
            const RatVec& kh = strategy.khat[level][node];
            if (static_cast<int>(kh.size()) != d)
                fail_validation("GridMismatch", "rate length equals d", "bad rate length");
            RatVec next(d);
            for (int i = 0; i < d; ++i) next[i] = out.vhat[level][node][i] - kh[i] * dt;
            for (int c = 0; c < tree.branch; ++c)
                out.vhat[level + 1][tree.child_of(node, c)] = next;
        }
    }
    return out;
}

SupermartReport supermartingale_check_tree(const PriceTree& tree, const TreePriceProcess& z,
                                           const TreeValue& value) {
    SupermartReport rep;
    bool first = true;
    for (int level = 0; level + 1 < tree.levels(); ++level)
        for (int node = 0; node < tree.nodes_at(level); ++node) {
            Rat now = dot(z.z[level][node], value.vhat[level][node]);
            Rat next(0);
            for (int c = 0; c < tree.branch; ++c) {
                int child = tree.child_of(node, c);
                next += tree.child_prob * dot(z.z[level + 1][child], value.vhat[level + 1][child]);
            }
            Rat margin = now - next;
            if (first || margin < rep.worst_margin) {
                rep.worst_margin = margin;
                rep.worst_level = level;
                rep.worst_node = node;
                first = false;
            }
            if (margin < 0) rep.ok = false;
        }
    return rep;
}

PathPriceProcess z_on_paths(const MarketModel& model, const PathSet& paths,
                            const std::vector<std::vector<double>>& eta) {
    if (static_cast<int>(eta.size()) != paths.d)
        fail_validation("DimensionMismatch", "one loading row per asset", "bad eta row count");
    for (const auto& row : eta)
        if (static_cast<int>(row.size()) != model.m)
            fail_validation("DimensionMismatch", "one loading column per driver",
                            "bad eta row length");
    PathPriceProcess out;
    out.z.resize(paths.s.size());
    for (size_t p = 0; p < paths.s.size(); ++p) {
        auto& zp = out.z[p];
        zp.assign(paths.n_steps + 1, std::vector<double>(paths.d));
        for (int i = 0; i < paths.d; ++i) zp[0][i] = 1.0;
        for (int k = 0; k < paths.n_steps; ++k) {
            double dt = rat_to_double(paths.grid[k + 1] - paths.grid[k]);
            for (int i = 0; i < paths.d; ++i) {
                double x = 0, n2 = 0;
                for (int l = 0; l < model.m; ++l) {
                    x += eta[i][l] * paths.dw[p][k][l];
                    n2 += eta[i][l] * eta[i][l];
                }
                // exact one-step mean of exp(eta*dW) is exp(n2*dt/2)
                zp[k + 1][i] = zp[k][i] * std::exp(x - 0.5 * n2 * dt);
            }
        }
    }
    return out;
}

void validate_z_on_paths(const SolvencyCone& sc, const PathSet& paths,
                         const PathPriceProcess& z, double tol) {
    int d = paths.d;
    for (size_t p = 0; p < paths.s.size(); ++p)
        for (int k = 0; k <= paths.n_steps; ++k) {
            const auto& zn = z.z[p][k];
            const auto& y = paths.s[p][k];
            double base = zn[0] / y[0];
            if (!(base > 0))
                fail_runtime("InconsistentZ", "numeraire component stays positive",
                             "nonpositive numeraire component");
            for (int i = 1; i < d; ++i) {
                double ri = zn[i] / y[i];
                double lo = (1.0 - rat_to_double(sc.ex.mu[i][0])) * base;
                double hi = (1.0 + rat_to_double(sc.ex.mu[0][i])) * base;
                if (ri < lo - tol * base || ri > hi + tol * base)
                    fail_runtime("InconsistentZ",
                                 "sampled process stays in the dual cone band",
                                 "ratio bound violated on a path");
            }
            for (int i = 1; i < d; ++i)
                for (int j = 1; j < d; ++j) {
                    if (i == j) continue;
                    double lhs = zn[j] / y[j] - zn[i] / y[i];
                    double cap = rat_to_double(sc.ex.mu[i][j]) * base;
                    if (lhs > cap + tol * base)
                        fail_runtime("InconsistentZ",
                                     "sampled process stays in the dual cone band",
                                     "cross ratio bound violated on a path");
                }
        }
}

McSupermartReport supermartingale_check_mc(const PathSet& paths, const PathPriceProcess& z,
                                           const KStrategy& k,
                                           const std::vector<double>& v0hat) {
    int d = paths.d;
    size_t n_paths = paths.s.size();
    if (static_cast<int>(k.steps.size()) != paths.n_steps)
        fail_validation("GridMismatch", "one strategy step per grid step",
                        "strategy length mismatch");
    McSupermartReport rep;
    for (int i = 0; i < d; ++i) rep.initial_value += z.z[0][0][i] * v0hat[i];
    double sum = 0, sumsq = 0;
    for (size_t p = 0; p < n_paths; ++p) {
        std::vector<double> vhat = v0hat;
        for (int step = 0; step < paths.n_steps; ++step) {
            double dt = rat_to_double(paths.grid[step + 1] - paths.grid[step]);
            for (int i = 0; i < d; ++i)
                vhat[i] -= rat_to_double(k.steps[step][i]) / paths.s[p][step][i] * dt;
        }
        double term = 0;
        for (int i = 0; i < d; ++i) term += z.z[p][paths.n_steps][i] * vhat[i];
        sum += term;
        sumsq += term * term;
    }
    rep.terminal_mean = sum / static_cast<double>(n_paths);
    double var = sumsq / static_cast<double>(n_paths) - rep.terminal_mean * rep.terminal_mean;
    if (var < 0) var = 0;
    rep.std_error = std::sqrt(var / static_cast<double>(n_paths));
    rep.ok = rep.terminal_mean <= rep.initial_value + 3.0 * rep.std_error;
    return rep;
}

} // namespace shp
