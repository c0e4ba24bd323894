#pragma once

#include <vector>

#include "shp/market.hpp"
#include "shp/portfolio.hpp"
#include "shp/solvency.hpp"

namespace shp {

// Consistent price process on a tree: one exact vector per node, valued in the
// node's dual solvency cone minus the origin, exactly martingale along the
// tree, normalized to Z[0] = 1 at the root.
struct TreePriceProcess {
    std::vector<std::vector<RatVec>> z;   // [level][node]
};

// Forward construction: the root takes the dual cone's interior barycenter;
// each family of children solves one exact LP maximizing the minimum dual-cone
// slack subject to the probability-weighted average matching the parent.
// Raises Infeasible when a family admits no strictly valid children.
TreePriceProcess find_consistent_z(const PriceTree& tree, const SolvencyCone& sc);

// Raises InconsistentZ unless z is a componentwise-positive exact martingale
// valued in the node dual cones.
void validate_consistent_z(const PriceTree& tree, const SolvencyCone& sc,
                           const TreePriceProcess& z);

// Node-indexed trading rates (physical units) and the resulting holdings.
struct TreeStrategy {
    std::vector<std::vector<RatVec>> khat;   // [level 0..P-1][node]
};

struct TreeValue {
    std::vector<std::vector<RatVec>> vhat;   // [level][node]
};

// vhat(child) = vhat(parent) - khat(parent) * dt, exactly
TreeValue tree_value(const PriceTree& tree, const TreeStrategy& strategy, const RatVec& v0hat);

struct SupermartReport {
    bool ok = true;
    Rat worst_margin;        // min over nodes of E[drop]: value now minus expected next
    int worst_level = -1;
    int worst_node = -1;
};

// exact node-wise check that Z * vhat never rises in conditional expectation
SupermartReport supermartingale_check_tree(const PriceTree& tree, const TreePriceProcess& z,
                                           const TreeValue& value);

// Monte Carlo price process via discrete stochastic exponentials with constant
// loadings eta (d rows, one per asset, m columns); each step multiplies by
// exp(eta*dW) and divides by the exact step mean so one-step martingality is
// exact in law.
struct PathPriceProcess {
    std::vector<std::vector<std::vector<double>>> z;   // [path][step][asset]
};

PathPriceProcess z_on_paths(const MarketModel& model, const PathSet& paths,
                            const std::vector<std::vector<double>>& eta);

// Raises InconsistentZ when some sampled step leaves the dual cone by more
// than the tolerance (relative to the step's magnitude).
void validate_z_on_paths(const SolvencyCone& sc, const PathSet& paths,
                         const PathPriceProcess& z, double tol);

struct McSupermartReport {
    bool ok = true;
    double terminal_mean = 0;   // sample mean of Z_T . vhat_T
    double initial_value = 0;   // Z_0 . vhat_0
    double std_error = 0;
};

// sample-mean supermartingale check: terminal mean must not exceed the initial
// value by more than three standard errors
McSupermartReport supermartingale_check_mc(const PathSet& paths, const PathPriceProcess& z,
                                           const KStrategy& k, const std::vector<double>& v0hat);

} // namespace shp
