#pragma once

#include <cstdint>
#include <vector>

#include "shp/lp.hpp"
#include "shp/market.hpp"
#include "shp/polyhedron.hpp"
#include "shp/solvency.hpp"

namespace shp {

// Node-indexed superhedging sets computed by exact backward recursion on a
// rationalized tree: leaves take payoff plus the node trading cone, internal
// nodes take their trading cone plus the intersection over children.
struct SuperhedgeResult {
    std::vector<std::vector<Polyhedron>> sets;    // [level][node]
    std::vector<std::vector<Polyhedron>> cones;   // [level][node] trading cones
    RatMat leaf_payoffs;                          // physical-units payoff per leaf
};

// exact physical-units payoffs at the rationalized leaf prices
RatMat tree_leaf_payoffs(const PriceTree& tree, const Claim& claim);

SuperhedgeResult backward_sets(const PriceTree& tree, const SolvencyCone& sc,
                               const RatMat& leaf_payoffs);

// Recompute the root set treating the given polyhedra as terminal data at
// level u, then compare with the recorded root set exactly. The terminal
// override exists so tests can mutate one level-u set and watch the equality
// break.
bool dpp_check_with_terminal(const PriceTree& tree, const SuperhedgeResult& result,
                             int level_u, const std::vector<Polyhedron>& terminal);
bool dpp_check(const PriceTree& tree, const SuperhedgeResult& result, int level_u);

// Brute-force membership oracle: one exact feasibility system over all node
// trading rates at once (nonnegative combinations of each node cone's rays;
// terminal dominance componentwise per leaf). The system matrix is factored
// once; each probe re-solves for its right-hand side only.
class SuperhedgeOracle {
public:
    SuperhedgeOracle(const PriceTree& tree, const SolvencyCone& sc,
                     const RatMat& leaf_payoffs);
    bool contains(const RatVec& xi);

private:
    int d_;
    int n_leaves_;
    RatMat leaf_payoffs_;
    FeasibilityOracle oracle_;
};

// Probability-relaxed membership on small trees: the portfolio must dominate
// the cushioned payoff on a leaf set of probability at least 1 - eps, with
// per-node rates drawn from the relaxed node cones (unions of polyhedral
// pieces). Exact enumeration over maximal excluded leaf sets.
bool eps_membership_tree(const PriceTree& tree, const SolvencyCone& sc,
                         const RatMat& leaf_payoffs, const Rat& lipschitz,
                         const RatVec& xi, const Rat& eps);

struct EpsMcReport {
    double success_prob = 0;
    bool accepted = false;
};

// Sampling variant: fit the minimal uniform-shortfall strategy without
// relaxation, then sample leaves by probability and report how often the
// cushioned dominance holds.
EpsMcReport eps_membership_mc(const PriceTree& tree, const SolvencyCone& sc,
                              const RatMat& leaf_payoffs, const Rat& lipschitz,
                              const RatVec& xi, const Rat& eps, int n_samples,
                              uint64_t seed);

// Exact conditional-probability concentration bound: among level-u nodes, the
// mass of those giving the event conditional probability at least sqrt(eps)
// is itself at most sqrt(eps). Comparisons against sqrt(eps) are done on
// squares, so the check is exact.
bool concentration_check(const PriceTree& tree, const std::vector<int>& event_leaves,
                         const Rat& eps, int level_u);

} // namespace shp
