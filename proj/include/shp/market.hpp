#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "shp/errors.hpp"
#include "shp/rational.hpp"

namespace shp {

// Deterministic-coefficient lognormal market. Asset 1 is the numeraire and
// grows at the riskless rate; risky assets 2..d are driven by m = d-1
// Brownian drivers. All coefficients are piecewise constant on a shared
// breakpoint grid so that time integrals are exact rationals.
struct MarketModel {
    int d = 0;                       // number of assets
    int m = 0;                       // number of drivers, always d - 1
    RatVec s0;                       // initial prices, s0[0] == 1
    Rat horizon;                     // terminal time T > 0
    std::vector<Rat> cuts;           // segment end times, increasing, back() == T
    RatVec r_seg;                    // riskless rate per segment
    RatMat b_seg;                    // drift rows per segment, length d-1 each
    std::vector<RatMat> sigma_seg;   // per segment: (d-1) x m volatility matrix
};

void validate_model(const MarketModel& model);

// Exact integrals over [a, b] within [0, T].
Rat rate_integral(const MarketModel& model, const Rat& a, const Rat& b);
// per risky asset i (0-based into rows 2..d): integral of (b_i - |sigma_i|^2/2)
RatVec drift_integral(const MarketModel& model, const Rat& a, const Rat& b);
// time-averaged volatility rows over [a, b] (exact rational average)
RatMat sigma_average(const MarketModel& model, const Rat& a, const Rat& b);
// subsegments of [a, b] induced by the breakpoint grid: (start, end, segment)
std::vector<std::tuple<Rat, Rat, int>> subsegments(const MarketModel& model, const Rat& a,
                                                   const Rat& b);
// index of the segment whose half-open window [lo, hi) contains t (t == T maps
// to the last segment)
int segment_at(const MarketModel& model, const Rat& t);

// Monte Carlo paths on a uniform grid. Prices are floats; driver increments
// per step are retained for downstream consistency checks.
struct PathSet {
    int d = 0;
    int n_steps = 0;
    std::vector<Rat> grid;                               // exact times, n_steps + 1
    std::vector<std::vector<std::vector<double>>> s;     // [path][step][asset]
    std::vector<std::vector<std::vector<double>>> dw;    // [path][step][driver]
};

PathSet simulate_paths(const MarketModel& model, int n_paths, int n_steps, uint64_t seed);
std::string paths_csv(const PathSet& paths, int path_index);

// Non-recombining multinomial tree: every node spawns 2^m children, one per
// sign pattern of the driver increments (+/- sqrt(dt)), uniform probabilities.
// Level l holds branch^l nodes; children of node i are i*branch .. i*branch+branch-1.
struct PriceTree {
    int d = 0;
    int m = 0;
    int periods = 0;
    int branch = 0;                  // 2^m
    Rat horizon;
    std::vector<Rat> times;          // level times, length periods + 1
    Rat child_prob;                  // uniform transition probability 2^-m
    std::vector<std::vector<std::vector<double>>> prices;  // [level][node][asset]
    std::vector<std::vector<RatVec>> prices_rat;           // same, rounded to 2^-32 grid
    std::vector<std::vector<Rat>> path_prob;               // [level][node]

    int levels() const { return periods + 1; }
    int nodes_at(int level) const { return static_cast<int>(prices[level].size()); }
    int parent_of(int node) const { return node / branch; }
    int child_of(int node, int slot) const { return node * branch + slot; }
};

PriceTree build_tree(const MarketModel& model, int periods);

// Contract payoffs. Physical units quote the payoff as share counts.
enum class ClaimKind { constant_physical, vanilla_call, linear_basket };

struct Claim {
    ClaimKind kind = ClaimKind::constant_physical;
    RatVec constant;       // constant_physical: the physical-units vector
    int call_asset = 2;    // vanilla_call: 1-based asset index in 2..d
    Rat strike;            // vanilla_call: strike > 0
    RatVec weights;        // linear_basket: numeraire weights, length d
    Rat lipschitz = 1;     // L >= 1
};

void validate_claim(const Claim& claim, int d);
Rat claim_lipschitz(const Claim& claim);
RatVec claim_payoff(const Claim& claim, const RatVec& leaf_prices);
std::vector<double> claim_payoff_f(const Claim& claim, const std::vector<double>& leaf_prices);

} // namespace shp
