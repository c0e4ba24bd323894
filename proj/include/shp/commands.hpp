#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shp/json_io.hpp"
#include "shp/market.hpp"
#include "shp/solvency.hpp"

namespace shp {

// One validated run configuration, parsed from a single JSON document.
// Parsing rejects unknown keys and validates every sub-invariant before any
// computation runs.
struct RunConfig {
    bool has_mu = false;
    ExchangeMatrix mu;

    bool has_market = false;
    MarketModel market;

    bool has_claim = false;
    Claim claim;

    int periods = 1;
    std::vector<Rat> eps_grid;     // default {1/20, 1/10, 1/5, 2/5}
    uint64_t seed = 0;
    std::string out_dir;           // empty: no artifacts written
    bool allow_degenerate = false;
    std::string mode = "tree";     // "tree" | "mc"
    bool quick = false;

    bool has_alpha = false;
    RatVec alpha;                  // decompose input
    bool has_xi = false;
    RatVec xi;                     // eps-membership query point

    int n_paths = 10000;           // MC path count
    int n_steps = 16;              // MC step count
    int n_samples = 4000;          // eps MC sample count
};

RunConfig parse_config(const Json& doc);
RunConfig parse_config_text(const std::string& text);

// Dispatch one command ("cone", "decompose", "tree", "superhedge", "eps",
// "price", "verify") and return its summary JSON. When cfg.out_dir is set,
// artifacts are written there; identical (config, seed) yields byte-identical
// files. Raises Error for every invalid input or broken invariant.
Json run_command(const std::string& command, const RunConfig& cfg);

} // namespace shp
