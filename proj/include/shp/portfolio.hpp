#pragma once

#include <vector>

#include "shp/market.hpp"
#include "shp/solvency.hpp"

namespace shp {

// Three equivalent self-financing strategy representations: transfer-rate
// matrices, numeraire-units solvency-cone rates, and physical-units rates.
struct ThetaStrategy {
    std::vector<RatMat> steps;   // per grid step: d x d, zero diagonal, nonnegative
};

struct KStrategy {
    std::vector<RatVec> steps;   // per grid step: k in K(Pi), numeraire units
};

struct KhatPath {
    std::vector<std::vector<double>> steps;   // per grid step: physical-units rate
};

void validate_theta(const ThetaStrategy& theta, int d);

// aggregate each transfer matrix into its numeraire-units cone element
KStrategy theta_to_k(const ExchangeMatrix& ex, const ThetaStrategy& theta);

// recover a transfer-rate representation (minimal total rate, lexicographic
// tie-break); raises NotInCone when some step leaves the solvency cone
ThetaStrategy k_to_theta(const ExchangeMatrix& ex, const KStrategy& k);

// physical-units rates along one simulated path: khat_i = k_i / S_i at the
// step start
KhatPath khat_on_path(const KStrategy& k, const PathSet& paths, int path_index);

struct ValuePaths {
    std::vector<std::vector<double>> vhat;       // physical units, exact update rule
    std::vector<std::vector<double>> v_direct;   // diag(S) * vhat
    std::vector<std::vector<double>> v_stepped;  // numeraire units, stepwise scheme
};

// Integrate the physical-units dynamics exactly (vhat' = -khat, piecewise
// constant) and, for comparison, advance the numeraire-units value stepwise:
// multiply by the realized per-step gross return of each asset and subtract
// the trading term k*dt evaluated at the step start. The second form is exact
// for the zero strategy and converges to the first at first order in dt, which
// is what the representation-equivalence check measures.
ValuePaths simulate_value(const MarketModel& model, const PathSet& paths, int path_index,
                          const KhatPath& khat, const std::vector<double>& v0hat);

} // namespace shp
