#pragma once

#include <optional>

#include "shp/polyhedron.hpp"

namespace shp {

// Proportional exchange costs: converting one unit of asset j consumes
// mu[i][j] extra units of asset 1 (asset 1 itself trades against j at
// 1 +/- mu). Zero diagonal, entries in [0,1).
struct ExchangeMatrix {
    int d = 0;
    RatMat mu;
};

ExchangeMatrix exchange_from_mu(RatMat mu);

// shape/range plus multiplicative triangle consistency:
//   (1 + mu[i][j]) <= (1 + mu[i][k]) * (1 + mu[k][j])
// Round-trip positivity mu[0][j] + mu[j][0] > 0 is gated separately.
void validate_exchange(const ExchangeMatrix& ex, bool allow_degenerate);

// Signed per-unit asset-1 price of each canonical exchange: pi[0][j] = 1+mu,
// pi[j][0] = -(1-mu), pi[i][j] = mu for i,j >= 1 off asset 1; pi[0][0] = 1.
RatMat exchange_pi(const ExchangeMatrix& ex);

// aggregate position change of a nonnegative zero-diagonal transfer matrix:
// component 0 collects signed asset-1 flows, component i>=1 is
// rowsum - colsum
RatVec aggregate_transfers(const ExchangeMatrix& ex, const RatMat& b);

struct SolvencyCone {
    ExchangeMatrix ex;
    RatMat generators;                // d(d-1) raw exchange directions
    std::vector<std::pair<int, int>> generator_ids; // (from,to), same order
    Polyhedron cone;                  // canonical V and H reps
    RatMat dual_generators;           // facet normals (rows, offset 0)
    RatMat dual_unit_rational;        // same rows scaled to 2^-32 of unit length
    std::vector<std::vector<double>> unit_normals;
};

SolvencyCone build_cone(const ExchangeMatrix& ex, bool allow_degenerate = false);

// Nonneg zero-diagonal transfer witness of a target position change;
// deterministic: minimal entry sum, then lexicographic row-major.
// nullopt when the target lies outside the cone.
std::optional<RatMat> transfer_witness(const ExchangeMatrix& ex, const RatVec& target);

// witness for a componentwise-nonnegative target (always exists when the
// round-trip gate holds)
RatMat decompose(const SolvencyCone& sc, const RatVec& alpha);

// cone rescaled into physical units at price vector y > 0
Polyhedron physical_cone(const SolvencyCone& sc, const RatVec& y);
RatMat physical_generators(const SolvencyCone& sc, const RatVec& y);

// closed-form dual-cone membership at prices y: ratio bounds against the
// asset-1 component
bool dual_membership(const SolvencyCone& sc, const RatVec& y, const RatVec& z);
// independent route: inner products with the physical generators
bool dual_membership_by_generators(const SolvencyCone& sc, const RatVec& y, const RatVec& z);
// interior point of the dual cone at prices y, scaled to z[0] = 1
RatVec dual_interior_point(const SolvencyCone& sc, const RatVec& y);

// float relaxed cone at float prices: (diag(y) w_n) . x >= -eps |x|_inf
struct EpsCone {
    std::vector<double> y;
    double eps = 0.0;
    std::vector<std::vector<double>> scaled_normals; // diag(y) * unit normal
};

EpsCone make_eps_cone(const SolvencyCone& sc, const std::vector<double>& y, double eps);
// comparison slack 1e-12 * (1 + |x|_inf)
bool eps_membership(const EpsCone& kc, const std::vector<double>& x);

// sampled check that the eps2-cone at y sits inside the (eps1+eps2)-cone at
// y2 whenever |y - y2| <= eps1; PreconditionViolated if the prices are
// farther apart
bool eps_inclusion_check(const SolvencyCone& sc, const std::vector<double>& y,
                         const std::vector<double>& y2, double eps1, double eps2,
                         int n_samples, uint64_t seed);

// exact relaxed-cone pieces at rational prices: union over the 2d selections
// (a + s*eps*e_i) . x >= 0 of polyhedral cones, pruned
std::vector<Polyhedron> eps_cone_pieces(const SolvencyCone& sc, const RatVec& y,
                                        const Rat& eps);

} // namespace shp
