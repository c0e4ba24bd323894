#pragma once

#include <optional>

#include "shp/rational.hpp"

namespace shp {

Rat dot(const RatVec& a, const RatVec& b);
RatVec add(const RatVec& a, const RatVec& b);
RatVec sub(const RatVec& a, const RatVec& b);
RatVec scale(const RatVec& a, const Rat& s);
bool is_zero_vec(const RatVec& a);
// lexicographic; used for canonical sorting
bool lex_less(const RatVec& a, const RatVec& b);

// Divide by gcd of numerators times lcm of denominators so entries become
// coprime integers; sign left untouched. Zero vector stays zero.
RatVec primitive(const RatVec& v);

// Scale by a positive factor so the first nonzero entry has absolute value 1.
RatVec scale_first_nonzero(const RatVec& v);

// Row-reduce a copy of m; returns rank. If rref != nullptr also stores the
// reduced rows (nonzero rows only) and pivot columns.
struct Rref {
    RatMat rows;              // nonzero rows, leading entry 1
    std::vector<int> pivots;  // pivot column per row
    int rank = 0;
};
Rref rref(const RatMat& m, int ncols);

int rank_of(const RatMat& m, int ncols);

// Basis of {x : m x = 0}, from the RREF free columns. Canonical given m.
RatMat nullspace(const RatMat& m, int ncols);

// Solve square system a x = b; nullopt when singular.
std::optional<RatVec> solve_square(const RatMat& a, const RatVec& b);

// Inverse of a square matrix; nullopt when singular.
std::optional<RatMat> invert(const RatMat& a);

} // namespace shp
