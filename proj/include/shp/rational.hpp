#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "shp/errors.hpp"

namespace shp {

// Exact rational scalar. mpq_class keeps gcd(num,den)=1 and den>0 as long as
// values are built through canonicalizing paths; every entry point here does.
using Rat = mpq_class;
using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;

// Accepts "p/q", plain integers, and decimal strings like "-0.125" or
// "2.5e-3". Decimals convert exactly (denominator a power of ten).
Rat rat_from_string(const std::string& s);

// Exact value of the double (binary expansion), not a nearest decimal.
Rat rat_from_double(double x);

// "p/q", or just "p" when q == 1. Matches what the JSON schema expects.
std::string rat_to_string(const Rat& q);

double rat_to_double(const Rat& q);

inline Rat rat_int(long n) { return Rat(n); }

// -1 / 0 / +1
inline int rat_sign(const Rat& q) { return sgn(q); }

RatVec rat_vec_from_strings(const std::vector<std::string>& v);
std::vector<std::string> rat_vec_to_strings(const RatVec& v);

} // namespace shp
