#pragma once

#include <optional>
#include <string>

#include "shp/linalg.hpp"

namespace shp {

// normal . x >= offset
struct HalfSpace {
    RatVec normal;
    Rat offset;
};

struct HRep {
    int dim = 0;
    std::vector<HalfSpace> rows;
};

// conv(vertices) + cone(rays); lines show up as opposite ray pairs
struct VRep {
    int dim = 0;
    RatMat vertices;
    RatMat rays;
};

// Generators of {x : M x >= 0}. Lineality is returned separately (RREF basis
// of the kernel); rays generate the pointed part inside the row space of M.
struct ConeGenerators {
    RatMat lineality;
    RatMat rays;
};
ConeGenerators dd_cone(const RatMat& M, int dim);

HRep canonical(HRep h);
VRep canonical(VRep v);

VRep dd_h_to_v(const HRep& h);
HRep dd_v_to_h(const VRep& v);

// Convex polyhedron carrying both representations, always canonical. Empty
// sets have no vertices/rays but keep the inequality system that produced
// them. Immutable after construction.
class Polyhedron {
public:
    static Polyhedron from_h(HRep h);
    static Polyhedron from_v(VRep v);
    // Cone through the origin spanned by the given rays.
    static Polyhedron cone_from_rays(int dim, RatMat rays);

    int dim() const { return dim_; }
    bool is_empty() const { return empty_; }
    bool is_cone() const; // single vertex at the origin
    const HRep& h() const { return h_; }
    const VRep& v() const { return v_; }

    bool contains_point(const RatVec& x) const;

private:
    int dim_ = 0;
    bool empty_ = false;
    HRep h_;
    VRep v_;
};

Polyhedron minkowski_sum(const Polyhedron& a, const Polyhedron& b);
Polyhedron intersect(const Polyhedron& a, const Polyhedron& b);
// a superset-of b (every generator of b satisfies a's inequalities)
bool poly_contains(const Polyhedron& a, const Polyhedron& b);
bool set_equal(const Polyhedron& a, const Polyhedron& b);
Polyhedron translate(const Polyhedron& a, const RatVec& t);
Polyhedron scale_poly(const Polyhedron& a, const Rat& s); // s > 0

// LP-backed irredundancy helpers (cross-checks; the conversions above already
// emit minimal representations)
std::vector<int> redundant_h_rows(const HRep& h);
std::vector<int> redundant_v_rays(const VRep& v);

// membership via LP over the generator representation; used to cross-check
// contains_point
bool contains_point_by_lp(const VRep& v, const RatVec& x);

// practical ceiling for the conversion algorithms
inline constexpr int kMaxDim = 6;

} // namespace shp
