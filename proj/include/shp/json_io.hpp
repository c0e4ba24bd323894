#pragma once

#include <json.hpp>

#include "shp/polyhedron.hpp"

namespace shp {

using Json = nlohmann::ordered_json;

// {"dim": n, "vertices": [["p/q",...]], "rays": [...],
//  "inequalities": [{"normal": [...], "offset": "p/q"}]}
Json poly_to_json(const Polyhedron& p);
Polyhedron poly_from_json(const Json& j);

Json rat_vec_to_json(const RatVec& v);
RatVec rat_vec_from_json(const Json& j);
Json rat_mat_to_json(const RatMat& m);
RatMat rat_mat_from_json(const Json& j);

// tolerant numeric readers: accept JSON numbers and decimal strings
Rat rat_from_json(const Json& j);
double double_from_json(const Json& j);

} // namespace shp
