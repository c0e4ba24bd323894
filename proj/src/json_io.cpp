#include "shp/json_io.hpp"

#include <sstream>

namespace shp {

Json rat_vec_to_json(const RatVec& v) {
    Json a = Json::array();
    for (const auto& q : v) a.push_back(rat_to_string(q));
    return a;
}

Rat rat_from_json(const Json& j) {
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rat(static_cast<long>(j.get<long long>()));
    if (j.is_number_float()) {
        // decimal text of the literal is gone; take the double's exact value
        return rat_from_double(j.get<double>());
    }
    fail_validation("BadConfig", "rational fields are strings or numbers",
                    "expected rational, got " + std::string(j.type_name()));
}

double double_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return rat_to_double(rat_from_string(j.get<std::string>()));
    fail_validation("BadConfig", "numeric fields are numbers or decimal strings",
                    "expected number, got " + std::string(j.type_name()));
}

RatVec rat_vec_from_json(const Json& j) {
    if (!j.is_array())
        fail_validation("BadConfig", "vector fields are arrays", "expected array");
    RatVec v;
    v.reserve(j.size());
    for (const auto& e : j) v.push_back(rat_from_json(e));
    return v;
}

Json rat_mat_to_json(const RatMat& m) {
    Json a = Json::array();
    for (const auto& row : m) a.push_back(rat_vec_to_json(row));
    return a;
}

RatMat rat_mat_from_json(const Json& j) {
    if (!j.is_array())
        fail_validation("BadConfig", "matrix fields are arrays of arrays", "expected array");
    RatMat m;
    m.reserve(j.size());
    for (const auto& row : j) m.push_back(rat_vec_from_json(row));
    return m;
}

Json poly_to_json(const Polyhedron& p) {
    Json j;
    j["dim"] = p.dim();
    j["vertices"] = rat_mat_to_json(p.v().vertices);
    j["rays"] = rat_mat_to_json(p.v().rays);
    Json ineqs = Json::array();
    for (const auto& r : p.h().rows) {
        Json row;
        row["normal"] = rat_vec_to_json(r.normal);
        row["offset"] = rat_to_string(r.offset);
        ineqs.push_back(std::move(row));
    }
    j["inequalities"] = std::move(ineqs);
    return j;
}

Polyhedron poly_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dim"))
        fail_validation("BadConfig", "polyhedron object carries dim",
                        "polyhedron JSON needs a dim field");
    for (const auto& [key, _] : j.items()) {
        if (key != "dim" && key != "vertices" && key != "rays" && key != "inequalities")
            fail_validation("BadConfig", "no unknown keys", "unknown polyhedron key: " + key);
    }
    int dim = j.at("dim").get<int>();
    bool have_v = j.contains("vertices") && !j.at("vertices").empty();
    bool have_h = j.contains("inequalities") && !j.at("inequalities").empty();
    if (!have_v && !have_h)
        fail_validation("EmptyInput", "at least one representation present",
                        "polyhedron JSON needs vertices or inequalities");
    VRep v;
    v.dim = dim;
    if (j.contains("vertices")) v.vertices = rat_mat_from_json(j.at("vertices"));
    if (j.contains("rays")) v.rays = rat_mat_from_json(j.at("rays"));
    HRep h;
    h.dim = dim;
    if (j.contains("inequalities")) {
        for (const auto& e : j.at("inequalities")) {
            if (!e.is_object() || !e.contains("normal") || !e.contains("offset"))
                fail_validation("BadConfig", "inequality rows carry normal and offset",
                                "bad inequality row");
            h.rows.push_back(HalfSpace{rat_vec_from_json(e.at("normal")),
                                       rat_from_json(e.at("offset"))});
        }
    }
    if (have_h) {
        Polyhedron p = Polyhedron::from_h(std::move(h));
        if (have_v) {
            // both given: the vertex data must agree with the inequality data
            for (const auto& x : v.vertices)
                if (!p.contains_point(x))
                    fail_validation("BadConfig", "given representations describe one set",
                                    "vertex violates given inequalities");
            for (const auto& r : v.rays)
                for (const auto& row : p.h().rows)
                    if (dot(row.normal, r) < 0)
                        fail_validation("BadConfig", "given representations describe one set",
                                        "ray violates given inequalities");
        }
        return p;
    }
    return Polyhedron::from_v(std::move(v));
}

} // namespace shp
