#pragma once

// File formats: the JSON system-definition document (shared matrix, named
// planes, guarded pieces), trajectory/transition CSV export at full double
// precision, and the chaos-report JSON document.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scrollforge/analysis.hpp"
#include "scrollforge/pwl.hpp"

namespace scrollforge {

/// Malformed or inconsistent system document; the message carries the field
/// path.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error("schema error: " + what) {}
};

/// Structurally valid document with a wrong array dimension (e.g. a non-3x3
/// matrix).
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what)
        : std::runtime_error("dimension error: " + what) {}
};

namespace detail {

inline std::string rel_to_string(PlaneRel r) {
    switch (r) {
        case PlaneRel::Below: return "<";
        case PlaneRel::On: return "on";
        case PlaneRel::Above: return ">";
        case PlaneRel::AtOrAbove: return ">=";
        default: return "<=";
    }
}

inline PlaneRel rel_from_string(const std::string& s, const std::string& path) {
    if (s == "<") return PlaneRel::Below;
    if (s == "on") return PlaneRel::On;
    if (s == ">") return PlaneRel::Above;
    if (s == ">=") return PlaneRel::AtOrAbove;
    if (s == "<=") return PlaneRel::AtOrBelow;
    throw SchemaError(path + ": unknown plane relation '" + s + "'");
}

inline std::string op_to_string(CoordOp op) {
    switch (op) {
        case CoordOp::Lt: return "<";
        case CoordOp::Le: return "<=";
        case CoordOp::Gt: return ">";
        default: return ">=";
    }
}

inline CoordOp op_from_string(const std::string& s, const std::string& path) {
    if (s == "<") return CoordOp::Lt;
    if (s == "<=") return CoordOp::Le;
    if (s == ">") return CoordOp::Gt;
    if (s == ">=") return CoordOp::Ge;
    throw SchemaError(path + ": unknown coordinate operator '" + s + "'");
}

inline std::string coord_to_string(int axis) { return "x" + std::to_string(axis + 1); }

inline int coord_from_string(const std::string& s, const std::string& path) {
    if (s == "x1") return 0;
    if (s == "x2") return 1;
    if (s == "x3") return 2;
    throw SchemaError(path + ": unknown coordinate '" + s + "' (expected x1, x2 or x3)");
}

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key,
                                           const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + ": missing field '" + key + "'");
    return *it;
}

inline double require_number(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path + ": expected a number");
    return v.get<double>();
}

inline std::string require_string(const nlohmann::json& v, const std::string& path) {
    if (!v.is_string()) throw SchemaError(path + ": expected a string");
    return v.get<std::string>();
}

inline Vec3 read_vec3(const nlohmann::json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path + ": expected an array of 3 numbers");
    if (v.size() != 3)
        throw DimensionError(path + ": expected 3 entries, got " + std::to_string(v.size()));
    return Vec3(require_number(v[0], path + "[0]"), require_number(v[1], path + "[1]"),
                require_number(v[2], path + "[2]"));
}

/// Full double precision, shortest form that round-trips.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline nlohmann::json system_to_json(const PWLSystem& sys) {
    if (sys.pieces.empty()) throw SchemaError("pieces: system has no pieces");
    const Mat3& a = sys.pieces.front().a_matrix;
    for (const auto& piece : sys.pieces)
        if (!(piece.a_matrix == a))
            throw SchemaError("pieces: document format requires a single shared matrix");

    // Plane catalogue: declared planes first, then any guard plane not yet
    // listed under a synthesized name.
    std::vector<NamedPlane> planes = sys.planes;
    auto name_of = [&planes](const SwitchingPlane& p) -> std::string {
        for (const auto& np : planes)
            if (np.plane == p) return np.name;
        std::string name = "P" + std::to_string(planes.size() + 1);
        planes.push_back({name, p});
        return name;
    };

    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& piece : sys.pieces) {
        nlohmann::json guard = nlohmann::json::array();
        for (const auto& clause : piece.guard.clauses) {
            if (const auto* pc = std::get_if<PlaneClause>(&clause)) {
                guard.push_back({{"plane", name_of(pc->plane)},
                                 {"rel", detail::rel_to_string(pc->rel)}});
            } else {
                const auto& cc = std::get<CoordClause>(clause);
                guard.push_back({{"coord", detail::coord_to_string(cc.axis)},
                                 {"op", detail::op_to_string(cc.op)},
                                 {"value", cc.threshold}});
            }
        }
        pieces.push_back({{"guard", std::move(guard)},
                          {"b", {piece.b_vector.x, piece.b_vector.y, piece.b_vector.z}}});
    }

    nlohmann::json plane_list = nlohmann::json::array();
    for (const auto& np : planes) {
        plane_list.push_back({{"name", np.name},
                              {"normal", {np.plane.normal.x, np.plane.normal.y, np.plane.normal.z}},
                              {"offset", np.plane.offset},
                              {"tolerance", np.plane.on_tolerance}});
    }

    nlohmann::json doc;
    doc["name"] = sys.name;
    doc["matrix"] = a.data();
    doc["planes"] = std::move(plane_list);
    doc["pieces"] = std::move(pieces);
    if (!sys.region_cuts.empty()) {
        nlohmann::json cuts = nlohmann::json::array();
        for (std::size_t idx : sys.region_cuts) cuts.push_back(planes[idx].name);
        doc["region_cuts"] = std::move(cuts);
    }
    return doc;
}

inline PWLSystem system_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaError("document: expected a JSON object");

    const auto& jm = detail::require_field(doc, "matrix", "document");
    if (!jm.is_array()) throw SchemaError("matrix: expected an array of 9 numbers");
    if (jm.size() != 9)
        throw DimensionError("matrix: expected 9 entries (row-major 3x3), got " +
                             std::to_string(jm.size()));
    std::array<double, 9> entries{};
    for (std::size_t i = 0; i < 9; ++i)
        entries[i] = detail::require_number(jm[i], "matrix[" + std::to_string(i) + "]");
    Mat3 a(entries);

    PWLSystem sys;
    sys.name = doc.contains("name") ? detail::require_string(doc["name"], "name") : "custom";

    const auto& jplanes = detail::require_field(doc, "planes", "document");
    if (!jplanes.is_array()) throw SchemaError("planes: expected an array");
    std::map<std::string, std::size_t> plane_index;
    for (std::size_t i = 0; i < jplanes.size(); ++i) {
        std::string path = "planes[" + std::to_string(i) + "]";
        const auto& jp = jplanes[i];
        std::string name = detail::require_string(detail::require_field(jp, "name", path),
                                                  path + ".name");
        Vec3 normal = detail::read_vec3(detail::require_field(jp, "normal", path),
                                        path + ".normal");
        double offset = detail::require_number(detail::require_field(jp, "offset", path),
                                               path + ".offset");
        double tol = jp.contains("tolerance")
                         ? detail::require_number(jp["tolerance"], path + ".tolerance")
                         : 0.0;
        if (plane_index.count(name)) throw SchemaError(path + ".name: duplicate plane '" + name + "'");
        try {
            sys.planes.push_back({name, SwitchingPlane(normal, offset, tol)});
        } catch (const std::invalid_argument& e) {
            throw SchemaError(path + ": " + e.what());
        }
        plane_index[name] = i;
    }

    const auto& jpieces = detail::require_field(doc, "pieces", "document");
    if (!jpieces.is_array()) throw SchemaError("pieces: expected an array");
    if (jpieces.empty()) throw SchemaError("pieces: must be non-empty");
    for (std::size_t i = 0; i < jpieces.size(); ++i) {
        std::string path = "pieces[" + std::to_string(i) + "]";
        const auto& jp = jpieces[i];
        Vec3 b = detail::read_vec3(detail::require_field(jp, "b", path), path + ".b");
        const auto& jguard = detail::require_field(jp, "guard", path);
        if (!jguard.is_array()) throw SchemaError(path + ".guard: expected an array");
        RegionPredicate guard;
        for (std::size_t ci = 0; ci < jguard.size(); ++ci) {
            std::string cpath = path + ".guard[" + std::to_string(ci) + "]";
            const auto& jc = jguard[ci];
            if (!jc.is_object()) throw SchemaError(cpath + ": expected an object");
            if (jc.contains("plane")) {
                std::string pname = detail::require_string(jc["plane"], cpath + ".plane");
                auto it = plane_index.find(pname);
                if (it == plane_index.end())
                    throw SchemaError(cpath + ".plane: unknown plane '" + pname + "'");
                std::string rel = detail::require_string(
                    detail::require_field(jc, "rel", cpath), cpath + ".rel");
                guard.clauses.push_back(PlaneClause{sys.planes[it->second].plane,
                                                    detail::rel_from_string(rel, cpath + ".rel")});
            } else if (jc.contains("coord")) {
                std::string coord = detail::require_string(jc["coord"], cpath + ".coord");
                std::string op = detail::require_string(detail::require_field(jc, "op", cpath),
                                                        cpath + ".op");
                double value = detail::require_number(detail::require_field(jc, "value", cpath),
                                                      cpath + ".value");
                guard.clauses.push_back(CoordClause{detail::coord_from_string(coord, cpath),
                                                    detail::op_from_string(op, cpath + ".op"),
                                                    value});
            } else {
                throw SchemaError(cpath + ": clause needs either 'plane' or 'coord'");
            }
        }
        sys.pieces.push_back(AffinePiece{std::move(guard), a, b});
    }

    if (doc.contains("region_cuts")) {
        const auto& jcuts = doc["region_cuts"];
        if (!jcuts.is_array()) throw SchemaError("region_cuts: expected an array of plane names");
        for (std::size_t i = 0; i < jcuts.size(); ++i) {
            std::string cname = detail::require_string(jcuts[i],
                                                       "region_cuts[" + std::to_string(i) + "]");
            auto it = plane_index.find(cname);
            if (it == plane_index.end())
                throw SchemaError("region_cuts[" + std::to_string(i) + "]: unknown plane '" +
                                  cname + "'");
            sys.region_cuts.push_back(it->second);
        }
    }
    return sys;
}

inline PWLSystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("'" + path.string() + "': " + e.what());
    }
    return system_from_json(doc);
}

inline void save_system(const PWLSystem& sys, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << system_to_json(sys).dump(2) << '\n';
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,x1,x2,x3,region\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Vec3& x = traj.states[i];
        out << detail::fmt_double(traj.times[i]) << ',' << detail::fmt_double(x.x) << ','
            << detail::fmt_double(x.y) << ',' << detail::fmt_double(x.z) << ','
            << traj.regions[i] << '\n';
    }
}

inline void write_transitions_csv(std::ostream& out, const Trajectory& traj) {
    out << "time,from,to\n";
    for (const auto& tr : traj.transitions)
        out << detail::fmt_double(tr.time) << ',' << tr.from << ',' << tr.to << '\n';
}

inline void write_kc_csv(std::ostream& out, const std::vector<std::pair<double, double>>& k_per_c) {
    out << "c,Kc\n";
    for (auto [c, kc] : k_per_c)
        out << detail::fmt_double(c) << ',' << detail::fmt_double(kc) << '\n';
}

inline nlohmann::json report_to_json(const ChaosReport& report) {
    nlohmann::json doc;
    if (report.lle) doc["lle"] = *report.lle;
    if (report.k_median) {
        doc["k_median"] = *report.k_median;
        nlohmann::json kcs = nlohmann::json::array();
        for (auto [c, kc] : report.k_per_c) kcs.push_back({c, kc});
        doc["k_per_c"] = std::move(kcs);
    }
    doc["symbols"] = report.symbols;
    nlohmann::json occ;
    for (auto [region, fraction] : report.region_occupancy)
        occ[std::string(1, region)] = fraction;
    doc["occupancy"] = std::move(occ);
    return doc;
}

}  // namespace scrollforge
