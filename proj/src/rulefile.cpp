#include "startile/rulefile.hpp"

#include <fstream>
#include <sstream>

#include "startile/systems.hpp"

namespace startile {

using nlohmann::json;

namespace {

Point2 point_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError(what + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json point_to_json(Point2 p) { return json::array({p.x, p.y}); }

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + ": field '" + key + "' has the wrong type");
    }
}

json similarity_to_json(const Similarity& s) {
    return {{"scale", s.scale}, {"rotation", s.rotation}, {"reflect", s.reflect}, {"translate", point_to_json(s.translation)}};
}

Similarity similarity_from_json(const json& j, const std::string& where) {
    Similarity s;
    s.scale = j.value("scale", 1.0);
    s.rotation = j.value("rotation", 0.0);
    s.reflect = j.value("reflect", false);
    if (j.contains("translate")) s.translation = point_from_json(j.at("translate"), where + ".translate");
    if (!(s.scale > 0) || !std::isfinite(s.scale) || !std::isfinite(s.rotation))
        throw ValidationError(where + ": scale must be positive and finite");
    return s;
}

}  // namespace

json polygon_to_json(const Polygon& poly) {
    json out = json::array();
    for (const auto& p : poly) out.push_back(point_to_json(p));
    return out;
}

Polygon polygon_from_json(const json& j) {
    if (!j.is_array()) throw ValidationError("vertices: expected an array of [x, y]");
    Polygon out;
    for (const auto& p : j) out.push_back(point_from_json(p, "vertex"));
    return out;
}

StarPolygon star_polygon_from_json(const json& j) {
    const json& body = j.contains("domain") ? j.at("domain") : j;
    if (!body.contains("vertices")) throw ValidationError("domain: missing field 'vertices'");
    const Polygon v = polygon_from_json(body.at("vertices"));
    Point2 c{};
    if (body.contains("center")) {
        c = point_from_json(body.at("center"), "center");
    } else {
        for (const auto& p : v) c = c + p;
        c = (1.0 / static_cast<double>(v.size())) * c;
    }
    try {
        return StarPolygon(v, c);
    } catch (const GeometryError& e) {
        throw ValidationError(std::string("domain: ") + e.what());
    }
}

json system_to_json(const SubstitutionSystem& sys) {
    json j;
    j["name"] = sys.name;
    j["xi"] = sys.xi;
    j["prototiles"] = json::array();
    for (const auto& p : sys.prototiles)
        j["prototiles"].push_back({{"id", p.id},
                                   {"label", p.label},
                                   {"vertices", polygon_to_json(p.shape.vertices())},
                                   {"center", point_to_json(p.shape.center())}});
    j["rules"] = json::array();
    for (std::size_t parent = 0; parent < sys.rules.size(); ++parent) {
        json children = json::array();
        for (const auto& c : sys.rules[parent]) {
            json cj = similarity_to_json(c.placement);
            cj["type"] = c.type;
            children.push_back(cj);
        }
        j["rules"].push_back({{"parent", parent}, {"children", children}});
    }
    return j;
}

SubstitutionSystem system_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("rule file: expected a JSON object");
    SubstitutionSystem sys;
    sys.name = j.value("name", std::string("custom"));
    sys.xi = field<double>(j, "xi", "rule file");
    const json& protos = j.contains("prototiles") ? j.at("prototiles") : json();
    if (!protos.is_array() || protos.empty()) throw ValidationError("rule file: 'prototiles' must be a non-empty array");
    for (std::size_t k = 0; k < protos.size(); ++k) {
        const std::string where = "prototiles[" + std::to_string(k) + "]";
        const json& pj = protos[k];
        Prototile p;
        p.id = field<int>(pj, "id", where);
        p.label = pj.value("label", "P" + std::to_string(p.id));
        try {
            p.shape = StarPolygon(polygon_from_json(field<json>(pj, "vertices", where)),
                                  point_from_json(field<json>(pj, "center", where), where + ".center"));
        } catch (const GeometryError& e) {
            throw ValidationError("prototile '" + p.label + "' (id " + std::to_string(p.id) + "): " + e.what());
        }
        sys.prototiles.push_back(std::move(p));
    }
    std::sort(sys.prototiles.begin(), sys.prototiles.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    sys.rules.assign(sys.prototiles.size(), {});
    std::vector<bool> seen(sys.prototiles.size(), false);
    const json& rules = j.contains("rules") ? j.at("rules") : json();
    if (!rules.is_array()) throw ValidationError("rule file: 'rules' must be an array");
    for (std::size_t k = 0; k < rules.size(); ++k) {
        const std::string where = "rules[" + std::to_string(k) + "]";
        const int parent = field<int>(rules[k], "parent", where);
        if (parent < 0 || parent >= static_cast<int>(sys.prototiles.size()))
            throw ValidationError(where + ": unknown parent " + std::to_string(parent));
        if (seen[static_cast<std::size_t>(parent)]) throw ValidationError(where + ": duplicate rule for parent " + std::to_string(parent));
        seen[static_cast<std::size_t>(parent)] = true;
        const json children = field<json>(rules[k], "children", where);
        if (!children.is_array()) throw ValidationError(where + ": 'children' must be an array");
        for (std::size_t c = 0; c < children.size(); ++c) {
            const std::string cw = where + ".children[" + std::to_string(c) + "]";
            sys.rules[static_cast<std::size_t>(parent)].push_back(
                {field<int>(children[c], "type", cw), similarity_from_json(children[c], cw)});
        }
    }
    validate_system(sys);
    return sys;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(1) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ValidationError("empty file " + path.string());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

SubstitutionSystem load_system(const std::filesystem::path& path) { return system_from_json(read_json(path)); }

SubstitutionSystem resolve_system(const std::string& name_or_path) {
    for (const auto& n : builtin_names())
        if (n == name_or_path) return builtin_system(n);
    if (std::filesystem::exists(name_or_path)) return load_system(name_or_path);
    throw ValidationError("unknown system '" + name_or_path + "' (not built in and no such rule file)");
}

json patch_to_json(const SubstitutionSystem& sys, const Patch& patch) {
    json j;
    j["system"] = patch.system;
    j["root_type"] = patch.root_type;
    j["level"] = patch.level;
    j["rules"] = system_to_json(sys);
    j["tiles"] = json::array();
    for (const auto& t : patch.tiles) {
        const StarPolygon shape = tile_shape(sys, t);
        j["tiles"].push_back({{"type", t.type},
                              {"address", t.address.path},
                              {"placement", similarity_to_json(t.placement)},
                              {"vertices", polygon_to_json(shape.vertices())},
                              {"center", point_to_json(shape.center())}});
    }
    return j;
}

Patch patch_from_json(const json& j) {
    if (!j.is_object() || !j.contains("tiles") || !j.at("tiles").is_array() || j.at("tiles").empty())
        throw ValidationError("empty patch");
    Patch patch;
    patch.system = j.value("system", std::string());
    patch.root_type = j.value("root_type", 0);
    patch.level = j.value("level", 0);
    for (std::size_t k = 0; k < j.at("tiles").size(); ++k) {
        const std::string where = "tiles[" + std::to_string(k) + "]";
        const json& tj = j.at("tiles")[k];
        PlacedTile t;
        t.type = field<int>(tj, "type", where);
        t.placement = similarity_from_json(field<json>(tj, "placement", where), where + ".placement");
        t.address = {patch.root_type, patch.level, tj.value("address", std::vector<int>{})};
        patch.tiles.push_back(std::move(t));
    }
    return patch;
}

Patch load_patch(const std::filesystem::path& path) {
    json j;
    try {
        j = read_json(path);
    } catch (const ValidationError&) {
        if (std::filesystem::exists(path) && std::filesystem::file_size(path) == 0) throw ValidationError("empty patch");
        throw;
    }
    return patch_from_json(j);
}

}  // namespace startile
