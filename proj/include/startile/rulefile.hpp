#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "startile/substitution.hpp"

namespace startile {

// Rule-file schema:
//   {"name": "...", "xi": 2.0,
//    "prototiles": [{"id": 0, "label": "...", "vertices": [[x, y], ...], "center": [x, y]}],
//    "rules": [{"parent": 0, "children": [{"type": 0, "scale": 1, "rotation": 0,
//                                          "reflect": false, "translate": [x, y]}]}]}
// Angles are radians; children are placed inside the xi-inflated parent.
nlohmann::json system_to_json(const SubstitutionSystem& sys);
// Parses and validates; throws ValidationError naming the offending field.
SubstitutionSystem system_from_json(const nlohmann::json& j);
SubstitutionSystem load_system(const std::filesystem::path& path);

// Resolves a built-in name or a rule-file path.
SubstitutionSystem resolve_system(const std::string& name_or_path);

nlohmann::json patch_to_json(const SubstitutionSystem& sys, const Patch& patch);
// Tiles keep type, placement and address; throws ValidationError on an empty
// or malformed patch.
Patch patch_from_json(const nlohmann::json& j);
Patch load_patch(const std::filesystem::path& path);

nlohmann::json polygon_to_json(const Polygon& poly);
Polygon polygon_from_json(const nlohmann::json& j);
StarPolygon star_polygon_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace startile
