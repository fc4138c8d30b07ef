#pragma once

#include <filesystem>
#include <json.hpp>

#include "lpir/tabular_mdp.hpp"

namespace lpir {

/**
 * JSON form of a TabularMdp (see docs/mdp_schema.md):
 *
 *   { "alpha": 0.9, "states": 2, "actions": [2, 1],
 *     "P": [ [[p00, p01], [..]], [[..]] ],     // P[x][u][y]
 *     "g": [ [[g00, g01], 3.0], [[..]] ] }     // g[x][u][y] or g[x][u] (same for every y)
 *
 * Malformed documents raise ModelError naming the offending field.
 */
TabularMdp mdp_from_json(const nlohmann::json& doc);
nlohmann::json mdp_to_json(const TabularMdp& mdp);

TabularMdp load_mdp(const std::filesystem::path& path);

}  // namespace lpir
