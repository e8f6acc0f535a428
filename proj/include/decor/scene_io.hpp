#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "decor/optimizer.hpp"
#include "decor/scene_model.hpp"

namespace decor {

inline constexpr int kSceneSchemaVersion = 1;

nlohmann::json asset_to_json(const AssetSpec& asset);
AssetSpec asset_from_json(const nlohmann::json& j);

nlohmann::json placement_to_json(const Placement& p);
Placement placement_from_json(const nlohmann::json& j);
nlohmann::json layout_to_json(const Layout& layout);
Layout layout_from_json(const nlohmann::json& j);

/// Includes the occupancy grid as one '0'/'1' string per row, row 0 at min y.
nlohmann::json surface_to_json(const Surface& surface);
Surface surface_from_json(const nlohmann::json& j);

nlohmann::json transcript_to_json(const TranscriptEntry& t);
TranscriptEntry transcript_from_json(const nlohmann::json& j);

/// Versioned scene document shared by the service, the CLI and the UI.
/// Parsing throws ValidationError on missing fields or a foreign version.
nlohmann::json scene_to_json(const DecorScene& scene);
DecorScene scene_from_json(const nlohmann::json& j);

DecorScene load_scene(const std::filesystem::path& path);
/// Writes through a temporary file and a rename.
void save_scene(const DecorScene& scene, const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Constraint set of a whole scene.
ConstraintSet scene_constraints(const DecorScene& scene);
/// check_hard over the full scene.
std::vector<Violation> scene_violations(const DecorScene& scene, const SolverParams& params = {});

}  // namespace decor
