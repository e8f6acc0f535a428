#pragma once

#include <span>

#include <json.hpp>

#include "decor/scene_model.hpp"

namespace decor {

/// True iff some asset leaves its surface (margin 0) or overhangs its base.
/// Assets without a placement count as out of bounds.
bool scene_out_of_bounds(const DecorScene& scene);

/// Sum over unordered asset pairs of 3D box intersection volume, in cm^3.
double scene_overlap_volume_cm3(const DecorScene& scene);

/// Fraction of scenes with at least one out-of-bounds asset.
double oob_rate(std::span<const DecorScene> scenes);

/// Mean per-scene pairwise box intersection volume in m^3.
double bbl(std::span<const DecorScene> scenes);

/// {"oob_rate", "bbl_m3", "n_scenes"}
nlohmann::json metrics_report(std::span<const DecorScene> scenes);

}  // namespace decor
