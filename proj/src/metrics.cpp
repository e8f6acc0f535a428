#include "decor/metrics.hpp"

#include <algorithm>

namespace decor {

namespace {

struct Box {
  Rect rect;
  double z0 = 0.0;
  double z1 = 0.0;
};

void require_scenes(std::span<const DecorScene> scenes) {
  if (scenes.empty()) throw ValidationError("metrics need at least one scene");
}

}  // namespace

bool scene_out_of_bounds(const DecorScene& scene) {
  for (const auto& asset : scene.assets) {
    const auto it = scene.layout.find(asset.id);
    if (it == scene.layout.end()) return true;
    const Rect rect = footprint(asset, it->second);
    if (it->second.stack_base) {
      const AssetSpec* base = scene.find_asset(*it->second.stack_base);
      const auto base_it = scene.layout.find(*it->second.stack_base);
      if (base == nullptr || base_it == scene.layout.end()) return true;
      if (!footprint(*base, base_it->second).contains(rect)) return true;
    } else if (!footprint_contained(scene.surface(asset.surface_index), rect)) {
      return true;
    }
  }
  return false;
}

double scene_overlap_volume_cm3(const DecorScene& scene) {
  std::vector<Box> boxes;
  for (const auto& asset : scene.assets) {
    const auto it = scene.layout.find(asset.id);
    if (it == scene.layout.end()) continue;
    boxes.push_back({footprint(asset, it->second), it->second.z_cm, it->second.z_cm + asset.height_cm});
  }
  double total = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      const double dz = std::min(boxes[i].z1, boxes[j].z1) - std::max(boxes[i].z0, boxes[j].z0);
      if (dz <= 0.0) continue;
      total += overlap_area(boxes[i].rect, boxes[j].rect) * dz;
    }
  }
  return total;
}

double oob_rate(std::span<const DecorScene> scenes) {
  require_scenes(scenes);
  const auto bad = std::count_if(scenes.begin(), scenes.end(), scene_out_of_bounds);
  return static_cast<double>(bad) / static_cast<double>(scenes.size());
}

double bbl(std::span<const DecorScene> scenes) {
  require_scenes(scenes);
  double total = 0.0;
  for (const auto& s : scenes) total += scene_overlap_volume_cm3(s) / 1e6;
  return total / static_cast<double>(scenes.size());
}

nlohmann::json metrics_report(std::span<const DecorScene> scenes) {
  return {{"oob_rate", oob_rate(scenes)}, {"bbl_m3", bbl(scenes)}, {"n_scenes", scenes.size()}};
}

}  // namespace decor
