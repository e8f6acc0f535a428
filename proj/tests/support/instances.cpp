#include "instances.hpp"

#include <random>

#include "furniture.hpp"

namespace decor::testing {

Surface rect_surface(int index, double x0, double y0, double w, double d, double height) {
  MeshBuilder b;
  b.box(x0, y0, height - 2, x0 + w, y0 + d, height);
  ExtractionOptions opts;
  opts.min_area_cm2 = 1.0;
  Surface s = extract_surfaces(b.mesh(), opts).front();
  s.index = index;
  return s;
}

OracleInstance random_oracle_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

  OracleInstance inst;
  const double step = 10.0;
  const int nx = uniform(4, 6);
  const int ny = uniform(3, 6);
  const double w = step * (nx - 1);
  const double d = step * (ny - 1);
  if (chance(0.25)) {
    // L-shaped top: a notch in the front-right corner.
    MeshBuilder b;
    b.box(0, d / 2, 73, w, d, 75).box(0, 0, 73, w / 2, d / 2, 75);
    inst.surfaces.push_back(extract_surfaces(b.mesh()).front());
  } else {
    inst.surfaces.push_back(rect_surface(0, 0, 0, w, d));
  }

  const int n = uniform(1, 3);
  for (int i = 0; i < n; ++i) {
    AssetSpec a;
    a.id = std::string(1, static_cast<char>('a' + i));
    a.name = "item " + a.id;
    a.width_cm = 2.0 * uniform(3, 12);
    a.depth_cm = 2.0 * uniform(3, 9);
    a.height_cm = uniform(5, 30);
    a.surface_index = 0;
    inst.assets.push_back(a);
  }

  constexpr Relation kRelations[] = {Relation::kLeftOf,         Relation::kRightOf,       Relation::kInFrontOf,
                                     Relation::kBehind,         Relation::kOnTopOf,       Relation::kNear,
                                     Relation::kFar,            Relation::kVerticalLeft,  Relation::kVerticalMid,
                                     Relation::kVerticalRight,  Relation::kHorizontalFront,
                                     Relation::kHorizontalMid,  Relation::kHorizontalBack};
  std::map<std::string, std::string> base_of;
  for (int i = 0; i < n; ++i) {
    const std::string& id = inst.assets[i].id;
    for (int j = 0; j < n; ++j) {
      if (i == j || !chance(0.6)) continue;
      const std::string& ref = inst.assets[j].id;
      Relation r = kRelations[uniform(0, 12)];
      if (r == Relation::kOnTopOf) {
        const bool fits = inst.assets[i].width_cm <= inst.assets[j].width_cm &&
                          inst.assets[i].depth_cm <= inst.assets[j].depth_cm;
        if (!fits || base_of.contains(id) || base_of.contains(ref)) r = Relation::kNear;
      }
      if (r == Relation::kOnTopOf) base_of[id] = ref;
      inst.directives.push_back(make_relation(id, r, ref));
      if (chance(0.3)) inst.directives.push_back(make_relation(id, kRelations[uniform(5, 12)], ref));
    }
  }
  for (int i = 0; i < n; ++i) {
    const std::string& id = inst.assets[i].id;
    if (!base_of.contains(id) && chance(0.3)) {
      inst.directives.push_back(make_global(id, static_cast<Region>(uniform(0, 8))));
    }
    if (chance(0.25)) {
      inst.directives.push_back(make_orientation(id, static_cast<Direction>(uniform(0, 3))));
    }
  }
  inst.cs = compile_plan(inst.directives, inst.assets, inst.surfaces);
  inst.params.grid_step_cm = step;
  inst.params.seed = seed;
  return inst;
}

}  // namespace decor::testing
