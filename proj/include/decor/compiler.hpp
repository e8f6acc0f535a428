#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "decor/geometry.hpp"
#include "decor/scene_model.hpp"

namespace decor {

/// A relation between two assets on the same surface.
struct PairConstraint {
  std::string subject;
  std::string reference;
  Relation relation = Relation::kNear;

  friend bool operator==(const PairConstraint&, const PairConstraint&) = default;
};

/// Placement relations split into the objective's soft pairs (distance and
/// alignment), hard pairs (relative positions, stacking included), global
/// regions and fixed orientations.
struct ConstraintSet {
  std::vector<PairConstraint> soft_pairs;
  std::vector<PairConstraint> hard_pairs;
  std::map<std::string, Region> globals;
  std::map<std::string, Orientation> fixed_orientations;
  // subject -> base, derived from on_top_of hard pairs
  std::map<std::string, std::string> stack_base;
  // surface index -> asset ids, in input asset order
  std::map<int, std::vector<std::string>> surface_groups;
  std::map<std::string, AssetSpec> assets;

  const AssetSpec& asset(const std::string& id) const;
  /// 0 for assets resting on the surface, 1 for assets on top of those, ...
  int stack_level(const std::string& id) const;
};

/// Throws CompileError for directives a plan validator should have caught and
/// for stacked assets that also carry a global region ("stacked_global").
ConstraintSet compile_plan(std::span<const PlanDirective> directives,
                           std::span<const AssetSpec> assets, std::span<const Surface> surfaces);

/// Per-surface build order: stack bases before subjects and, where acyclic,
/// relation references before subjects; ties by footprint area descending
/// then id.
std::map<int, std::vector<std::string>> construction_order(const ConstraintSet& cs);

/// Sub-problem over the given assets: pairs, globals, orientations and stack
/// links are kept only when every asset they mention is in `ids`.
ConstraintSet restrict_to_assets(const ConstraintSet& cs, const std::set<std::string>& ids);

/// Sub-problem over the assets on the given surfaces.
ConstraintSet restrict_to_surfaces(const ConstraintSet& cs, const std::set<int>& surfaces);

/// Scene-graph dump used by the UI.
nlohmann::json constraint_set_to_json(const ConstraintSet& cs);

}  // namespace decor
