#include "decor/compiler.hpp"

#include <algorithm>
#include <set>

namespace decor {

const AssetSpec& ConstraintSet::asset(const std::string& id) const {
  const auto it = assets.find(id);
  if (it == assets.end()) throw ValidationError("unknown asset '" + id + "'");
  return it->second;
}

int ConstraintSet::stack_level(const std::string& id) const {
  int level = 0;
  std::string current = id;
  for (auto it = stack_base.find(current); it != stack_base.end(); it = stack_base.find(current)) {
    current = it->second;
    if (++level > static_cast<int>(stack_base.size())) {
      throw CompileError("stack_cycle", "stacking cycle through '" + id + "'");
    }
  }
  return level;
}

ConstraintSet compile_plan(std::span<const PlanDirective> directives,
                           std::span<const AssetSpec> assets, std::span<const Surface> surfaces) {
  ConstraintSet cs;
  std::set<int> surface_indices;
  for (const auto& s : surfaces) surface_indices.insert(s.index);
  for (const auto& a : assets) {
    if (!cs.assets.emplace(a.id, a).second) {
      throw CompileError("duplicate_asset", "asset id '" + a.id + "' is used twice");
    }
    if (!surface_indices.contains(a.surface_index)) {
      throw CompileError("bad_surface", "asset '" + a.id + "' references missing surface " +
                                            std::to_string(a.surface_index));
    }
    cs.surface_groups[a.surface_index].push_back(a.id);
  }

  for (const auto& d : directives) {
    if (!cs.assets.contains(d.subject)) {
      throw CompileError("unknown_asset", "directive subject '" + d.subject + "' is not an asset");
    }
    switch (d.kind) {
      case DirectiveKind::kGlobalRegion:
        if (!d.region) throw CompileError("bad_vocabulary", "global_region without a region");
        if (!cs.globals.emplace(d.subject, *d.region).second) {
          throw CompileError("duplicate_global", "'" + d.subject + "' has two global regions");
        }
        break;
      case DirectiveKind::kOrientation:
        if (!d.direction) throw CompileError("bad_vocabulary", "orientation without a direction");
        if (!cs.fixed_orientations.emplace(d.subject, Orientation::from_direction(*d.direction))
                 .second) {
          throw CompileError("duplicate_orientation", "'" + d.subject + "' has two orientations");
        }
        break;
      case DirectiveKind::kRelativePosition:
      case DirectiveKind::kDistance:
      case DirectiveKind::kAlignment: {
        if (!d.relation || kind_of(*d.relation) != d.kind) {
          throw CompileError("bad_vocabulary", "relation does not match directive kind for '" +
                                                   d.subject + "'");
        }
        const auto ref = cs.assets.find(d.reference);
        if (ref == cs.assets.end()) {
          throw CompileError("unknown_asset", "reference '" + d.reference + "' is not an asset");
        }
        if (d.reference == d.subject) {
          throw CompileError("self_reference", "'" + d.subject + "' references itself");
        }
        if (ref->second.surface_index != cs.assets.at(d.subject).surface_index) {
          throw CompileError("cross_surface", "'" + d.subject + "' and '" + d.reference +
                                                  "' are on different surfaces");
        }
        PairConstraint pair{d.subject, d.reference, *d.relation};
        if (d.kind == DirectiveKind::kRelativePosition) {
          if (*d.relation == Relation::kOnTopOf &&
              !cs.stack_base.emplace(d.subject, d.reference).second) {
            throw CompileError("multiple_bases", "'" + d.subject + "' sits on two bases");
          }
          cs.hard_pairs.push_back(std::move(pair));
        } else {
          cs.soft_pairs.push_back(std::move(pair));
        }
        break;
      }
    }
  }

  for (const auto& [subject, base] : cs.stack_base) {
    cs.stack_level(subject);  // throws on cycles
    if (cs.globals.contains(subject)) {
      throw CompileError("stacked_global",
                         "'" + subject + "' is stacked on '" + base + "' and has a global region");
    }
  }
  return cs;
}

std::map<int, std::vector<std::string>> construction_order(const ConstraintSet& cs) {
  std::map<int, std::vector<std::string>> out;
  for (const auto& [surface, ids] : cs.surface_groups) {
    std::map<std::string, std::set<std::string>> preds;
    std::map<std::string, std::string> stack_pred;
    for (const auto& id : ids) preds[id];
    auto add_edge = [&](const std::string& from, const std::string& to) {
      if (preds.contains(from) && preds.contains(to) && from != to) preds[to].insert(from);
    };
    for (const auto& p : cs.hard_pairs) add_edge(p.reference, p.subject);
    for (const auto& p : cs.soft_pairs) add_edge(p.reference, p.subject);
    for (const auto& [subject, base] : cs.stack_base) {
      if (preds.contains(subject)) stack_pred[subject] = base;
    }

    auto better = [&](const std::string& a, const std::string& b) {
      const double area_a = cs.asset(a).footprint_area();
      const double area_b = cs.asset(b).footprint_area();
      if (area_a != area_b) return area_a > area_b;
      return a < b;
    };

    std::set<std::string> done;
    std::vector<std::string> order;
    while (order.size() < ids.size()) {
      std::optional<std::string> pick;
      for (const auto& [id, p] : preds) {
        if (done.contains(id)) continue;
        const bool ready = std::all_of(p.begin(), p.end(),
                                       [&](const std::string& q) { return done.contains(q); });
        if (ready && (!pick || better(id, *pick))) pick = id;
      }
      if (!pick) {
        // Relation cycle: fall back to area order, still keeping bases first.
        for (const auto& [id, p] : preds) {
          if (done.contains(id)) continue;
          const auto sp = stack_pred.find(id);
          if (sp != stack_pred.end() && !done.contains(sp->second)) continue;
          if (!pick || better(id, *pick)) pick = id;
        }
      }
      if (!pick) throw CompileError("stack_cycle", "stacking cycle on surface " + std::to_string(surface));
      done.insert(*pick);
      order.push_back(*pick);
    }
    out[surface] = std::move(order);
  }
  return out;
}

ConstraintSet restrict_to_assets(const ConstraintSet& cs, const std::set<std::string>& ids) {
  ConstraintSet out;
  for (const auto& [id, a] : cs.assets) {
    if (ids.contains(id)) out.assets.emplace(id, a);
  }
  auto keep = [&](const std::string& id) { return out.assets.contains(id); };
  for (const auto& p : cs.soft_pairs) {
    if (keep(p.subject) && keep(p.reference)) out.soft_pairs.push_back(p);
  }
  for (const auto& p : cs.hard_pairs) {
    if (keep(p.subject) && keep(p.reference)) out.hard_pairs.push_back(p);
  }
  for (const auto& [id, r] : cs.globals) {
    if (keep(id)) out.globals.emplace(id, r);
  }
  for (const auto& [id, o] : cs.fixed_orientations) {
    if (keep(id)) out.fixed_orientations.emplace(id, o);
  }
  for (const auto& [id, b] : cs.stack_base) {
    if (keep(id) && keep(b)) out.stack_base.emplace(id, b);
  }
  for (const auto& [s, group] : cs.surface_groups) {
    std::vector<std::string> kept;
    for (const auto& id : group) {
      if (keep(id)) kept.push_back(id);
    }
    if (!kept.empty()) out.surface_groups.emplace(s, std::move(kept));
  }
  return out;
}

ConstraintSet restrict_to_surfaces(const ConstraintSet& cs, const std::set<int>& surfaces) {
  std::set<std::string> ids;
  for (const auto& [id, a] : cs.assets) {
    if (surfaces.contains(a.surface_index)) ids.insert(id);
  }
  return restrict_to_assets(cs, ids);
}

nlohmann::json constraint_set_to_json(const ConstraintSet& cs) {
  auto pairs = [](const std::vector<PairConstraint>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : v) {
      arr.push_back({{"subject", p.subject},
                     {"reference", p.reference},
                     {"relation", std::string(to_string(p.relation))}});
    }
    return arr;
  };
  nlohmann::json j;
  j["soft_pairs"] = pairs(cs.soft_pairs);
  j["hard_pairs"] = pairs(cs.hard_pairs);
  j["globals"] = nlohmann::json::object();
  for (const auto& [id, r] : cs.globals) j["globals"][id] = std::string(to_string(r));
  j["fixed_orientations"] = nlohmann::json::object();
  for (const auto& [id, o] : cs.fixed_orientations) {
    j["fixed_orientations"][id] = {{"direction", std::string(to_string(o.direction()))},
                                   {"yaw_deg", o.yaw_deg()}};
  }
  j["stack_base"] = cs.stack_base;
  j["surface_groups"] = nlohmann::json::object();
  for (const auto& [s, ids] : cs.surface_groups) j["surface_groups"][std::to_string(s)] = ids;
  return j;
}

}  // namespace decor
