#include "decor/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace decor {

namespace {

constexpr double kEps = 1e-9;
constexpr double kMinMagnitude = 1e-6;

const Surface& find_surface(std::span<const Surface> surfaces, int index) {
  for (const auto& s : surfaces) {
    if (s.index == index) return s;
  }
  throw OutOfBoundsError("no surface with index " + std::to_string(index));
}

const Placement& placement_of(const Layout& layout, const std::string& id) {
  const auto it = layout.find(id);
  if (it == layout.end()) throw ValidationError("layout has no placement for '" + id + "'");
  return it->second;
}

double point_rect_distance(const Rect& r, double x, double y) {
  const double dx = std::max({0.0, r.min_x - x, x - r.max_x});
  const double dy = std::max({0.0, r.min_y - y, y - r.max_y});
  return std::hypot(dx, dy);
}

}  // namespace

void SolverParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string("solver parameter ") + name + " must be positive");
    }
  };
  positive(grid_step_cm, "grid_step_cm");
  positive(initial_temperature, "T0");
  positive(near_cm, "D_near_cm");
  positive(far_cm, "D_far_cm");
  positive(align_tolerance_cm, "T_align_cm");
  positive(jitter_sigma_cm, "jitter_sigma_cm");
  if (!(cooling > 0.0 && cooling < 1.0)) throw ValidationError("cooling must lie in (0, 1)");
  if (anneal_iters < 0) throw ValidationError("anneal_iters must be non-negative");
  if (!(edge_margin_cm >= 0.0)) throw ValidationError("edge_margin_cm must be non-negative");
}

SolverParams solver_params_from_json(const nlohmann::json& overrides, SolverParams p) {
  if (overrides.is_null()) return p;
  if (!overrides.is_object()) throw ValidationError("solver overrides must be an object");
  for (const auto& [key, value] : overrides.items()) {
    if (key == "grid_step_cm") p.grid_step_cm = value.get<double>();
    else if (key == "seed") p.seed = value.get<std::uint64_t>();
    else if (key == "anneal_iters") p.anneal_iters = value.get<int>();
    else if (key == "T0") p.initial_temperature = value.get<double>();
    else if (key == "cooling") p.cooling = value.get<double>();
    else if (key == "D_near_cm") p.near_cm = value.get<double>();
    else if (key == "D_far_cm") p.far_cm = value.get<double>();
    else if (key == "T_align_cm") p.align_tolerance_cm = value.get<double>();
    else if (key == "edge_margin_cm") p.edge_margin_cm = value.get<double>();
    else if (key == "jitter_sigma_cm") p.jitter_sigma_cm = value.get<double>();
    else throw ValidationError("unknown solver parameter '" + key + "'");
  }
  p.validate();
  return p;
}

nlohmann::json solver_params_to_json(const SolverParams& p) {
  return {{"grid_step_cm", p.grid_step_cm}, {"seed", p.seed},
          {"anneal_iters", p.anneal_iters}, {"T0", p.initial_temperature},
          {"cooling", p.cooling},           {"D_near_cm", p.near_cm},
          {"D_far_cm", p.far_cm},           {"T_align_cm", p.align_tolerance_cm},
          {"edge_margin_cm", p.edge_margin_cm}, {"jitter_sigma_cm", p.jitter_sigma_cm}};
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kContainment: return "containment";
    case ViolationKind::kOverlap: return "overlap";
    case ViolationKind::kGlobalRegion: return "global_region";
    case ViolationKind::kRelation: return "relation";
    case ViolationKind::kStacking: return "stacking";
    case ViolationKind::kOrientation: return "orientation";
  }
  return "unknown";
}

nlohmann::json violations_to_json(std::span<const Violation> violations) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : violations) {
    arr.push_back({{"kind", std::string(to_string(v.kind))},
                   {"subjects", v.subjects},
                   {"magnitude", v.magnitude}});
  }
  return arr;
}

Lattice make_lattice(const Surface& surface, double step) {
  Lattice l;
  l.origin_x = surface.bbox.min_x;
  l.origin_y = surface.bbox.min_y;
  l.step = step;
  l.nx = static_cast<int>(std::floor(surface.bbox.width() / step + kEps)) + 1;
  l.ny = static_cast<int>(std::floor(surface.bbox.depth() / step + kEps)) + 1;
  return l;
}

double alignment_coordinate(Relation alignment, const Rect& r) {
  switch (alignment) {
    case Relation::kVerticalLeft: return r.min_x;
    case Relation::kVerticalMid: return r.center().x;
    case Relation::kVerticalRight: return r.max_x;
    case Relation::kHorizontalFront: return r.min_y;
    case Relation::kHorizontalMid: return r.center().y;
    case Relation::kHorizontalBack: return r.max_y;
    default:
      throw ValidationError("relation '" + std::string(to_string(alignment)) + "' is not an alignment");
  }
}

double soft_term(Relation relation, const Rect& subject, const Rect& reference,
                 const SolverParams& params) {
  switch (relation) {
    case Relation::kNear:
      return std::max(0.0, 1.0 - gap_distance(subject, reference) / params.near_cm);
    case Relation::kFar:
      return std::min(1.0, gap_distance(subject, reference) / params.far_cm);
    default: {
      const double e = std::abs(alignment_coordinate(relation, subject) -
                                alignment_coordinate(relation, reference));
      return std::max(0.0, 1.0 - e / params.align_tolerance_cm);
    }
  }
}

double relation_shortfall(Relation relation, const Rect& s, const Rect& r) {
  switch (relation) {
    case Relation::kLeftOf: return std::max(0.0, s.max_x - r.min_x);
    case Relation::kRightOf: return std::max(0.0, r.max_x - s.min_x);
    case Relation::kInFrontOf: return std::max(0.0, s.max_y - r.min_y);
    case Relation::kBehind: return std::max(0.0, r.max_y - s.min_y);
    default:
      throw ValidationError("relation '" + std::string(to_string(relation)) + "' is not directional");
  }
}

double soft_score(const Layout& layout, const ConstraintSet& cs, const SolverParams& params) {
  double total = 0.0;
  for (const auto& p : cs.soft_pairs) {
    const Rect s = footprint(cs.asset(p.subject), placement_of(layout, p.subject));
    const Rect r = footprint(cs.asset(p.reference), placement_of(layout, p.reference));
    total += soft_term(p.relation, s, r, params);
  }
  return total;
}

std::vector<Violation> check_hard(const Layout& layout, const ConstraintSet& cs,
                                  std::span<const Surface> surfaces, const SolverParams& params) {
  std::vector<Violation> out;
  std::map<std::string, Rect> rects;
  std::map<std::string, int> levels;
  for (const auto& [id, asset] : cs.assets) {
    rects[id] = footprint(asset, placement_of(layout, id));
    levels[id] = cs.stack_level(id);
  }

  for (const auto& [id, asset] : cs.assets) {
    const Placement& p = placement_of(layout, id);
    const Rect& rect = rects[id];

    if (const auto fixed = cs.fixed_orientations.find(id); fixed != cs.fixed_orientations.end()) {
      if (p.orientation != fixed->second) {
        const int diff = std::abs(p.orientation.yaw_deg() - fixed->second.yaw_deg());
        out.push_back({ViolationKind::kOrientation, {id}, static_cast<double>(std::min(diff, 360 - diff))});
      }
    }

    const auto base = cs.stack_base.find(id);
    if (base == cs.stack_base.end()) {
      const Surface& surface = find_surface(surfaces, asset.surface_index);
      const Rect inflated = rect.inflated(params.edge_margin_cm);
      if (!footprint_contained(surface, inflated)) {
        const double outside = inflated.area() - overlap_area(inflated, surface.bbox);
        const double unsupported =
            static_cast<double>(surface.grid.unsupported_in(inflated)) * surface.grid.cell_area();
        out.push_back({ViolationKind::kContainment, {id}, std::max(outside + unsupported, kMinMagnitude)});
      }
      if (p.stack_base) {
        out.push_back({ViolationKind::kStacking, {id, *p.stack_base}, 1.0});
      }
    } else {
      const Rect& base_rect = rects[base->second];
      if (!base_rect.contains(rect)) {
        const double overhang = rect.area() - overlap_area(rect, base_rect);
        out.push_back({ViolationKind::kStacking, {id, base->second}, std::max(overhang, kMinMagnitude)});
      }
      if (!p.stack_base || *p.stack_base != base->second) {
        out.push_back({ViolationKind::kStacking, {id, base->second}, 1.0});
      }
    }

    if (const auto g = cs.globals.find(id); g != cs.globals.end()) {
      const Surface& surface = find_surface(surfaces, asset.surface_index);
      const Rect cell = region_cell(surface.bbox, g->second);
      bool inside = false;
      if (surface.bbox.contains(Vec2{p.x_cm, p.y_cm})) {
        inside = region_of(surface, p.x_cm, p.y_cm) == g->second;
      }
      if (!inside) {
        out.push_back({ViolationKind::kGlobalRegion, {id},
                       std::max(point_rect_distance(cell, p.x_cm, p.y_cm), kMinMagnitude)});
      }
    }
  }

  // Pairwise non-overlap among assets sharing a surface and stack level.
  for (auto a = cs.assets.begin(); a != cs.assets.end(); ++a) {
    for (auto b = std::next(a); b != cs.assets.end(); ++b) {
      if (a->second.surface_index != b->second.surface_index) continue;
      if (levels[a->first] != levels[b->first]) continue;
      const double area = overlap_area(rects[a->first], rects[b->first]);
      if (area > kEps) out.push_back({ViolationKind::kOverlap, {a->first, b->first}, area});
    }
  }

  for (const auto& pair : cs.hard_pairs) {
    if (!is_directional(pair.relation)) continue;  // on_top_of handled as stacking
    const double shortfall = relation_shortfall(pair.relation, rects[pair.subject], rects[pair.reference]);
    if (shortfall > kEps) {
      out.push_back({ViolationKind::kRelation, {pair.subject, pair.reference}, shortfall});
    }
  }
  return out;
}

}  // namespace decor
