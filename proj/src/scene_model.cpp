#include "decor/scene_model.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace decor {

namespace {

constexpr std::array<std::string_view, 4> kDirectionNames = {"forward", "left", "backward", "right"};
constexpr std::array<std::string_view, 9> kRegionNames = {"NW", "N", "NE", "W", "C",
                                                          "E",  "SW", "S", "SE"};
constexpr std::array<std::string_view, 5> kKindNames = {
    "global_region", "relative_position", "distance", "alignment", "orientation"};
constexpr std::array<std::string_view, 13> kRelationNames = {
    "left_of",        "right_of",       "in_front_of",      "behind",
    "on_top_of",      "near",           "far",              "vertical_left",
    "vertical_mid",   "vertical_right", "horizontal_front", "horizontal_mid",
    "horizontal_back"};

// Accepts "in front of", "in-front-of" and "IN_FRONT_OF" alike.
std::string normalize_token(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    if (ch == ' ' || ch == '-') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  return out;
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  const std::string key = normalize_token(s);
  for (std::size_t i = 0; i < N; ++i) {
    if (normalize_token(names[i]) == key) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

Direction Orientation::direction() const {
  if (!r90 && !r180) return Direction::kForward;
  if (r90 && !r180) return Direction::kLeft;
  if (!r90 && r180) return Direction::kBackward;
  return Direction::kRight;
}

Orientation Orientation::rotated(int quarter_turns) const {
  const int turns = ((yaw_deg() / 90 + quarter_turns) % 4 + 4) % 4;
  return from_yaw(turns * 90);
}

Orientation Orientation::from_yaw(int yaw_deg) {
  const int normalized = ((yaw_deg % 360) + 360) % 360;
  if (normalized % 90 != 0) throw ValidationError("yaw must be a multiple of 90 degrees");
  return {normalized == 90 || normalized == 270, normalized >= 180};
}

Orientation Orientation::from_direction(Direction d) {
  switch (d) {
    case Direction::kForward:
      return {false, false};
    case Direction::kLeft:
      return {true, false};
    case Direction::kBackward:
      return {false, true};
    case Direction::kRight:
      return {true, true};
  }
  return {};
}

std::string_view to_string(Direction d) { return kDirectionNames[static_cast<std::size_t>(d)]; }
std::string_view to_string(Region r) { return kRegionNames[static_cast<std::size_t>(r)]; }
std::string_view to_string(DirectiveKind k) { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Relation r) { return kRelationNames[static_cast<std::size_t>(r)]; }

std::optional<Direction> parse_direction(std::string_view s) {
  return lookup<Direction>(kDirectionNames, s);
}
std::optional<Region> parse_region(std::string_view s) {
  return lookup<Region>(kRegionNames, s);
}
std::optional<DirectiveKind> parse_directive_kind(std::string_view s) {
  return lookup<DirectiveKind>(kKindNames, s);
}
std::optional<Relation> parse_relation(std::string_view s) {
  return lookup<Relation>(kRelationNames, s);
}

DirectiveKind kind_of(Relation r) {
  switch (r) {
    case Relation::kLeftOf:
    case Relation::kRightOf:
    case Relation::kInFrontOf:
    case Relation::kBehind:
    case Relation::kOnTopOf:
      return DirectiveKind::kRelativePosition;
    case Relation::kNear:
    case Relation::kFar:
      return DirectiveKind::kDistance;
    default:
      return DirectiveKind::kAlignment;
  }
}

bool is_directional(Relation r) {
  return r == Relation::kLeftOf || r == Relation::kRightOf || r == Relation::kInFrontOf ||
         r == Relation::kBehind;
}

PlanDirective make_global(std::string subject, Region region) {
  PlanDirective d;
  d.subject = std::move(subject);
  d.kind = DirectiveKind::kGlobalRegion;
  d.region = region;
  return d;
}

PlanDirective make_relation(std::string subject, Relation relation, std::string reference) {
  PlanDirective d;
  d.subject = std::move(subject);
  d.kind = kind_of(relation);
  d.relation = relation;
  d.reference = std::move(reference);
  return d;
}

PlanDirective make_orientation(std::string subject, Direction direction) {
  PlanDirective d;
  d.subject = std::move(subject);
  d.kind = DirectiveKind::kOrientation;
  d.direction = direction;
  return d;
}

const AssetSpec* DecorScene::find_asset(std::string_view id) const {
  for (const auto& a : assets) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

const Surface& DecorScene::surface(int index) const {
  for (const auto& s : furniture.surfaces) {
    if (s.index == index) return s;
  }
  throw OutOfBoundsError("no surface with index " + std::to_string(index));
}

Rect footprint(const AssetSpec& asset, double x_cm, double y_cm, Orientation orientation) {
  if (orientation.r90) return Rect::centered(x_cm, y_cm, asset.depth_cm, asset.width_cm);
  return Rect::centered(x_cm, y_cm, asset.width_cm, asset.depth_cm);
}

Rect footprint(const AssetSpec& asset, const Placement& placement) {
  return footprint(asset, placement.x_cm, placement.y_cm, placement.orientation);
}

Region region_of(const Rect& bbox, double x_cm, double y_cm) {
  constexpr double kEps = 1e-9;
  if (x_cm < bbox.min_x - kEps || x_cm > bbox.max_x + kEps || y_cm < bbox.min_y - kEps ||
      y_cm > bbox.max_y + kEps) {
    throw OutOfBoundsError("point outside surface bounding box");
  }
  const double x1 = bbox.min_x + bbox.width() / 3.0;
  const double x2 = bbox.min_x + 2.0 * bbox.width() / 3.0;
  const double y1 = bbox.min_y + bbox.depth() / 3.0;
  const double y2 = bbox.min_y + 2.0 * bbox.depth() / 3.0;
  const int col = x_cm <= x1 ? 0 : (x_cm <= x2 ? 1 : 2);
  const int row_from_north = y_cm <= y1 ? 2 : (y_cm <= y2 ? 1 : 0);
  return static_cast<Region>(row_from_north * 3 + col);
}

Region region_of(const Surface& surface, double x_cm, double y_cm) {
  return region_of(surface.bbox, x_cm, y_cm);
}

Rect region_cell(const Rect& bbox, Region region) {
  const int idx = static_cast<int>(region);
  const int col = idx % 3;
  const int row_from_south = 2 - idx / 3;
  const double w = bbox.width() / 3.0;
  const double d = bbox.depth() / 3.0;
  return {bbox.min_x + col * w, bbox.min_y + row_from_south * d, bbox.min_x + (col + 1) * w,
          bbox.min_y + (row_from_south + 1) * d};
}

void assign_stack_heights(Layout& layout, std::span<const AssetSpec> assets,
                          std::span<const Surface> surfaces) {
  std::map<std::string, const AssetSpec*> by_id;
  for (const auto& a : assets) by_id[a.id] = &a;
  auto surface_height = [&](int index) {
    for (const auto& s : surfaces) {
      if (s.index == index) return s.height_cm;
    }
    throw OutOfBoundsError("no surface with index " + std::to_string(index));
  };
  for (auto& [id, placement] : layout) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("layout entry for unknown asset '" + id + "'");
    double z = surface_height(it->second->surface_index);
    std::set<std::string> seen{id};
    std::optional<std::string> base = placement.stack_base;
    while (base) {
      if (!seen.insert(*base).second) throw ValidationError("stacking cycle through '" + id + "'");
      const auto b = by_id.find(*base);
      const auto lb = layout.find(*base);
      if (b == by_id.end() || lb == layout.end()) {
        throw ValidationError("stack base '" + *base + "' is not placed");
      }
      z += b->second->height_cm;
      base = lb->second.stack_base;
    }
    placement.z_cm = z;
  }
}

std::string slugify(std::string_view text) {
  std::string out;
  bool pending_sep = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (pending_sep && !out.empty()) out.push_back('_');
      out.push_back(static_cast<char>(std::tolower(c)));
      pending_sep = false;
    } else {
      pending_sep = true;
    }
  }
  return out.empty() ? std::string("asset") : out;
}

}  // namespace decor
