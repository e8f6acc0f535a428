#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decor/geometry.hpp"

namespace decor {

enum class Direction { kForward, kLeft, kBackward, kRight };

/// Yaw in quarter turns, encoded as two flags: yaw = 90*r90 + 180*r180.
/// Yaw 0 faces -Y (the furniture front); yaw 90 faces -X ("left").
struct Orientation {
  bool r90 = false;
  bool r180 = false;

  int yaw_deg() const { return (r90 ? 90 : 0) + (r180 ? 180 : 0); }
  Direction direction() const;
  Orientation rotated(int quarter_turns) const;

  static Orientation from_yaw(int yaw_deg);
  static Orientation from_direction(Direction d);

  friend bool operator==(const Orientation&, const Orientation&) = default;
};

inline constexpr std::array<Orientation, 4> kAllOrientations = {
    Orientation{false, false}, Orientation{true, false}, Orientation{false, true},
    Orientation{true, true}};

/// Cells of the uniform 3x3 partition of a surface bounding box. Row S is the
/// front (-Y), column W is -X.
enum class Region { kNW, kN, kNE, kW, kC, kE, kSW, kS, kSE };

enum class DirectiveKind { kGlobalRegion, kRelativePosition, kDistance, kAlignment, kOrientation };

enum class Relation {
  kLeftOf,
  kRightOf,
  kInFrontOf,
  kBehind,
  kOnTopOf,
  kNear,
  kFar,
  kVerticalLeft,
  kVerticalMid,
  kVerticalRight,
  kHorizontalFront,
  kHorizontalMid,
  kHorizontalBack,
};

std::string_view to_string(Direction d);
std::string_view to_string(Region r);
std::string_view to_string(DirectiveKind k);
std::string_view to_string(Relation r);

std::optional<Direction> parse_direction(std::string_view s);
std::optional<Region> parse_region(std::string_view s);
std::optional<DirectiveKind> parse_directive_kind(std::string_view s);
std::optional<Relation> parse_relation(std::string_view s);

/// Which directive kind a relation belongs to.
DirectiveKind kind_of(Relation r);
bool is_directional(Relation r);  // left_of .. behind

struct AssetSpec {
  std::string id;
  std::string name;
  double width_cm = 0.0;   // along asset-local x at yaw 0
  double depth_cm = 0.0;   // along asset-local y at yaw 0
  double height_cm = 0.0;
  int surface_index = 0;
  std::string style;
  std::string material;

  double footprint_area() const { return width_cm * depth_cm; }
  friend bool operator==(const AssetSpec&, const AssetSpec&) = default;
};

struct PlanDirective {
  std::string subject;
  DirectiveKind kind = DirectiveKind::kGlobalRegion;
  std::optional<Region> region;        // global_region only
  std::string reference;               // local kinds only
  std::optional<Relation> relation;    // local kinds only
  std::optional<Direction> direction;  // orientation only

  friend bool operator==(const PlanDirective&, const PlanDirective&) = default;
};

PlanDirective make_global(std::string subject, Region region);
PlanDirective make_relation(std::string subject, Relation relation, std::string reference);
PlanDirective make_orientation(std::string subject, Direction direction);

struct Placement {
  double x_cm = 0.0;
  double y_cm = 0.0;
  Orientation orientation;
  std::optional<std::string> stack_base;
  double z_cm = 0.0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Asset id -> placement. Ordered so serialization is deterministic.
using Layout = std::map<std::string, Placement>;

struct Binding {
  std::string entry_id;
  std::array<double, 3> scale{1.0, 1.0, 1.0};  // asset dims / entry dims

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct TranscriptEntry {
  std::string stage;
  int attempt = 0;
  std::string role;
  std::string content;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct Provenance {
  std::string prompt;
  int n_assets = 0;
  std::uint64_t seed = 0;
  std::vector<TranscriptEntry> transcripts;
  std::vector<std::string> edits;  // one summary line per applied edit batch
};

struct FurnitureRef {
  std::string mesh_ref;
  std::vector<Surface> surfaces;
};

struct DecorScene {
  int revision = 0;
  FurnitureRef furniture;
  std::vector<AssetSpec> assets;
  std::vector<PlanDirective> directives;
  Layout layout;
  std::map<std::string, Binding> bindings;
  Provenance provenance;

  const AssetSpec* find_asset(std::string_view id) const;
  const Surface& surface(int index) const;
};

/// Footprint of an asset centered at (x, y); a quarter turn swaps the extents.
Rect footprint(const AssetSpec& asset, double x_cm, double y_cm, Orientation orientation);
Rect footprint(const AssetSpec& asset, const Placement& placement);

/// 3x3 cell containing the point; boundaries go to the west/south cell.
/// Throws OutOfBoundsError outside the box.
Region region_of(const Rect& bbox, double x_cm, double y_cm);
Region region_of(const Surface& surface, double x_cm, double y_cm);

/// Closed rectangle covered by a region cell.
Rect region_cell(const Rect& bbox, Region region);

/// Recomputes z_cm for every placement from surface heights and stack chains.
void assign_stack_heights(Layout& layout, std::span<const AssetSpec> assets,
                          std::span<const Surface> surfaces);

/// Lowercase slug usable as an id fragment ("Vase of Sunflower" -> "vase_of_sunflower").
std::string slugify(std::string_view text);

}  // namespace decor
