// Stage system prompts and response schemas. Bump kPromptVersion when editing.
#include <string>

#include "decor/agents.hpp"

namespace decor {

namespace {

const std::string kSelectPrompt = R"(You are the Asset Selector of a furniture decoration team.
You receive a user requirement, the number of assets to place, and the supporting
surfaces of one piece of furniture (index, polygon, area, height, bounding box and,
for enclosed shelves, the vertical clearance above the surface).

Choose exactly n_assets small decorative or functional assets that suit the
requirement and the furniture. For each asset give a short name, its bounding box
in centimeters (width_cm along its front edge, depth_cm front to back, height_cm)
and the index of the surface it goes on.

Rules:
- Populate every surface if possible; a larger surface should hold more assets.
- No asset may be wider or deeper than the bounding box of its surface.
- Assets must fit under the clearance of enclosed shelves.
- The footprints on one surface must leave plenty of free space (at most 70% of the area).
- Use realistic sizes.

Answer with JSON only, matching the asset_proposal schema.)";

const std::string kStylizePrompt = R"(You are the Stylist of a furniture decoration team.
You receive the user requirement and the selected assets. Give every asset one style
and one material so that the decoration is harmonious and suits the requirement.

Choose only from these banks (spelling as listed):
Styles: {styles}
Materials: {materials}

Assign each asset exactly once, referring to it by asset_id.
Answer with JSON only, matching the style_assignment schema.)";

const std::string kPlanPrompt = R"(You are the Planner of a furniture decoration team.
You receive the styled assets with their surfaces and describe how they should be
arranged, as a list of directives. Positions are seen from the front of the furniture.

Directive kinds:
- global_region: the asset center lies in one cell of the 3x3 grid over its surface:
  NW N NE / W C E / SW S SE (S is the front edge).
- relative_position: left_of, right_of, in_front_of, behind, on_top_of another asset.
- distance: near or far from another asset.
- alignment: vertical_left, vertical_mid, vertical_right, horizontal_front,
  horizontal_mid, horizontal_back with another asset.
- orientation: forward, left, backward or right.

Rules:
- Relations refer to another asset on the same surface, by asset_id, never to itself.
- At most one global_region and one orientation per asset.
- Only stack an asset on_top_of a base that is larger than it, and never in a cycle.
- Prefer few hard directives (global_region, relative_position, orientation) so that
  a layout exists; use distance and alignment for preferences.

Answer with JSON only, matching the arrangement_plan schema.)";

const std::string kEditPrompt = R"(You are the Editor of a furniture decoration team.
You receive an editing instruction and the current scene: surfaces, assets (with
asset_id, name, dimensions, surface, current yaw) and directives. Translate the
instruction into edit operations:
- insert: a new asset draft (name, width_cm, depth_cm, height_cm, surface_index,
  optional style and material) plus optional directives for it.
- remove: target asset_id.
- replace: target asset_id and a new asset draft.
- resize: target asset_id and new width_cm, depth_cm, height_cm.
- reposition: target asset_id and the new directives for it.
- rotate: target asset_id and the new absolute yaw_deg (0, 90, 180 or 270).

Refer only to asset ids that exist. When the instruction names an asset that is not
in the scene, list the name under "unresolved" instead of guessing.
Answer with JSON only, matching the edit_ops schema.)";

const std::string kDirectiveSchema = R"({
        "type": "object",
        "required": ["kind", "subject"],
        "properties": {
          "kind": {"enum": ["global_region", "relative_position", "distance", "alignment", "orientation"]},
          "subject": {"type": "string"},
          "region": {"enum": ["NW", "N", "NE", "W", "C", "E", "SW", "S", "SE"]},
          "relation": {"enum": ["left_of", "right_of", "in_front_of", "behind", "on_top_of", "near", "far",
                                "vertical_left", "vertical_mid", "vertical_right",
                                "horizontal_front", "horizontal_mid", "horizontal_back"]},
          "reference": {"type": "string"},
          "direction": {"enum": ["forward", "left", "backward", "right"]}
        }
      })";

const std::string kDraftSchema = R"({
        "type": "object",
        "required": ["name", "width_cm", "depth_cm", "height_cm", "surface_index"],
        "properties": {
          "name": {"type": "string"},
          "width_cm": {"type": "number", "exclusiveMinimum": 0},
          "depth_cm": {"type": "number", "exclusiveMinimum": 0},
          "height_cm": {"type": "number", "exclusiveMinimum": 0},
          "surface_index": {"type": "integer", "minimum": 0},
          "style": {"type": "string"},
          "material": {"type": "string"}
        }
      })";

std::string replace_all(std::string text, const std::string& key, const std::string& value) {
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

}  // namespace

const std::string& system_prompt(Stage stage) {
  static const std::string stylize =
      replace_all(replace_all(kStylizePrompt, "{styles}", join(style_bank())), "{materials}", join(material_bank()));
  switch (stage) {
    case Stage::kSelect: return kSelectPrompt;
    case Stage::kStylize: return stylize;
    case Stage::kPlan: return kPlanPrompt;
    case Stage::kEdit: return kEditPrompt;
  }
  return kSelectPrompt;
}

const std::string& response_schema(Stage stage) {
  static const std::string select = replace_all(R"({
  "title": "asset_proposal",
  "type": "object",
  "required": ["assets"],
  "properties": {
    "assets": {"type": "array", "items": {draft}}
  }
})", "{draft}", kDraftSchema);
  static const std::string stylize = R"({
  "title": "style_assignment",
  "type": "object",
  "required": ["assignments"],
  "properties": {
    "assignments": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["asset_id", "style", "material"],
        "properties": {
          "asset_id": {"type": "string"},
          "style": {"type": "string"},
          "material": {"type": "string"}
        }
      }
    }
  }
})";
  static const std::string plan = replace_all(R"({
  "title": "arrangement_plan",
  "type": "object",
  "required": ["directives"],
  "properties": {
    "directives": {"type": "array", "items": {directive}}
  }
})", "{directive}", kDirectiveSchema);
  static const std::string edit = replace_all(replace_all(R"({
  "title": "edit_ops",
  "type": "object",
  "required": ["ops"],
  "properties": {
    "ops": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["kind"],
        "properties": {
          "kind": {"enum": ["insert", "remove", "replace", "resize", "reposition", "rotate"]},
          "target": {"type": "string"},
          "asset": {draft},
          "dims": {
            "type": "object",
            "properties": {
              "width_cm": {"type": "number"}, "depth_cm": {"type": "number"}, "height_cm": {"type": "number"}
            }
          },
          "directives": {"type": "array", "items": {directive}},
          "yaw_deg": {"enum": [0, 90, 180, 270]}
        }
      }
    },
    "unresolved": {"type": "array", "items": {"type": "string"}}
  }
})", "{draft}", kDraftSchema), "{directive}", kDirectiveSchema);
  switch (stage) {
    case Stage::kSelect: return select;
    case Stage::kStylize: return stylize;
    case Stage::kPlan: return plan;
    case Stage::kEdit: return edit;
  }
  return select;
}

}  // namespace decor
