#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "decor/pipeline.hpp"
#include "decor/scene_io.hpp"
#include "furniture.hpp"

using namespace decor;
using nlohmann::json;

namespace {

const std::filesystem::path kTestData = DECOR_TEST_DATA_DIR;
const std::filesystem::path kData = DECOR_DATA_DIR;

const Catalog& catalog() {
  static const Catalog c = Catalog::load(kData / "catalog.json");
  return c;
}

const DecorScene& desk8() {
  static const DecorScene scene = [] {
    auto stub = ScriptedStub::from_directory(kTestData / "desk8");
    JobRequest r;
    r.mesh_ref = "flat_desk.obj";
    r.prompt = "a focused home office desk";
    r.seed = 7;
    return decorate_mesh(testing::flat_desk(), r, *stub, catalog());
  }();
  return scene;
}

const DecorScene& shelf16() {
  static const DecorScene scene = [] {
    RuleBasedStub stub;
    JobRequest r;
    r.mesh_ref = "desk_shelf.obj";
    r.prompt = "a cozy study with books and plants";
    r.n_assets = 16;
    r.seed = 11;
    return decorate_mesh(testing::desk_with_shelf(), r, stub, catalog());
  }();
  return scene;
}

EditOptions edit_options() {
  EditOptions o;
  o.catalog = &catalog();
  return o;
}

Layout surface_layout(const DecorScene& scene, int surface) {
  Layout out;
  for (const auto& a : scene.assets) {
    if (a.surface_index == surface) out[a.id] = scene.layout.at(a.id);
  }
  return out;
}

EditOp remove_op(std::string target) {
  EditOp op;
  op.kind = EditKind::kRemove;
  op.target = std::move(target);
  return op;
}

}  // namespace

TEST_CASE("edit op JSON") {
  const json ops = json::parse(R"([
    {"kind": "insert", "asset": {"name": "vase of sunflower", "width_cm": 12, "depth_cm": 12, "height_cm": 35,
                                 "surface_index": 0},
     "directives": [{"kind": "global_region", "subject": "new", "region": "SE"}]},
    {"kind": "remove", "target": "lamp_1"},
    {"kind": "replace", "target": "lamp_1", "asset": {"name": "candle", "width_cm": 6, "depth_cm": 6,
                                                      "height_cm": 12, "surface_index": 0}},
    {"kind": "resize", "target": "lamp_1", "dims": {"width_cm": 20, "depth_cm": 20, "height_cm": 45}},
    {"kind": "reposition", "target": "lamp_1",
     "directives": [{"kind": "global_region", "subject": "lamp_1", "region": "NE"}]},
    {"kind": "rotate", "target": "lamp_1", "yaw_deg": 90},
    {"kind": "rotate", "target": "lamp_1", "direction": "right"}
  ])");
  const auto parsed = edit_ops_from_json(ops);
  REQUIRE(parsed.size() == 7);
  CHECK(parsed[0].kind == EditKind::kInsert);
  CHECK(parsed[0].asset->name == "vase of sunflower");
  CHECK(parsed[3].dims == std::array<double, 3>{20, 20, 45});
  CHECK(parsed[5].orientation->yaw_deg() == 90);
  CHECK(parsed[6].orientation->yaw_deg() == Orientation::from_direction(Direction::kRight).yaw_deg());
  for (const auto& op : parsed) CHECK(edit_op_from_json(edit_op_to_json(op)) == op);

  CHECK_THROWS_AS(edit_op_from_json(json{{"kind", "teleport"}}), ValidationError);
  CHECK_THROWS_AS(edit_op_from_json(json{{"kind", "rotate"}, {"target", "x"}, {"yaw_deg", 45}}), ValidationError);
  CHECK(parse_edit_kind("resize") == EditKind::kResize);
  CHECK(to_string(EditKind::kReposition) == "reposition");
}

TEST_CASE("validate_edit_ops checks the inventory") {
  const DecorScene& scene = desk8();
  CHECK(validate_edit_ops(std::vector{remove_op("alarm_clock_1")}, scene).ok());
  CHECK(validate_edit_ops(std::vector{remove_op("piano_1")}, scene).has("unknown_asset"));
  // Removing twice: the second op targets an asset that is already gone.
  CHECK(validate_edit_ops(std::vector{remove_op("alarm_clock_1"), remove_op("alarm_clock_1")}, scene)
            .has("unknown_asset"));
  EditOp resize;
  resize.kind = EditKind::kResize;
  resize.target = "monitor_1";
  CHECK(validate_edit_ops(std::vector{resize}, scene).has("bad_field"));
  CHECK_THROWS_AS(apply_edit(scene, std::vector{remove_op("piano_1")}), ValidationError);
  CHECK_THROWS_AS(apply_edit(scene, std::vector<EditOp>{}), ValidationError);
}

TEST_CASE("remove one of 8 assets") {
  const DecorScene& scene = desk8();
  const DecorScene out = apply_edit(scene, std::vector{remove_op("alarm_clock_1")}, edit_options());
  CHECK(out.assets.size() == 7);
  CHECK(out.find_asset("alarm_clock_1") == nullptr);
  CHECK_FALSE(out.layout.contains("alarm_clock_1"));
  CHECK_FALSE(out.bindings.contains("alarm_clock_1"));
  for (const auto& d : out.directives) {
    CHECK(d.subject != "alarm_clock_1");
    CHECK(d.reference != "alarm_clock_1");
  }
  CHECK(out.revision == scene.revision + 1);
  CHECK(scene_violations(out).empty());
  CHECK(out.provenance.edits.back() == "r1: remove alarm_clock_1");
  // Bindings of retained assets are kept.
  for (const auto& [id, b] : out.bindings) CHECK(b == scene.bindings.at(id));
}

TEST_CASE("edits leave untouched surfaces bit-identical") {
  const DecorScene& scene = shelf16();
  REQUIRE(scene.furniture.surfaces.size() == 2);
  std::string target;
  for (const auto& a : scene.assets) {
    if (a.surface_index == 0 && target.empty()) target = a.id;
  }
  const DecorScene out = apply_edit(scene, std::vector{remove_op(target)}, edit_options());
  const Layout before = surface_layout(scene, 1);
  const Layout after = surface_layout(out, 1);
  CHECK(before == after);
  CHECK(layout_to_json(before).dump() == layout_to_json(after).dump());
  CHECK(scene_violations(out).empty());
}

TEST_CASE("resize beyond the surface is rejected atomically") {
  const DecorScene& scene = desk8();
  const std::string before = scene_to_json(scene).dump();
  EditOp op;
  op.kind = EditKind::kResize;
  op.target = "desk_lamp_1";
  op.dims = std::array<double, 3>{130, 20, 40};
  try {
    apply_edit(scene, std::vector{op}, edit_options());
    FAIL("expected InfeasibleEditError");
  } catch (const InfeasibleEditError& e) {
    CHECK(e.asset_id() == "desk_lamp_1");
  }
  CHECK(scene_to_json(scene).dump() == before);

  // Fits the bbox but cannot coexist with the rest: 118 x 58 leaves no room.
  op.dims = std::array<double, 3>{110, 55, 40};
  CHECK_THROWS_AS(apply_edit(scene, std::vector{op}, edit_options()), InfeasibleEditError);
  CHECK(scene_to_json(scene).dump() == before);
}

TEST_CASE("resize within capacity keeps the catalog entry") {
  const DecorScene& scene = desk8();
  EditOp op;
  op.kind = EditKind::kResize;
  op.target = "potted_plant_1";
  op.dims = std::array<double, 3>{18, 18, 40};
  const DecorScene out = apply_edit(scene, std::vector{op}, edit_options());
  const AssetSpec& plant = *out.find_asset("potted_plant_1");
  CHECK(plant.width_cm == 18);
  CHECK(plant.height_cm == 40);
  CHECK(out.bindings.at("potted_plant_1").entry_id == scene.bindings.at("potted_plant_1").entry_id);
  CHECK(out.bindings.at("potted_plant_1").scale != scene.bindings.at("potted_plant_1").scale);
  CHECK(scene_violations(out).empty());
}

TEST_CASE("rotate a free asset in open space") {
  const DecorScene& scene = desk8();
  // The potted plant has no orientation directive.
  const Placement& before = scene.layout.at("potted_plant_1");
  EditOp op;
  op.kind = EditKind::kRotate;
  op.target = "potted_plant_1";
  op.orientation = before.orientation.rotated(1);
  const DecorScene out = apply_edit(scene, std::vector{op}, edit_options());
  const Placement& after = out.layout.at("potted_plant_1");
  CHECK(after.orientation.yaw_deg() == (before.orientation.yaw_deg() + 90) % 360);
  CHECK(after.x_cm == before.x_cm);
  CHECK(after.y_cm == before.y_cm);
  CHECK(scene_violations(out).empty());
  // Later edits keep the new yaw.
  const DecorScene again = apply_edit(out, std::vector{remove_op("alarm_clock_1")}, edit_options());
  CHECK(again.layout.at("potted_plant_1").orientation == after.orientation);
}

TEST_CASE("reposition and replace") {
  const DecorScene& scene = desk8();
  EditOp move;
  move.kind = EditKind::kReposition;
  move.target = "desk_lamp_1";
  PlanDirective d;
  d.subject = "desk_lamp_1";
  d.kind = DirectiveKind::kGlobalRegion;
  d.region = Region::kSW;
  move.directives = {d};
  const DecorScene moved = apply_edit(scene, std::vector{move}, edit_options());
  const Placement& lamp = moved.layout.at("desk_lamp_1");
  CHECK(region_of(moved.furniture.surfaces[0], lamp.x_cm, lamp.y_cm) == Region::kSW);
  CHECK(scene_violations(moved).empty());

  EditOp replace;
  replace.kind = EditKind::kReplace;
  replace.target = "alarm_clock_1";
  replace.asset = AssetSpec{"", "table clock", 12, 8, 14, 0, "", ""};
  const DecorScene replaced = apply_edit(scene, std::vector{replace}, edit_options());
  CHECK(replaced.find_asset("alarm_clock_1") == nullptr);
  const AssetSpec* clock = replaced.find_asset("table_clock_1");
  REQUIRE(clock != nullptr);
  CHECK_FALSE(clock->style.empty());
  CHECK(match_material(clock->material));
  CHECK(replaced.bindings.contains("table_clock_1"));
  // The clock's directive now refers to the new id.
  bool kept = false;
  for (const auto& x : replaced.directives) kept |= x.subject == "table_clock_1";
  CHECK(kept);
  CHECK(scene_violations(replaced).empty());
}

TEST_CASE("insert takes the dominant style") {
  const DecorScene& scene = desk8();
  EditOp op;
  op.kind = EditKind::kInsert;
  op.asset = AssetSpec{"", "vase of sunflower", 12, 12, 35, 0, "", ""};
  const DecorScene out = apply_edit(scene, std::vector{op}, edit_options());
  const AssetSpec* vase = out.find_asset("vase_of_sunflower_1");
  REQUIRE(vase != nullptr);
  CHECK(vase->style == "Modern");     // three of eight assets
  CHECK(vase->material == "plastic");  // three of eight assets
  CHECK(out.layout.contains("vase_of_sunflower_1"));
  CHECK(out.bindings.contains("vase_of_sunflower_1"));
  CHECK(scene_violations(out).empty());
}

TEST_CASE("interpret_edit with the rule-based stub") {
  RuleBasedStub stub;
  const DecorScene& scene = desk8();
  SUBCASE("remove the alarm clock") {
    const auto r = interpret_edit("remove the alarm clock", scene, stub);
    REQUIRE(r.ops.size() == 1);
    CHECK(r.ops[0].kind == EditKind::kRemove);
    CHECK(r.ops[0].target == "alarm_clock_1");
    CHECK(r.unresolved.empty());
    CHECK(r.run.attempts == 1);
  }
  SUBCASE("remove the piano") {
    try {
      interpret_edit("remove the piano", scene, stub);
      FAIL("expected UnresolvableTargetError");
    } catch (const UnresolvableTargetError& e) {
      CHECK(e.target().find("piano") != std::string::npos);
    }
  }
  SUBCASE("add a vase of sunflower") {
    const auto r = interpret_edit("add a vase of sunflower", scene, stub);
    REQUIRE(r.ops.size() == 1);
    CHECK(r.ops[0].kind == EditKind::kInsert);
    CHECK(r.ops[0].asset->name == "vase of sunflower");
    const DecorScene out = apply_edit(scene, r.ops, edit_options());
    CHECK(out.assets.size() == 9);
    CHECK(scene_violations(out).empty());
  }
  SUBCASE("rotate and resize") {
    auto r = interpret_edit("rotate the potted plant", scene, stub);
    REQUIRE(r.ops.size() == 1);
    CHECK(r.ops[0].kind == EditKind::kRotate);
    r = interpret_edit("make the desk lamp bigger", scene, stub);
    REQUIRE(r.ops.size() == 1);
    CHECK(r.ops[0].kind == EditKind::kResize);
    CHECK((*r.ops[0].dims)[0] > scene.find_asset("desk_lamp_1")->width_cm);
  }
}

TEST_CASE("interpret_edit with a scripted insert") {
  ScriptedStub stub({R"({"ops": [{"kind": "insert",
                                   "asset": {"name": "vase of sunflower", "width_cm": 12, "depth_cm": 12,
                                             "height_cm": 35, "surface_index": 0, "style": "Rustic",
                                             "material": "glass"}}]})"});
  const auto r = interpret_edit("put a vase of sunflower on the desk", desk8(), stub);
  REQUIRE(r.ops.size() == 1);
  CHECK(r.ops[0].kind == EditKind::kInsert);
  CHECK(r.ops[0].asset->name == "vase of sunflower");
  CHECK(r.ops[0].asset->style == "Rustic");
}

TEST_CASE("interpret_edit revises unknown targets and empty answers") {
  ScriptedStub stub({R"({"ops": [{"kind": "remove", "target": "piano_1"}]})", R"({"ops": []})",
                     R"({"ops": [{"kind": "remove", "target": "alarm_clock_1"}]})"});
  const auto r = interpret_edit("remove the clock", desk8(), stub);
  CHECK(r.run.attempts == 3);
  CHECK(r.ops[0].target == "alarm_clock_1");
}
