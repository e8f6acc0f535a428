#include "decor/scene_io.hpp"

#include <fstream>
#include <sstream>

#include "decor/agents.hpp"
#include "decor/compiler.hpp"

namespace decor {

namespace {

using nlohmann::json;

template <typename T>
T get(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("scene JSON: missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scene JSON: bad field '") + key + "': " + e.what());
  }
}

json rect_to_json(const Rect& r) {
  return {{"min_x", r.min_x}, {"min_y", r.min_y}, {"max_x", r.max_x}, {"max_y", r.max_y}};
}

Rect rect_from_json(const json& j) {
  return {get<double>(j, "min_x"), get<double>(j, "min_y"), get<double>(j, "max_x"), get<double>(j, "max_y")};
}

}  // namespace

json asset_to_json(const AssetSpec& a) {
  return {{"id", a.id},
          {"name", a.name},
          {"width_cm", a.width_cm},
          {"depth_cm", a.depth_cm},
          {"height_cm", a.height_cm},
          {"surface_index", a.surface_index},
          {"style", a.style},
          {"material", a.material}};
}

AssetSpec asset_from_json(const json& j) {
  AssetSpec a;
  a.id = get<std::string>(j, "id");
  a.name = get<std::string>(j, "name");
  a.width_cm = get<double>(j, "width_cm");
  a.depth_cm = get<double>(j, "depth_cm");
  a.height_cm = get<double>(j, "height_cm");
  a.surface_index = get<int>(j, "surface_index");
  a.style = j.value("style", std::string());
  a.material = j.value("material", std::string());
  if (!(a.width_cm > 0 && a.depth_cm > 0 && a.height_cm > 0)) {
    throw ValidationError("scene JSON: asset '" + a.id + "' needs positive dimensions");
  }
  return a;
}

json placement_to_json(const Placement& p) {
  return {{"x_cm", p.x_cm},
          {"y_cm", p.y_cm},
          {"yaw_deg", p.orientation.yaw_deg()},
          {"z_cm", p.z_cm},
          {"stack_base", p.stack_base ? json(*p.stack_base) : json(nullptr)}};
}

Placement placement_from_json(const json& j) {
  Placement p;
  p.x_cm = get<double>(j, "x_cm");
  p.y_cm = get<double>(j, "y_cm");
  p.orientation = Orientation::from_yaw(get<int>(j, "yaw_deg"));
  p.z_cm = j.value("z_cm", 0.0);
  if (const auto it = j.find("stack_base"); it != j.end() && !it->is_null()) p.stack_base = it->get<std::string>();
  return p;
}

json layout_to_json(const Layout& layout) {
  json j = json::object();
  for (const auto& [id, p] : layout) j[id] = placement_to_json(p);
  return j;
}

Layout layout_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("scene JSON: layout must be an object");
  Layout layout;
  for (const auto& [id, p] : j.items()) layout[id] = placement_from_json(p);
  return layout;
}

json surface_to_json(const Surface& s) {
  json boundary = json::array();
  for (const auto& v : s.boundary) boundary.push_back({v.x, v.y});
  json rows = json::array();
  const auto& g = s.grid;
  for (int r = 0; r < g.rows(); ++r) {
    std::string row(static_cast<std::size_t>(g.cols()), '0');
    for (int c = 0; c < g.cols(); ++c) {
      if (g.supported(c, r)) row[c] = '1';
    }
    rows.push_back(std::move(row));
  }
  return {{"index", s.index},
          {"height_cm", s.height_cm},
          {"area_cm2", s.area_cm2},
          {"bbox", rect_to_json(s.bbox)},
          {"boundary", boundary},
          {"clearance_cm", s.clearance_cm ? json(*s.clearance_cm) : json(nullptr)},
          {"grid",
           {{"origin", {g.origin().x, g.origin().y}},
            {"resolution_cm", g.resolution_cm()},
            {"cols", g.cols()},
            {"rows", g.rows()},
            {"cells", rows}}}};
}

Surface surface_from_json(const json& j) {
  Surface s;
  s.index = get<int>(j, "index");
  s.height_cm = get<double>(j, "height_cm");
  s.area_cm2 = get<double>(j, "area_cm2");
  s.bbox = rect_from_json(get<json>(j, "bbox"));
  for (const auto& v : get<json>(j, "boundary")) s.boundary.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  if (const auto it = j.find("clearance_cm"); it != j.end() && !it->is_null()) s.clearance_cm = it->get<double>();
  const json grid = get<json>(j, "grid");
  const int cols = get<int>(grid, "cols");
  const int rows = get<int>(grid, "rows");
  const auto cells_text = get<std::vector<std::string>>(grid, "cells");
  if (cols < 0 || rows < 0 || static_cast<int>(cells_text.size()) != rows) {
    throw ValidationError("scene JSON: grid rows do not match its size");
  }
  std::vector<std::uint8_t> cells;
  cells.reserve(static_cast<std::size_t>(cols) * rows);
  for (const auto& row : cells_text) {
    if (static_cast<int>(row.size()) != cols) throw ValidationError("scene JSON: grid row of wrong length");
    for (char c : row) cells.push_back(c == '1' ? 1 : 0);
  }
  const json origin = get<json>(grid, "origin");
  s.grid = OccupancyGrid({origin.at(0).get<double>(), origin.at(1).get<double>()},
                         get<double>(grid, "resolution_cm"), cols, rows, std::move(cells));
  return s;
}

json transcript_to_json(const TranscriptEntry& t) {
  return {{"stage", t.stage}, {"attempt", t.attempt}, {"role", t.role}, {"content", t.content}};
}

TranscriptEntry transcript_from_json(const json& j) {
  return {get<std::string>(j, "stage"), get<int>(j, "attempt"), get<std::string>(j, "role"),
          get<std::string>(j, "content")};
}

json scene_to_json(const DecorScene& scene) {
  json surfaces = json::array();
  for (const auto& s : scene.furniture.surfaces) surfaces.push_back(surface_to_json(s));
  json assets = json::array();
  for (const auto& a : scene.assets) assets.push_back(asset_to_json(a));
  json directives = json::array();
  for (const auto& d : scene.directives) directives.push_back(directive_to_json(d));
  json bindings = json::object();
  for (const auto& [id, b] : scene.bindings) bindings[id] = {{"entry_id", b.entry_id}, {"scale", b.scale}};
  json transcripts = json::array();
  for (const auto& t : scene.provenance.transcripts) transcripts.push_back(transcript_to_json(t));
  return {{"schema_version", kSceneSchemaVersion},
          {"revision", scene.revision},
          {"furniture", {{"mesh_ref", scene.furniture.mesh_ref}, {"surfaces", surfaces}}},
          {"assets", assets},
          {"directives", directives},
          {"layout", layout_to_json(scene.layout)},
          {"bindings", bindings},
          {"provenance",
           {{"prompt", scene.provenance.prompt},
            {"n_assets", scene.provenance.n_assets},
            {"seed", scene.provenance.seed},
            {"transcripts", transcripts},
            {"edits", scene.provenance.edits}}}};
}

DecorScene scene_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("scene JSON must be an object");
  const int version = get<int>(j, "schema_version");
  if (version != kSceneSchemaVersion) {
    throw ValidationError("scene JSON: unsupported schema_version " + std::to_string(version));
  }
  DecorScene scene;
  scene.revision = get<int>(j, "revision");
  const json furniture = get<json>(j, "furniture");
  scene.furniture.mesh_ref = get<std::string>(furniture, "mesh_ref");
  for (const auto& s : get<json>(furniture, "surfaces")) scene.furniture.surfaces.push_back(surface_from_json(s));
  for (const auto& a : get<json>(j, "assets")) scene.assets.push_back(asset_from_json(a));
  ValidationReport report;
  std::size_t i = 0;
  for (const auto& d : get<json>(j, "directives")) {
    auto parsed = parse_directive(d, report, "directives[" + std::to_string(i++) + "]");
    if (parsed) scene.directives.push_back(std::move(*parsed));
  }
  if (!report.ok()) throw ValidationError("scene JSON: bad directives\n" + report.to_text());
  scene.layout = layout_from_json(get<json>(j, "layout"));
  const json bindings = get<json>(j, "bindings");
  for (const auto& [id, b] : bindings.items()) {
    scene.bindings[id] = {get<std::string>(b, "entry_id"), get<std::array<double, 3>>(b, "scale")};
  }
  const json prov = get<json>(j, "provenance");
  scene.provenance.prompt = get<std::string>(prov, "prompt");
  scene.provenance.n_assets = get<int>(prov, "n_assets");
  scene.provenance.seed = get<std::uint64_t>(prov, "seed");
  for (const auto& t : prov.value("transcripts", json::array())) {
    scene.provenance.transcripts.push_back(transcript_from_json(t));
  }
  scene.provenance.edits = prov.value("edits", std::vector<std::string>{});
  return scene;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DecorError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DecorError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

DecorScene load_scene(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return scene_from_json(j);
}

void save_scene(const DecorScene& scene, const std::filesystem::path& path) {
  write_file_atomic(path, scene_to_json(scene).dump(2) + "\n");
}

ConstraintSet scene_constraints(const DecorScene& scene) {
  return compile_plan(scene.directives, scene.assets, scene.furniture.surfaces);
}

std::vector<Violation> scene_violations(const DecorScene& scene, const SolverParams& params) {
  return check_hard(scene.layout, scene_constraints(scene), scene.furniture.surfaces, params);
}

}  // namespace decor
