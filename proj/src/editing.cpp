#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "decor/compiler.hpp"
#include "decor/pipeline.hpp"
#include "decor/scene_io.hpp"

namespace decor {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 6> kEditKindNames = {"insert", "remove", "replace",
                                                            "resize", "reposition", "rotate"};

json draft_to_json(const AssetSpec& a) {
  json j = {{"name", a.name},
            {"width_cm", a.width_cm},
            {"depth_cm", a.depth_cm},
            {"height_cm", a.height_cm},
            {"surface_index", a.surface_index}};
  if (!a.style.empty()) j["style"] = a.style;
  if (!a.material.empty()) j["material"] = a.material;
  return j;
}

AssetSpec draft_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("asset draft must be an object");
  AssetSpec a;
  a.name = j.at("name").get<std::string>();
  a.width_cm = j.at("width_cm").get<double>();
  a.depth_cm = j.at("depth_cm").get<double>();
  a.height_cm = j.at("height_cm").get<double>();
  a.surface_index = j.at("surface_index").get<int>();
  a.style = j.value("style", std::string());
  a.material = j.value("material", std::string());
  return a;
}

std::vector<PlanDirective> directives_from_json(const json& j, const std::string& subject_default) {
  std::vector<PlanDirective> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw ValidationError("directives must be an array");
  ValidationReport report;
  for (std::size_t i = 0; i < j.size(); ++i) {
    json d = j[i];
    if (d.is_object() && !d.contains("subject")) d["subject"] = subject_default.empty() ? "new" : subject_default;
    if (auto parsed = parse_directive(d, report, fmt::format("directives[{}]", i))) out.push_back(*parsed);
  }
  if (!report.ok()) throw ValidationError("bad directives\n" + report.to_text());
  return out;
}

/// Most frequent value, ties to the first seen.
std::string dominant(const std::vector<AssetSpec>& assets, std::string AssetSpec::*field) {
  std::map<std::string, int> counts;
  std::string best;
  int best_count = 0;
  for (const auto& a : assets) {
    const std::string& v = a.*field;
    if (v.empty()) continue;
    if (++counts[v] > best_count) {
      best_count = counts[v];
      best = v;
    }
  }
  return best;
}

std::vector<SurfaceSummary> summaries(const DecorScene& scene) { return summarize(scene.furniture.surfaces); }

const SurfaceSummary* find_summary(const std::vector<SurfaceSummary>& s, int index) {
  for (const auto& x : s) {
    if (x.index == index) return &x;
  }
  return nullptr;
}

std::string describe(const EditOp& op) {
  switch (op.kind) {
    case EditKind::kInsert: return fmt::format("insert {}", op.asset ? op.asset->name : "?");
    case EditKind::kReplace: return fmt::format("replace {} with {}", op.target, op.asset ? op.asset->name : "?");
    case EditKind::kRotate:
      return fmt::format("rotate {} to {}", op.target, op.orientation ? op.orientation->yaw_deg() : 0);
    default: return fmt::format("{} {}", to_string(op.kind), op.target);
  }
}

}  // namespace

std::string_view to_string(EditKind kind) { return kEditKindNames[static_cast<std::size_t>(kind)]; }

std::optional<EditKind> parse_edit_kind(std::string_view text) {
  for (std::size_t i = 0; i < kEditKindNames.size(); ++i) {
    if (kEditKindNames[i] == text) return static_cast<EditKind>(i);
  }
  return std::nullopt;
}

json edit_op_to_json(const EditOp& op) {
  json j = {{"kind", std::string(to_string(op.kind))}};
  if (op.kind != EditKind::kInsert) j["target"] = op.target;
  if (op.asset) j["asset"] = draft_to_json(*op.asset);
  if (op.dims) j["dims"] = {{"width_cm", (*op.dims)[0]}, {"depth_cm", (*op.dims)[1]}, {"height_cm", (*op.dims)[2]}};
  if (!op.directives.empty()) {
    json arr = json::array();
    for (const auto& d : op.directives) arr.push_back(directive_to_json(d));
    j["directives"] = arr;
  }
  if (op.orientation) j["yaw_deg"] = op.orientation->yaw_deg();
  return j;
}

EditOp edit_op_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("edit op must be an object");
  EditOp op;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const auto k = parse_edit_kind(kind);
    if (!k) throw ValidationError("unknown edit kind '" + kind + "'");
    op.kind = *k;
    if (op.kind != EditKind::kInsert) op.target = j.at("target").get<std::string>();
    switch (op.kind) {
      case EditKind::kInsert:
        op.asset = draft_from_json(j.at("asset"));
        op.directives = directives_from_json(j.value("directives", json()), "");
        break;
      case EditKind::kReplace:
        op.asset = draft_from_json(j.at("asset"));
        break;
      case EditKind::kResize: {
        const json& d = j.at("dims");
        op.dims = std::array<double, 3>{d.at("width_cm").get<double>(), d.at("depth_cm").get<double>(),
                                        d.at("height_cm").get<double>()};
        break;
      }
      case EditKind::kReposition:
        op.directives = directives_from_json(j.at("directives"), op.target);
        break;
      case EditKind::kRotate:
        if (j.contains("direction")) {
          const auto d = parse_direction(j.at("direction").get<std::string>());
          if (!d) throw ValidationError("unknown direction in rotate op");
          op.orientation = Orientation::from_direction(*d);
        } else {
          op.orientation = Orientation::from_yaw(j.at("yaw_deg").get<int>());
        }
        break;
      case EditKind::kRemove:
        break;
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad edit op: ") + e.what());
  }
  return op;
}

std::vector<EditOp> edit_ops_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("edit ops must be an array");
  std::vector<EditOp> ops;
  for (const auto& e : j) ops.push_back(edit_op_from_json(e));
  return ops;
}

ValidationReport validate_edit_ops(std::span<const EditOp> ops, const DecorScene& scene) {
  ValidationReport report;
  const auto surfaces = summaries(scene);
  std::set<std::string> ids;
  for (const auto& a : scene.assets) ids.insert(a.id);

  auto check_draft = [&](const std::optional<AssetSpec>& draft, const std::string& item) {
    if (!draft) {
      report.add("bad_field", "op needs an asset draft", item);
      return;
    }
    if (draft->name.empty()) report.add("bad_field", "asset draft needs a name", item);
    if (!(draft->width_cm > 0 && draft->depth_cm > 0 && draft->height_cm > 0)) {
      report.add("bad_field", "asset draft needs positive dimensions", item);
    }
    if (!find_summary(surfaces, draft->surface_index)) {
      report.add("bad_surface", fmt::format("surface {} does not exist", draft->surface_index), item);
    }
    if (!draft->style.empty() && !match_style(draft->style)) {
      report.add("unknown_style", fmt::format("style '{}' is not in the style bank", draft->style), item);
    }
    if (!draft->material.empty() && !match_material(draft->material)) {
      report.add("unknown_material", fmt::format("material '{}' is not in the material bank", draft->material),
                 item);
    }
  };
  auto check_refs = [&](const std::vector<PlanDirective>& directives, const std::string& subject,
                        const std::string& item) {
    for (const auto& d : directives) {
      if (!subject.empty() && d.subject != subject) {
        report.add("bad_field", fmt::format("directive subject '{}' is not the op target", d.subject), item);
      }
      if (d.relation && !ids.contains(d.reference)) {
        report.add("unknown_asset", fmt::format("reference '{}' is not in the scene", d.reference), item);
      }
      if (d.relation && d.reference == subject) report.add("self_reference", "directive refers to its subject", item);
    }
  };

  for (std::size_t i = 0; i < ops.size(); ++i) {
    const EditOp& op = ops[i];
    const std::string item = fmt::format("ops[{}]", i);
    if (op.kind != EditKind::kInsert && !ids.contains(op.target)) {
      report.add("unknown_asset", fmt::format("'{}' is not in the scene", op.target), op.target);
      continue;
    }
    switch (op.kind) {
      case EditKind::kInsert:
        check_draft(op.asset, item);
        check_refs(op.directives, "", item);
        break;
      case EditKind::kRemove:
        ids.erase(op.target);
        break;
      case EditKind::kReplace:
        check_draft(op.asset, item);
        ids.erase(op.target);
        break;
      case EditKind::kResize:
        if (!op.dims || !((*op.dims)[0] > 0 && (*op.dims)[1] > 0 && (*op.dims)[2] > 0)) {
          report.add("bad_field", "resize needs positive dimensions", item);
        }
        break;
      case EditKind::kReposition:
        if (op.directives.empty()) report.add("bad_field", "reposition needs directives", item);
        check_refs(op.directives, op.target, item);
        break;
      case EditKind::kRotate:
        if (!op.orientation) report.add("bad_field", "rotate needs an orientation", item);
        break;
    }
  }
  return report;
}

EditInterpretation interpret_edit(const std::string& instruction, const DecorScene& scene, ChatClient& client,
                                  const StageOptions& options) {
  StageContext ctx;
  ctx.prompt = scene.provenance.prompt;
  ctx.n_assets = std::max<int>(1, static_cast<int>(scene.assets.size()));
  ctx.surfaces = summaries(scene);
  ctx.assets = scene.assets;
  ctx.layout = scene.layout;
  ctx.directives = scene.directives;
  ctx.instruction = instruction;

  EditInterpretation out;
  auto validator = [&](const std::string& content) {
    ValidationReport report;
    const auto parsed = parse_reply(content, report);
    if (!parsed) return report;
    const json& j = *parsed;
    if (!j.contains("ops") || !j.at("ops").is_array()) {
      report.add("bad_field", "missing array 'ops'", "ops");
      return report;
    }
    std::vector<EditOp> ops;
    for (std::size_t i = 0; i < j.at("ops").size(); ++i) {
      try {
        ops.push_back(edit_op_from_json(j.at("ops")[i]));
      } catch (const ValidationError& e) {
        report.add("bad_field", e.what(), fmt::format("ops[{}]", i));
      }
    }
    std::vector<std::string> unresolved;
    if (const auto it = j.find("unresolved"); it != j.end()) {
      if (!it->is_array() || !std::all_of(it->begin(), it->end(), [](const json& x) { return x.is_string(); })) {
        report.add("bad_field", "'unresolved' must be a list of names", "unresolved");
      } else {
        unresolved = it->get<std::vector<std::string>>();
      }
    }
    if (!report.ok()) return report;
    report = validate_edit_ops(ops, scene);
    if (ops.empty() && unresolved.empty()) report.add("no_ops", "the answer contains no edit operation");
    out.ops = std::move(ops);
    out.unresolved = std::move(unresolved);
    return report;
  };
  out.run = run_stage(Stage::kEdit, ctx, client, validator, options);
  if (!out.unresolved.empty()) {
    throw UnresolvableTargetError(out.unresolved.front(),
                                  fmt::format("the instruction names '{}', which is not in the scene",
                                              out.unresolved.front()));
  }
  return out;
}

DecorScene apply_edit(const DecorScene& scene, std::span<const EditOp> ops, const EditOptions& options) {
  if (ops.empty()) throw ValidationError("no edit operations");
  if (const auto report = validate_edit_ops(ops, scene); !report.ok()) {
    throw ValidationError("invalid edit operations:\n" + report.to_text());
  }
  DecorScene out = scene;
  const auto surfaces = summaries(scene);
  std::set<int> affected;
  std::set<std::string> moved;  // no warm start, no anchor
  std::set<std::string> fresh;  // need a catalog entry
  std::set<std::string> resized;
  std::set<std::string> unanchored;  // warm start only
  Layout previous = scene.layout;

  auto find = [&](const std::string& id) {
    return std::find_if(out.assets.begin(), out.assets.end(), [&](const AssetSpec& a) { return a.id == id; });
  };
  auto erase_directives = [&](auto pred) {
    out.directives.erase(std::remove_if(out.directives.begin(), out.directives.end(), pred), out.directives.end());
  };
  auto fill_style = [&](AssetSpec& a) {
    if (a.style.empty()) a.style = dominant(out.assets, &AssetSpec::style);
    if (a.style.empty()) a.style = style_bank()[stable_hash(a.name) % style_bank().size()];
    if (a.material.empty()) a.material = dominant(out.assets, &AssetSpec::material);
    if (a.material.empty()) a.material = material_bank()[stable_hash(a.name) % material_bank().size()];
    a.style = *match_style(a.style);
    a.material = *match_material(a.material);
  };

  for (const EditOp& op : ops) {
    switch (op.kind) {
      case EditKind::kInsert: {
        std::vector<AssetSpec> added{*op.asset};
        assign_asset_ids(added, out.assets);
        AssetSpec a = added.front();
        fill_style(a);
        for (PlanDirective d : op.directives) {
          d.subject = a.id;
          out.directives.push_back(std::move(d));
        }
        affected.insert(a.surface_index);
        fresh.insert(a.id);
        out.assets.push_back(std::move(a));
        break;
      }
      case EditKind::kRemove: {
        const auto it = find(op.target);
        affected.insert(it->surface_index);
        out.assets.erase(it);
        erase_directives([&](const PlanDirective& d) { return d.subject == op.target || d.reference == op.target; });
        out.layout.erase(op.target);
        out.bindings.erase(op.target);
        previous.erase(op.target);
        for (auto& [id, p] : previous) {
          if (p.stack_base == op.target) p.stack_base.reset();
        }
        break;
      }
      case EditKind::kReplace: {
        const auto it = find(op.target);
        const AssetSpec old = *it;
        std::vector<AssetSpec> added{*op.asset};
        assign_asset_ids(added, out.assets);
        AssetSpec a = added.front();
        fill_style(a);
        *it = a;
        std::map<std::string, int> surface_of;
        for (const auto& x : out.assets) surface_of[x.id] = x.surface_index;
        for (auto& d : out.directives) {
          if (d.subject == old.id) d.subject = a.id;
          if (d.reference == old.id) d.reference = a.id;
        }
        // Relations that would now cross surfaces are dropped.
        erase_directives([&](const PlanDirective& d) {
          return d.relation && surface_of.contains(d.reference) && surface_of.contains(d.subject) &&
                 surface_of[d.reference] != surface_of[d.subject];
        });
        affected.insert(old.surface_index);
        affected.insert(a.surface_index);
        if (const auto p = previous.find(old.id); p != previous.end()) {
          if (a.surface_index == old.surface_index) previous[a.id] = p->second;
          previous.erase(old.id);
        }
        for (auto& [id, p] : previous) {
          if (p.stack_base == old.id) p.stack_base = a.id;
        }
        out.layout.erase(old.id);
        out.bindings.erase(old.id);
        fresh.insert(a.id);
        unanchored.insert(a.id);
        break;
      }
      case EditKind::kResize: {
        const auto it = find(op.target);
        it->width_cm = (*op.dims)[0];
        it->depth_cm = (*op.dims)[1];
        it->height_cm = (*op.dims)[2];
        affected.insert(it->surface_index);
        resized.insert(it->id);
        break;
      }
      case EditKind::kReposition: {
        const auto it = find(op.target);
        erase_directives([&](const PlanDirective& d) {
          return d.subject == op.target && d.kind != DirectiveKind::kOrientation;
        });
        for (const auto& d : op.directives) out.directives.push_back(d);
        affected.insert(it->surface_index);
        moved.insert(op.target);
        break;
      }
      case EditKind::kRotate: {
        const auto it = find(op.target);
        erase_directives(
            [&](const PlanDirective& d) { return d.subject == op.target && d.kind == DirectiveKind::kOrientation; });
        out.directives.push_back(make_orientation(op.target, op.orientation->direction()));
        affected.insert(it->surface_index);
        break;
      }
    }
  }

  for (const auto& a : out.assets) {
    if (!affected.contains(a.surface_index)) continue;
    ValidationReport fit;
    check_asset_fits(a, *find_summary(surfaces, a.surface_index), fit);
    if (!fit.ok()) throw InfeasibleEditError(a.id, "edit cannot be placed: " + fit.violations.front().message);
  }
  if (const auto report = validate_plan(out.directives, out.assets, surfaces); !report.ok()) {
    throw InfeasibleEditError(report.violations.front().item,
                              "edit leaves an unrealizable plan:\n" + report.to_text());
  }

  ConstraintSet cs;
  try {
    cs = compile_plan(out.directives, out.assets, out.furniture.surfaces);
  } catch (const CompileError& e) {
    throw InfeasibleEditError("", e.what());
  }

  WarmStart warm;
  warm.anchor_weight = options.anchor_weight;
  warm.anchor_radius_cm = options.anchor_radius_cm;
  for (const auto& [id, p] : previous) {
    if (moved.contains(id) || !cs.assets.contains(id)) continue;
    Placement seed = p;
    if (const auto base = cs.stack_base.find(id); base != cs.stack_base.end()) {
      seed.stack_base = base->second;
    } else {
      seed.stack_base.reset();
    }
    warm.previous[id] = seed;
    if (!unanchored.contains(id)) warm.anchored.insert(id);
  }
  SolveOptions solve_options;
  solve_options.warm_start = &warm;
  solve_options.surfaces = affected;

  Layout solved;
  try {
    solved = solve(cs, out.furniture.surfaces, options.params, solve_options);
  } catch (const InfeasibleEditError&) {
    throw;
  } catch (const InfeasibleError& e) {
    throw InfeasibleEditError(e.asset_id(), std::string("edit is infeasible: ") + e.what());
  }

  Layout layout;
  for (const auto& a : out.assets) {
    if (affected.contains(a.surface_index)) {
      layout[a.id] = solved.at(a.id);
    } else {
      layout[a.id] = scene.layout.at(a.id);
    }
  }
  out.layout = std::move(layout);
  if (const auto v = check_hard(out.layout, cs, out.furniture.surfaces, options.params); !v.empty()) {
    throw InfeasibleEditError(v.front().subjects.empty() ? "" : v.front().subjects.front(),
                              "edited layout violates hard constraints");
  }

  out.revision = scene.revision + 1;
  for (const auto& a : out.assets) {
    if (fresh.contains(a.id) && options.catalog != nullptr) {
      const CatalogEntry& entry = retrieve(retrieval_query(a), *options.catalog, options.retrieval_k,
                                           stable_hash(fmt::format("{}@{}", a.id, out.revision), out.provenance.seed));
      out.bindings[a.id] = bind(a, entry);
    } else if (resized.contains(a.id) && options.catalog != nullptr) {
      if (const auto b = out.bindings.find(a.id); b != out.bindings.end()) {
        if (const CatalogEntry* entry = options.catalog->find(b->second.entry_id)) b->second = bind(a, *entry);
      }
    }
  }
  std::string summary = fmt::format("r{}:", out.revision);
  for (const auto& op : ops) summary += " " + describe(op) + ";";
  summary.pop_back();
  out.provenance.edits.push_back(summary);
  return out;
}

}  // namespace decor
