#include "decor/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

namespace decor {

namespace {

using nlohmann::json;

std::string lower_trimmed(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) out += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
  return out;
}

std::optional<std::string> match_in(const std::vector<std::string>& bank, std::string_view text) {
  const std::string key = lower_trimmed(text);
  for (const auto& entry : bank) {
    if (lower_trimmed(entry) == key) return entry;
  }
  return std::nullopt;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

json surface_json(const SurfaceSummary& s) {
  json j = {{"index", s.index},
            {"area_cm2", round2(s.area_cm2)},
            {"height_cm", round2(s.height_cm)},
            {"width_cm", round2(s.width_cm)},
            {"depth_cm", round2(s.depth_cm)}};
  if (s.clearance_cm) j["clearance_cm"] = round2(*s.clearance_cm);
  json boundary = json::array();
  for (const auto& v : s.boundary) boundary.push_back({round2(v.x), round2(v.y)});
  j["boundary"] = boundary;
  return j;
}

json asset_json(const AssetSpec& a, bool styled) {
  json j = {{"asset_id", a.id},          {"name", a.name},
            {"width_cm", a.width_cm},    {"depth_cm", a.depth_cm},
            {"height_cm", a.height_cm},  {"surface_index", a.surface_index}};
  if (styled) {
    j["style"] = a.style;
    j["material"] = a.material;
  }
  return j;
}

std::optional<json> required_array(const json& j, const char* key, ValidationReport& report) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    report.add("bad_field", fmt::format("missing array '{}'", key), key);
    return std::nullopt;
  }
  return *it;
}

std::optional<std::string> string_field(const json& j, const char* key, ValidationReport& report,
                                        const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    report.add("bad_field", fmt::format("{} needs a non-empty string '{}'", where, key), where + "." + key);
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::optional<double> positive_field(const json& j, const char* key, ValidationReport& report,
                                     const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number() || !(it->get<double>() > 0.0) || !std::isfinite(it->get<double>())) {
    report.add("bad_field", fmt::format("{} needs a positive number '{}'", where, key), where + "." + key);
    return std::nullopt;
  }
  return it->get<double>();
}

const SurfaceSummary* find_summary(std::span<const SurfaceSummary> surfaces, int index) {
  for (const auto& s : surfaces) {
    if (s.index == index) return &s;
  }
  return nullptr;
}

}  // namespace

std::optional<json> parse_reply(std::string_view content, ValidationReport& report) {
  std::string text(content);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text.compare(first, 3, "```") == 0) {
    const auto body = text.find('\n', first);
    const auto close = text.rfind("```");
    if (body != std::string::npos && close != std::string::npos && close > body) {
      text = text.substr(body + 1, close - body - 1);
    }
  }
  try {
    json j = json::parse(text);
    if (!j.is_object()) {
      report.add("bad_json", "the answer must be a JSON object");
      return std::nullopt;
    }
    return j;
  } catch (const json::parse_error& e) {
    report.add("bad_json", fmt::format("the answer is not valid JSON ({})", e.what()));
    return std::nullopt;
  }
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kSelect: return "select";
    case Stage::kStylize: return "stylize";
    case Stage::kPlan: return "plan";
    case Stage::kEdit: return "edit";
  }
  return "unknown";
}

std::string_view schema_title(Stage stage) {
  switch (stage) {
    case Stage::kSelect: return "asset_proposal";
    case Stage::kStylize: return "style_assignment";
    case Stage::kPlan: return "arrangement_plan";
    case Stage::kEdit: return "edit_ops";
  }
  return "unknown";
}

const std::vector<std::string>& style_bank() {
  static const std::vector<std::string> bank = {
      "Contemporary", "Coastal",  "Scandinavian", "Shabby Chic", "Transitional", "Modern",    "Mid-century",
      "Retro",        "Minimalist", "Traditional", "Farmhouse",  "Antique",      "Industrial", "Rustic",
      "Vintage",      "Mission",  "French",       "Art Deco",    "Victorian",    "Chippendale", "Country",
      "Craftsman",    "Shaker",   "Queen Anne",   "Hepplewhite", "Louis XVI",    "Asian",     "Jacobean",
      "Colonial",     "Federal",  "Sheraton"};
  return bank;
}

const std::vector<std::string>& material_bank() {
  static const std::vector<std::string> bank = {"wood",  "plywood", "marble", "paper",  "fibre",  "plastic",
                                                "glass", "textile", "iron",   "steel",  "gold",   "silver",
                                                "bronze", "cotton", "linen",  "leather"};
  return bank;
}

std::optional<std::string> match_style(std::string_view text) { return match_in(style_bank(), text); }
std::optional<std::string> match_material(std::string_view text) { return match_in(material_bank(), text); }

// --- ValidationReport --------------------------------------------------------

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(), [&](const ValidationIssue& v) { return v.code == code; });
}

void ValidationReport::add(std::string code, std::string message, std::string item) {
  violations.push_back({std::move(code), std::move(message), std::move(item)});
}

nlohmann::json ValidationReport::to_json() const {
  json arr = json::array();
  for (const auto& v : violations) arr.push_back({{"code", v.code}, {"message", v.message}, {"item", v.item}});
  return {{"ok", ok()}, {"violations", arr}};
}

std::string ValidationReport::to_text() const {
  std::string out;
  for (const auto& v : violations) {
    out += fmt::format("- {}{}: {}\n", v.code, v.item.empty() ? "" : " [" + v.item + "]", v.message);
  }
  return out;
}

ExhaustedRetriesError::ExhaustedRetriesError(Stage stage, int attempts, ValidationReport last,
                                             std::vector<TranscriptEntry> transcript)
    : ValidationError(fmt::format("stage '{}' failed validation after {} attempts:\n{}", to_string(stage),
                                  attempts, last.to_text())),
      stage_(stage),
      attempts_(attempts),
      last_(std::move(last)),
      transcript_(std::move(transcript)) {}

// --- context -------------------------------------------------------------------

std::vector<SurfaceSummary> summarize(std::span<const Surface> surfaces) {
  std::vector<SurfaceSummary> out;
  for (const auto& s : surfaces) {
    SurfaceSummary m;
    m.index = s.index;
    m.area_cm2 = s.area_cm2;
    m.height_cm = s.height_cm;
    m.width_cm = s.bbox.width();
    m.depth_cm = s.bbox.depth();
    m.clearance_cm = s.clearance_cm;
    m.boundary = s.boundary;
    out.push_back(std::move(m));
  }
  return out;
}

nlohmann::json context_json(Stage stage, const StageContext& ctx) {
  json j;
  j["prompt"] = ctx.prompt;
  json surfaces = json::array();
  for (const auto& s : ctx.surfaces) surfaces.push_back(surface_json(s));
  json assets = json::array();
  for (const auto& a : ctx.assets) assets.push_back(asset_json(a, stage != Stage::kStylize));
  switch (stage) {
    case Stage::kSelect:
      j["n_assets"] = ctx.n_assets;
      j["surfaces"] = surfaces;
      break;
    case Stage::kStylize:
      j["assets"] = assets;
      break;
    case Stage::kPlan:
      j["surfaces"] = surfaces;
      j["assets"] = assets;
      break;
    case Stage::kEdit: {
      j["instruction"] = ctx.instruction;
      j["surfaces"] = surfaces;
      for (auto& a : assets) {
        const auto p = ctx.layout.find(a["asset_id"].get<std::string>());
        if (p == ctx.layout.end()) continue;
        a["x_cm"] = round2(p->second.x_cm);
        a["y_cm"] = round2(p->second.y_cm);
        a["yaw_deg"] = p->second.orientation.yaw_deg();
        if (p->second.stack_base) a["stack_base"] = *p->second.stack_base;
      }
      j["assets"] = assets;
      json directives = json::array();
      for (const auto& d : ctx.directives) directives.push_back(directive_to_json(d));
      j["directives"] = directives;
      break;
    }
  }
  return j;
}

std::string user_message(Stage stage, const StageContext& ctx) {
  return fmt::format("Inputs for the {} stage:\n```json\n{}\n```\n", to_string(stage),
                     context_json(stage, ctx).dump(2));
}

// --- validators --------------------------------------------------------------------

void check_asset_fits(const AssetSpec& a, const SurfaceSummary& s, ValidationReport& report) {
  const double lo = std::min(a.width_cm, a.depth_cm);
  const double hi = std::max(a.width_cm, a.depth_cm);
  const double lo_s = std::min(s.width_cm, s.depth_cm);
  const double hi_s = std::max(s.width_cm, s.depth_cm);
  const std::string item = a.id.empty() ? a.name : a.id;
  if (lo > lo_s || hi > hi_s) {
    report.add("oversize",
               fmt::format("'{}' is {:g} x {:g} cm but surface {} is only {:g} x {:g} cm", a.name, a.width_cm,
                           a.depth_cm, s.index, s.width_cm, s.depth_cm),
               item);
  }
  if (s.clearance_cm && a.height_cm > *s.clearance_cm) {
    report.add("too_tall",
               fmt::format("'{}' is {:g} cm tall but surface {} has {:g} cm of clearance", a.name, a.height_cm,
                           s.index, *s.clearance_cm),
               item);
  }
}

ValidationReport validate_assets(std::span<const AssetSpec> proposal, std::span<const SurfaceSummary> surfaces,
                                 int n_assets) {
  ValidationReport report;
  if (static_cast<int>(proposal.size()) != n_assets) {
    report.add("count_mismatch", fmt::format("proposed {} assets but {} are required", proposal.size(), n_assets));
  }
  std::map<int, int> counts;
  std::map<int, double> fill;
  for (const auto& s : surfaces) counts[s.index] = 0;
  for (const auto& a : proposal) {
    const std::string item = a.id.empty() ? a.name : a.id;
    if (a.name.empty()) report.add("bad_field", "an asset has no name", item);
    if (!(a.width_cm > 0.0) || !(a.depth_cm > 0.0) || !(a.height_cm > 0.0)) {
      report.add("bad_field", fmt::format("'{}' needs positive dimensions", a.name), item);
      continue;
    }
    const SurfaceSummary* s = find_summary(surfaces, a.surface_index);
    if (s == nullptr) {
      report.add("bad_surface", fmt::format("'{}' is on surface {}, which does not exist", a.name, a.surface_index),
                 item);
      continue;
    }
    ++counts[a.surface_index];
    fill[a.surface_index] += a.footprint_area();
    check_asset_fits(a, *s, report);
  }
  const bool crowded = std::any_of(counts.begin(), counts.end(), [](const auto& c) { return c.second >= 2; });
  for (const auto& [index, count] : counts) {
    if (count == 0 && crowded) {
      report.add("empty_surface",
                 fmt::format("surface {} is empty while another surface holds several assets", index),
                 std::to_string(index));
    }
  }
  for (const auto& [index, area] : fill) {
    const SurfaceSummary* s = find_summary(surfaces, index);
    if (area > kMaxSurfaceFill * s->area_cm2) {
      report.add("overfill",
                 fmt::format("assets cover {:.0f} cm2 of surface {}, more than {:.0f}% of its {:.0f} cm2", area,
                             index, kMaxSurfaceFill * 100.0, s->area_cm2),
                 std::to_string(index));
    }
  }
  return report;
}

ValidationReport validate_styles(std::span<const StyleAssignment> proposal, std::span<const AssetSpec> assets) {
  ValidationReport report;
  std::set<std::string> ids;
  for (const auto& a : assets) ids.insert(a.id);
  if (proposal.size() != assets.size()) {
    report.add("count_mismatch",
               fmt::format("{} assignments for {} assets", proposal.size(), assets.size()));
  }
  std::set<std::string> seen;
  for (const auto& s : proposal) {
    if (!ids.contains(s.asset_id)) {
      report.add("unknown_asset", fmt::format("'{}' is not a selected asset", s.asset_id), s.asset_id);
      continue;
    }
    if (!seen.insert(s.asset_id).second) {
      report.add("duplicate_assignment", fmt::format("'{}' is assigned twice", s.asset_id), s.asset_id);
    }
    if (!match_style(s.style)) {
      report.add("unknown_style", fmt::format("style '{}' is not in the style bank", s.style), s.asset_id);
    }
    if (!match_material(s.material)) {
      report.add("unknown_material", fmt::format("material '{}' is not in the material bank", s.material),
                 s.asset_id);
    }
  }
  for (const auto& a : assets) {
    if (!seen.contains(a.id)) {
      report.add("missing_assignment", fmt::format("'{}' has no style and material", a.id), a.id);
    }
  }
  return report;
}

ValidationReport validate_plan(std::span<const PlanDirective> directives, std::span<const AssetSpec> assets,
                               std::span<const SurfaceSummary> surfaces) {
  ValidationReport report;
  std::map<std::string, const AssetSpec*> by_id;
  for (const auto& a : assets) by_id[a.id] = &a;
  std::map<std::string, int> globals;
  std::map<std::string, int> orientations;
  std::map<std::string, std::vector<std::string>> bases;

  for (const auto& d : directives) {
    const auto subject = by_id.find(d.subject);
    if (subject == by_id.end()) {
      report.add("unknown_asset", fmt::format("directive subject '{}' is not an asset", d.subject), d.subject);
      continue;
    }
    switch (d.kind) {
      case DirectiveKind::kGlobalRegion:
        if (!d.region) {
          report.add("bad_vocabulary", "global_region needs a region", d.subject);
        } else if (++globals[d.subject] == 2) {
          report.add("duplicate_global", fmt::format("'{}' has more than one global_region", d.subject), d.subject);
        }
        break;
      case DirectiveKind::kOrientation:
        if (!d.direction) {
          report.add("bad_vocabulary", "orientation needs a direction", d.subject);
        } else if (++orientations[d.subject] == 2) {
          report.add("duplicate_orientation", fmt::format("'{}' has more than one orientation", d.subject),
                     d.subject);
        }
        break;
      default: {
        if (!d.relation || kind_of(*d.relation) != d.kind) {
          report.add("bad_vocabulary",
                     fmt::format("relation of '{}' does not belong to {}", d.subject, to_string(d.kind)), d.subject);
          break;
        }
        const auto ref = by_id.find(d.reference);
        if (ref == by_id.end()) {
          report.add("unknown_asset", fmt::format("reference '{}' is not an asset", d.reference), d.reference);
          break;
        }
        if (d.reference == d.subject) {
          report.add("self_reference", fmt::format("'{}' refers to itself", d.subject), d.subject);
          break;
        }
        if (ref->second->surface_index != subject->second->surface_index) {
          report.add("cross_surface",
                     fmt::format("'{}' (surface {}) refers to '{}' on surface {}", d.subject,
                                 subject->second->surface_index, d.reference, ref->second->surface_index),
                     d.subject);
          break;
        }
        if (*d.relation == Relation::kOnTopOf) bases[d.subject].push_back(d.reference);
        break;
      }
    }
  }

  std::map<std::string, std::string> base_of;
  for (const auto& [subject, list] : bases) {
    if (list.size() > 1) {
      report.add("multiple_bases", fmt::format("'{}' is on top of several assets", subject), subject);
    }
    base_of[subject] = list.front();
    if (globals.contains(subject)) {
      report.add("stacked_global", fmt::format("'{}' is stacked and also has a global_region", subject), subject);
    }
    const AssetSpec& s = *by_id.at(subject);
    const AssetSpec& b = *by_id.at(list.front());
    const bool fits = (s.width_cm <= b.width_cm && s.depth_cm <= b.depth_cm) ||
                      (s.depth_cm <= b.width_cm && s.width_cm <= b.depth_cm);
    if (!fits) {
      report.add("stack_oversize",
                 fmt::format("'{}' ({:g} x {:g} cm) does not fit on '{}' ({:g} x {:g} cm)", subject, s.width_cm,
                             s.depth_cm, b.id, b.width_cm, b.depth_cm),
                 subject);
    }
  }
  std::set<std::string> in_cycle;
  for (const auto& [subject, base] : base_of) {
    std::string current = subject;
    double height = by_id.at(subject)->height_cm;
    bool cycle = false;
    for (std::size_t steps = 0; base_of.contains(current); ++steps) {
      current = base_of.at(current);
      if (current == subject || steps > base_of.size()) {
        cycle = true;
        break;
      }
      height += by_id.at(current)->height_cm;
    }
    if (cycle) {
      if (in_cycle.insert(subject).second) {
        report.add("stack_cycle", fmt::format("'{}' is part of an on_top_of cycle", subject), subject);
      }
      continue;
    }
    const SurfaceSummary* surface = find_summary(surfaces, by_id.at(subject)->surface_index);
    if (surface != nullptr && surface->clearance_cm && height > *surface->clearance_cm) {
      report.add("stack_too_tall",
                 fmt::format("the stack under '{}' is {:g} cm tall, above the {:g} cm clearance", subject, height,
                             *surface->clearance_cm),
                 subject);
    }
  }
  return report;
}

// --- parsers ------------------------------------------------------------------------

Parsed<AssetSpec> parse_asset_proposal(std::string_view content) {
  Parsed<AssetSpec> out;
  const auto j = parse_reply(content, out.report);
  if (!j) return out;
  const auto arr = required_array(*j, "assets", out.report);
  if (!arr) return out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const json& e = (*arr)[i];
    const std::string where = fmt::format("assets[{}]", i);
    if (!e.is_object()) {
      out.report.add("bad_field", where + " is not an object", where);
      continue;
    }
    const std::size_t before = out.report.violations.size();
    AssetSpec a;
    if (auto v = string_field(e, "name", out.report, where)) a.name = *v;
    if (auto v = positive_field(e, "width_cm", out.report, where)) a.width_cm = *v;
    if (auto v = positive_field(e, "depth_cm", out.report, where)) a.depth_cm = *v;
    if (auto v = positive_field(e, "height_cm", out.report, where)) a.height_cm = *v;
    const auto si = e.find("surface_index");
    if (si == e.end() || !si->is_number_integer()) {
      out.report.add("bad_field", where + " needs an integer 'surface_index'", where + ".surface_index");
    } else {
      a.surface_index = si->get<int>();
    }
    if (out.report.violations.size() == before) out.items.push_back(std::move(a));
  }
  return out;
}

Parsed<StyleAssignment> parse_style_assignment(std::string_view content) {
  Parsed<StyleAssignment> out;
  const auto j = parse_reply(content, out.report);
  if (!j) return out;
  const auto arr = required_array(*j, "assignments", out.report);
  if (!arr) return out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const json& e = (*arr)[i];
    const std::string where = fmt::format("assignments[{}]", i);
    if (!e.is_object()) {
      out.report.add("bad_field", where + " is not an object", where);
      continue;
    }
    const std::size_t before = out.report.violations.size();
    StyleAssignment s;
    if (auto v = string_field(e, "asset_id", out.report, where)) s.asset_id = *v;
    if (auto v = string_field(e, "style", out.report, where)) s.style = *v;
    if (auto v = string_field(e, "material", out.report, where)) s.material = *v;
    if (out.report.violations.size() == before) out.items.push_back(std::move(s));
  }
  return out;
}

std::optional<PlanDirective> parse_directive(const json& e, ValidationReport& report, const std::string& where) {
  if (!e.is_object()) {
    report.add("bad_field", where + " is not an object", where);
    return std::nullopt;
  }
  const std::size_t before = report.violations.size();
  PlanDirective d;
  const auto kind_text = string_field(e, "kind", report, where);
  if (auto v = string_field(e, "subject", report, where)) d.subject = *v;
  if (!kind_text) return std::nullopt;
  const auto kind = parse_directive_kind(*kind_text);
  if (!kind) {
    report.add("bad_vocabulary", fmt::format("unknown directive kind '{}'", *kind_text), where);
    return std::nullopt;
  }
  d.kind = *kind;
  switch (d.kind) {
    case DirectiveKind::kGlobalRegion:
      if (auto v = string_field(e, "region", report, where)) {
        d.region = parse_region(*v);
        if (!d.region) report.add("bad_vocabulary", fmt::format("unknown region '{}'", *v), where);
      }
      break;
    case DirectiveKind::kOrientation:
      if (auto v = string_field(e, "direction", report, where)) {
        d.direction = parse_direction(*v);
        if (!d.direction) report.add("bad_vocabulary", fmt::format("unknown direction '{}'", *v), where);
      }
      break;
    default:
      if (auto v = string_field(e, "reference", report, where)) d.reference = *v;
      if (auto v = string_field(e, "relation", report, where)) {
        d.relation = parse_relation(*v);
        if (!d.relation) {
          report.add("bad_vocabulary", fmt::format("unknown relation '{}'", *v), where);
        } else if (kind_of(*d.relation) != d.kind) {
          report.add("bad_vocabulary",
                     fmt::format("relation '{}' is not a {} relation", *v, to_string(d.kind)), where);
        }
      }
      break;
  }
  if (report.violations.size() != before) return std::nullopt;
  return d;
}

nlohmann::json directive_to_json(const PlanDirective& d) {
  json j = {{"kind", std::string(to_string(d.kind))}, {"subject", d.subject}};
  if (d.region) j["region"] = std::string(to_string(*d.region));
  if (d.relation) {
    j["relation"] = std::string(to_string(*d.relation));
    j["reference"] = d.reference;
  }
  if (d.direction) j["direction"] = std::string(to_string(*d.direction));
  return j;
}

Parsed<PlanDirective> parse_plan(std::string_view content) {
  Parsed<PlanDirective> out;
  const auto j = parse_reply(content, out.report);
  if (!j) return out;
  const auto arr = required_array(*j, "directives", out.report);
  if (!arr) return out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    if (auto d = parse_directive((*arr)[i], out.report, fmt::format("directives[{}]", i))) {
      out.items.push_back(std::move(*d));
    }
  }
  return out;
}

void assign_asset_ids(std::vector<AssetSpec>& assets, std::span<const AssetSpec> existing) {
  std::set<std::string> taken;
  for (const auto& a : existing) taken.insert(a.id);
  for (auto& a : assets) {
    const std::string base = slugify(a.name);
    for (int k = 1;; ++k) {
      std::string id = fmt::format("{}_{}", base, k);
      if (taken.insert(id).second) {
        a.id = std::move(id);
        break;
      }
    }
  }
}

// --- admin loop ------------------------------------------------------------------------

StageRun run_stage(Stage stage, const StageContext& ctx, ChatClient& client, const StageValidator& validator,
                   const StageOptions& options) {
  if (options.max_retries < 1) throw ValidationError("max_retries must be at least 1");
  if (ctx.n_assets < 1) throw ValidationError("n_assets must be at least 1");

  ChatRequest request;
  request.model = options.model;
  request.temperature = options.temperature;
  request.seed = options.seed;
  request.timeout_s = options.timeout_s;
  request.response_schema = response_schema(stage);
  request.messages.push_back({"system", system_prompt(stage)});
  request.messages.push_back({"user", user_message(stage, ctx)});

  StageRun run;
  const std::string stage_name(to_string(stage));
  ValidationReport report;
  for (int attempt = 1; attempt <= options.max_retries; ++attempt) {
    run.attempts = attempt;
    run.transcript.push_back({stage_name, attempt, "user", request.messages.back().content});
    ChatResponse reply = client.complete(request);
    run.transcript.push_back({stage_name, attempt, "assistant", reply.content});
    report = validator(reply.content);
    if (report.ok()) {
      run.output = std::move(reply.content);
      return run;
    }
    run.transcript.push_back({stage_name, attempt, "validator", report.to_json().dump()});
    request.messages.push_back({"assistant", reply.content});
    request.messages.push_back(
        {"user", "The validator rejected your answer:\n" + report.to_text() +
                     "Revise the proposal to fix every violation and answer with the complete corrected JSON."});
  }
  throw ExhaustedRetriesError(stage, options.max_retries, std::move(report), std::move(run.transcript));
}

SelectResult select_assets(const StageContext& ctx, ChatClient& client, const StageOptions& options) {
  std::vector<AssetSpec> accepted;
  auto validator = [&](const std::string& content) {
    auto parsed = parse_asset_proposal(content);
    auto report = std::move(parsed.report);
    if (report.ok()) {
      report = validate_assets(parsed.items, ctx.surfaces, ctx.n_assets);
      accepted = std::move(parsed.items);
    }
    return report;
  };
  SelectResult out;
  out.run = run_stage(Stage::kSelect, ctx, client, validator, options);
  assign_asset_ids(accepted);
  out.assets = std::move(accepted);
  return out;
}

StylizeResult stylize_assets(const StageContext& ctx, ChatClient& client, const StageOptions& options) {
  std::vector<StyleAssignment> accepted;
  auto validator = [&](const std::string& content) {
    auto parsed = parse_style_assignment(content);
    auto report = std::move(parsed.report);
    if (report.ok()) {
      report = validate_styles(parsed.items, ctx.assets);
      accepted = std::move(parsed.items);
    }
    return report;
  };
  StylizeResult out;
  out.run = run_stage(Stage::kStylize, ctx, client, validator, options);
  out.assets = ctx.assets;
  for (auto& a : out.assets) {
    for (const auto& s : accepted) {
      if (s.asset_id != a.id) continue;
      a.style = *match_style(s.style);
      a.material = *match_material(s.material);
    }
  }
  return out;
}

PlanResult plan_arrangement(const StageContext& ctx, ChatClient& client, const StageOptions& options) {
  std::vector<PlanDirective> accepted;
  auto validator = [&](const std::string& content) {
    auto parsed = parse_plan(content);
    auto report = std::move(parsed.report);
    if (report.ok()) {
      report = validate_plan(parsed.items, ctx.assets, ctx.surfaces);
      accepted = std::move(parsed.items);
    }
    return report;
  };
  PlanResult out;
  out.run = run_stage(Stage::kPlan, ctx, client, validator, options);
  out.directives = std::move(accepted);
  return out;
}

}  // namespace decor
