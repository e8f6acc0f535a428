// Offline stand-in for a chat model: builds each stage's answer from templates
// sized to the surfaces it is shown, so the output passes the validators.
#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "decor/agents.hpp"
#include "decor/llm_client.hpp"

namespace decor {

namespace {

using nlohmann::json;

constexpr double kTargetFill = 0.30;
constexpr double kMaxSideShare = 0.5;    // of the bbox side, rectangular surfaces
constexpr double kIrregularShare = 0.3;  // L, U and round tops
constexpr double kRectFill = 0.97;       // area / bbox area above which a top counts as rectangular
constexpr double kMinDim = 2.0;

struct Template {
  const char* name;
  double w, d, h;
  const char* material;
  bool flat;  // can carry a small item
};

// Realistic sizes in cm.
const std::vector<Template>& templates() {
  static const std::vector<Template> t = {
      {"monitor", 55, 18, 45, "plastic", false},      {"keyboard", 44, 14, 3, "plastic", false},
      {"computer mouse", 6, 10, 4, "plastic", false}, {"desk lamp", 15, 15, 45, "steel", false},
      {"table lamp", 25, 25, 50, "linen", false},     {"alarm clock", 12, 6, 10, "plastic", false},
      {"vase of sunflower", 14, 14, 40, "glass", false}, {"decorative box", 22, 16, 10, "wood", true},
      {"stack of books", 22, 16, 12, "paper", true},  {"potted succulent", 10, 10, 12, "plastic", false},
      {"photo frame", 18, 4, 22, "wood", false},      {"candle holder", 8, 8, 12, "bronze", false},
      {"ceramic bowl", 18, 18, 8, "marble", false},   {"teapot", 20, 15, 18, "silver", false},
      {"coffee mug", 9, 9, 10, "glass", false},       {"toy car", 14, 7, 6, "iron", false},
      {"pen holder", 8, 8, 11, "leather", false},     {"small sculpture", 12, 12, 25, "bronze", false},
      {"jewelry box", 18, 12, 8, "wood", true},       {"table clock", 15, 8, 18, "gold", false},
      {"serving tray", 35, 25, 3, "wood", true},      {"speaker", 12, 12, 20, "plastic", false},
      {"plant pot", 20, 20, 30, "fibre", false},      {"globe", 25, 25, 35, "steel", false},
      {"notebook", 21, 15, 2, "paper", true},         {"headphone stand", 12, 12, 25, "steel", false},
      {"perfume bottle", 6, 4, 12, "glass", false},   {"fruit bowl", 26, 26, 10, "textile", false},
      {"tissue box", 24, 12, 9, "cotton", false},     {"laptop", 32, 22, 2, "steel", true},
      {"cookbook stand", 30, 20, 25, "wood", false},  {"wine bottle", 8, 8, 30, "glass", false},
      {"salt and pepper set", 10, 5, 10, "silver", false}, {"magazine rack", 30, 12, 25, "iron", false},
      {"seashell", 12, 9, 5, "marble", false},        {"lantern", 15, 15, 28, "iron", false},
      {"toolbox", 40, 20, 18, "steel", false},        {"cutting board", 40, 25, 2, "wood", true},
      {"mirror", 30, 6, 40, "glass", false},          {"makeup organizer", 22, 14, 12, "plastic", false},
  };
  return t;
}

const Template* find_template(std::string_view name) {
  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
  const Template* best = nullptr;
  for (const auto& t : templates()) {
    const std::string tn = t.name;
    if (lowered.find(tn) != std::string::npos && (best == nullptr || tn.size() > std::string(best->name).size())) {
      best = &t;
    }
  }
  return best;
}

struct Theme {
  std::vector<const char*> keywords;
  std::vector<const char*> items;
};

const std::vector<Theme>& themes() {
  static const std::vector<Theme> t = {
      {{"office", "work", "study", "computer", "gaming", "desk"},
       {"monitor", "keyboard", "computer mouse", "desk lamp", "pen holder", "notebook", "stack of books",
        "potted succulent", "headphone stand", "coffee mug", "alarm clock", "photo frame"}},
      {{"kitchen", "cook", "dining", "breakfast", "tea", "coffee"},
       {"fruit bowl", "teapot", "cutting board", "coffee mug", "cookbook stand", "wine bottle",
        "salt and pepper set", "ceramic bowl", "serving tray", "plant pot"}},
      {{"bedroom", "bedside", "sleep", "night"},
       {"table lamp", "alarm clock", "photo frame", "tissue box", "stack of books", "candle holder",
        "potted succulent", "jewelry box", "perfume bottle"}},
      {{"vanity", "makeup", "dressing", "beauty"},
       {"mirror", "makeup organizer", "perfume bottle", "jewelry box", "table lamp", "vase of sunflower",
        "tissue box", "candle holder"}},
      {{"beach", "coastal", "sea", "ocean", "summer"},
       {"seashell", "lantern", "vase of sunflower", "photo frame", "candle holder", "ceramic bowl", "plant pot"}},
      {{"kid", "child", "toy", "play"},
       {"toy car", "globe", "stack of books", "table lamp", "alarm clock", "decorative box", "pen holder"}},
      {{"garage", "workshop", "tool", "industrial"},
       {"toolbox", "lantern", "speaker", "coffee mug", "notebook", "pen holder", "laptop"}},
  };
  return t;
}

const std::vector<const char*>& default_items() {
  static const std::vector<const char*> items = {
      "table lamp",      "vase of sunflower", "decorative box", "stack of books", "photo frame",
      "potted succulent", "candle holder",    "ceramic bowl",   "small sculpture", "table clock",
      "serving tray",    "speaker",           "plant pot",      "globe",           "lantern",
      "alarm clock",     "jewelry box",       "fruit bowl",     "magazine rack",   "seashell"};
  return items;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> tokens_of(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool contains_word(const std::vector<std::string>& tokens, std::string_view word) {
  return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

/// Item names for the prompt: the matching theme first, then the defaults.
std::vector<std::string> item_sequence(const std::string& prompt) {
  const auto tokens = tokens_of(prompt);
  std::vector<std::string> out;
  auto add = [&](const char* name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.emplace_back(name);
  };
  for (const auto& theme : themes()) {
    const bool hit = std::any_of(theme.keywords.begin(), theme.keywords.end(), [&](const char* k) {
      return std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) { return t.rfind(k, 0) == 0; });
    });
    if (hit) {
      for (const char* item : theme.items) add(item);
      break;
    }
  }
  // Explicitly requested items go first.
  std::vector<std::string> named;
  const std::string lowered = lowercase(prompt);
  for (const auto& t : templates()) {
    if (lowered.find(t.name) != std::string::npos) named.emplace_back(t.name);
  }
  for (const char* item : default_items()) add(item);
  for (auto it = named.rbegin(); it != named.rend(); ++it) {
    out.erase(std::remove(out.begin(), out.end(), *it), out.end());
    out.insert(out.begin(), *it);
  }
  return out;
}

struct SurfaceInfo {
  int index = 0;
  double area = 0.0;
  double width = 0.0;
  double depth = 0.0;
  std::optional<double> clearance;
  bool rectangular = true;
};

std::vector<SurfaceInfo> read_surfaces(const json& ctx) {
  std::vector<SurfaceInfo> out;
  for (const auto& s : ctx.value("surfaces", json::array())) {
    SurfaceInfo info;
    info.index = s.at("index").get<int>();
    info.area = s.at("area_cm2").get<double>();
    info.width = s.at("width_cm").get<double>();
    info.depth = s.at("depth_cm").get<double>();
    if (s.contains("clearance_cm")) info.clearance = s.at("clearance_cm").get<double>();
    info.rectangular = info.area >= kRectFill * info.width * info.depth;
    out.push_back(info);
  }
  return out;
}

const SurfaceInfo* find_info(const std::vector<SurfaceInfo>& surfaces, int index) {
  for (const auto& s : surfaces) {
    if (s.index == index) return &s;
  }
  return nullptr;
}

double half_round(double v) { return std::max(kMinDim, std::floor(v * 2.0) / 2.0); }

/// Shrinks an item (uniformly in plan) so it sits comfortably on the surface.
void fit_to_surface(double& w, double& d, double& h, const SurfaceInfo& s, double scale) {
  const double share = s.rectangular ? kMaxSideShare : kIrregularShare;
  w *= scale;
  d *= scale;
  const double shrink = std::min({1.0, share * s.width / w, share * s.depth / d});
  w = half_round(w * shrink);
  d = half_round(d * shrink);
  h = half_round(h * std::min(1.0, std::max(scale, 0.5)));
  if (s.clearance) h = std::min(h, half_round(*s.clearance - 1.0));
}

// --- select ---------------------------------------------------------------------

json answer_select(const json& ctx) {
  const int n = ctx.value("n_assets", 1);
  auto surfaces = read_surfaces(ctx);
  std::vector<std::size_t> by_area(surfaces.size());
  for (std::size_t i = 0; i < by_area.size(); ++i) by_area[i] = i;
  std::stable_sort(by_area.begin(), by_area.end(),
                   [&](std::size_t a, std::size_t b) { return surfaces[a].area > surfaces[b].area; });

  // Every surface gets one while supplies last; the rest follow area by largest remainder.
  std::vector<int> counts(surfaces.size(), 0);
  const int first = std::min<int>(n, static_cast<int>(surfaces.size()));
  for (int i = 0; i < first; ++i) counts[by_area[i]] = 1;
  const int rest = n - first;
  if (rest > 0) {
    double total = 0.0;
    for (const auto& s : surfaces) total += s.area;
    std::vector<std::pair<double, std::size_t>> remainders;
    int given = 0;
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      const double quota = rest * surfaces[i].area / total;
      const int whole = static_cast<int>(std::floor(quota));
      counts[i] += whole;
      given += whole;
      remainders.emplace_back(quota - whole, i);
    }
    std::stable_sort(remainders.begin(), remainders.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return surfaces[a.second].area > surfaces[b.second].area;
    });
    for (int k = 0; given < rest; ++k, ++given) ++counts[remainders[k % remainders.size()].second];
  }

  const auto names = item_sequence(ctx.value("prompt", std::string()));
  json assets = json::array();
  std::size_t next = 0;
  for (std::size_t oi = 0; oi < by_area.size(); ++oi) {
    const SurfaceInfo& s = surfaces[by_area[oi]];
    const int k = counts[by_area[oi]];
    if (k == 0) continue;
    std::vector<const Template*> picked;
    for (int i = 0; i < k; ++i) picked.push_back(find_template(names[next++ % names.size()]));
    double sum = 0.0;
    for (const auto* t : picked) sum += t->w * t->d;
    const double scale = std::min(1.0, std::sqrt(kTargetFill * s.area / sum));
    for (const auto* t : picked) {
      double w = t->w, d = t->d, h = t->h;
      fit_to_surface(w, d, h, s, scale);
      assets.push_back(
          {{"name", t->name}, {"width_cm", w}, {"depth_cm", d}, {"height_cm", h}, {"surface_index", s.index}});
    }
  }
  return {{"assets", assets}};
}

// --- stylize ----------------------------------------------------------------------

std::string pick_style(const std::string& prompt) {
  const std::string lowered = lowercase(prompt);
  const std::string* best = nullptr;
  for (const auto& style : style_bank()) {
    std::string key = lowercase(style);
    std::string spaced = key;
    std::replace(spaced.begin(), spaced.end(), '-', ' ');
    if (lowered.find(key) != std::string::npos || lowered.find(spaced) != std::string::npos) {
      if (best == nullptr || style.size() > best->size()) best = &style;
    }
  }
  if (best != nullptr) return *best;
  return style_bank()[stable_hash(prompt) % style_bank().size()];
}

json answer_stylize(const json& ctx) {
  const std::string prompt = ctx.value("prompt", std::string());
  const std::string style = pick_style(prompt);
  const std::string lowered = lowercase(prompt);
  std::optional<std::string> requested_material;
  for (const auto& m : material_bank()) {
    if (contains_word(tokens_of(lowered), m)) requested_material = m;
  }
  json out = json::array();
  for (const auto& a : ctx.value("assets", json::array())) {
    const std::string name = a.at("name").get<std::string>();
    std::string material;
    if (requested_material) {
      material = *requested_material;
    } else if (const Template* t = find_template(name)) {
      material = t->material;
    } else {
      material = material_bank()[stable_hash(name) % material_bank().size()];
    }
    out.push_back({{"asset_id", a.at("asset_id")}, {"style", style}, {"material", material}});
  }
  return {{"assignments", out}};
}

// --- plan ---------------------------------------------------------------------------

struct PlanAsset {
  std::string id;
  std::string name;
  double w = 0, d = 0, h = 0;
  int surface = 0;
};

json rel(const std::string& kind, const std::string& s, const std::string& relation, const std::string& r) {
  return {{"kind", kind}, {"subject", s}, {"relation", relation}, {"reference", r}};
}

bool name_has(const PlanAsset& a, std::string_view word) { return lowercase(a.name).find(word) != std::string::npos; }

json plan_surface(std::vector<PlanAsset> group, const SurfaceInfo& s) {
  json out = json::array();
  std::stable_sort(group.begin(), group.end(), [](const PlanAsset& a, const PlanAsset& b) {
    if (a.w * a.d != b.w * b.d) return a.w * a.d > b.w * b.d;
    return a.id < b.id;
  });
  const PlanAsset& anchor = group.front();
  const std::size_t k = group.size();
  const double W = s.width, D = s.depth;

  const PlanAsset* keyboard = nullptr;
  const PlanAsset* mouse = nullptr;
  if (name_has(anchor, "monitor")) {
    for (const auto& a : group) {
      if (!keyboard && name_has(a, "keyboard")) keyboard = &a;
      if (!mouse && name_has(a, "mouse")) mouse = &a;
    }
  }
  const bool kb_fits = keyboard && keyboard->d + 2.0 <= D / 3.0 - anchor.d / 2.0 && k <= 10;

  out.push_back({{"kind", "orientation"}, {"subject", anchor.id}, {"direction", "forward"}});
  if (s.rectangular && anchor.w <= 0.6 * W && anchor.d <= 0.6 * D) {
    out.push_back({{"kind", "global_region"}, {"subject", anchor.id}, {"region", kb_fits ? "N" : "C"}});
  }

  // One small item on a flat, larger base when the surface is busy enough.
  std::map<std::string, std::string> stacked;
  if (k >= 4) {
    for (std::size_t b = 1; b < k && stacked.empty(); ++b) {
      const Template* t = find_template(group[b].name);
      if (!t || !t->flat || group[b].h > 12.0) continue;
      for (std::size_t i = k; i-- > 1;) {
        const PlanAsset& sub = group[i];
        if (i == b || sub.w * sub.d * 3.0 > group[b].w * group[b].d) continue;
        if (sub.w > group[b].w - 1.0 || sub.d > group[b].d - 1.0) continue;
        if (s.clearance && group[b].h + sub.h > *s.clearance - 1.0) continue;
        if (&sub == keyboard || &sub == mouse) continue;
        stacked[sub.id] = group[b].id;
        break;
      }
    }
  }

  int hard_left = 0;
  bool corner_used = false;
  for (std::size_t i = 1; i < k; ++i) {
    const PlanAsset& a = group[i];
    if (const auto base = stacked.find(a.id); base != stacked.end()) {
      out.push_back(rel("relative_position", a.id, "on_top_of", base->second));
      continue;
    }
    if (&a == keyboard) {
      if (kb_fits) {
        out.push_back(rel("relative_position", a.id, "in_front_of", anchor.id));
        out.push_back(rel("alignment", a.id, "vertical_mid", anchor.id));
      } else {
        out.push_back(rel("distance", a.id, "near", anchor.id));
      }
      continue;
    }
    if (&a == mouse) {
      if (a.w + 2.0 <= W / 3.0 - anchor.w / 2.0 && k <= 10) {
        out.push_back(rel("relative_position", a.id, "right_of", anchor.id));
      }
      out.push_back(rel("distance", a.id, "near", keyboard ? keyboard->id : anchor.id));
      continue;
    }
    const std::string& prev = group[i - 1].id;
    const bool open = s.rectangular && k <= 6;
    if (open && hard_left == 0 && a.w + 2.0 <= W / 3.0 - anchor.w / 2.0) {
      out.push_back(rel("relative_position", a.id, "left_of", anchor.id));
      out.push_back(rel("alignment", a.id, "horizontal_front", anchor.id));
      ++hard_left;
      continue;
    }
    if (open && !corner_used && a.w + 2.0 <= W / 3.0 && a.d + 2.0 <= D / 3.0) {
      out.push_back({{"kind", "global_region"}, {"subject", a.id}, {"region", "NE"}});
      corner_used = true;
      continue;
    }
    switch (i % 4) {
      case 0: out.push_back(rel("alignment", a.id, "horizontal_back", prev)); break;
      case 1: out.push_back(rel("distance", a.id, "near", anchor.id)); break;
      case 2: out.push_back(rel("alignment", a.id, "vertical_left", prev)); break;
      default: out.push_back(rel("distance", a.id, "far", anchor.id)); break;
    }
  }
  return out;
}

json answer_plan(const json& ctx) {
  const auto surfaces = read_surfaces(ctx);
  std::map<int, std::vector<PlanAsset>> groups;
  for (const auto& a : ctx.value("assets", json::array())) {
    PlanAsset p{a.at("asset_id").get<std::string>(), a.at("name").get<std::string>(), a.at("width_cm").get<double>(),
                a.at("depth_cm").get<double>(),      a.at("height_cm").get<double>(), a.at("surface_index").get<int>()};
    groups[p.surface].push_back(std::move(p));
  }
  json directives = json::array();
  for (const auto& [index, group] : groups) {
    const SurfaceInfo* s = find_info(surfaces, index);
    if (s == nullptr) continue;
    for (auto& d : plan_surface(group, *s)) directives.push_back(std::move(d));
  }
  return {{"directives", directives}};
}

// --- edit ----------------------------------------------------------------------------

struct SceneAsset {
  std::string id;
  std::string name;
  double w = 0, d = 0, h = 0;
  int surface = 0;
  int yaw = 0;
};

const std::vector<std::pair<std::string, std::string>>& region_phrases() {
  // Longest phrases first so "back left" wins over "back".
  static const std::vector<std::pair<std::string, std::string>> p = {
      {"back left", "NW"}, {"back right", "NE"}, {"front left", "SW"}, {"front right", "SE"},
      {"left back", "NW"}, {"right back", "NE"}, {"left front", "SW"}, {"right front", "SE"},
      {"top left", "NW"},  {"top right", "NE"},  {"bottom left", "SW"}, {"bottom right", "SE"},
      {"center", "C"},     {"centre", "C"},      {"middle", "C"},       {"back", "N"},
      {"rear", "N"},       {"front", "S"},       {"left", "W"},         {"right", "E"}};
  return p;
}

std::string strip_article(std::string phrase) {
  for (const char* article : {"a ", "an ", "the ", "another ", "some ", "new "}) {
    if (phrase.rfind(article, 0) == 0) phrase = phrase.substr(std::string(article).size());
  }
  while (!phrase.empty() && phrase.back() == ' ') phrase.pop_back();
  return phrase;
}

/// The scene asset best named by `phrase`: every token of its name must occur.
const SceneAsset* resolve(const std::string& phrase, const std::vector<SceneAsset>& assets) {
  const auto tokens = tokens_of(phrase);
  const SceneAsset* best = nullptr;
  std::size_t best_len = 0;
  for (const auto& a : assets) {
    if (phrase.find(lowercase(a.id)) != std::string::npos) return &a;
    const auto name_tokens = tokens_of(a.name);
    const bool all = !name_tokens.empty() && std::all_of(name_tokens.begin(), name_tokens.end(), [&](const auto& t) {
      return contains_word(tokens, t) || contains_word(tokens, t + "s");
    });
    if (all && name_tokens.size() > best_len) {
      best = &a;
      best_len = name_tokens.size();
    }
  }
  if (best) return best;
  // Fall back to the last noun: "the lamp" resolves "table lamp".
  if (!tokens.empty()) {
    for (const auto& a : assets) {
      const auto name_tokens = tokens_of(a.name);
      if (!name_tokens.empty() && name_tokens.back() == tokens.back()) return &a;
    }
  }
  return nullptr;
}

json draft_for(const std::string& name, int surface_index, const std::vector<SurfaceInfo>& surfaces,
               std::optional<std::array<double, 3>> dims = std::nullopt) {
  double w = 15, d = 15, h = 15;
  if (const Template* t = find_template(name)) {
    w = t->w;
    d = t->d;
    h = t->h;
  } else if (dims) {
    w = (*dims)[0];
    d = (*dims)[1];
    h = (*dims)[2];
  }
  if (const SurfaceInfo* s = find_info(surfaces, surface_index)) fit_to_surface(w, d, h, *s, 1.0);
  return {{"name", name}, {"width_cm", w}, {"depth_cm", d}, {"height_cm", h}, {"surface_index", surface_index}};
}

json answer_edit(const json& ctx) {
  const auto surfaces = read_surfaces(ctx);
  std::vector<SceneAsset> assets;
  for (const auto& a : ctx.value("assets", json::array())) {
    assets.push_back({a.at("asset_id").get<std::string>(), a.at("name").get<std::string>(),
                      a.at("width_cm").get<double>(), a.at("depth_cm").get<double>(),
                      a.at("height_cm").get<double>(), a.at("surface_index").get<int>(), a.value("yaw_deg", 0)});
  }
  json ops = json::array();
  json unresolved = json::array();

  std::string text = lowercase(ctx.value("instruction", std::string()));
  for (char& c : text) {
    if (c == ',' || c == '.' || c == '!' || c == '?') c = ';';
  }
  text = std::regex_replace(text, std::regex(" (and then|then|and) "), ";");

  std::stringstream parts(text);
  std::string clause;
  std::smatch m;
  while (std::getline(parts, clause, ';')) {
    clause = std::regex_replace(clause, std::regex("^\\s+|\\s+$"), "");
    if (clause.empty()) continue;

    auto target_of = [&](const std::string& phrase) -> const SceneAsset* {
      const SceneAsset* t = resolve(phrase, assets);
      if (!t) unresolved.push_back(strip_article(phrase));
      return t;
    };

    if (std::regex_search(clause, m, std::regex("^(?:please )?(?:remove|delete|take away|get rid of) (.+)$"))) {
      if (const SceneAsset* t = target_of(m[1])) ops.push_back({{"kind", "remove"}, {"target", t->id}});
    } else if (std::regex_search(clause, m, std::regex("^(?:please )?(?:replace|swap|change) (.+?) (?:with|for|into|to) (.+)$"))) {
      if (const SceneAsset* t = target_of(m[1])) {
        ops.push_back({{"kind", "replace"},
                       {"target", t->id},
                       {"asset", draft_for(strip_article(m[2]), t->surface, surfaces,
                                           std::array<double, 3>{t->w, t->d, t->h})}});
      }
    } else if (std::regex_search(clause, m, std::regex("^(?:please )?(?:rotate|turn|spin) (.+?)(?: (by )?(90|180|270)(?: degrees)?)?(?: to face (left|right|back|backward|forward|front))?(?: (clockwise|counterclockwise|anticlockwise))?$"))) {
      if (const SceneAsset* t = target_of(m[1])) {
        int yaw = (t->yaw + 90) % 360;
        if (m[3].matched) yaw = (t->yaw + std::stoi(m[3])) % 360;
        if (m[5].matched && m[5] == "clockwise") yaw = (t->yaw + 270) % 360;
        if (m[4].matched) {
          const std::string face = m[4];
          yaw = face == "left" ? 90 : face == "right" ? 270 : (face == "forward" || face == "front") ? 0 : 180;
        }
        ops.push_back({{"kind", "rotate"}, {"target", t->id}, {"yaw_deg", yaw}});
      }
    } else if (std::regex_search(clause, m, std::regex("^(?:please )?(?:make|resize|scale) (.+?) (bigger|larger|smaller|twice as (?:big|large)|half (?:the )?size|tiny|huge|to (\\d+(?:\\.\\d+)?) ?x ?(\\d+(?:\\.\\d+)?) ?x ?(\\d+(?:\\.\\d+)?)(?: ?cm)?)$"))) {
      if (const SceneAsset* t = target_of(m[1])) {
        const std::string how = m[2];
        double f = 1.0;
        double w = t->w, d = t->d, h = t->h;
        if (m[3].matched) {
          w = std::stod(m[3]);
          d = std::stod(m[4]);
          h = std::stod(m[5]);
        } else {
          if (how == "bigger" || how == "larger") f = 1.25;
          else if (how == "smaller") f = 0.75;
          else if (how.rfind("twice", 0) == 0) f = 2.0;
          else if (how.rfind("half", 0) == 0) f = 0.5;
          else if (how == "tiny") f = 0.4;
          else if (how == "huge") f = 3.0;
          w *= f;
          d *= f;
          h *= f;
        }
        ops.push_back({{"kind", "resize"},
                       {"target", t->id},
                       {"dims", {{"width_cm", std::round(w * 2) / 2}, {"depth_cm", std::round(d * 2) / 2},
                                 {"height_cm", std::round(h * 2) / 2}}}});
      }
    } else if (std::regex_search(clause, m, std::regex("^(?:please )?(?:move|reposition|put|place|shift) (.+?) (to|into|in|on|next to|near|beside|left of|right of|to the left of|to the right of|in front of|behind|away from|far from|on top of) (.+)$")) &&
               resolve(m[1], assets) != nullptr) {
      const SceneAsset* t = resolve(m[1], assets);
      const std::string prep = m[2];
      const std::string where = m[3];
      json directives = json::array();
      static const std::map<std::string, std::pair<std::string, std::string>> relations = {
          {"next to", {"distance", "near"}},         {"near", {"distance", "near"}},
          {"beside", {"distance", "near"}},          {"left of", {"relative_position", "left_of"}},
          {"to the left of", {"relative_position", "left_of"}}, {"right of", {"relative_position", "right_of"}},
          {"to the right of", {"relative_position", "right_of"}}, {"in front of", {"relative_position", "in_front_of"}},
          {"behind", {"relative_position", "behind"}}, {"away from", {"distance", "far"}},
          {"far from", {"distance", "far"}},         {"on top of", {"relative_position", "on_top_of"}}};
      if (const auto r = relations.find(prep); r != relations.end()) {
        if (const SceneAsset* ref = target_of(where)) {
          directives.push_back(rel(r->second.first, t->id, r->second.second, ref->id));
        }
      } else {
        for (const auto& [phrase, region] : region_phrases()) {
          if (where.find(phrase) != std::string::npos) {
            directives.push_back({{"kind", "global_region"}, {"subject", t->id}, {"region", region}});
            break;
          }
        }
      }
      if (directives.empty()) {
        unresolved.push_back(clause);
      } else {
        ops.push_back({{"kind", "reposition"}, {"target", t->id}, {"directives", directives}});
      }
    } else if (std::regex_search(clause, m, std::regex("^(?:please )?(?:add|insert|put|place|include) (.+?)(?: (?:on|onto|to) (?:surface (\\d+)|the (?:(\\w+) )?(?:shelf|surface|top)))?$"))) {
      std::string name = strip_article(m[1]);
      name = std::regex_replace(name, std::regex("^(one|two|three|a couple of) "), "");
      int surface_index = -1;
      if (m[2].matched) surface_index = std::stoi(m[2]);
      if (surface_index < 0 || !find_info(surfaces, surface_index)) {
        // Surface with the most free area.
        double best = -1.0;
        for (const auto& s : surfaces) {
          double used = 0.0;
          for (const auto& a : assets) {
            if (a.surface == s.index) used += a.w * a.d;
          }
          if (s.area - used > best) {
            best = s.area - used;
            surface_index = s.index;
          }
        }
      }
      if (surface_index >= 0) ops.push_back({{"kind", "insert"}, {"asset", draft_for(name, surface_index, surfaces)}});
    } else {
      unresolved.push_back(clause);
    }
  }
  return {{"ops", ops}, {"unresolved", unresolved}};
}

/// The ```json block of the most recent user message that has one.
json request_context(const ChatRequest& request) {
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role != "user") continue;
    const auto open = it->content.find("```json");
    if (open == std::string::npos) continue;
    const auto body = it->content.find('\n', open);
    const auto close = it->content.find("```", body);
    if (body == std::string::npos || close == std::string::npos) continue;
    return json::parse(it->content.substr(body + 1, close - body - 1));
  }
  throw BackendError("rule-based stub: request carries no json context block");
}

}  // namespace

ChatResponse RuleBasedStub::complete(const ChatRequest& request) {
  request.validate();
  ++calls_;
  std::string title;
  try {
    title = json::parse(request.response_schema).value("title", std::string());
  } catch (const json::parse_error&) {
    throw BackendError("rule-based stub: response schema is not JSON");
  }
  const json ctx = request_context(request);
  json answer;
  if (title == schema_title(Stage::kSelect)) answer = answer_select(ctx);
  else if (title == schema_title(Stage::kStylize)) answer = answer_stylize(ctx);
  else if (title == schema_title(Stage::kPlan)) answer = answer_plan(ctx);
  else if (title == schema_title(Stage::kEdit)) answer = answer_edit(ctx);
  else throw BackendError("rule-based stub: unknown stage schema '" + title + "'");
  ChatResponse response;
  response.content = answer.dump();
  response.finish_reason = "stop";
  return response;
}

}  // namespace decor
