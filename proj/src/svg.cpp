#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "decor/pipeline.hpp"

namespace decor {

namespace {

constexpr double kPad = 5.0;
constexpr const char* kFreeColor = "#1f77b4";
constexpr const char* kStackedColor = "#d62728";

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed two decimals; avoids "-0.00".
std::string num(double v) {
  if (std::abs(v) < 0.005) v = 0.0;
  return fmt::format("{:.2f}", v);
}

int stack_depth(const Layout& layout, const std::string& id) {
  int depth = 0;
  for (auto it = layout.find(id); it != layout.end() && it->second.stack_base && depth <= 64;
       it = layout.find(*it->second.stack_base)) {
    ++depth;
  }
  return depth;
}

}  // namespace

std::string export_svg(const DecorScene& scene, int surface_index) {
  const Surface& surface = scene.surface(surface_index);
  const Rect& b = surface.bbox;
  const double width = b.width() + 2 * kPad;
  const double height = b.depth() + 2 * kPad;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\" "
      "data-surface=\"{}\">\n",
      num(b.min_x - kPad), num(-b.max_y - kPad), num(width), num(height), num(width), num(height), surface_index);
  out += fmt::format("<title>surface {} at {} cm</title>\n", surface_index, num(surface.height_cm));
  out += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"5\" refY=\"5\" markerWidth=\"4\" "
         "markerHeight=\"4\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#222\"/>"
         "</marker></defs>\n";

  std::string points;
  for (const auto& v : surface.boundary) {
    if (!points.empty()) points += ' ';
    points += num(v.x) + "," + num(-v.y);
  }
  out += fmt::format(
      "<polygon class=\"surface\" points=\"{}\" fill=\"#f3ede2\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n",
      points);

  for (int k = 1; k <= 2; ++k) {
    const double x = b.min_x + b.width() * k / 3.0;
    const double y = b.min_y + b.depth() * k / 3.0;
    out += fmt::format(
        "<line class=\"grid\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" stroke-width=\"0.3\" "
        "stroke-dasharray=\"2 2\"/>\n",
        num(x), num(-b.min_y), num(x), num(-b.max_y));
    out += fmt::format(
        "<line class=\"grid\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" stroke-width=\"0.3\" "
        "stroke-dasharray=\"2 2\"/>\n",
        num(b.min_x), num(-y), num(b.max_x), num(-y));
  }

  // Bases before the items stacked on them.
  std::vector<std::pair<int, const AssetSpec*>> order;
  for (const auto& a : scene.assets) {
    if (a.surface_index != surface_index || !scene.layout.contains(a.id)) continue;
    order.emplace_back(stack_depth(scene.layout, a.id), &a);
  }
  std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second->id < y.second->id;
  });

  for (const auto& [depth, asset] : order) {
    const AssetSpec& a = *asset;
    const Placement& p = scene.layout.at(a.id);
    const Rect r = footprint(a, p);
    const bool stacked = p.stack_base.has_value();
    const char* color = stacked ? kStackedColor : kFreeColor;
    const double theta = p.orientation.yaw_deg() * M_PI / 180.0;
    const double len = 0.4 * std::min(r.width(), r.depth());
    // Facing direction (-sin, -cos) in the furniture frame; y flips on screen.
    const double tx = p.x_cm - std::sin(theta) * len;
    const double ty = p.y_cm - std::cos(theta) * len;
    const double font = std::clamp(std::min(r.width(), r.depth()) / 4.0, 1.5, 4.0);

    out += fmt::format(
        "<g class=\"asset{}\" data-id=\"{}\" data-name=\"{}\" data-style=\"{}\" data-material=\"{}\" "
        "data-dims=\"{}x{}x{}\" data-yaw=\"{}\">\n",
        stacked ? " stacked" : "", escape(a.id), escape(a.name), escape(a.style), escape(a.material),
        num(a.width_cm), num(a.depth_cm), num(a.height_cm), p.orientation.yaw_deg());
    out += fmt::format("<title>{} ({}, {}) {} x {} x {} cm</title>\n", escape(a.name), escape(a.style),
                       escape(a.material), num(a.width_cm), num(a.depth_cm), num(a.height_cm));
    out += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"0.25\" stroke=\"{}\" "
        "stroke-width=\"0.4\"/>\n",
        num(r.min_x), num(-r.max_y), num(r.width()), num(r.depth()), color, color);
    out += fmt::format(
        "<line class=\"yaw\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#222222\" stroke-width=\"0.3\" "
        "marker-end=\"url(#arrow)\"/>\n",
        num(p.x_cm), num(-p.y_cm), num(tx), num(-ty));
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
        num(p.x_cm), num(-p.y_cm + font * 1.2), num(font), escape(a.name));
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace decor
