#include "decor/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

namespace decor {

namespace bg = boost::geometry;

namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false, true>;
using BMultiPolygon = bg::model::multi_polygon<BPolygon>;

constexpr double kEps = 1e-9;
constexpr double kTouchEps = 1e-6;
constexpr double kSnap = 1e7;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view token, int line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("malformed number '" + std::string(token) + "'", line);
  }
  return value;
}

std::uint32_t parse_index(std::string_view token, std::size_t vertex_count, int line) {
  const auto slash = token.find('/');
  const std::string_view head = token.substr(0, slash);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), value);
  if (ec != std::errc{} || ptr != head.data() + head.size() || head.empty()) {
    throw ParseError("malformed face index '" + std::string(token) + "'", line);
  }
  if (value == 0) {
    throw ParseError("face index 0 is invalid (OBJ indices are 1-based)", line);
  }
  long long resolved = value > 0 ? value - 1 : static_cast<long long>(vertex_count) + value;
  if (resolved < 0 || resolved >= static_cast<long long>(vertex_count)) {
    throw ParseError("face index " + std::to_string(value) + " out of range", line);
  }
  return static_cast<std::uint32_t>(resolved);
}

// --- 2D triangle helpers ---

using Tri2 = std::array<Vec2, 3>;

double cross2(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool point_in_triangle(const Tri2& t, Vec2 p) {
  const double d0 = cross2(t[0], t[1], p);
  const double d1 = cross2(t[1], t[2], p);
  const double d2 = cross2(t[2], t[0], p);
  const double scale = std::abs(cross2(t[0], t[1], t[2]));
  const double eps = 1e-9 * std::max(1.0, scale);
  const bool has_neg = d0 < -eps || d1 < -eps || d2 < -eps;
  const bool has_pos = d0 > eps || d1 > eps || d2 > eps;
  return !(has_neg && has_pos);
}

// Separating-axis test; touching triangles count as intersecting.
bool triangles_touch(const Tri2& a, const Tri2& b) {
  auto separated_on = [](const Tri2& p, const Tri2& q, Vec2 e0, Vec2 e1) {
    const Vec2 axis{-(e1.y - e0.y), e1.x - e0.x};
    const double len = std::hypot(axis.x, axis.y);
    if (len < kEps) return false;
    double pmin = 1e300, pmax = -1e300, qmin = 1e300, qmax = -1e300;
    for (const auto& v : p) {
      const double d = (v.x * axis.x + v.y * axis.y) / len;
      pmin = std::min(pmin, d);
      pmax = std::max(pmax, d);
    }
    for (const auto& v : q) {
      const double d = (v.x * axis.x + v.y * axis.y) / len;
      qmin = std::min(qmin, d);
      qmax = std::max(qmax, d);
    }
    return pmax < qmin - kTouchEps || qmax < pmin - kTouchEps;
  };
  for (int i = 0; i < 3; ++i) {
    if (separated_on(a, b, a[i], a[(i + 1) % 3])) return false;
    if (separated_on(a, b, b[i], b[(i + 1) % 3])) return false;
  }
  return true;
}

Rect tri_bbox(const Tri2& t) {
  Rect r{t[0].x, t[0].y, t[0].x, t[0].y};
  for (const auto& v : t) {
    r.min_x = std::min(r.min_x, v.x);
    r.min_y = std::min(r.min_y, v.y);
    r.max_x = std::max(r.max_x, v.x);
    r.max_y = std::max(r.max_y, v.y);
  }
  return r;
}

struct UpTriangle {
  std::size_t source = 0;
  Tri2 xy;
  double z_min = 0.0;
  double z_max = 0.0;
  std::array<double, 3> z{};
  Rect box;
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Connected components of `members` (indices into `tris`) under XY contact
// with combined vertex-height spread within tolerance.
std::vector<std::vector<std::size_t>> connected_clusters(const std::vector<UpTriangle>& tris,
                                                         std::vector<std::size_t> members,
                                                         double tolerance) {
  std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
    if (tris[a].box.min_x != tris[b].box.min_x) return tris[a].box.min_x < tris[b].box.min_x;
    return a < b;
  });
  DisjointSet ds(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& ti = tris[members[i]];
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const auto& tj = tris[members[j]];
      if (tj.box.min_x > ti.box.max_x + kTouchEps) break;
      if (tj.box.min_y > ti.box.max_y + kTouchEps || tj.box.max_y < ti.box.min_y - kTouchEps) {
        continue;
      }
      const double spread = std::max(ti.z_max, tj.z_max) - std::min(ti.z_min, tj.z_min);
      if (spread > tolerance + kEps) continue;
      if (triangles_touch(ti.xy, tj.xy)) ds.unite(i, j);
    }
  }
  std::vector<std::vector<std::size_t>> groups(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) groups[ds.find(i)].push_back(members[i]);
  std::vector<std::vector<std::size_t>> out;
  for (auto& g : groups) {
    if (g.empty()) continue;
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double median_height(const std::vector<UpTriangle>& tris, const std::vector<std::size_t>& cluster) {
  std::vector<double> zs;
  zs.reserve(cluster.size() * 3);
  for (auto i : cluster) zs.insert(zs.end(), tris[i].z.begin(), tris[i].z.end());
  std::sort(zs.begin(), zs.end());
  const std::size_t n = zs.size();
  return n % 2 == 1 ? zs[n / 2] : 0.5 * (zs[n / 2 - 1] + zs[n / 2]);
}

bool within_median_band(const std::vector<UpTriangle>& tris, const std::vector<std::size_t>& cluster,
                        double tolerance) {
  const double med = median_height(tris, cluster);
  for (auto i : cluster) {
    for (double z : tris[i].z) {
      if (std::abs(z - med) > tolerance + kEps) return false;
    }
  }
  return true;
}

// Splits a cluster whose heights drift beyond the tolerance into horizontal
// bands anchored at the lowest remaining vertex height.
std::vector<std::vector<std::size_t>> split_into_bands(const std::vector<UpTriangle>& tris,
                                                       std::vector<std::size_t> cluster,
                                                       double tolerance) {
  std::sort(cluster.begin(), cluster.end(), [&](std::size_t a, std::size_t b) {
    if (tris[a].z_min != tris[b].z_min) return tris[a].z_min < tris[b].z_min;
    return a < b;
  });
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> remaining = std::move(cluster);
  while (!remaining.empty()) {
    const auto& seed = tris[remaining.front()];
    if (seed.z_max - seed.z_min > tolerance + kEps) {
      remaining.erase(remaining.begin());
      continue;
    }
    const double z0 = seed.z_min;
    std::vector<std::size_t> band;
    std::vector<std::size_t> rest;
    for (auto i : remaining) {
      if (tris[i].z_min >= z0 - kEps && tris[i].z_max <= z0 + tolerance + kEps) {
        band.push_back(i);
      } else {
        rest.push_back(i);
      }
    }
    for (auto& c : connected_clusters(tris, band, tolerance)) out.push_back(std::move(c));
    remaining = std::move(rest);
  }
  return out;
}

double snap(double v) { return std::round(v * kSnap) / kSnap; }

BMultiPolygon union_of_triangles(const std::vector<UpTriangle>& tris,
                                 const std::vector<std::size_t>& cluster) {
  std::vector<BMultiPolygon> parts;
  parts.reserve(cluster.size());
  for (auto i : cluster) {
    BPolygon poly;
    for (const auto& v : tris[i].xy) bg::append(poly.outer(), BPoint(snap(v.x), snap(v.y)));
    bg::append(poly.outer(), BPoint(snap(tris[i].xy[0].x), snap(tris[i].xy[0].y)));
    bg::correct(poly);
    if (bg::area(poly) <= 0.0) continue;
    parts.push_back(BMultiPolygon{poly});
  }
  while (parts.size() > 1) {
    std::vector<BMultiPolygon> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      BMultiPolygon merged;
      bg::union_(parts[i], parts[i + 1], merged);
      next.push_back(std::move(merged));
    }
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return parts.empty() ? BMultiPolygon{} : std::move(parts.front());
}

std::vector<Vec2> drop_collinear(std::vector<Vec2> ring) {
  bool changed = true;
  while (changed && ring.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < ring.size() && ring.size() > 3; ++i) {
      const Vec2 prev = ring[(i + ring.size() - 1) % ring.size()];
      const Vec2 next = ring[(i + 1) % ring.size()];
      const double len = std::hypot(next.x - prev.x, next.y - prev.y);
      if (std::abs(cross2(prev, ring[i], next)) <= 1e-9 * std::max(1.0, len)) {
        ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return ring;
}

}  // namespace

double overlap_area(const Rect& a, const Rect& b) {
  const double w = std::min(a.max_x, b.max_x) - std::max(a.min_x, b.min_x);
  const double d = std::min(a.max_y, b.max_y) - std::max(a.min_y, b.min_y);
  if (w <= 0.0 || d <= 0.0) return 0.0;
  return w * d;
}

double gap_distance(const Rect& a, const Rect& b) {
  const double dx = std::max({0.0, a.min_x - b.max_x, b.min_x - a.max_x});
  const double dy = std::max({0.0, a.min_y - b.max_y, b.min_y - a.max_y});
  return std::hypot(dx, dy);
}

double polygon_area(std::span<const Vec2> ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % ring.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

// --- OBJ ---

Mesh parse_obj(std::string_view text) {
  Mesh mesh;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    std::string_view line = trim(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = trim(line.substr(0, hash));
    }
    if (line.empty()) continue;
    const auto tokens = split_ws(line);
    if (tokens[0] == "v") {
      if (tokens.size() < 4) throw ParseError("vertex needs three coordinates", line_no);
      Vec3 v{parse_double(tokens[1], line_no), parse_double(tokens[2], line_no),
             parse_double(tokens[3], line_no)};
      if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
        throw ParseError("non-finite vertex coordinate", line_no);
      }
      mesh.vertices.push_back(v);
    } else if (tokens[0] == "f") {
      if (tokens.size() < 4) throw ParseError("face needs at least three vertices", line_no);
      std::vector<std::uint32_t> idx;
      idx.reserve(tokens.size() - 1);
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        idx.push_back(parse_index(tokens[i], mesh.vertices.size(), line_no));
      }
      for (std::size_t i = 1; i + 1 < idx.size(); ++i) {
        mesh.triangles.push_back({idx[0], idx[i], idx[i + 1]});
      }
    }
    // vt, vn, o, g, s, usemtl, mtllib, l, p: irrelevant for support extraction.
  }
  if (mesh.triangles.empty()) throw EmptyMeshError("mesh has no faces");
  return mesh;
}

Mesh load_mesh(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_obj(text);
}

Mesh load_mesh_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open mesh file " + path.string());
  return load_mesh(in);
}

std::string to_obj(const Mesh& mesh) {
  std::ostringstream out;
  out.precision(10);
  for (const auto& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  return out.str();
}

void validate_mesh(const Mesh& mesh) {
  if (mesh.triangles.empty()) throw EmptyMeshError("mesh has no triangles");
  for (const auto& v : mesh.vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
      throw ValidationError("mesh has non-finite vertex coordinates");
    }
  }
  for (const auto& t : mesh.triangles) {
    for (auto i : t) {
      if (i >= mesh.vertices.size()) throw ValidationError("triangle index out of range");
    }
  }
}

// --- occupancy grid ---

OccupancyGrid::OccupancyGrid(Vec2 origin, double resolution_cm, int cols, int rows,
                             std::vector<std::uint8_t> cells)
    : origin_(origin), resolution_cm_(resolution_cm), cols_(cols), rows_(rows),
      cells_(std::move(cells)) {
  if (resolution_cm_ <= 0.0 || cols_ <= 0 || rows_ <= 0 ||
      cells_.size() != static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_)) {
    throw ValidationError("occupancy grid dimensions do not match its cells");
  }
  const std::size_t stride = static_cast<std::size_t>(cols_) + 1;
  unsupported_prefix_.assign(stride * (static_cast<std::size_t>(rows_) + 1), 0);
  for (int r = 0; r < rows_; ++r) {
    std::uint32_t row_sum = 0;
    for (int c = 0; c < cols_; ++c) {
      const bool s = supported(c, r);
      supported_count_ += s ? 1 : 0;
      row_sum += s ? 0 : 1;
      unsupported_prefix_[(r + 1) * stride + c + 1] = unsupported_prefix_[r * stride + c + 1] + row_sum;
    }
  }
}

std::size_t OccupancyGrid::unsupported_in_range(int c0, int r0, int c1, int r1) const {
  const std::size_t stride = static_cast<std::size_t>(cols_) + 1;
  return unsupported_prefix_[(r1 + 1) * stride + c1 + 1] - unsupported_prefix_[r0 * stride + c1 + 1] -
         unsupported_prefix_[(r1 + 1) * stride + c0] + unsupported_prefix_[r0 * stride + c0];
}

std::size_t OccupancyGrid::unsupported_in(const Rect& rect) const {
  if (cols_ == 0) return 0;
  const double inv = 1.0 / resolution_cm_;
  const int c0 = std::max(0, static_cast<int>(std::ceil((rect.min_x - origin_.x) * inv - 0.5 - kEps)));
  const int c1 = std::min(cols_ - 1, static_cast<int>(std::floor((rect.max_x - origin_.x) * inv - 0.5 + kEps)));
  const int r0 = std::max(0, static_cast<int>(std::ceil((rect.min_y - origin_.y) * inv - 0.5 - kEps)));
  const int r1 = std::min(rows_ - 1, static_cast<int>(std::floor((rect.max_y - origin_.y) * inv - 0.5 + kEps)));
  if (c0 > c1 || r0 > r1) return 0;
  return unsupported_in_range(c0, r0, c1, r1);
}

bool OccupancyGrid::all_supported_in(const Rect& rect) const { return unsupported_in(rect) == 0; }

OccupancyGrid rasterize(std::span<const std::array<Vec2, 3>> triangles, const Rect& bbox,
                        double resolution_cm) {
  if (resolution_cm <= 0.0) throw ValidationError("grid resolution must be positive");
  const int cols = std::max(1, static_cast<int>(std::ceil(bbox.width() / resolution_cm - kEps)));
  const int rows = std::max(1, static_cast<int>(std::ceil(bbox.depth() / resolution_cm - kEps)));
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(cols) * rows, 0);
  const double inv = 1.0 / resolution_cm;
  for (const auto& t : triangles) {
    const Rect box = tri_bbox(t);
    const int c0 = std::max(0, static_cast<int>(std::ceil((box.min_x - bbox.min_x) * inv - 0.5 - kEps)));
    const int c1 = std::min(cols - 1, static_cast<int>(std::floor((box.max_x - bbox.min_x) * inv - 0.5 + kEps)));
    const int r0 = std::max(0, static_cast<int>(std::ceil((box.min_y - bbox.min_y) * inv - 0.5 - kEps)));
    const int r1 = std::min(rows - 1, static_cast<int>(std::floor((box.max_y - bbox.min_y) * inv - 0.5 + kEps)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        auto& cell = cells[static_cast<std::size_t>(r) * cols + c];
        if (cell) continue;
        const Vec2 p{bbox.min_x + (c + 0.5) * resolution_cm, bbox.min_y + (r + 0.5) * resolution_cm};
        if (point_in_triangle(t, p)) cell = 1;
      }
    }
  }
  return OccupancyGrid({bbox.min_x, bbox.min_y}, resolution_cm, cols, rows, std::move(cells));
}

bool footprint_contained(const Surface& surface, const Rect& rect) {
  if (rect.degenerate()) return false;
  if (!surface.bbox.contains(rect)) return false;
  return surface.grid.all_supported_in(rect);
}

// --- surface extraction ---

std::vector<Surface> extract_surfaces(const Mesh& mesh, const ExtractionOptions& options) {
  validate_mesh(mesh);
  if (!(options.height_tolerance_cm > 0.0)) {
    throw ValidationError("height tolerance must be positive");
  }
  const double cos_tilt = std::cos(options.max_tilt_deg * std::numbers::pi / 180.0);
  const double tol = options.height_tolerance_cm;

  std::vector<UpTriangle> up;
  struct DownFace {
    Rect box;
    double z_min;
  };
  std::vector<DownFace> down;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& idx = mesh.triangles[t];
    const Vec3& a = mesh.vertices[idx[0]];
    const Vec3& b = mesh.vertices[idx[1]];
    const Vec3& c = mesh.vertices[idx[2]];
    const Vec3 u{b.x - a.x, b.y - a.y, b.z - a.z};
    const Vec3 v{c.x - a.x, c.y - a.y, c.z - a.z};
    const Vec3 n{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
    const double len = std::sqrt(n.x * n.x + n.y * n.y + n.z * n.z);
    if (len < 1e-12) continue;
    const double nz = n.z / len;
    UpTriangle tri;
    tri.source = t;
    tri.xy = {Vec2{a.x, a.y}, Vec2{b.x, b.y}, Vec2{c.x, c.y}};
    tri.z = {a.z, b.z, c.z};
    tri.z_min = std::min({a.z, b.z, c.z});
    tri.z_max = std::max({a.z, b.z, c.z});
    tri.box = tri_bbox(tri.xy);
    if (nz >= cos_tilt) {
      up.push_back(tri);
    } else if (nz <= -cos_tilt) {
      down.push_back({tri.box, tri.z_min});
    }
  }

  std::vector<std::size_t> all(up.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::vector<std::size_t>> clusters;
  for (auto& component : connected_clusters(up, all, tol)) {
    if (within_median_band(up, component, tol)) {
      clusters.push_back(std::move(component));
    } else {
      for (auto& band : split_into_bands(up, std::move(component), tol)) {
        clusters.push_back(std::move(band));
      }
    }
  }

  std::vector<Surface> surfaces;
  for (const auto& cluster : clusters) {
    const BMultiPolygon merged = union_of_triangles(up, cluster);
    const double area = bg::area(merged);
    if (area < options.min_area_cm2) continue;

    const BPolygon* largest = nullptr;
    double largest_area = -1.0;
    for (const auto& poly : merged) {
      const double a = bg::area(poly);
      if (a > largest_area) {
        largest_area = a;
        largest = &poly;
      }
    }
    if (largest == nullptr) continue;

    Surface s;
    s.area_cm2 = area;
    std::vector<Vec2> ring;
    for (const auto& p : largest->outer()) ring.push_back({p.x(), p.y()});
    if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
    s.boundary = drop_collinear(std::move(ring));

    bg::model::box<BPoint> env;
    bg::envelope(merged, env);
    s.bbox = {env.min_corner().x(), env.min_corner().y(), env.max_corner().x(), env.max_corner().y()};

    double z_top = -1e300;
    std::vector<Tri2> flat;
    flat.reserve(cluster.size());
    for (auto i : cluster) {
      z_top = std::max(z_top, up[i].z_max);
      flat.push_back(up[i].xy);
    }
    s.height_cm = z_top;
    s.grid = rasterize(flat, s.bbox, options.grid_resolution_cm);

    for (const auto& face : down) {
      if (face.z_min <= s.height_cm + tol) continue;
      if (overlap_area(face.box, s.bbox) <= 0.0) continue;
      const double gap = face.z_min - s.height_cm;
      if (!s.clearance_cm || gap < *s.clearance_cm) s.clearance_cm = gap;
    }
    surfaces.push_back(std::move(s));
  }
  if (surfaces.empty()) throw NoSurfaceError("no supporting surface found in mesh");

  std::stable_sort(surfaces.begin(), surfaces.end(), [](const Surface& a, const Surface& b) {
    if (a.height_cm != b.height_cm) return a.height_cm < b.height_cm;
    return a.area_cm2 > b.area_cm2;
  });
  for (std::size_t i = 0; i < surfaces.size(); ++i) surfaces[i].index = static_cast<int>(i);
  return surfaces;
}

}  // namespace decor
