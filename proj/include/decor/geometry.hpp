#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "decor/errors.hpp"

namespace decor {

// Units are centimeters throughout. Furniture meshes are Z-up and face -Y.

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Axis-aligned rectangle in the furniture XY plane.
struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  static Rect centered(double cx, double cy, double width, double depth) {
    return {cx - width / 2.0, cy - depth / 2.0, cx + width / 2.0, cy + depth / 2.0};
  }

  double width() const { return max_x - min_x; }
  double depth() const { return max_y - min_y; }
  double area() const { return width() * depth(); }
  Vec2 center() const { return {(min_x + max_x) / 2.0, (min_y + max_y) / 2.0}; }
  bool degenerate() const { return !(width() > 0.0) || !(depth() > 0.0); }

  Rect inflated(double margin) const {
    return {min_x - margin, min_y - margin, max_x + margin, max_y + margin};
  }
  Rect translated(double dx, double dy) const {
    return {min_x + dx, min_y + dy, max_x + dx, max_y + dy};
  }
  bool contains(const Rect& other, double eps = 1e-9) const {
    return other.min_x >= min_x - eps && other.max_x <= max_x + eps &&
           other.min_y >= min_y - eps && other.max_y <= max_y + eps;
  }
  bool contains(Vec2 p, double eps = 1e-9) const {
    return p.x >= min_x - eps && p.x <= max_x + eps && p.y >= min_y - eps && p.y <= max_y + eps;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Area of the intersection of two closed rectangles (0 when they only touch).
double overlap_area(const Rect& a, const Rect& b);

/// Minimum boundary-to-boundary distance; 0 when touching or overlapping.
double gap_distance(const Rect& a, const Rect& b);

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

/// Parses Wavefront OBJ text. Only `v` and `f` records matter; faces with
/// more than three corners are fan-triangulated. Indices are 1-based
/// (negative indices count back from the last vertex).
Mesh parse_obj(std::string_view text);
Mesh load_mesh(std::istream& in);
Mesh load_mesh_file(const std::filesystem::path& path);
/// Wavefront OBJ text with `v` and `f` records only.
std::string to_obj(const Mesh& mesh);

/// Checks index ranges and coordinate finiteness; throws ValidationError.
void validate_mesh(const Mesh& mesh);

/// Raster of supported cells over a surface bounding box. Cell (c, r) has its
/// center at origin + ((c + 0.5) * resolution, (r + 0.5) * resolution).
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(Vec2 origin, double resolution_cm, int cols, int rows,
                std::vector<std::uint8_t> cells);

  Vec2 origin() const { return origin_; }
  double resolution_cm() const { return resolution_cm_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double cell_area() const { return resolution_cm_ * resolution_cm_; }
  bool supported(int col, int row) const {
    return cells_[static_cast<std::size_t>(row) * cols_ + col] != 0;
  }
  std::size_t supported_count() const { return supported_count_; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  /// True iff every cell whose center lies in the closed rectangle is supported.
  bool all_supported_in(const Rect& rect) const;

  /// Number of unsupported cells whose centers lie in the closed rectangle.
  std::size_t unsupported_in(const Rect& rect) const;

 private:
  std::size_t unsupported_in_range(int c0, int r0, int c1, int r1) const;

  Vec2 origin_;
  double resolution_cm_ = 1.0;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<std::uint8_t> cells_;
  // (rows + 1) x (cols + 1) summed-area table of unsupported cells.
  std::vector<std::uint32_t> unsupported_prefix_;
  std::size_t supported_count_ = 0;
};

struct Surface {
  int index = 0;
  double height_cm = 0.0;
  std::vector<Vec2> boundary;  // outer ring, counter-clockwise, not closed
  double area_cm2 = 0.0;
  Rect bbox;
  OccupancyGrid grid;
  // Distance from the support plane to the lowest downward-facing geometry
  // hanging over the surface; empty when nothing is above it.
  std::optional<double> clearance_cm;
};

struct ExtractionOptions {
  double height_tolerance_cm = 2.0;
  double min_area_cm2 = 100.0;
  double grid_resolution_cm = 1.0;
  double max_tilt_deg = 15.0;
};

/// Finds horizontal supporting surfaces. Result is sorted by height ascending,
/// then area descending, and indexed in that order. Throws NoSurfaceError.
std::vector<Surface> extract_surfaces(const Mesh& mesh, const ExtractionOptions& options = {});

/// Rasterizes the given XY triangles into a grid covering `bbox`.
OccupancyGrid rasterize(std::span<const std::array<Vec2, 3>> triangles, const Rect& bbox,
                        double resolution_cm);

/// Containment test against the surface's occupancy grid and bounding box.
bool footprint_contained(const Surface& surface, const Rect& rect);

double polygon_area(std::span<const Vec2> ring);

}  // namespace decor
