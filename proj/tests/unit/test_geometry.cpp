#include <doctest.h>

#include <random>
#include <sstream>

#include "decor/geometry.hpp"
#include "furniture.hpp"

using namespace decor;
using decor::testing::MeshBuilder;

namespace {

constexpr const char* kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
)";

Surface full_square_surface(double size) {
  MeshBuilder b;
  b.box(0, 0, 0, size, size, 1);
  return extract_surfaces(b.mesh()).front();
}

}  // namespace

TEST_CASE("parse_obj reads a triangulated cube") {
  const Mesh m = parse_obj(kCubeObj);
  CHECK(m.vertices.size() == 8);
  CHECK(m.triangles.size() == 12);
}

TEST_CASE("parse_obj fan-triangulates polygons") {
  const Mesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  REQUIRE(m.triangles.size() == 2);
  CHECK(m.triangles[0] == std::array<std::uint32_t, 3>{0, 1, 2});
  CHECK(m.triangles[1] == std::array<std::uint32_t, 3>{0, 2, 3});
}

TEST_CASE("parse_obj accepts slashes and negative indices") {
  const Mesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf -3//1 -2//1 -1//1\n");
  REQUIRE(m.triangles.size() == 1);
  CHECK(m.triangles[0] == std::array<std::uint32_t, 3>{0, 1, 2});
}

TEST_CASE("parse_obj rejects bad indices and empty meshes") {
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n"), ParseError);
  CHECK_THROWS_AS(parse_obj("v 0 0 x\n"), ParseError);
  CHECK_THROWS_AS(parse_obj("v 0 0 0\n"), EmptyMeshError);
  try {
    parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 0\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
}

TEST_CASE("load_mesh reads from a stream") {
  std::istringstream in(kCubeObj);
  CHECK(load_mesh(in).triangles.size() == 12);
}

TEST_CASE("rect helpers") {
  const Rect a{0, 0, 10, 10};
  const Rect b{5, 5, 15, 15};
  CHECK(overlap_area(a, b) == doctest::Approx(25.0));
  CHECK(overlap_area(a, Rect{10, 0, 20, 10}) == 0.0);
  CHECK(gap_distance(a, Rect{13, 14, 20, 20}) == doctest::Approx(5.0));
  CHECK(gap_distance(a, Rect{10, 0, 20, 10}) == 0.0);
  CHECK(gap_distance(a, b) == 0.0);
}

TEST_CASE("flat desk yields one 120 x 60 surface at 75 cm") {
  const auto surfaces = extract_surfaces(decor::testing::flat_desk());
  REQUIRE(surfaces.size() == 1);
  const Surface& s = surfaces.front();
  CHECK(s.index == 0);
  CHECK(s.height_cm == 75.0);
  CHECK(s.area_cm2 == doctest::Approx(7200.0).epsilon(1e-9));
  CHECK(s.bbox == Rect{0, 0, 120, 60});
  CHECK(s.boundary.size() == 4);
  CHECK(polygon_area(s.boundary) == doctest::Approx(7200.0));
  CHECK(s.grid.cols() == 120);
  CHECK(s.grid.rows() == 60);
  CHECK(s.grid.supported_count() == 7200);
  CHECK_FALSE(s.clearance_cm.has_value());
}

TEST_CASE("desk with shelf yields two surfaces") {
  const auto surfaces = extract_surfaces(decor::testing::desk_with_shelf());
  REQUIRE(surfaces.size() == 2);
  CHECK(surfaces[0].height_cm == 75.0);
  CHECK(surfaces[1].height_cm == 110.0);
  CHECK(surfaces[0].area_cm2 == doctest::Approx(7200.0).epsilon(0.01));
  CHECK(surfaces[1].area_cm2 == doctest::Approx(1600.0).epsilon(0.01));
  REQUIRE(surfaces[0].clearance_cm.has_value());
  CHECK(*surfaces[0].clearance_cm == doctest::Approx(32.0));
}

TEST_CASE("height tolerance merges shallow relief and splits deeper relief") {
  const auto shallow = extract_surfaces(decor::testing::rugged_table(1.5));
  REQUIRE(shallow.size() == 1);
  CHECK(shallow[0].height_cm == 76.5);
  CHECK(shallow[0].area_cm2 == doctest::Approx(6000.0));

  const auto deep = extract_surfaces(decor::testing::rugged_table(2.5));
  REQUIRE(deep.size() == 2);
  CHECK(deep[0].height_cm == 75.0);
  CHECK(deep[0].area_cm2 == doctest::Approx(6000.0));
  CHECK(deep[1].height_cm == 77.5);
  CHECK(deep[1].area_cm2 == doctest::Approx(1000.0));
}

TEST_CASE("tolerance option controls the merge") {
  ExtractionOptions opts;
  opts.height_tolerance_cm = 1.0;
  CHECK(extract_surfaces(decor::testing::rugged_table(1.5), opts).size() == 2);
  opts.height_tolerance_cm = 0.0;
  CHECK_THROWS_AS(extract_surfaces(decor::testing::flat_desk(), opts), ValidationError);
}

TEST_CASE("small fragments are discarded and no-surface is reported") {
  MeshBuilder b;
  b.box(0, 0, 0, 5, 5, 40);  // 25 cm^2 top
  CHECK_THROWS_AS(extract_surfaces(b.mesh()), NoSurfaceError);
  ExtractionOptions opts;
  opts.min_area_cm2 = 10.0;
  CHECK(extract_surfaces(b.mesh(), opts).size() == 1);
}

TEST_CASE("sloped faces beyond 15 degrees are not supporting") {
  Mesh m;
  // 20 degree ramp, 100 x 100 in plan.
  const double rise = 100.0 * std::tan(20.0 * 3.14159265358979 / 180.0);
  m.vertices = {{0, 0, 0}, {100, 0, 0}, {100, 100, rise}, {0, 100, rise}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  CHECK_THROWS_AS(extract_surfaces(m), NoSurfaceError);
}

TEST_CASE("surfaces are sorted by height then area") {
  MeshBuilder b;
  b.box(0, 0, 0, 20, 20, 50).box(100, 0, 0, 150, 50, 50).box(300, 0, 0, 320, 20, 30);
  const auto surfaces = extract_surfaces(b.mesh());
  REQUIRE(surfaces.size() == 3);
  CHECK(surfaces[0].height_cm == 30.0);
  CHECK(surfaces[1].area_cm2 == doctest::Approx(2500.0));
  CHECK(surfaces[2].area_cm2 == doctest::Approx(400.0));
  for (int i = 0; i < 3; ++i) CHECK(surfaces[i].index == i);
}

TEST_CASE("u-shaped console keeps its notch in the grid") {
  const auto surfaces = extract_surfaces(decor::testing::u_console());
  REQUIRE(surfaces.size() == 1);
  const Surface& s = surfaces.front();
  CHECK(s.area_cm2 == doctest::Approx(3200.0));
  CHECK(polygon_area(s.boundary) == doctest::Approx(3200.0));
  CHECK(s.boundary.size() == 8);
  CHECK(s.grid.supported_count() == 3200);
}

TEST_CASE("polygon area of octagon top matches closed form") {
  const auto surfaces = extract_surfaces(decor::testing::regular_polygon_table(8, 35, 60));
  REQUIRE(surfaces.size() == 1);
  const double exact = 0.5 * 8 * 35 * 35 * std::sin(2 * 3.14159265358979323846 / 8);
  CHECK(surfaces[0].area_cm2 == doctest::Approx(exact).epsilon(1e-6));
  const double raster = static_cast<double>(surfaces[0].grid.supported_count());
  CHECK(std::abs(raster - exact) / exact < 0.02);
}

TEST_CASE("footprint_contained basics") {
  const Surface s = full_square_surface(100);
  CHECK(footprint_contained(s, Rect::centered(50, 50, 10, 10)));
  CHECK_FALSE(footprint_contained(s, Rect{91, 40, 101, 50}));
  CHECK(footprint_contained(s, Rect{90, 40, 100, 50}));
  CHECK_FALSE(footprint_contained(s, Rect{10, 10, 10, 20}));
}

TEST_CASE("footprint_contained matches exact containment on the u-shape") {
  const Surface s = extract_surfaces(decor::testing::u_console()).front();
  const Rect notch{30, 0, 70, 20};
  CHECK_FALSE(footprint_contained(s, Rect::centered(50, 15, 10, 10)));
  CHECK(footprint_contained(s, Rect::centered(50, 30, 10, 10)));
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coord(0, 100);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    int x0 = coord(rng), x1 = coord(rng), y0 = coord(rng) * 4 / 10, y1 = coord(rng) * 4 / 10;
    if (x0 == x1 || y0 == y1) continue;
    const Rect r{static_cast<double>(std::min(x0, x1)), static_cast<double>(std::min(y0, y1)),
                 static_cast<double>(std::max(x0, x1)), static_cast<double>(std::max(y0, y1))};
    const bool exact = s.bbox.contains(r) && overlap_area(r, notch) == 0.0;
    CHECK(footprint_contained(s, r) == exact);
    ++checked;
  }
  CHECK(checked > 4000);
}

TEST_CASE("containment is monotone under shrinking and finer grids") {
  const Mesh mesh = decor::testing::regular_polygon_table(8, 35, 60);
  const Surface coarse = extract_surfaces(mesh).front();
  ExtractionOptions fine_opts;
  fine_opts.grid_resolution_cm = 0.5;
  const Surface fine = extract_surfaces(mesh, fine_opts).front();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> c(-30, 30), half(1, 25);
  for (int i = 0; i < 2000; ++i) {
    const Rect r = Rect::centered(c(rng), c(rng), 2 * half(rng), 2 * half(rng));
    if (!footprint_contained(coarse, r)) continue;
    CHECK(footprint_contained(coarse, Rect::centered(r.center().x, r.center().y, r.width() * 0.7, r.depth() * 0.5)));
    // One cell of clearance: 1 cm inflation still contained in the coarse grid.
    if (footprint_contained(coarse, r.inflated(1.0))) CHECK(footprint_contained(fine, r));
  }
}

TEST_CASE("extraction is deterministic from identical bytes") {
  const std::string obj = MeshBuilder().box(0, 0, 0, 50, 30, 20).box(0, 0, 20, 40, 30, 25).to_obj();
  const auto a = extract_surfaces(parse_obj(obj));
  const auto b = extract_surfaces(parse_obj(obj));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].boundary == b[i].boundary);
    CHECK(a[i].area_cm2 == b[i].area_cm2);
    CHECK(a[i].grid.cells() == b[i].grid.cells());
  }
}

TEST_CASE("fixture set surfaces satisfy the surface invariants") {
  for (const auto& f : decor::testing::furniture_set()) {
    CAPTURE(f.name);
    const auto surfaces = extract_surfaces(f.mesh);
    REQUIRE_FALSE(surfaces.empty());
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      const Surface& s = surfaces[i];
      CHECK(s.area_cm2 > 0.0);
      CHECK(std::abs(polygon_area(s.boundary) - s.area_cm2) / s.area_cm2 < 0.005);
      const double raster = static_cast<double>(s.grid.supported_count()) * s.grid.cell_area();
      CHECK(std::abs(raster - s.area_cm2) / s.area_cm2 < 0.02);
      for (std::size_t j = i + 1; j < surfaces.size(); ++j) {
        CHECK(std::abs(surfaces[j].height_cm - s.height_cm) > 2.0);
      }
    }
  }
}
