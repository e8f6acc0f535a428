#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "decor/pipeline.hpp"
#include "decor/scene_io.hpp"
#include "instances.hpp"

using namespace decor;

namespace {

const std::filesystem::path kGolden = std::filesystem::path(DECOR_TEST_DATA_DIR) / "golden" / "lamp_on_box.svg";

AssetSpec asset(std::string id, std::string name, double w, double d, double h) {
  return {std::move(id), std::move(name), w, d, h, 0, "Modern", "wood"};
}

// 90 x 60 desk: a box with a lamp on top, a book turned a quarter, and an
// ampersand in a name to exercise escaping.
DecorScene fixture() {
  DecorScene scene;
  scene.furniture.mesh_ref = "fixture.obj";
  scene.furniture.surfaces = {testing::rect_surface(0, 0, 0, 90, 60), testing::rect_surface(1, 0, 0, 40, 20, 110)};
  scene.assets = {asset("box_1", "box", 30, 20, 10), asset("lamp_1", "desk lamp", 12, 12, 35),
                  asset("book_1", "book & pen", 20, 10, 3)};
  scene.layout["box_1"] = {20, 15, Orientation{}, std::nullopt, 75};
  scene.layout["lamp_1"] = {22, 16, Orientation{}, std::string("box_1"), 85};
  scene.layout["book_1"] = {70, 40, Orientation::from_yaw(90), std::nullopt, 75};
  return scene;
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("golden file") {
  const std::string svg = export_svg(fixture(), 0);
  if (std::getenv("DECOR_UPDATE_GOLDEN") != nullptr) {
    std::filesystem::create_directories(kGolden.parent_path());
    write_file_atomic(kGolden, svg);
  }
  REQUIRE(std::filesystem::exists(kGolden));
  CHECK(svg == read_file(kGolden));
  CHECK(export_svg(fixture(), 0) == svg);
}

TEST_CASE("drawing conventions") {
  const std::string svg = export_svg(fixture(), 0);
  // 1 unit = 1 cm with a 5 cm margin; +y is flipped to screen coordinates.
  CHECK(svg.find("viewBox=\"-5.00 -65.00 100.00 70.00\"") != std::string::npos);
  CHECK(svg.find("points=\"90.00,-60.00 0.00,-60.00 0.00,0.00 90.00,0.00\"") != std::string::npos);
  // Two vertical and two horizontal grid lines at thirds.
  CHECK(count(svg, "class=\"grid\"") == 4);
  CHECK(svg.find("x1=\"30.00\" y1=\"0.00\" x2=\"30.00\" y2=\"-60.00\"") != std::string::npos);
  CHECK(svg.find("x1=\"0.00\" y1=\"-40.00\" x2=\"90.00\" y2=\"-40.00\"") != std::string::npos);
  CHECK(count(svg, "<rect ") == 3);

  // Box footprint [5, 35] x [5, 25] drawn from its top-left corner.
  CHECK(svg.find("<rect x=\"5.00\" y=\"-25.00\" width=\"30.00\" height=\"20.00\" fill=\"#1f77b4\"") !=
        std::string::npos);
  // Lamp is stacked: red, and inside the box rectangle.
  CHECK(svg.find("<rect x=\"16.00\" y=\"-22.00\" width=\"12.00\" height=\"12.00\" fill=\"#d62728\"") !=
        std::string::npos);
  CHECK(count(svg, "class=\"asset stacked\"") == 1);
  // Quarter-turned book swaps its extents: 10 wide, 20 deep around (70, 40).
  CHECK(svg.find("<rect x=\"65.00\" y=\"-50.00\" width=\"10.00\" height=\"20.00\"") != std::string::npos);
  // Yaw 90 faces -x: arrow from (70, 40) toward (66, 40).
  CHECK(svg.find("x1=\"70.00\" y1=\"-40.00\" x2=\"66.00\" y2=\"-40.00\"") != std::string::npos);
  // Yaw 0 faces -y (the front), i.e. down on screen.
  CHECK(svg.find("x1=\"20.00\" y1=\"-15.00\" x2=\"20.00\" y2=\"-7.00\"") != std::string::npos);
  CHECK(svg.find("book &amp; pen") != std::string::npos);
  CHECK(svg.find("book & pen") == std::string::npos);

  // Base first, then what sits on it.
  CHECK(svg.find("data-id=\"box_1\"") < svg.find("data-id=\"lamp_1\""));
}

TEST_CASE("empty surface has only the boundary and grid") {
  const std::string svg = export_svg(fixture(), 1);
  CHECK(count(svg, "<polygon") == 1);
  CHECK(count(svg, "class=\"grid\"") == 4);
  CHECK(count(svg, "<rect ") == 0);
  CHECK(count(svg, "<g class=\"asset") == 0);
  CHECK(svg.find("surface 1 at 110.00 cm") != std::string::npos);
}

TEST_CASE("bad surface index") {
  CHECK_THROWS_AS(export_svg(fixture(), 7), OutOfBoundsError);
}
