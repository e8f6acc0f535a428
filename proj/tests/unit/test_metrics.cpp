#include <doctest.h>

#include "decor/metrics.hpp"
#include "instances.hpp"

using namespace decor;

namespace {

AssetSpec asset(std::string id, double w, double d, double h) {
  AssetSpec a;
  a.id = a.name = std::move(id);
  a.width_cm = w;
  a.depth_cm = d;
  a.height_cm = h;
  return a;
}

DecorScene base_scene() {
  DecorScene s;
  s.furniture.surfaces.push_back(decor::testing::rect_surface(0, 0, 0, 100, 60));
  s.assets = {asset("a", 20, 20, 20), asset("b", 20, 20, 20)};
  s.layout["a"] = {20, 20, {}, std::nullopt, 75};
  s.layout["b"] = {60, 20, {}, std::nullopt, 75};
  return s;
}

}  // namespace

TEST_CASE("clean scenes score zero") {
  const std::vector<DecorScene> scenes{base_scene(), base_scene()};
  CHECK(oob_rate(scenes) == 0.0);
  CHECK(bbl(scenes) == 0.0);
  const auto report = metrics_report(scenes);
  CHECK(report["n_scenes"] == 2);
}

TEST_CASE("one scene pushed off the edge") {
  std::vector<DecorScene> scenes{base_scene(), base_scene()};
  scenes[1].layout["b"].x_cm = 95;
  CHECK(oob_rate(scenes) == 0.5);
  // Touching the edge exactly is inside at margin 0.
  scenes[1].layout["b"].x_cm = 90;
  CHECK(oob_rate(scenes) == 0.0);
}

TEST_CASE("stacked overhang counts as out of bounds") {
  DecorScene s = base_scene();
  s.assets.push_back(asset("lamp", 10, 10, 30));
  s.layout["lamp"] = {28, 20, {}, std::string("a"), 95};
  const std::vector<DecorScene> scenes{s};
  CHECK(oob_rate(scenes) == 1.0);
  s.layout["lamp"].x_cm = 25;
  CHECK(oob_rate(std::vector<DecorScene>{s}) == 0.0);
  // Exact z contact contributes nothing.
  CHECK(bbl(std::vector<DecorScene>{s}) == 0.0);
}

TEST_CASE("box intersection volume in cubic metres") {
  DecorScene s = base_scene();
  s.layout["b"].x_cm = 30;  // 10 cm overlap along x only
  CHECK(bbl(std::vector<DecorScene>{s}) == doctest::Approx(0.1 * 0.2 * 0.2).epsilon(1e-12));
  s.layout["b"].orientation = {true, false};  // square footprint, same volume
  CHECK(bbl(std::vector<DecorScene>{s}) == doctest::Approx(0.004));
  const std::vector<DecorScene> pair{s, base_scene()};
  CHECK(bbl(pair) == doctest::Approx(0.002));
}

TEST_CASE("missing placement and empty input") {
  DecorScene s = base_scene();
  s.layout.erase("b");
  CHECK(oob_rate(std::vector<DecorScene>{s}) == 1.0);
  CHECK_THROWS_AS(oob_rate(std::vector<DecorScene>{}), ValidationError);
  CHECK_THROWS_AS(bbl(std::vector<DecorScene>{}), ValidationError);
}
