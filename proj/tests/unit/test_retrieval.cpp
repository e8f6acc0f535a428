#include <doctest.h>

#include <map>

#include "decor/retrieval.hpp"

using namespace decor;

namespace {

CatalogEntry entry(std::string id, std::string name, std::vector<std::string> tags = {}) {
  CatalogEntry e;
  e.id = std::move(id);
  e.name = std::move(name);
  e.tags = std::move(tags);
  e.dims_cm = {10, 10, 10};
  return e;
}

}  // namespace

TEST_CASE("tokenize lowercases and deduplicates") {
  CHECK(tokenize("Modern  wood, Desk-Lamp lamp") == std::vector<std::string>{"desk", "lamp", "modern", "wood"});
  CHECK(tokenize("").empty());
}

TEST_CASE("query string format") {
  AssetSpec a;
  a.name = "desk lamp";
  CHECK(retrieval_query(a) == "desk lamp");
  a.style = "Scandinavian";
  a.material = "wood";
  CHECK(retrieval_query(a) == "Scandinavian wood desk lamp");
}

TEST_CASE("token overlap score") {
  const Catalog catalog({entry("a", "desk lamp", {"light"}), entry("b", "table lamp"), entry("c", "vase")});
  const auto ranked = rank("modern desk lamp", catalog);
  REQUIRE(ranked.size() == 3);
  CHECK(catalog.entries()[ranked[0].index].id == "a");
  CHECK(ranked[0].score == doctest::Approx(2.0 / std::sqrt(9.0)));
  CHECK(ranked[1].score == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(ranked[2].score == 0.0);
  // Symmetric in query token order.
  const auto swapped = rank("lamp desk modern", catalog);
  for (std::size_t i = 0; i < ranked.size(); ++i) CHECK(swapped[i].score == ranked[i].score);
}

TEST_CASE("a unique match wins regardless of seed") {
  std::vector<CatalogEntry> entries;
  for (int i = 0; i < 20; ++i) entries.push_back(entry("e" + std::to_string(i), "plain box"));
  entries.push_back(entry("z", "sunflower vase"));
  const Catalog catalog(std::move(entries));
  for (std::uint64_t seed = 0; seed < 50; ++seed) CHECK(retrieve("vase of sunflower", catalog, 10, seed).id == "z");
}

TEST_CASE("zero-score entries are only used when nothing matches") {
  const Catalog catalog({entry("a", "mug"), entry("b", "book"), entry("c", "plant")});
  CHECK(top_k("mug", catalog, 10).size() == 1);
  CHECK(top_k("lamp", catalog, 10).size() == 3);
  CHECK(top_k("lamp", catalog, 2).size() == 2);
  CHECK_THROWS_AS(top_k("lamp", Catalog{}, 10), ValidationError);
}

TEST_CASE("uniform sampling over tied candidates") {
  const Catalog catalog({entry("a", "ceramic mug"), entry("b", "ceramic mug"), entry("c", "ceramic mug")});
  std::map<std::string, int> counts;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) ++counts[retrieve("ceramic mug", catalog, 10, seed).id];
  for (const auto& [id, n] : counts) CHECK(std::abs(n / 1000.0 - 1.0 / 3.0) <= 0.05);
  CHECK(counts.size() == 3);
}

TEST_CASE("chosen entry is always among the ten best") {
  std::vector<CatalogEntry> entries;
  const std::vector<std::string> words{"lamp", "wood", "modern", "desk", "metal", "glass", "vase", "round"};
  for (int i = 0; i < 25; ++i) {
    std::string name;
    for (int b = 0; b < 8; ++b) {
      if ((i * 7 + b * 3) % 5 < 2) name += words[b] + " ";
    }
    entries.push_back(entry(std::to_string(100 + i), name.empty() ? "thing" : name));
  }
  const Catalog catalog(std::move(entries));
  const auto ranked = rank("modern wood desk lamp", catalog);
  const double tenth = ranked[9].score;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto& chosen = retrieve("modern wood desk lamp", catalog, 10, seed);
    double score = -1;
    for (const auto& r : ranked) {
      if (catalog.entries()[r.index].id == chosen.id) score = r.score;
    }
    CHECK(score >= tenth);
  }
}

TEST_CASE("cosine similarity with embeddings") {
  auto e1 = entry("a", "x");
  e1.embedding = {1, 0};
  auto e2 = entry("b", "y");
  e2.embedding = {0.6, 0.8};
  Catalog catalog({e1, e2});
  CHECK(catalog.fully_embedded());
  catalog.set_query_embedding("q", {0, 1});
  auto ranked = rank("q", catalog);
  CHECK(catalog.entries()[ranked[0].index].id == "b");
  CHECK(ranked[0].score == doctest::Approx(0.8));
  // Unknown queries fall back to tokens.
  ranked = rank("x", catalog);
  CHECK(catalog.entries()[ranked[0].index].id == "a");
  CHECK_THROWS_AS(catalog.set_query_embedding("bad", {1, 1}), ValidationError);
  auto bad = entry("c", "z");
  bad.embedding = {0.5, 0.5};
  CHECK_THROWS_AS(Catalog({bad}), ValidationError);
}

TEST_CASE("catalog json and sidecar") {
  const auto j = nlohmann::json::parse(R"([
    {"id": "lamp-01", "name": "desk lamp", "tags": ["light"], "dims_cm": [15, 15, 40]},
    {"id": "mug-01", "name": "mug", "dims_cm": [8, 8, 10], "mesh": "mug.obj"}
  ])");
  const auto side = nlohmann::json::parse(R"({"entries": {"lamp-01": [1, 0], "mug-01": [0, 1]},
                                              "queries": {"coffee mug": [0, 1]}})");
  const Catalog c = Catalog::from_json(j, side);
  CHECK(c.entries().size() == 2);
  CHECK(c.find("mug-01")->mesh_ref == "mug.obj");
  CHECK(c.fully_embedded());
  CHECK(c.entries()[rank("coffee mug", c)[0].index].id == "mug-01");
  CHECK_THROWS_AS(Catalog::from_json(nlohmann::json::parse(R"([{"id": "x", "name": "x", "dims_cm": [0, 1, 1]}])")),
                  ValidationError);
  CHECK_THROWS_AS(Catalog::from_json(nlohmann::json::parse(R"([{"name": "x"}])")), ValidationError);
}

TEST_CASE("binding scales the entry box to the asset box") {
  AssetSpec a;
  a.width_cm = 30;
  a.depth_cm = 20;
  a.height_cm = 5;
  CatalogEntry e = entry("t", "tray");
  e.dims_cm = {60, 10, 5};
  const Binding b = bind(a, e);
  CHECK(b.entry_id == "t");
  CHECK(b.scale == std::array<double, 3>{0.5, 2.0, 1.0});
}
