#include <doctest.h>

#include <filesystem>
#include <thread>

#include <json.hpp>

#include "decor/httplib.hpp"
#include "decor/scene_io.hpp"
#include "decor/service.hpp"
#include "furniture.hpp"

using namespace decor;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = DECOR_DATA_DIR;

struct Fixture {
  fs::path root;
  std::unique_ptr<DecorService> service;

  explicit Fixture(const std::string& name, std::shared_ptr<ChatClient> client = nullptr, int workers = 1) {
    root = fs::temp_directory_path() / ("decor_service_" + name);
    fs::remove_all(root);
    ServiceConfig config;
    config.store_root = root;
    config.mesh_root = kData / "furniture";
    config.client = client ? client : std::make_shared<RuleBasedStub>();
    config.catalog = std::make_shared<Catalog>(Catalog::load(kData / "catalog.json"));
    config.workers = workers;
    service = std::make_unique<DecorService>(std::move(config));
  }
  ~Fixture() {
    service.reset();
    fs::remove_all(root);
  }

  ServiceResponse call(std::string method, std::string path, std::string body = {},
                       std::map<std::string, std::string> query = {}) {
    return service->handle({std::move(method), std::move(path), std::move(query), std::move(body)});
  }

  std::string submit(const json& request) {
    const auto r = call("POST", "/jobs", request.dump());
    REQUIRE(r.status == 202);
    return json::parse(r.body)["job_id"];
  }
};

json body(const ServiceResponse& r) { return json::parse(r.body); }

}  // namespace

TEST_CASE("health, options and unknown routes") {
  Fixture f("basic");
  CHECK(f.call("GET", "/health").status == 200);
  CHECK(f.call("OPTIONS", "/jobs").status == 204);
  const auto r = f.call("GET", "/nowhere");
  CHECK(r.status == 404);
  CHECK(body(r)["error"]["type"] == "not_found");
  CHECK(f.call("GET", "/jobs/job-999999").status == 404);
  CHECK(f.call("GET", "/scenes/job-999999").status == 404);
  CHECK(f.call("GET", "/scenes/..%2F..").status == 404);
}

TEST_CASE("job submission validation") {
  Fixture f("validation");
  CHECK(f.call("POST", "/jobs", "not json").status == 400);
  CHECK(f.call("POST", "/jobs", R"({"prompt": "x"})").status == 400);
  CHECK(f.call("POST", "/jobs", R"({"mesh_ref": "missing.obj"})").status == 400);
  CHECK(f.call("POST", "/jobs", R"({"mesh_ref": "desk.obj", "n_assets": 0})").status == 400);
  CHECK(f.call("POST", "/jobs", R"({"mesh_ref": "desk.obj", "solver": {"bogus": 1}})").status == 400);
  CHECK(body(f.call("GET", "/jobs"))["jobs"].empty());
}

TEST_CASE("decorate, inspect and edit a scene") {
  Fixture f("flow");
  const std::string id = f.submit({{"mesh_ref", "desk_shelf.obj"}, {"prompt", "a calm study"}, {"n_assets", 10},
                                   {"seed", 5}});
  CHECK(id == "job-000001");
  f.service->wait_idle();

  const json job = body(f.call("GET", "/jobs/" + id));
  REQUIRE(job["status"] == "done");
  CHECK(job["revision"] == 0);
  CHECK(job["scene"]["assets"].size() == 10);
  CHECK(body(f.call("GET", "/jobs"))["jobs"].size() == 1);

  const json scene = body(f.call("GET", "/scenes/" + id));
  CHECK(scene["schema_version"] == kSceneSchemaVersion);
  CHECK(scene_violations(scene_from_json(scene)).empty());

  const json metrics = body(f.call("GET", "/scenes/" + id + "/metrics"));
  CHECK(metrics["oob_rate"] == 0.0);
  CHECK(metrics["bbl_m3"] == 0.0);
  CHECK(metrics["violations"].empty());

  const auto svg = f.call("GET", "/scenes/" + id + "/svg", "", {{"surface", "1"}});
  CHECK(svg.status == 200);
  CHECK(svg.content_type == "image/svg+xml");
  CHECK(svg.body.find("data-surface=\"1\"") != std::string::npos);
  CHECK(f.call("GET", "/scenes/" + id + "/svg", "", {{"surface", "9"}}).status == 400);
  CHECK(f.call("GET", "/scenes/" + id + "/svg", "", {{"surface", "x"}}).status == 400);

  // Structured edit.
  const std::string target = scene["assets"][0]["id"];
  const json ops = {{"ops", {{{"kind", "remove"}, {"target", target}}}}};
  auto r = f.call("POST", "/scenes/" + id + "/edits", ops.dump());
  REQUIRE(r.status == 200);
  CHECK(body(r)["revision"] == 1);
  CHECK(body(r)["scene"]["assets"].size() == 9);

  // Free-form edit through the edit stage.
  const std::string name = scene["assets"][1]["name"];
  r = f.call("POST", "/scenes/" + id + "/edits", json{{"instruction", "remove the " + name}}.dump());
  REQUIRE(r.status == 200);
  CHECK(body(r)["revision"] == 2);
  CHECK(body(r)["ops"][0]["kind"] == "remove");

  CHECK(body(f.call("GET", "/scenes/" + id + "/revisions"))["revisions"] == json{0, 1, 2});
  CHECK(body(f.call("GET", "/scenes/" + id + "/revisions/0")) == scene);
  CHECK(body(f.call("GET", "/scenes/" + id + "/revisions/2"))["assets"].size() == 8);
  CHECK(f.call("GET", "/scenes/" + id + "/revisions/7").status == 404);

  // Failures leave the stored scene alone.
  const std::string latest = f.call("GET", "/scenes/" + id).body;
  r = f.call("POST", "/scenes/" + id + "/edits", json{{"instruction", "remove the grand piano"}}.dump());
  CHECK(r.status == 422);
  CHECK(body(r)["error"]["type"] == "unresolvable_target");
  const std::string big = body(f.call("GET", "/scenes/" + id))["assets"][0]["id"];
  r = f.call("POST", "/scenes/" + id + "/edits",
             json{{"ops", {{{"kind", "resize"}, {"target", big},
                            {"dims", {{"width_cm", 500}, {"depth_cm", 20}, {"height_cm", 10}}}}}}}
                 .dump());
  CHECK(r.status == 409);
  CHECK(body(r)["error"]["type"] == "infeasible_edit");
  CHECK(f.call("POST", "/scenes/" + id + "/edits", R"({"ops": [{"kind": "remove", "target": "ghost"}]})").status ==
        400);
  CHECK(f.call("POST", "/scenes/" + id + "/edits", R"({})").status == 400);
  CHECK(f.call("GET", "/scenes/" + id).body == latest);
  CHECK(body(f.call("GET", "/scenes/" + id + "/revisions"))["revisions"].size() == 3);

  // Persisted files.
  const fs::path dir = f.root / id;
  for (const char* file : {"request.json", "status.json", "transcripts.jsonl", "scene.json", "metrics.json"}) {
    CHECK(fs::exists(dir / file));
  }
  CHECK(fs::exists(dir / "revisions" / "2.json"));
}

TEST_CASE("failed jobs report the stage") {
  auto stub = std::make_shared<ScriptedStub>(std::vector<std::string>(5, "I cannot help with that."));
  Fixture f("failed", stub);
  const std::string id = f.submit({{"mesh_ref", "desk.obj"}, {"n_assets", 3}});
  f.service->wait_idle();
  const json job = body(f.call("GET", "/jobs/" + id));
  CHECK(job["status"] == "failed");
  CHECK(job["error"]["type"] == "exhausted_retries");
  CHECK(job["error"]["stage"] == "select");
  CHECK(f.service->store().transcripts(id).size() == 15);
  CHECK(f.call("GET", "/scenes/" + id).status == 404);
}

TEST_CASE("inline mesh upload") {
  Fixture f("inline");
  const std::string obj = testing::MeshBuilder().box(0, 0, 0, 80, 40, 70).to_obj();
  const std::string id = f.submit({{"mesh_obj", obj}, {"n_assets", 3}, {"prompt", "plants"}});
  f.service->wait_idle();
  CHECK(body(f.call("GET", "/jobs/" + id))["status"] == "done");
  CHECK(fs::exists(f.root / id / "furniture.obj"));
  CHECK(f.call("POST", "/jobs", json{{"mesh_obj", "v 1 2\nf 1 2 9\n"}}.dump()).status == 400);
}

TEST_CASE("concurrent jobs and stable ids") {
  Fixture f("concurrent", nullptr, 3);
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(f.submit({{"mesh_ref", "nightstand.obj"}, {"n_assets", 4}, {"seed", 1}}));
  f.service->wait_idle();
  CHECK(ids == std::vector<std::string>{"job-000001", "job-000002", "job-000003", "job-000004"});
  // Same request, same scene.
  const std::string first = f.call("GET", "/scenes/" + ids[0]).body;
  for (const auto& id : ids) CHECK(f.call("GET", "/scenes/" + id).body == first);
}

TEST_CASE("error mapping") {
  CHECK(http_status_for(ValidationError("x")) == 400);
  CHECK(http_status_for(NoSurfaceError("x")) == 400);
  CHECK(http_status_for(InfeasibleError("a", "x")) == 409);
  CHECK(http_status_for(InfeasibleEditError("a", "x")) == 409);
  CHECK(http_status_for(UnresolvableTargetError("piano", "x")) == 422);
  CHECK(http_status_for(ExhaustedRetriesError(Stage::kPlan, 5, {}, {})) == 422);
  CHECK(http_status_for(TransportError("x")) == 502);
  CHECK(http_status_for(AuthError("x")) == 502);
  CHECK(http_status_for(std::runtime_error("x")) == 500);
}

TEST_CASE("real socket round trip") {
  Fixture f("socket");
  const int port = f.service->listen_in_background("127.0.0.1");
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(60, 0);

  auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  auto posted = client.Post("/jobs", R"({"mesh_ref": "desk.obj", "n_assets": 5, "seed": 2})", "application/json");
  REQUIRE(posted);
  CHECK(posted->status == 202);
  const std::string id = json::parse(posted->body)["job_id"];
  f.service->wait_idle();

  auto svg = client.Get("/scenes/" + id + "/svg?surface=0");
  REQUIRE(svg);
  CHECK(svg->status == 200);
  CHECK(svg->get_header_value("Content-Type").find("image/svg+xml") != std::string::npos);
  CHECK(svg->body.find("<svg") != std::string::npos);

  auto missing = client.Get("/scenes/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  f.service->stop();
}
