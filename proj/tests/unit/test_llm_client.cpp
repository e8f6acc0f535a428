#include <doctest.h>

#include <deque>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "decor/agents.hpp"
#include "decor/llm_client.hpp"

using namespace decor;
using nlohmann::json;

namespace {

std::string completion_body(const std::string& content) {
  return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}, {"finish_reason", "stop"}}}},
              {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 3}}}}
      .dump();
}

class FakeTransport : public HttpTransport {
 public:
  explicit FakeTransport(std::deque<HttpResult> results) : results_(std::move(results)) {}

  HttpResult post(const std::string& url, const std::string& body, const std::map<std::string, std::string>& headers,
                  double) override {
    urls.push_back(url);
    bodies.push_back(body);
    last_headers = headers;
    if (results_.empty()) return {0, "", false, "connection refused"};
    HttpResult r = results_.front();
    results_.pop_front();
    return r;
  }

  std::vector<std::string> urls;
  std::vector<std::string> bodies;
  std::map<std::string, std::string> last_headers;

 private:
  std::deque<HttpResult> results_;
};

ChatRequest simple_request() {
  ChatRequest r;
  r.messages = {{"system", "be brief"}, {"user", "hello"}};
  return r;
}

struct Recorder {
  std::vector<double> sleeps;
  HttpChatClient::Sleeper sleeper() {
    return [this](double s) { sleeps.push_back(s); };
  }
};

}  // namespace

TEST_CASE("request validation") {
  ChatRequest r;
  CHECK_THROWS_AS(r.validate(), ValidationError);
  r = simple_request();
  r.timeout_s = 0;
  CHECK_THROWS_AS(r.validate(), ValidationError);
  r.timeout_s = 5;
  CHECK_NOTHROW(r.validate());
}

TEST_CASE("429 twice then 200 succeeds after two retries") {
  auto transport = std::make_unique<FakeTransport>(std::deque<HttpResult>{
      {429, "slow down"}, {429, "slow down"}, {200, completion_body("{\"ok\": true}")}});
  FakeTransport* raw = transport.get();
  Recorder rec;
  HttpChatClient client({"http://llm.local/v1", "sk-test", "gpt-4o", 3, 0.5}, std::move(transport), rec.sleeper());
  const ChatResponse r = client.complete(simple_request());
  CHECK(r.content == "{\"ok\": true}");
  CHECK(r.finish_reason == "stop");
  CHECK(r.prompt_tokens == 12);
  CHECK(r.completion_tokens == 3);
  CHECK(raw->urls.size() == 3);
  CHECK(raw->urls.front() == "http://llm.local/v1/chat/completions");
  CHECK(rec.sleeps == std::vector<double>{0.5, 1.0});
  CHECK(raw->last_headers.at("Authorization") == "Bearer sk-test");
}

TEST_CASE("unreachable backend raises a transport error after all attempts") {
  auto transport = std::make_unique<FakeTransport>(std::deque<HttpResult>{});
  FakeTransport* raw = transport.get();
  Recorder rec;
  HttpChatClient client({"http://llm.local/v1", "", "m", 3, 0.5}, std::move(transport), rec.sleeper());
  CHECK_THROWS_AS(client.complete(simple_request()), TransportError);
  CHECK(raw->urls.size() == 4);
  CHECK(rec.sleeps == std::vector<double>{0.5, 1.0, 2.0});
}

TEST_CASE("timeouts and auth failures") {
  SUBCASE("timeout on every attempt") {
    std::deque<HttpResult> r(4, HttpResult{0, "", true, "timed out"});
    Recorder rec;
    HttpChatClient client({"http://x/v1", "", "m", 3, 0.5}, std::make_unique<FakeTransport>(r), rec.sleeper());
    CHECK_THROWS_AS(client.complete(simple_request()), TimeoutError);
  }
  SUBCASE("401 is not retried") {
    auto transport = std::make_unique<FakeTransport>(std::deque<HttpResult>{{401, "bad key"}});
    FakeTransport* raw = transport.get();
    Recorder rec;
    HttpChatClient client({"http://x/v1", "", "m", 3, 0.5}, std::move(transport), rec.sleeper());
    CHECK_THROWS_AS(client.complete(simple_request()), AuthError);
    CHECK(raw->urls.size() == 1);
    CHECK(rec.sleeps.empty());
  }
  SUBCASE("400 is a backend error without retry") {
    auto transport = std::make_unique<FakeTransport>(std::deque<HttpResult>{{400, "bad"}});
    FakeTransport* raw = transport.get();
    Recorder rec;
    HttpChatClient client({"http://x/v1", "", "m", 3, 0.5}, std::move(transport), rec.sleeper());
    CHECK_THROWS_AS(client.complete(simple_request()), BackendError);
    CHECK(raw->urls.size() == 1);
  }
}

TEST_CASE("request body follows the chat-completions shape") {
  ChatRequest r = simple_request();
  r.seed = 7;
  r.temperature = 0.2;
  r.response_schema = response_schema(Stage::kPlan);
  const json body = json::parse(HttpChatClient::request_body(r, "gpt-4o"));
  CHECK(body["model"] == "gpt-4o");
  CHECK(body["messages"].size() == 2);
  CHECK(body["messages"][1]["content"] == "hello");
  CHECK(body["seed"] == 7);
  CHECK(body["temperature"] == doctest::Approx(0.2));
  CHECK(body["response_format"]["json_schema"]["name"] == "arrangement_plan");
  r.model = "local-model";
  CHECK(json::parse(HttpChatClient::request_body(r, "gpt-4o"))["model"] == "local-model");
}

TEST_CASE("malformed completions are backend errors") {
  CHECK_THROWS_AS(HttpChatClient::parse_response("not json"), BackendError);
  CHECK_THROWS_AS(HttpChatClient::parse_response("{\"choices\": []}"), BackendError);
  CHECK(HttpChatClient::parse_response(completion_body("hi")).content == "hi");
}

TEST_CASE("scripted stub replays replies verbatim and in order") {
  const std::string fixed = "{\"assets\": [ {\"name\": \"lamp\"} ]}\n";
  ScriptedStub stub({fixed, "second"});
  CHECK(stub.complete(simple_request()).content == fixed);
  CHECK(stub.calls() == 1);
  CHECK(stub.remaining() == 1);
  CHECK(stub.complete(simple_request()).content == "second");
  CHECK_THROWS_AS(stub.complete(simple_request()), BackendError);
}

TEST_CASE("scripted stub loads numbered files in name order") {
  const auto dir = std::filesystem::temp_directory_path() / "decor_scripted_stub_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "002.json") << "two";
  std::ofstream(dir / "001.json") << "one";
  std::ofstream(dir / "010.json") << "ten";
  auto stub = ScriptedStub::from_directory(dir);
  CHECK(stub->complete(simple_request()).content == "one");
  CHECK(stub->complete(simple_request()).content == "two");
  CHECK(stub->complete(simple_request()).content == "ten");
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(ScriptedStub::from_directory(dir), ValidationError);
}

TEST_CASE("rule-based stub is deterministic") {
  RuleBasedStub a;
  RuleBasedStub b;
  StageContext ctx;
  ctx.prompt = "a cozy reading desk";
  ctx.n_assets = 4;
  ctx.surfaces = {{0, 7200.0, 75.0, 120.0, 60.0, std::nullopt, {{0, 0}, {120, 0}, {120, 60}, {0, 60}}}};
  ChatRequest r;
  r.messages = {{"system", system_prompt(Stage::kSelect)}, {"user", user_message(Stage::kSelect, ctx)}};
  r.response_schema = response_schema(Stage::kSelect);
  CHECK(a.complete(r).content == b.complete(r).content);
  CHECK(a.complete(r).content == a.complete(r).content);
}

TEST_CASE("fault injector matches its rate and only corrupts whole replies") {
  RuleBasedStub inner;
  FaultInjectingStub faulty(inner, 0.3, 42);
  StageContext ctx;
  ctx.prompt = "desk";
  ctx.n_assets = 2;
  ctx.surfaces = {{0, 7200.0, 75.0, 120.0, 60.0, std::nullopt, {{0, 0}, {120, 0}, {120, 60}, {0, 60}}}};
  ChatRequest r;
  r.messages = {{"user", user_message(Stage::kSelect, ctx)}};
  r.response_schema = response_schema(Stage::kSelect);
  const std::string good = inner.complete(r).content;
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string out = faulty.complete(r).content;
    if (out != good) {
      ++bad;
      CHECK_FALSE(parse_asset_proposal(out).report.ok());
    }
  }
  CHECK(bad == static_cast<int>(faulty.faults()));
  CHECK(bad >= 250);
  CHECK(bad <= 350);
  CHECK_THROWS_AS(FaultInjectingStub(inner, 1.5, 0), ValidationError);
}

TEST_CASE("stable hash is FNV-1a") {
  // Reference values of 64-bit FNV-1a.
  CHECK(stable_hash("") == 0xcbf29ce484222325ULL);
  CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(stable_hash("a", 1) != stable_hash("a", 2));
}
