#include <chrono>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "decor/httplib.hpp"

#include "decor/llm_client.hpp"

namespace decor {

namespace {

class HttplibTransport : public HttpTransport {
 public:
  HttpResult post(const std::string& url, const std::string& body,
                  const std::map<std::string, std::string>& headers, double timeout_s) override {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ValidationError("endpoint URL needs a scheme: " + url);
    const auto path_start = url.find('/', scheme + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    if (!client.is_valid()) throw ValidationError("unsupported endpoint URL: " + url);
    const auto seconds = static_cast<time_t>(timeout_s);
    const auto micros = static_cast<time_t>((timeout_s - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);

    HttpResult result;
    auto res = client.Post(path, h, body, "application/json");
    if (!res) {
      const auto err = res.error();
      result.timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      result.error = httplib::to_string(err);
      return result;
    }
    result.status = res->status;
    result.body = res->body;
    return result;
  }
};

bool retryable(const HttpResult& r) { return r.status == 0 || r.status == 429 || r.status >= 500; }

}  // namespace

void ChatRequest::validate() const {
  if (messages.empty()) throw ValidationError("chat request has no messages");
  if (!(timeout_s > 0.0)) throw ValidationError("chat request timeout must be positive");
}

std::unique_ptr<HttpTransport> make_default_transport() { return std::make_unique<HttplibTransport>(); }

HttpClientConfig HttpClientConfig::from_env() {
  HttpClientConfig c;
  if (const char* v = std::getenv("DECOR_LLM_ENDPOINT")) c.endpoint = v;
  if (const char* v = std::getenv("DECOR_LLM_API_KEY")) c.api_key = v;
  if (const char* v = std::getenv("DECOR_LLM_MODEL"); v != nullptr && *v != '\0') c.model = v;
  return c;
}

HttpChatClient::HttpChatClient(HttpClientConfig config, std::unique_ptr<HttpTransport> transport,
                               Sleeper sleeper)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : make_default_transport()),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](double s) {
        std::this_thread::sleep_for(std::chrono::duration<double>(s));
      })) {
  if (config_.endpoint.empty()) throw ValidationError("LLM endpoint is not configured");
  if (config_.max_retries < 0) throw ValidationError("max_retries must be non-negative");
}

std::string HttpChatClient::request_body(const ChatRequest& request, const std::string& default_model) {
  nlohmann::json body;
  body["model"] = request.model.empty() ? default_model : request.model;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  body["temperature"] = request.temperature;
  if (request.seed) body["seed"] = *request.seed;
  if (!request.response_schema.empty()) {
    const auto schema = nlohmann::json::parse(request.response_schema, nullptr, false);
    if (schema.is_discarded()) throw ValidationError("response schema is not valid JSON");
    body["response_format"] = {{"type", "json_schema"},
                               {"json_schema",
                                {{"name", schema.value("title", std::string("response"))},
                                 {"schema", schema}}}};
  }
  return body.dump();
}

ChatResponse HttpChatClient::parse_response(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw BackendError("backend returned non-JSON body");
  try {
    const auto& choice = j.at("choices").at(0);
    ChatResponse r;
    const auto& content = choice.at("message").at("content");
    r.content = content.is_string() ? content.get<std::string>() : std::string();
    r.finish_reason = choice.value("finish_reason", std::string());
    if (j.contains("usage") && j["usage"].is_object()) {
      r.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      r.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    if (r.content.empty()) throw BackendError("backend returned an empty completion");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("unexpected completion payload: ") + e.what());
  }
}

ChatResponse HttpChatClient::complete(const ChatRequest& request) {
  request.validate();
  const std::string body = request_body(request, config_.model);
  std::string url = config_.endpoint;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;

  HttpResult last;
  for (int attempt = 0;; ++attempt) {
    last = transport_->post(url, body, headers, request.timeout_s);
    if (last.status == 401 || last.status == 403) {
      throw AuthError("backend rejected credentials (HTTP " + std::to_string(last.status) + ")");
    }
    if (last.status >= 200 && last.status < 300) return parse_response(last.body);
    if (!retryable(last)) {
      throw BackendError("backend returned HTTP " + std::to_string(last.status) + ": " + last.body);
    }
    if (attempt >= config_.max_retries) break;
    sleeper_(config_.backoff_base_s * static_cast<double>(1 << attempt));
  }
  const std::string tries = std::to_string(config_.max_retries + 1) + " attempts";
  if (last.status == 0 && last.timed_out) throw TimeoutError("backend timed out after " + tries);
  if (last.status == 0) throw TransportError("backend unreachable after " + tries + ": " + last.error);
  throw TransportError("backend returned HTTP " + std::to_string(last.status) + " after " + tries);
}

}  // namespace decor
