#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "decor/errors.hpp"

namespace decor {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  std::string response_schema;  // JSON-schema text; may be empty
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;
  double timeout_s = 60.0;

  /// Throws ValidationError when messages are empty or the timeout is not positive.
  void validate() const;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason;
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

/// A chat-completion backend. Implementations are safe to call from several
/// threads at once.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// --- HTTP backend -----------------------------------------------------------

struct HttpResult {
  int status = 0;  // 0 when the request never got a response
  std::string body;
  bool timed_out = false;
  std::string error;
};

/// Raw POST used by HttpChatClient; swapped out in tests.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResult post(const std::string& url, const std::string& body,
                          const std::map<std::string, std::string>& headers, double timeout_s) = 0;
};

/// cpp-httplib transport. https URLs need a build with OpenSSL.
std::unique_ptr<HttpTransport> make_default_transport();

struct HttpClientConfig {
  std::string endpoint;  // base URL, e.g. http://localhost:8000/v1
  std::string api_key;
  std::string model = "gpt-4o";
  int max_retries = 3;
  double backoff_base_s = 0.5;

  /// Reads DECOR_LLM_ENDPOINT, DECOR_LLM_API_KEY and DECOR_LLM_MODEL.
  static HttpClientConfig from_env();
};

/// OpenAI-compatible /chat/completions client. Retries transport failures,
/// 429 and 5xx with exponential backoff (base * 2^attempt).
class HttpChatClient : public ChatClient {
 public:
  using Sleeper = std::function<void(double seconds)>;

  explicit HttpChatClient(HttpClientConfig config, std::unique_ptr<HttpTransport> transport = nullptr,
                          Sleeper sleeper = nullptr);

  ChatResponse complete(const ChatRequest& request) override;

  static std::string request_body(const ChatRequest& request, const std::string& default_model);
  static ChatResponse parse_response(const std::string& body);

 private:
  HttpClientConfig config_;
  std::unique_ptr<HttpTransport> transport_;
  Sleeper sleeper_;
};

// --- stubs ------------------------------------------------------------------

/// Replays reply files in name order ("001.json", "002.json", ...), verbatim.
class ScriptedStub : public ChatClient {
 public:
  explicit ScriptedStub(std::vector<std::string> replies);
  static std::unique_ptr<ScriptedStub> from_directory(const std::filesystem::path& dir);

  ChatResponse complete(const ChatRequest& request) override;
  std::size_t calls() const { return next_; }
  std::size_t remaining() const;

 private:
  std::vector<std::string> replies_;
  mutable std::mutex mutex_;
  std::size_t next_ = 0;
};

/// Answers every stage with a template-built proposal that is valid by
/// construction. The stage is read from the response schema title and the
/// inputs from the ```json block of the last user message. Output depends
/// only on the request.
class RuleBasedStub : public ChatClient {
 public:
  ChatResponse complete(const ChatRequest& request) override;
  std::size_t calls() const { return calls_; }

 private:
  std::atomic<std::size_t> calls_{0};
};

/// Wraps another client and, with probability `rate` per call, answers with
/// output that no validator accepts (truncated JSON, an empty object, prose).
class FaultInjectingStub : public ChatClient {
 public:
  FaultInjectingStub(ChatClient& inner, double rate, std::uint64_t seed);

  ChatResponse complete(const ChatRequest& request) override;
  std::size_t faults() const { return faults_; }

 private:
  ChatClient& inner_;
  double rate_;
  std::mutex mutex_;
  std::mt19937_64 rng_;
  std::size_t faults_ = 0;
};

/// Stable 64-bit FNV-1a, used to seed deterministic stub behavior.
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed = 0);

}  // namespace decor
