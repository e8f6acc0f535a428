#include <algorithm>
#include <fstream>
#include <sstream>

#include "decor/llm_client.hpp"

namespace decor {

std::uint64_t stable_hash(std::string_view text, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

ScriptedStub::ScriptedStub(std::vector<std::string> replies) : replies_(std::move(replies)) {}

std::unique_ptr<ScriptedStub> ScriptedStub::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ValidationError("stub directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> replies;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    replies.push_back(buf.str());
  }
  if (replies.empty()) throw ValidationError("stub directory has no .json replies: " + dir.string());
  return std::make_unique<ScriptedStub>(std::move(replies));
}

ChatResponse ScriptedStub::complete(const ChatRequest& request) {
  request.validate();
  std::lock_guard lock(mutex_);
  if (next_ >= replies_.size()) {
    throw BackendError("stub script exhausted after " + std::to_string(replies_.size()) + " replies");
  }
  ChatResponse r;
  r.content = replies_[next_++];
  r.finish_reason = "stop";
  return r;
}

std::size_t ScriptedStub::remaining() const {
  std::lock_guard lock(mutex_);
  return replies_.size() - next_;
}

FaultInjectingStub::FaultInjectingStub(ChatClient& inner, double rate, std::uint64_t seed)
    : inner_(inner), rate_(rate), rng_(seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ValidationError("fault rate must lie in [0, 1]");
}

ChatResponse FaultInjectingStub::complete(const ChatRequest& request) {
  request.validate();
  int kind = -1;
  {
    std::lock_guard lock(mutex_);
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < rate_) {
      kind = static_cast<int>(rng_() % 3);
      ++faults_;
    }
  }
  if (kind < 0) return inner_.complete(request);
  ChatResponse r;
  r.finish_reason = "stop";
  switch (kind) {
    case 0: {
      // Valid-looking output cut off mid-stream.
      const std::string full = inner_.complete(request).content;
      r.content = full.substr(0, full.size() / 2);
      r.finish_reason = "length";
      break;
    }
    case 1:
      r.content = "{}";
      break;
    default:
      r.content = "Sure! Here is a lovely arrangement for your furniture.";
      break;
  }
  return r;
}

}  // namespace decor
