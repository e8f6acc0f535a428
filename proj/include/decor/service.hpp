#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "decor/job_store.hpp"
#include "decor/llm_client.hpp"
#include "decor/pipeline.hpp"
#include "decor/retrieval.hpp"

namespace decor {

struct ServiceConfig {
  std::filesystem::path store_root = "jobs";
  std::filesystem::path mesh_root;  // relative mesh_ref values resolve here
  std::shared_ptr<ChatClient> client;
  std::shared_ptr<const Catalog> catalog;
  DecorateOptions decorate;
  int workers = 1;
};

/// Transport-independent request/response, so routes can be exercised
/// without sockets.
struct ServiceRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ServiceResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Job queue plus the HTTP API:
///   POST /jobs, GET /jobs, GET /jobs/{id}
///   GET /scenes/{id}, GET /scenes/{id}/revisions, GET /scenes/{id}/revisions/{n}
///   POST /scenes/{id}/edits, GET /scenes/{id}/svg?surface=k, GET /scenes/{id}/metrics
/// Edits of one scene are serialized; reads run concurrently.
class DecorService {
 public:
  explicit DecorService(ServiceConfig config);
  ~DecorService();

  DecorService(const DecorService&) = delete;
  DecorService& operator=(const DecorService&) = delete;

  ServiceResponse handle(const ServiceRequest& request);

  /// Blocks until no job is queued or running.
  void wait_idle();

  /// Serves until stop() is called; returns false if the port cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and serves on a background thread; returns the port.
  int listen_in_background(const std::string& host = "127.0.0.1");
  void stop();

  JobStore& store() { return store_; }

 private:
  ServiceResponse create_job(const ServiceRequest& request);
  ServiceResponse get_job(const std::string& id);
  ServiceResponse list_jobs();
  ServiceResponse get_scene(const std::string& id, std::optional<int> revision);
  ServiceResponse list_revisions(const std::string& id);
  ServiceResponse post_edits(const std::string& id, const ServiceRequest& request);
  ServiceResponse get_svg(const std::string& id, const ServiceRequest& request);
  ServiceResponse get_metrics(const std::string& id);

  void worker_loop();
  void run_job(const std::string& id);
  std::shared_ptr<std::shared_mutex> scene_lock(const std::string& id);

  ServiceConfig config_;
  JobStore store_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::string> queue_;
  int running_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;

  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::shared_mutex>> scene_locks_;

  struct Http;
  std::unique_ptr<Http> http_;
  std::thread http_thread_;
};

/// HTTP status for an engine exception: 400 validation, 404 missing,
/// 409 infeasible, 422 unresolvable or exhausted retries, 502 backend.
int http_status_for(const std::exception& error);

}  // namespace decor
