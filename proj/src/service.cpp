#include "decor/service.hpp"

#include <regex>

#include <fmt/format.h>

#include "decor/httplib.hpp"
#include "decor/metrics.hpp"
#include "decor/scene_io.hpp"

namespace decor {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class NotFound : public DecorError {
 public:
  using DecorError::DecorError;
};

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const NotFound*>(&e)) return "not_found";
  if (dynamic_cast<const UnresolvableTargetError*>(&e)) return "unresolvable_target";
  if (dynamic_cast<const ExhaustedRetriesError*>(&e)) return "exhausted_retries";
  if (dynamic_cast<const NoSurfaceError*>(&e)) return "no_surface";
  if (dynamic_cast<const CompileError*>(&e)) return "compile";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const InfeasibleEditError*>(&e)) return "infeasible_edit";
  if (dynamic_cast<const InfeasibleError*>(&e)) return "infeasible";
  if (dynamic_cast<const TimeoutError*>(&e)) return "timeout";
  if (dynamic_cast<const AuthError*>(&e)) return "auth";
  if (dynamic_cast<const BackendError*>(&e)) return "backend";
  return "internal";
}

json error_json(const std::exception& e) {
  json j = {{"type", error_type(e)}, {"message", e.what()}};
  if (const auto* inf = dynamic_cast<const InfeasibleError*>(&e)) j["asset_id"] = inf->asset_id();
  if (const auto* u = dynamic_cast<const UnresolvableTargetError*>(&e)) j["target"] = u->target();
  if (const auto* x = dynamic_cast<const ExhaustedRetriesError*>(&e)) {
    j["stage"] = std::string(to_string(x->stage()));
    j["report"] = x->last_report().to_json();
  }
  return j;
}

ServiceResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

ServiceResponse error_response(const std::exception& e) {
  return json_response(http_status_for(e), {{"error", error_json(e)}});
}

}  // namespace

int http_status_for(const std::exception& e) {
  if (dynamic_cast<const NotFound*>(&e)) return 404;
  if (dynamic_cast<const UnresolvableTargetError*>(&e) || dynamic_cast<const ExhaustedRetriesError*>(&e)) return 422;
  if (dynamic_cast<const ValidationError*>(&e)) return 400;
  if (dynamic_cast<const InfeasibleError*>(&e)) return 409;
  if (dynamic_cast<const BackendError*>(&e)) return 502;
  return 500;
}

struct DecorService::Http {
  httplib::Server server;
};

DecorService::DecorService(ServiceConfig config) : config_(std::move(config)), store_(config_.store_root) {
  if (!config_.client) throw ValidationError("service needs a chat client");
  if (!config_.catalog || config_.catalog->empty()) throw ValidationError("service needs a non-empty catalog");
  const int n = std::max(1, config_.workers);
  for (int i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

DecorService::~DecorService() {
  stop();
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& w : workers_) w.join();
}

void DecorService::worker_loop() {
  for (;;) {
    std::string id;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      id = queue_.front();
      queue_.pop_front();
      ++running_;
    }
    run_job(id);
    {
      std::lock_guard lock(queue_mutex_);
      --running_;
    }
    idle_cv_.notify_all();
  }
}

void DecorService::wait_idle() {
  std::unique_lock lock(queue_mutex_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && running_ == 0; });
}

std::shared_ptr<std::shared_mutex> DecorService::scene_lock(const std::string& id) {
  std::lock_guard lock(locks_mutex_);
  auto& slot = scene_locks_[id];
  if (!slot) slot = std::make_shared<std::shared_mutex>();
  return slot;
}

void DecorService::run_job(const std::string& id) {
  DecorateTrace trace;
  json status = {{"job_id", id}, {"status", "running"}, {"stage", ""}};
  trace.on_stage = [&](const std::string& stage) {
    status["stage"] = stage;
    store_.set_status(id, status);
  };
  const auto lock = scene_lock(id);
  std::unique_lock guard(*lock);
  try {
    JobRequest request = store_.request(id);
    fs::path mesh = request.mesh_ref;
    if (mesh.is_relative()) {
      mesh = fs::exists(store_.job_dir(id) / mesh) ? store_.job_dir(id) / mesh : config_.mesh_root / mesh;
    }
    const Mesh loaded = load_mesh_file(mesh);
    const DecorScene scene = decorate_mesh(loaded, request, *config_.client, *config_.catalog, config_.decorate, &trace);
    store_.append_transcripts(id, trace.transcript);
    store_.save_scene(id, scene);
    status["status"] = "done";
    status["revision"] = scene.revision;
    store_.set_status(id, status);
  } catch (const std::exception& e) {
    try {
      store_.append_transcripts(id, trace.transcript);
    } catch (const std::exception&) {
    }
    status["status"] = "failed";
    status["error"] = error_json(e);
    status["error"]["stage"] = trace.stage;
    status["error"]["transcripts"] = "transcripts.jsonl";
    store_.set_status(id, status);
  }
}

ServiceResponse DecorService::handle(const ServiceRequest& request) {
  static const std::regex job_re("^/jobs/([^/]+)$");
  static const std::regex scene_re("^/scenes/([^/]+)(/[a-z]+)?(?:/([0-9]+))?$");
  std::smatch m;
  try {
    const std::string& method = request.method;
    const std::string& path = request.path;
    if (method == "OPTIONS") return {204, "text/plain", ""};
    if (path == "/health" && method == "GET") return json_response(200, {{"status", "ok"}});
    if (path == "/jobs") {
      if (method == "POST") return create_job(request);
      if (method == "GET") return list_jobs();
    }
    if (std::regex_match(path, m, job_re) && method == "GET") return get_job(m[1]);
    if (std::regex_match(path, m, scene_re)) {
      const std::string id = m[1];
      const std::string sub = m[2];
      if (!store_.exists(id)) throw NotFound("no scene '" + id + "'");
      if (sub.empty() && method == "GET") return get_scene(id, std::nullopt);
      if (sub == "/revisions" && method == "GET") {
        if (m[3].matched) return get_scene(id, std::stoi(m[3]));
        return list_revisions(id);
      }
      if (sub == "/edits" && method == "POST") return post_edits(id, request);
      if (sub == "/svg" && method == "GET") return get_svg(id, request);
      if (sub == "/metrics" && method == "GET") return get_metrics(id);
    }
    throw NotFound(fmt::format("no route for {} {}", method, path));
  } catch (const json::exception& e) {
    return json_response(400, {{"error", {{"type", "validation"}, {"message", e.what()}}}});
  } catch (const std::exception& e) {
    return error_response(e);
  }
}

ServiceResponse DecorService::create_job(const ServiceRequest& request) {
  json body = json::parse(request.body);
  if (!body.is_object()) throw ValidationError("job request must be a JSON object");
  std::string inline_obj;
  if (const auto it = body.find("mesh_obj"); it != body.end()) {
    inline_obj = it->get<std::string>();
    parse_obj(inline_obj);  // reject bad uploads before queueing
    body["mesh_ref"] = "furniture.obj";
    body.erase("mesh_obj");
  }
  const JobRequest job = JobRequest::from_json(body);
  if (inline_obj.empty()) {
    fs::path mesh = job.mesh_ref;
    if (mesh.is_relative()) mesh = config_.mesh_root / mesh;
    if (!fs::is_regular_file(mesh)) throw ValidationError("mesh '" + job.mesh_ref + "' not found");
  }
  const std::string id = store_.create(job);
  if (!inline_obj.empty()) write_file_atomic(store_.job_dir(id) / "furniture.obj", inline_obj);
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(id);
  }
  queue_cv_.notify_one();
  return json_response(202, {{"job_id", id}, {"scene_id", id}, {"status", "queued"}});
}

ServiceResponse DecorService::list_jobs() {
  json arr = json::array();
  for (const auto& id : store_.list()) arr.push_back(store_.status(id));
  return json_response(200, {{"jobs", arr}});
}

ServiceResponse DecorService::get_job(const std::string& id) {
  if (!store_.exists(id)) throw NotFound("no job '" + id + "'");
  json status = store_.status(id);
  if (status.value("status", "") == "done") {
    const auto lock = scene_lock(id);
    std::shared_lock guard(*lock);
    if (auto scene = store_.scene(id)) status["scene"] = scene_to_json(*scene);
  }
  return json_response(200, status);
}

ServiceResponse DecorService::get_scene(const std::string& id, std::optional<int> revision) {
  const auto lock = scene_lock(id);
  std::shared_lock guard(*lock);
  auto scene = store_.scene(id, revision);
  if (!scene) throw NotFound("scene '" + id + "' has no such revision");
  return json_response(200, scene_to_json(*scene));
}

ServiceResponse DecorService::list_revisions(const std::string& id) {
  const auto lock = scene_lock(id);
  std::shared_lock guard(*lock);
  return json_response(200, {{"scene_id", id}, {"revisions", store_.revisions(id)}});
}

ServiceResponse DecorService::post_edits(const std::string& id, const ServiceRequest& request) {
  const json body = json::parse(request.body);
  if (!body.is_object()) throw ValidationError("edit request must be a JSON object");
  const auto lock = scene_lock(id);
  std::unique_lock guard(*lock);
  auto scene = store_.scene(id);
  if (!scene) throw NotFound("scene '" + id + "' is not ready");
  const JobRequest job = store_.request(id);

  std::vector<EditOp> ops;
  std::vector<TranscriptEntry> transcript;
  if (body.contains("ops")) {
    ops = edit_ops_from_json(body.at("ops"));
  } else if (body.contains("instruction")) {
    StageOptions stage = config_.decorate.stage;
    if (!stage.seed) stage.seed = job.seed;
    try {
      auto interpreted = interpret_edit(body.at("instruction").get<std::string>(), *scene, *config_.client, stage);
      ops = std::move(interpreted.ops);
      transcript = std::move(interpreted.run.transcript);
    } catch (const ExhaustedRetriesError& e) {
      store_.append_transcripts(id, e.transcript());
      throw;
    }
  } else {
    throw ValidationError("edit request needs 'instruction' or 'ops'");
  }

  EditOptions options;
  options.params = job.solver_params();
  options.catalog = config_.catalog.get();
  options.retrieval_k = config_.decorate.retrieval_k;
  DecorScene edited = apply_edit(*scene, ops, options);
  edited.provenance.transcripts.insert(edited.provenance.transcripts.end(), transcript.begin(), transcript.end());
  store_.append_transcripts(id, transcript);
  store_.save_scene(id, edited);
  json applied = json::array();
  for (const auto& op : ops) applied.push_back(edit_op_to_json(op));
  return json_response(200, {{"scene_id", id}, {"revision", edited.revision}, {"ops", applied},
                             {"scene", scene_to_json(edited)}});
}

ServiceResponse DecorService::get_svg(const std::string& id, const ServiceRequest& request) {
  const auto lock = scene_lock(id);
  std::shared_lock guard(*lock);
  auto scene = store_.scene(id);
  if (!scene) throw NotFound("scene '" + id + "' is not ready");
  int surface = 0;
  if (const auto it = request.query.find("surface"); it != request.query.end()) {
    try {
      surface = std::stoi(it->second);
    } catch (const std::exception&) {
      throw ValidationError("surface must be an integer");
    }
  }
  return {200, "image/svg+xml", export_svg(*scene, surface)};
}

ServiceResponse DecorService::get_metrics(const std::string& id) {
  const auto lock = scene_lock(id);
  std::shared_lock guard(*lock);
  auto scene = store_.scene(id);
  if (!scene) throw NotFound("scene '" + id + "' is not ready");
  const DecorScene one[] = {*scene};
  json report = metrics_report(one);
  report["scene_id"] = id;
  report["revision"] = scene->revision;
  const auto violations = scene_violations(*scene, store_.request(id).solver_params());
  report["violations"] = violations_to_json(violations);
  return json_response(200, report);
}

// --- HTTP adapter ------------------------------------------------------------------

namespace {

void forward(DecorService& service, const httplib::Request& req, httplib::Response& res) {
  ServiceRequest r;
  r.method = req.method;
  r.path = req.path;
  r.body = req.body;
  for (const auto& [k, v] : req.params) r.query.emplace(k, v);
  const ServiceResponse out = service.handle(r);
  res.status = out.status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
  res.set_header("Access-Control-Allow-Headers", "Content-Type");
  res.set_content(out.body, out.content_type);
}

}  // namespace

bool DecorService::listen(const std::string& host, int port) {
  if (!http_) {
    http_ = std::make_unique<Http>();
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { forward(*this, req, res); };
    http_->server.Get(".*", handler);
    http_->server.Post(".*", handler);
    http_->server.Options(".*", handler);
  }
  return http_->server.listen(host, port);
}

int DecorService::listen_in_background(const std::string& host) {
  http_ = std::make_unique<Http>();
  auto handler = [this](const httplib::Request& req, httplib::Response& res) { forward(*this, req, res); };
  http_->server.Get(".*", handler);
  http_->server.Post(".*", handler);
  http_->server.Options(".*", handler);
  const int port = http_->server.bind_to_any_port(host);
  if (port <= 0) throw DecorError("cannot bind an HTTP port on " + host);
  http_thread_ = std::thread([this] { http_->server.listen_after_bind(); });
  http_->server.wait_until_ready();
  return port;
}

void DecorService::stop() {
  if (http_) http_->server.stop();
  if (http_thread_.joinable()) http_thread_.join();
}

}  // namespace decor
