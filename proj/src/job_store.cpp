#include "decor/job_store.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/format.h>

#include "decor/metrics.hpp"
#include "decor/scene_io.hpp"

namespace decor {

namespace fs = std::filesystem;
using nlohmann::json;

JobStore::JobStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

void JobStore::check_id(const std::string& id) const {
  static const std::regex pattern("job-[0-9]{6,}");
  if (!std::regex_match(id, pattern)) throw ValidationError("malformed job id '" + id + "'");
}

fs::path JobStore::job_dir(const std::string& id) const {
  check_id(id);
  return root_ / id;
}

std::string JobStore::create(const JobRequest& request) {
  std::lock_guard lock(mutex_);
  int next = 1;
  for (const auto& id : list()) next = std::max(next, std::stoi(id.substr(4)) + 1);
  const std::string id = fmt::format("job-{:06d}", next);
  fs::create_directories(root_ / id / "revisions");
  write_file_atomic(root_ / id / "request.json", request.to_json().dump(2) + "\n");
  write_file_atomic(root_ / id / "status.json", json{{"job_id", id}, {"status", "queued"}}.dump(2) + "\n");
  return id;
}

bool JobStore::exists(const std::string& id) const {
  try {
    return fs::is_directory(job_dir(id));
  } catch (const ValidationError&) {
    return false;
  }
}

std::vector<std::string> JobStore::list() const {
  std::vector<std::string> out;
  static const std::regex pattern("job-[0-9]{6,}");
  for (const auto& e : fs::directory_iterator(root_)) {
    const std::string name = e.path().filename().string();
    if (e.is_directory() && std::regex_match(name, pattern)) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

JobRequest JobStore::request(const std::string& id) const {
  return JobRequest::from_json(json::parse(read_file(job_dir(id) / "request.json")));
}

void JobStore::set_status(const std::string& id, const json& status) {
  write_file_atomic(job_dir(id) / "status.json", status.dump(2) + "\n");
}

json JobStore::status(const std::string& id) const { return json::parse(read_file(job_dir(id) / "status.json")); }

void JobStore::append_transcripts(const std::string& id, const std::vector<TranscriptEntry>& entries) {
  std::lock_guard lock(mutex_);
  std::ofstream out(job_dir(id) / "transcripts.jsonl", std::ios::app);
  for (const auto& t : entries) out << transcript_to_json(t).dump() << '\n';
  if (!out) throw DecorError("cannot append transcripts for " + id);
}

std::vector<TranscriptEntry> JobStore::transcripts(const std::string& id) const {
  std::vector<TranscriptEntry> out;
  std::ifstream in(job_dir(id) / "transcripts.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(transcript_from_json(json::parse(line)));
  }
  return out;
}

void JobStore::save_scene(const std::string& id, const DecorScene& scene) {
  const fs::path dir = job_dir(id);
  const std::string text = scene_to_json(scene).dump(2) + "\n";
  write_file_atomic(dir / "revisions" / fmt::format("{}.json", scene.revision), text);
  write_file_atomic(dir / "scene.json", text);
  const DecorScene one[] = {scene};
  write_file_atomic(dir / "metrics.json", metrics_report(one).dump(2) + "\n");
}

std::optional<DecorScene> JobStore::scene(const std::string& id, std::optional<int> revision) const {
  const fs::path dir = job_dir(id);
  const fs::path path = revision ? dir / "revisions" / fmt::format("{}.json", *revision) : dir / "scene.json";
  if (!fs::exists(path)) return std::nullopt;
  return load_scene(path);
}

std::vector<int> JobStore::revisions(const std::string& id) const {
  std::vector<int> out;
  const fs::path dir = job_dir(id) / "revisions";
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string stem = e.path().stem().string();
    if (e.path().extension() == ".json" && !stem.empty() &&
        std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); })) {
      out.push_back(std::stoi(stem));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace decor
