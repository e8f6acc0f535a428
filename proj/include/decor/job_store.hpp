#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "decor/pipeline.hpp"
#include "decor/scene_model.hpp"

namespace decor {

/// One directory per job:
///   request.json, status.json, transcripts.jsonl, scene.json (latest),
///   revisions/<n>.json, metrics.json
/// Every file is replaced atomically (write to a temporary, then rename).
class JobStore {
 public:
  explicit JobStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path job_dir(const std::string& id) const;

  /// Allocates "job-000001", "job-000002", ... and writes request.json.
  std::string create(const JobRequest& request);
  bool exists(const std::string& id) const;
  std::vector<std::string> list() const;

  JobRequest request(const std::string& id) const;

  void set_status(const std::string& id, const nlohmann::json& status);
  nlohmann::json status(const std::string& id) const;

  void append_transcripts(const std::string& id, const std::vector<TranscriptEntry>& entries);
  std::vector<TranscriptEntry> transcripts(const std::string& id) const;

  /// Writes revisions/<revision>.json, then scene.json and metrics.json.
  void save_scene(const std::string& id, const DecorScene& scene);
  std::optional<DecorScene> scene(const std::string& id, std::optional<int> revision = std::nullopt) const;
  std::vector<int> revisions(const std::string& id) const;

 private:
  void check_id(const std::string& id) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;  // serializes id allocation and transcript appends
};

}  // namespace decor
