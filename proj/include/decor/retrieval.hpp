#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "decor/scene_model.hpp"

namespace decor {

struct CatalogEntry {
  std::string id;
  std::string name;
  std::vector<std::string> tags;
  std::array<double, 3> dims_cm{0.0, 0.0, 0.0};  // w, d, h
  std::vector<double> embedding;                 // unit norm, may be empty
  std::string mesh_ref;
};

class Catalog {
 public:
  Catalog() = default;
  /// Throws ValidationError on bad dims, non-unit embeddings, mixed
  /// embedding dimensions or duplicate ids.
  explicit Catalog(std::vector<CatalogEntry> entries);

  /// Catalog file: JSON array of entries. The optional sidecar maps
  /// {"entries": {id: [..]}, "queries": {text: [..]}}.
  static Catalog from_json(const nlohmann::json& entries, const nlohmann::json& sidecar = nullptr);
  static Catalog load(const std::filesystem::path& catalog_file,
                      const std::optional<std::filesystem::path>& sidecar_file = std::nullopt);

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  const CatalogEntry* find(std::string_view id) const;

  void set_query_embedding(std::string query, std::vector<double> embedding);
  const std::vector<double>* query_embedding(const std::string& query) const;
  /// True iff every entry carries an embedding.
  bool fully_embedded() const { return fully_embedded_; }

 private:
  std::vector<CatalogEntry> entries_;
  std::map<std::string, std::vector<double>> query_embeddings_;
  bool fully_embedded_ = false;
};

/// "{style} {material} {name}" with empty parts skipped.
std::string retrieval_query(const AssetSpec& asset);

/// Lowercase alphanumeric tokens, deduplicated and sorted.
std::vector<std::string> tokenize(std::string_view text);

struct ScoredEntry {
  double score = 0.0;
  std::size_t index = 0;  // into Catalog::entries()
};

/// Every entry scored and ordered by score descending, then id ascending.
/// Cosine similarity when the query has a sidecar embedding and the catalog
/// is fully embedded, token overlap |Q n E| / sqrt(|Q| |E|) otherwise.
std::vector<ScoredEntry> rank(std::string_view query, const Catalog& catalog);

/// The candidate pool retrieve() samples from: the best k entries, ignoring
/// zero-score entries whenever some entry scores above zero.
std::vector<ScoredEntry> top_k(std::string_view query, const Catalog& catalog, std::size_t k = 10);

/// Uniform draw from top_k with a generator seeded by `seed`.
/// Throws ValidationError for an empty catalog.
const CatalogEntry& retrieve(std::string_view query, const Catalog& catalog, std::size_t k,
                             std::uint64_t seed);

/// Scale that stretches the entry's box onto the asset's box.
Binding bind(const AssetSpec& asset, const CatalogEntry& entry);

}  // namespace decor
