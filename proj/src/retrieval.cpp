#include "decor/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

namespace decor {

namespace {

constexpr double kNormTolerance = 1e-6;

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> read_vector(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": embedding must be an array");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw ValidationError(what + ": embedding values must be numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

Catalog::Catalog(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> ids;
  std::size_t dim = 0;
  fully_embedded_ = !entries_.empty();
  for (const auto& e : entries_) {
    if (e.id.empty()) throw ValidationError("catalog entry without id");
    if (!ids.insert(e.id).second) throw ValidationError("duplicate catalog id '" + e.id + "'");
    for (double d : e.dims_cm) {
      if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("catalog entry '" + e.id + "' has bad dims");
    }
    if (e.embedding.empty()) {
      fully_embedded_ = false;
      continue;
    }
    if (std::abs(norm(e.embedding) - 1.0) > kNormTolerance) {
      throw ValidationError("catalog entry '" + e.id + "' embedding is not unit norm");
    }
    if (dim == 0) dim = e.embedding.size();
    if (e.embedding.size() != dim) throw ValidationError("catalog embeddings have mixed dimensions");
  }
}

Catalog Catalog::from_json(const nlohmann::json& entries, const nlohmann::json& sidecar) {
  if (!entries.is_array()) throw ValidationError("catalog must be a JSON array");
  std::map<std::string, std::vector<double>> side_entries;
  std::map<std::string, std::vector<double>> side_queries;
  if (sidecar.is_object()) {
    const auto by_id = sidecar.value("entries", nlohmann::json::object());
    const auto by_query = sidecar.value("queries", nlohmann::json::object());
    for (const auto& [id, v] : by_id.items()) side_entries[id] = read_vector(v, id);
    for (const auto& [q, v] : by_query.items()) side_queries[q] = read_vector(v, q);
  }
  std::vector<CatalogEntry> out;
  for (const auto& j : entries) {
    try {
      CatalogEntry e;
      e.id = j.at("id").get<std::string>();
      e.name = j.at("name").get<std::string>();
      e.tags = j.value("tags", std::vector<std::string>{});
      const auto dims = j.at("dims_cm").get<std::vector<double>>();
      if (dims.size() != 3) throw ValidationError("catalog entry '" + e.id + "' needs 3 dims");
      e.dims_cm = {dims[0], dims[1], dims[2]};
      if (j.contains("embedding")) e.embedding = read_vector(j["embedding"], e.id);
      if (auto it = side_entries.find(e.id); it != side_entries.end()) e.embedding = it->second;
      e.mesh_ref = j.value("mesh", std::string());
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("bad catalog entry: ") + e.what());
    }
  }
  Catalog catalog(std::move(out));
  for (auto& [q, v] : side_queries) catalog.set_query_embedding(q, std::move(v));
  return catalog;
}

Catalog Catalog::load(const std::filesystem::path& catalog_file,
                      const std::optional<std::filesystem::path>& sidecar_file) {
  return from_json(read_json_file(catalog_file),
                   sidecar_file ? read_json_file(*sidecar_file) : nlohmann::json());
}

const CatalogEntry* Catalog::find(std::string_view id) const {
  for (const auto& e : entries_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

void Catalog::set_query_embedding(std::string query, std::vector<double> embedding) {
  if (std::abs(norm(embedding) - 1.0) > kNormTolerance) {
    throw ValidationError("query embedding for '" + query + "' is not unit norm");
  }
  query_embeddings_[std::move(query)] = std::move(embedding);
}

const std::vector<double>* Catalog::query_embedding(const std::string& query) const {
  const auto it = query_embeddings_.find(query);
  return it == query_embeddings_.end() ? nullptr : &it->second;
}

std::string retrieval_query(const AssetSpec& asset) {
  std::string q;
  for (const std::string* part : {&asset.style, &asset.material, &asset.name}) {
    if (part->empty()) continue;
    if (!q.empty()) q += ' ';
    q += *part;
  }
  return q;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::set<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!current.empty()) {
      tokens.insert(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.insert(std::move(current));
  return {tokens.begin(), tokens.end()};
}

std::vector<ScoredEntry> rank(std::string_view query, const Catalog& catalog) {
  const auto& entries = catalog.entries();
  std::vector<ScoredEntry> out(entries.size());
  const std::vector<double>* q_embed = catalog.fully_embedded() ? catalog.query_embedding(std::string(query)) : nullptr;
  if (q_embed != nullptr && q_embed->size() != entries.front().embedding.size()) q_embed = nullptr;
  const auto q_tokens = tokenize(query);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out[i].index = i;
    if (q_embed != nullptr) {
      double dot = 0.0;
      for (std::size_t k = 0; k < q_embed->size(); ++k) dot += (*q_embed)[k] * entries[i].embedding[k];
      out[i].score = dot;
      continue;
    }
    std::string text = entries[i].name;
    for (const auto& t : entries[i].tags) text += ' ' + t;
    const auto e_tokens = tokenize(text);
    std::vector<std::string> common;
    std::set_intersection(q_tokens.begin(), q_tokens.end(), e_tokens.begin(), e_tokens.end(),
                          std::back_inserter(common));
    if (!q_tokens.empty() && !e_tokens.empty()) {
      out[i].score = static_cast<double>(common.size()) /
                     std::sqrt(static_cast<double>(q_tokens.size() * e_tokens.size()));
    }
  }
  std::sort(out.begin(), out.end(), [&](const ScoredEntry& a, const ScoredEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return entries[a.index].id < entries[b.index].id;
  });
  return out;
}

std::vector<ScoredEntry> top_k(std::string_view query, const Catalog& catalog, std::size_t k) {
  if (catalog.empty()) throw ValidationError("catalog is empty");
  if (k == 0) throw ValidationError("k must be positive");
  auto ranked = rank(query, catalog);
  if (ranked.front().score > 0.0) {
    ranked.erase(std::find_if(ranked.begin(), ranked.end(), [](const ScoredEntry& e) { return e.score <= 0.0; }),
                 ranked.end());
  }
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

const CatalogEntry& retrieve(std::string_view query, const Catalog& catalog, std::size_t k,
                             std::uint64_t seed) {
  const auto pool = top_k(query, catalog, k);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return catalog.entries()[pool[pick(rng)].index];
}

Binding bind(const AssetSpec& asset, const CatalogEntry& entry) {
  Binding b;
  b.entry_id = entry.id;
  b.scale = {asset.width_cm / entry.dims_cm[0], asset.depth_cm / entry.dims_cm[1],
             asset.height_cm / entry.dims_cm[2]};
  return b;
}

}  // namespace decor
