#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "decor/agents.hpp"
#include "decor/geometry.hpp"
#include "decor/llm_client.hpp"
#include "decor/optimizer.hpp"
#include "decor/retrieval.hpp"
#include "decor/scene_model.hpp"

namespace decor {

struct JobRequest {
  std::string mesh_ref;  // path to an OBJ file
  std::string prompt;
  int n_assets = 8;
  std::uint64_t seed = 0;
  nlohmann::json solver_overrides;  // keys of SolverParams; null for defaults

  /// Throws ValidationError.
  void validate() const;
  /// Solver parameters with the request seed and overrides applied.
  SolverParams solver_params() const;

  nlohmann::json to_json() const;
  static JobRequest from_json(const nlohmann::json& j);
};

struct DecorateOptions {
  StageOptions stage;
  ExtractionOptions extraction;
  std::size_t retrieval_k = 10;
};

/// Progress of a decorate call, readable after it throws.
struct DecorateTrace {
  std::string stage;  // last stage entered
  std::vector<TranscriptEntry> transcript;
  std::function<void(const std::string& stage)> on_stage;
};

/// Seed of the catalog draw for one asset.
std::uint64_t retrieval_seed(std::uint64_t job_seed, const std::string& asset_id);

/// Extract -> select -> stylize -> plan -> compile -> solve -> retrieve.
/// Surface extraction runs before the first client call.
DecorScene decorate(const JobRequest& request, ChatClient& client, const Catalog& catalog,
                    const DecorateOptions& options = {}, DecorateTrace* trace = nullptr);

/// Same, for an already loaded mesh; `mesh_ref` is only recorded.
DecorScene decorate_mesh(const Mesh& mesh, const JobRequest& request, ChatClient& client, const Catalog& catalog,
                         const DecorateOptions& options = {}, DecorateTrace* trace = nullptr);

// --- editing ---------------------------------------------------------------------

enum class EditKind { kInsert, kRemove, kReplace, kResize, kReposition, kRotate };

std::string_view to_string(EditKind kind);
std::optional<EditKind> parse_edit_kind(std::string_view text);

struct EditOp {
  EditKind kind = EditKind::kInsert;
  std::string target;                           // all but insert
  std::optional<AssetSpec> asset;               // insert, replace (draft; id is assigned)
  std::optional<std::array<double, 3>> dims;    // resize: width, depth, height
  std::vector<PlanDirective> directives;        // reposition; optional for insert
  std::optional<Orientation> orientation;       // rotate (absolute)

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

nlohmann::json edit_op_to_json(const EditOp& op);
/// Throws ValidationError on malformed input.
EditOp edit_op_from_json(const nlohmann::json& j);
std::vector<EditOp> edit_ops_from_json(const nlohmann::json& j);

/// Checks ops against the scene inventory without applying them.
ValidationReport validate_edit_ops(std::span<const EditOp> ops, const DecorScene& scene);

/// Parsed edit-stage answer.
struct EditInterpretation {
  std::vector<EditOp> ops;
  std::vector<std::string> unresolved;
  StageRun run;
};

/// Maps a free-form instruction to edit ops through the edit stage. Throws
/// UnresolvableTargetError when the instruction names an asset that is not
/// in the scene, ExhaustedRetriesError when no valid answer comes back.
EditInterpretation interpret_edit(const std::string& instruction, const DecorScene& scene, ChatClient& client,
                                  const StageOptions& options = {});

struct EditOptions {
  SolverParams params;
  const Catalog* catalog = nullptr;  // retrieval for inserted/replaced assets
  std::size_t retrieval_k = 10;
  double anchor_weight = 0.25;
  double anchor_radius_cm = 30.0;
};

/// Applies the ops to a copy of the scene and re-solves only the surfaces
/// they touch, warm-started from the current layout. Throws
/// InfeasibleEditError (scene untouched) when the result cannot be placed.
DecorScene apply_edit(const DecorScene& scene, std::span<const EditOp> ops, const EditOptions& options = {});

// --- export ------------------------------------------------------------------------

/// 2D plan of one surface; 1 unit = 1 cm, +y up. Throws OutOfBoundsError.
std::string export_svg(const DecorScene& scene, int surface_index);

}  // namespace decor
