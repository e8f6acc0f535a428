#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "decor/geometry.hpp"
#include "decor/llm_client.hpp"
#include "decor/scene_model.hpp"

namespace decor {

enum class Stage { kSelect, kStylize, kPlan, kEdit };

std::string_view to_string(Stage stage);
/// Title of the stage's response schema; stubs dispatch on it.
std::string_view schema_title(Stage stage);
const std::string& response_schema(Stage stage);
const std::string& system_prompt(Stage stage);

inline constexpr int kPromptVersion = 1;
inline constexpr double kMaxSurfaceFill = 0.70;

// --- banks -----------------------------------------------------------------

const std::vector<std::string>& style_bank();     // 31 entries
const std::vector<std::string>& material_bank();  // 16 unique entries
/// Canonical bank spelling for a case-insensitive match.
std::optional<std::string> match_style(std::string_view text);
std::optional<std::string> match_material(std::string_view text);

// --- reports -----------------------------------------------------------------

struct ValidationIssue {
  std::string code;
  std::string message;
  std::string item;  // offending asset id/name, surface index or field
};

struct ValidationReport {
  std::vector<ValidationIssue> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
  void add(std::string code, std::string message, std::string item = {});
  nlohmann::json to_json() const;
  /// Bullet list used as the revision request.
  std::string to_text() const;
};

/// The validator rejected every attempt.
class ExhaustedRetriesError : public ValidationError {
 public:
  ExhaustedRetriesError(Stage stage, int attempts, ValidationReport last,
                        std::vector<TranscriptEntry> transcript);

  Stage stage() const noexcept { return stage_; }
  int attempts() const noexcept { return attempts_; }
  const ValidationReport& last_report() const noexcept { return last_; }
  const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }

 private:
  Stage stage_;
  int attempts_;
  ValidationReport last_;
  std::vector<TranscriptEntry> transcript_;
};

// --- context -----------------------------------------------------------------

struct SurfaceSummary {
  int index = 0;
  double area_cm2 = 0.0;
  double height_cm = 0.0;
  double width_cm = 0.0;  // bbox
  double depth_cm = 0.0;
  std::optional<double> clearance_cm;
  std::vector<Vec2> boundary;
};

std::vector<SurfaceSummary> summarize(std::span<const Surface> surfaces);

struct StageContext {
  std::string prompt;
  int n_assets = 1;
  std::vector<SurfaceSummary> surfaces;
  std::vector<AssetSpec> assets;  // output of earlier stages
  // Editing only.
  std::string instruction;
  Layout layout;
  std::vector<PlanDirective> directives;
};

/// Inputs a stage sees, embedded as a ```json block in the user message.
nlohmann::json context_json(Stage stage, const StageContext& ctx);
std::string user_message(Stage stage, const StageContext& ctx);

// --- validators ----------------------------------------------------------------

struct StyleAssignment {
  std::string asset_id;
  std::string style;
  std::string material;
};

ValidationReport validate_assets(std::span<const AssetSpec> proposal, std::span<const SurfaceSummary> surfaces,
                                 int n_assets);
ValidationReport validate_styles(std::span<const StyleAssignment> proposal, std::span<const AssetSpec> assets);
/// `surfaces` enables the clearance check on stacks; may be empty.
ValidationReport validate_plan(std::span<const PlanDirective> directives, std::span<const AssetSpec> assets,
                               std::span<const SurfaceSummary> surfaces = {});

/// Per-asset size rules shared with editing: oversize against the surface
/// bbox and height against the clearance.
void check_asset_fits(const AssetSpec& asset, const SurfaceSummary& surface, ValidationReport& report);

// Parsers turn model text into typed proposals; malformed parts become
// violations ("bad_json", "bad_field", "bad_vocabulary") rather than errors.
template <typename T>
struct Parsed {
  std::vector<T> items;
  ValidationReport report;
};

/// Model output as a JSON object: bare, or inside one fenced block.
/// Failures are reported as "bad_json".
std::optional<nlohmann::json> parse_reply(std::string_view content, ValidationReport& report);

Parsed<AssetSpec> parse_asset_proposal(std::string_view content);
Parsed<StyleAssignment> parse_style_assignment(std::string_view content);
Parsed<PlanDirective> parse_plan(std::string_view content);
/// Parses one directive object; vocabulary problems go to `report`.
std::optional<PlanDirective> parse_directive(const nlohmann::json& j, ValidationReport& report,
                                             const std::string& where);
nlohmann::json directive_to_json(const PlanDirective& d);

/// Ids "<slug>_<k>", k counting repeats of the same slug from 1.
void assign_asset_ids(std::vector<AssetSpec>& assets, std::span<const AssetSpec> existing = {});

// --- admin loop -------------------------------------------------------------------

struct StageOptions {
  int max_retries = 5;  // total attempts
  std::string model;
  double temperature = 0.0;
  std::optional<std::uint64_t> seed;
  double timeout_s = 60.0;
};

/// Validates raw model output and, when it passes, stores the typed result.
using StageValidator = std::function<ValidationReport(const std::string& content)>;

struct StageRun {
  std::string output;  // the accepted model output
  int attempts = 0;
  std::vector<TranscriptEntry> transcript;
};

/// Asks the model, validates, and re-asks with the violations appended until
/// a proposal passes. Throws ExhaustedRetriesError; client errors propagate.
StageRun run_stage(Stage stage, const StageContext& ctx, ChatClient& client, const StageValidator& validator,
                   const StageOptions& options = {});

struct SelectResult {
  std::vector<AssetSpec> assets;  // ids assigned, style/material empty
  StageRun run;
};
struct StylizeResult {
  std::vector<AssetSpec> assets;  // with style and material
  StageRun run;
};
struct PlanResult {
  std::vector<PlanDirective> directives;
  StageRun run;
};

SelectResult select_assets(const StageContext& ctx, ChatClient& client, const StageOptions& options = {});
StylizeResult stylize_assets(const StageContext& ctx, ChatClient& client, const StageOptions& options = {});
PlanResult plan_arrangement(const StageContext& ctx, ChatClient& client, const StageOptions& options = {});

}  // namespace decor
