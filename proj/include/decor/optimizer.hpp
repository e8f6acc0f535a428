#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "decor/compiler.hpp"
#include "decor/geometry.hpp"
#include "decor/scene_model.hpp"

namespace decor {

struct SolverParams {
  double grid_step_cm = 1.0;
  std::uint64_t seed = 0;
  int anneal_iters = 20000;  // per surface
  double initial_temperature = 1.0;
  double cooling = 0.999;  // geometric, applied every iteration
  double near_cm = 15.0;
  double far_cm = 30.0;
  double align_tolerance_cm = 5.0;
  double edge_margin_cm = 1.0;
  double jitter_sigma_cm = 5.0;

  /// Throws ValidationError on out-of-range values.
  void validate() const;
};

/// Applies the keys present in `overrides` on top of `base`.
SolverParams solver_params_from_json(const nlohmann::json& overrides, SolverParams base = {});
nlohmann::json solver_params_to_json(const SolverParams& params);

enum class ViolationKind { kContainment, kOverlap, kGlobalRegion, kRelation, kStacking, kOrientation };

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind = ViolationKind::kContainment;
  std::vector<std::string> subjects;
  double magnitude = 0.0;  // cm for relations and regions, cm^2 for areas, degrees for yaw
};

nlohmann::json violations_to_json(std::span<const Violation> violations);

// --- predicates -----------------------------------------------------------

/// Edge or center coordinate an alignment relation compares.
double alignment_coordinate(Relation alignment, const Rect& footprint);

/// Satisfaction in [0, 1] of a distance or alignment relation.
double soft_term(Relation relation, const Rect& subject, const Rect& reference,
                 const SolverParams& params);

/// How far (cm) a directional relation is from holding; 0 when it holds.
double relation_shortfall(Relation relation, const Rect& subject, const Rect& reference);

// --- objective and feasibility ---------------------------------------------

/// Sum of soft terms over the soft pairs. Throws ValidationError when an
/// asset referenced by a soft pair has no placement.
double soft_score(const Layout& layout, const ConstraintSet& cs, const SolverParams& params);

/// Every hard-constraint violation of the layout; empty iff feasible.
std::vector<Violation> check_hard(const Layout& layout, const ConstraintSet& cs,
                                  std::span<const Surface> surfaces, const SolverParams& params);

/// Editing support: seed Phase 1 with earlier placements and reward staying put.
struct WarmStart {
  Layout previous;
  std::set<std::string> anchored;  // assets that receive the anchor term
  double anchor_weight = 0.25;
  double anchor_radius_cm = 30.0;
};

struct SolveOptions {
  const WarmStart* warm_start = nullptr;
  std::optional<std::set<int>> surfaces;  // solve only these (default: all)
};

struct SurfaceSolveStats {
  int surface_index = 0;
  int phase1_attempts = 0;
  double phase1_objective = 0.0;
  double final_objective = 0.0;
  int accepted_moves = 0;
  int rejected_infeasible = 0;
};

struct SolveResult {
  Layout layout;            // after annealing
  Layout constructive;      // Phase 1 alone
  std::vector<SurfaceSolveStats> stats;
};

/// Constructive placement on the lattice followed by annealing. The returned
/// layout always passes check_hard; throws InfeasibleError otherwise.
SolveResult solve_detailed(const ConstraintSet& cs, std::span<const Surface> surfaces,
                           const SolverParams& params, const SolveOptions& options = {});

Layout solve(const ConstraintSet& cs, std::span<const Surface> surfaces, const SolverParams& params,
             const SolveOptions& options = {});

/// Exhaustive optimum over the lattice for tiny instances (at most 3 assets
/// and a 6x6 lattice per surface). Ties go to the lexicographically smallest
/// (ix, iy, yaw) tuple in asset-id order. Throws InfeasibleError.
Layout brute_force_solve(const ConstraintSet& cs, std::span<const Surface> surfaces,
                         const SolverParams& params);

/// Lattice coordinates used by both solvers: min + k * step, k = 0..count-1.
struct Lattice {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double step = 1.0;
  int nx = 0;
  int ny = 0;

  double x(int ix) const { return origin_x + ix * step; }
  double y(int iy) const { return origin_y + iy * step; }
};

Lattice make_lattice(const Surface& surface, double step);

}  // namespace decor
