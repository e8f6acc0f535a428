#pragma once

#include <cstdint>
#include <vector>

#include "decor/compiler.hpp"
#include "decor/optimizer.hpp"

namespace decor::testing {

/// A small random layout problem sized for brute_force_solve.
struct OracleInstance {
  std::vector<Surface> surfaces;
  std::vector<AssetSpec> assets;
  std::vector<PlanDirective> directives;
  ConstraintSet cs;
  SolverParams params;
};

/// Deterministic in `seed`. Instances have 1-3 assets on one surface, a
/// lattice of at most 6 x 6, and a random mix of all directive kinds. The
/// instance may be infeasible; callers filter with brute_force_solve.
OracleInstance random_oracle_instance(std::uint64_t seed);

/// Full-grid rectangular surface spanning [x0, x0 + w] x [y0, y0 + d].
Surface rect_surface(int index, double x0, double y0, double w, double d, double height = 75.0);

}  // namespace decor::testing
