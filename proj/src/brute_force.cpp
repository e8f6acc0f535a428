// Exhaustive reference solver. Deliberately shares nothing with solver.cpp
// beyond the public predicates, so the two can be checked against each other.
#include <algorithm>
#include <functional>
#include <limits>

#include "decor/optimizer.hpp"

namespace decor {

namespace {

constexpr int kMaxAssets = 3;
constexpr int kMaxLattice = 6;
constexpr double kTieEps = 1e-12;

struct Choice {
  int ix = 0;
  int iy = 0;
  int quarter = 0;
};

}  // namespace

Layout brute_force_solve(const ConstraintSet& cs, std::span<const Surface> surfaces,
                         const SolverParams& params) {
  params.validate();
  Layout result;
  for (const auto& [surface_index, group] : cs.surface_groups) {
    const Surface* surface = nullptr;
    for (const auto& s : surfaces) {
      if (s.index == surface_index) surface = &s;
    }
    if (surface == nullptr) throw OutOfBoundsError("no surface with index " + std::to_string(surface_index));
    if (group.size() > static_cast<std::size_t>(kMaxAssets)) {
      throw ValidationError("brute_force_solve handles at most 3 assets per surface");
    }
    const Lattice lattice = make_lattice(*surface, params.grid_step_cm);
    if (lattice.nx > kMaxLattice || lattice.ny > kMaxLattice) {
      throw ValidationError("brute_force_solve handles at most a 6x6 lattice");
    }

    // Ties are resolved on the tuple in asset-id order.
    std::vector<std::string> ids(group.begin(), group.end());
    std::sort(ids.begin(), ids.end());

    // Enumerate bases before their subjects so partial layouts can be checked.
    std::vector<std::string> order;
    while (order.size() < ids.size()) {
      for (const auto& id : ids) {
        if (std::find(order.begin(), order.end(), id) != order.end()) continue;
        const auto base = cs.stack_base.find(id);
        if (base == cs.stack_base.end() ||
            std::find(order.begin(), order.end(), base->second) != order.end()) {
          order.push_back(id);
        }
      }
    }
    std::vector<ConstraintSet> prefixes;
    std::set<std::string> prefix_ids;
    for (const auto& id : order) {
      prefix_ids.insert(id);
      prefixes.push_back(restrict_to_assets(cs, prefix_ids));
    }

    Layout partial;
    std::map<std::string, Choice> choice;
    std::optional<std::vector<int>> best_key;
    double best_score = -std::numeric_limits<double>::infinity();
    Layout best;

    std::function<void(std::size_t)> enumerate = [&](std::size_t depth) {
      if (depth == order.size()) {
        const double score = soft_score(partial, prefixes.back(), params);
        std::vector<int> key;
        for (const auto& id : ids) {
          key.insert(key.end(), {choice[id].ix, choice[id].iy, choice[id].quarter});
        }
        if (score > best_score + kTieEps || (score >= best_score - kTieEps && best_key && key < *best_key)) {
          best_score = score;
          best_key = key;
          best = partial;
        }
        return;
      }
      const std::string& id = order[depth];
      for (int ix = 0; ix < lattice.nx; ++ix) {
        for (int iy = 0; iy < lattice.ny; ++iy) {
          for (int q = 0; q < 4; ++q) {
            Placement p;
            p.x_cm = lattice.x(ix);
            p.y_cm = lattice.y(iy);
            p.orientation = Orientation::from_yaw(90 * q);
            if (const auto base = cs.stack_base.find(id); base != cs.stack_base.end()) p.stack_base = base->second;
            partial[id] = p;
            choice[id] = {ix, iy, q};
            if (check_hard(partial, prefixes[depth], surfaces, params).empty()) enumerate(depth + 1);
          }
        }
      }
      partial.erase(id);
    };
    enumerate(0);

    if (!best_key) {
      throw InfeasibleError(ids.empty() ? std::string() : ids.front(),
                            "no feasible layout on surface " + std::to_string(surface_index));
    }
    for (auto& [id, p] : best) result[id] = p;
  }
  std::vector<AssetSpec> assets;
  for (const auto& [id, a] : cs.assets) assets.push_back(a);
  assign_stack_heights(result, assets, surfaces);
  return result;
}

}  // namespace decor
