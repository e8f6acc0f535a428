#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "decor/optimizer.hpp"

namespace decor {

namespace {

constexpr double kEps = 1e-9;
constexpr double kImprovementEps = 1e-12;
constexpr long kBacktrackBudget = 2'000'000;

struct Term {
  int a = 0;
  int b = 0;
  Relation relation = Relation::kNear;
};

struct Item {
  const AssetSpec* spec = nullptr;
  std::optional<Orientation> fixed;
  std::optional<Region> region;
  int base = -1;
  int level = 0;
  std::vector<int> children;
  std::vector<int> soft_terms;
  std::vector<int> hard_terms;
  std::optional<Placement> warm;
  bool anchored = false;
};

struct Pose {
  int ix = 0;
  int iy = 0;
  Orientation orientation;
};

enum Rejection { kRejectOrientation, kRejectContainment, kRejectStacking, kRejectRegion,
                 kRejectOverlap, kRejectRelation, kRejectCount };

constexpr std::array<const char*, kRejectCount> kRejectionNames = {
    "orientation", "containment", "stacking", "global_region", "overlap", "relation"};

// One surface worth of assets, their relations, and a lattice state.
class SurfaceProblem {
 public:
  SurfaceProblem(const ConstraintSet& cs, const Surface& surface, const std::vector<std::string>& ids,
                 const SolverParams& params, const WarmStart* warm)
      : surface_(surface), params_(params), lattice_(make_lattice(surface, params.grid_step_cm)) {
    std::map<std::string, int> index;
    for (const auto& id : ids) {
      index[id] = static_cast<int>(items_.size());
      ids_.push_back(id);
      Item item;
      item.spec = &cs.asset(id);
      if (auto f = cs.fixed_orientations.find(id); f != cs.fixed_orientations.end()) item.fixed = f->second;
      if (auto g = cs.globals.find(id); g != cs.globals.end()) item.region = g->second;
      item.level = cs.stack_level(id);
      if (warm != nullptr) {
        if (auto w = warm->previous.find(id); w != warm->previous.end()) item.warm = w->second;
        item.anchored = warm->anchored.contains(id) && item.warm.has_value();
        anchor_weight_ = warm->anchor_weight;
        anchor_radius_ = warm->anchor_radius_cm;
      }
      items_.push_back(item);
    }
    for (const auto& [subject, base] : cs.stack_base) {
      const auto s = index.find(subject);
      const auto b = index.find(base);
      if (s == index.end() || b == index.end()) continue;
      items_[s->second].base = b->second;
      items_[b->second].children.push_back(s->second);
    }
    auto add_terms = [&](const std::vector<PairConstraint>& pairs, std::vector<Term>& terms, bool soft) {
      for (const auto& p : pairs) {
        const auto s = index.find(p.subject);
        const auto r = index.find(p.reference);
        if (s == index.end() || r == index.end()) continue;
        if (!soft && !is_directional(p.relation)) continue;
        const int t = static_cast<int>(terms.size());
        terms.push_back({s->second, r->second, p.relation});
        auto& list_a = soft ? items_[s->second].soft_terms : items_[s->second].hard_terms;
        auto& list_b = soft ? items_[r->second].soft_terms : items_[r->second].hard_terms;
        list_a.push_back(t);
        list_b.push_back(t);
      }
    };
    add_terms(cs.soft_pairs, soft_, true);
    add_terms(cs.hard_pairs, hard_, false);
    poses_.resize(items_.size());
    placed_.assign(items_.size(), false);
  }

  std::size_t size() const { return items_.size(); }
  const std::string& id(int i) const { return ids_[i]; }
  const Item& item(int i) const { return items_[i]; }
  const Lattice& lattice() const { return lattice_; }

  Rect rect_of(int i, const Pose& p) const {
    return footprint(*items_[i].spec, lattice_.x(p.ix), lattice_.y(p.iy), p.orientation);
  }
  Rect rect_of(int i) const { return rect_of(i, poses_[i]); }

  void reset() {
    std::fill(placed_.begin(), placed_.end(), false);
  }

  // Hard constraints between item i at `pose` and every placed item, plus its
  // unary constraints. Items in `skip` are ignored (used for moved groups
  // that are checked against each other separately).
  std::optional<Rejection> check(int i, const Pose& pose) const {
    const Item& it = items_[i];
    if (it.fixed && pose.orientation != *it.fixed) return kRejectOrientation;
    const Rect rect = rect_of(i, pose);
    if (it.base < 0) {
      if (!footprint_contained(surface_, rect.inflated(params_.edge_margin_cm))) return kRejectContainment;
    } else if (placed_[it.base] && !rect_of(it.base).contains(rect)) {
      return kRejectStacking;
    }
    if (it.region) {
      const double x = lattice_.x(pose.ix);
      const double y = lattice_.y(pose.iy);
      if (!surface_.bbox.contains(Vec2{x, y}) || region_of(surface_.bbox, x, y) != *it.region) {
        return kRejectRegion;
      }
    }
    for (int c : it.children) {
      if (placed_[c] && !rect.contains(rect_of(c))) return kRejectStacking;
    }
    for (std::size_t j = 0; j < items_.size(); ++j) {
      if (static_cast<int>(j) == i || !placed_[j] || items_[j].level != it.level) continue;
      if (overlap_area(rect, rect_of(static_cast<int>(j))) > kEps) return kRejectOverlap;
    }
    for (int t : it.hard_terms) {
      const Term& term = hard_[t];
      const int other = term.a == i ? term.b : term.a;
      if (!placed_[other]) continue;
      const double shortfall = term.a == i ? relation_shortfall(term.relation, rect, rect_of(other))
                                           : relation_shortfall(term.relation, rect_of(other), rect);
      if (shortfall > kEps) return kRejectRelation;
    }
    return std::nullopt;
  }

  // Soft terms of item i against placed partners plus its anchor term.
  double local_objective(int i, const Pose& pose) const {
    const Rect rect = rect_of(i, pose);
    double total = 0.0;
    for (int t : items_[i].soft_terms) {
      const Term& term = soft_[t];
      const int other = term.a == i ? term.b : term.a;
      if (!placed_[other]) continue;
      total += term.a == i ? soft_term(term.relation, rect, rect_of(other), params_)
                           : soft_term(term.relation, rect_of(other), rect, params_);
    }
    return total + anchor_term(i, pose);
  }

  double anchor_term(int i, const Pose& pose) const {
    const Item& it = items_[i];
    if (!it.anchored) return 0.0;
    const double d = std::hypot(lattice_.x(pose.ix) - it.warm->x_cm, lattice_.y(pose.iy) - it.warm->y_cm);
    return anchor_weight_ * std::max(0.0, 1.0 - d / anchor_radius_);
  }

  double objective() const {
    double total = 0.0;
    for (const auto& term : soft_) {
      total += soft_term(term.relation, rect_of(term.a), rect_of(term.b), params_);
    }
    for (std::size_t i = 0; i < items_.size(); ++i) total += anchor_term(static_cast<int>(i), poses_[i]);
    return total;
  }

  // Objective contribution of every term touching any item in `group`.
  double group_objective(const std::vector<int>& group) const {
    std::vector<int> terms;
    for (int i : group) terms.insert(terms.end(), items_[i].soft_terms.begin(), items_[i].soft_terms.end());
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    double total = 0.0;
    for (int t : terms) total += soft_term(soft_[t].relation, rect_of(soft_[t].a), rect_of(soft_[t].b), params_);
    for (int i : group) total += anchor_term(i, poses_[i]);
    return total;
  }

  // Lattice index bounds that can possibly satisfy containment / stacking /
  // region for item i with the given orientation.
  bool candidate_range(int i, Orientation o, int& ix0, int& ix1, int& iy0, int& iy1) const {
    const Item& it = items_[i];
    const Rect unit = footprint(*it.spec, 0.0, 0.0, o);
    Rect allowed;
    if (it.base < 0) {
      const double m = params_.edge_margin_cm;
      allowed = {surface_.bbox.min_x - unit.min_x + m, surface_.bbox.min_y - unit.min_y + m,
                 surface_.bbox.max_x - unit.max_x - m, surface_.bbox.max_y - unit.max_y - m};
    } else {
      const Rect b = rect_of(it.base);
      allowed = {b.min_x - unit.min_x, b.min_y - unit.min_y, b.max_x - unit.max_x, b.max_y - unit.max_y};
    }
    if (it.region) {
      const Rect cell = region_cell(surface_.bbox, *it.region);
      allowed.min_x = std::max(allowed.min_x, cell.min_x);
      allowed.min_y = std::max(allowed.min_y, cell.min_y);
      allowed.max_x = std::min(allowed.max_x, cell.max_x);
      allowed.max_y = std::min(allowed.max_y, cell.max_y);
    }
    const double inv = 1.0 / lattice_.step;
    ix0 = std::max(0, static_cast<int>(std::ceil((allowed.min_x - lattice_.origin_x) * inv - 1e-7)));
    ix1 = std::min(lattice_.nx - 1, static_cast<int>(std::floor((allowed.max_x - lattice_.origin_x) * inv + 1e-7)));
    iy0 = std::max(0, static_cast<int>(std::ceil((allowed.min_y - lattice_.origin_y) * inv - 1e-7)));
    iy1 = std::min(lattice_.ny - 1, static_cast<int>(std::floor((allowed.max_y - lattice_.origin_y) * inv + 1e-7)));
    return ix0 <= ix1 && iy0 <= iy1;
  }

  std::vector<Orientation> orientations_for(int i) const {
    if (items_[i].fixed) return {*items_[i].fixed};
    // Half turns leave the footprint unchanged, so quarter-turn pairs suffice.
    return {Orientation{false, false}, Orientation{true, false}};
  }

  std::optional<Pose> warm_pose(int i) const {
    const Item& it = items_[i];
    if (!it.warm) return std::nullopt;
    const double fx = (it.warm->x_cm - lattice_.origin_x) / lattice_.step;
    const double fy = (it.warm->y_cm - lattice_.origin_y) / lattice_.step;
    const int ix = static_cast<int>(std::lround(fx));
    const int iy = static_cast<int>(std::lround(fy));
    if (std::abs(fx - ix) > 1e-6 || std::abs(fy - iy) > 1e-6) return std::nullopt;
    if (ix < 0 || iy < 0 || ix >= lattice_.nx || iy >= lattice_.ny) return std::nullopt;
    return Pose{ix, iy, it.fixed ? *it.fixed : it.warm->orientation};
  }

  // Greedy placement in `order`. Returns the index of the item that could
  // not be placed, if any, and fills `rejections` for it.
  std::optional<int> construct(const std::vector<int>& order, std::array<int, kRejectCount>& rejections) {
    reset();
    for (int i : order) {
      std::optional<Pose> best;
      double best_score = -std::numeric_limits<double>::infinity();
      rejections.fill(0);
      if (auto warm = warm_pose(i); warm && !check(i, *warm)) {
        best = warm;
      } else {
        for (const Orientation o : orientations_for(i)) {
          int ix0, ix1, iy0, iy1;
          if (!candidate_range(i, o, ix0, ix1, iy0, iy1)) {
            ++rejections[items_[i].base < 0 ? kRejectContainment : kRejectStacking];
            continue;
          }
          // Back rows first, then left to right.
          for (int iy = iy1; iy >= iy0; --iy) {
            for (int ix = ix0; ix <= ix1; ++ix) {
              const Pose pose{ix, iy, o};
              if (auto why = check(i, pose)) {
                ++rejections[*why];
                continue;
              }
              const double score = local_objective(i, pose);
              if (score > best_score + kImprovementEps) {
                best_score = score;
                best = pose;
              }
            }
          }
        }
      }
      if (!best) return i;
      poses_[i] = *best;
      placed_[i] = true;
    }
    return std::nullopt;
  }

  // Depth-first search over every feasible candidate, best-scoring first.
  // Used when the greedy passes fail; gives up after `budget` checks.
  bool backtrack(const std::vector<int>& order, std::size_t depth, long& budget) {
    if (depth == order.size()) return true;
    const int i = order[depth];
    std::vector<std::pair<double, Pose>> candidates;
    for (const Orientation o : orientations_for(i)) {
      int ix0, ix1, iy0, iy1;
      if (!candidate_range(i, o, ix0, ix1, iy0, iy1)) continue;
      for (int iy = iy1; iy >= iy0; --iy) {
        for (int ix = ix0; ix <= ix1; ++ix) {
          if (--budget < 0) return false;
          const Pose pose{ix, iy, o};
          if (!check(i, pose)) candidates.emplace_back(local_objective(i, pose), pose);
        }
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first + kImprovementEps; });
    for (const auto& [score, pose] : candidates) {
      poses_[i] = pose;
      placed_[i] = true;
      if (backtrack(order, depth + 1, budget)) return true;
      placed_[i] = false;
      if (budget < 0) return false;
    }
    return false;
  }

  std::vector<Pose>& poses() { return poses_; }
  const std::vector<Pose>& poses() const { return poses_; }

  // Descendants in the stacking forest, including i itself.
  std::vector<int> subtree(int i) const {
    std::vector<int> out{i};
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (int c : items_[out[k]].children) out.push_back(c);
    }
    return out;
  }

  // All items are placed. Applies the proposal, checks every moved item and
  // reverts on failure.
  bool try_apply(const std::vector<std::pair<int, Pose>>& moves, std::vector<Pose>& saved) {
    saved.clear();
    for (const auto& [i, pose] : moves) {
      saved.push_back(poses_[i]);
      if (pose.ix < 0 || pose.iy < 0 || pose.ix >= lattice_.nx || pose.iy >= lattice_.ny) {
        revert(moves, saved);
        return false;
      }
    }
    for (const auto& [i, pose] : moves) poses_[i] = pose;
    for (const auto& [i, pose] : moves) {
      if (check(i, pose)) {
        revert(moves, saved);
        return false;
      }
    }
    return true;
  }

  void revert(const std::vector<std::pair<int, Pose>>& moves, const std::vector<Pose>& saved) {
    for (std::size_t k = 0; k < saved.size(); ++k) poses_[moves[k].first] = saved[k];
  }

  Layout to_layout() const {
    Layout layout;
    for (std::size_t i = 0; i < items_.size(); ++i) {
      Placement p;
      p.x_cm = lattice_.x(poses_[i].ix);
      p.y_cm = lattice_.y(poses_[i].iy);
      p.orientation = poses_[i].orientation;
      if (items_[i].base >= 0) p.stack_base = ids_[items_[i].base];
      layout[ids_[i]] = p;
    }
    return layout;
  }

 private:
  const Surface& surface_;
  const SolverParams& params_;
  Lattice lattice_;
  std::vector<std::string> ids_;
  std::vector<Item> items_;
  std::vector<Term> soft_;
  std::vector<Term> hard_;
  std::vector<Pose> poses_;
  std::vector<bool> placed_;
  double anchor_weight_ = 0.25;
  double anchor_radius_ = 30.0;
};

// Moves the failed item (after its stack bases) to the front of the order.
std::vector<int> promote(const std::vector<int>& order, int failed, const SurfaceProblem& problem) {
  std::vector<int> chain;
  for (int k = failed; k >= 0; k = problem.item(k).base) chain.insert(chain.begin(), k);
  std::vector<int> out = chain;
  for (int i : order) {
    if (std::find(chain.begin(), chain.end(), i) == chain.end()) out.push_back(i);
  }
  return out;
}

void anneal(SurfaceProblem& problem, const SolverParams& params, std::uint64_t seed,
            SurfaceSolveStats& stats) {
  const int n = static_cast<int>(problem.size());
  if (n == 0 || params.anneal_iters == 0) return;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stats.surface_index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, params.jitter_sigma_cm);
  std::uniform_int_distribution<int> pick_item(0, n - 1);

  std::vector<int> free_items;
  for (int i = 0; i < n; ++i) {
    if (!problem.item(i).fixed) free_items.push_back(i);
  }

  double current = problem.objective();
  double best_value = current;
  std::vector<Pose> best = problem.poses();
  double temperature = params.initial_temperature;
  std::vector<std::pair<int, Pose>> moves;
  std::vector<Pose> saved;
  std::vector<int> group;

  for (int iter = 0; iter < params.anneal_iters; ++iter, temperature *= params.cooling) {
    moves.clear();
    const double r = unit(rng);
    if (r < 0.6) {
      const int i = pick_item(rng);
      int dx = static_cast<int>(std::lround(jitter(rng) / params.grid_step_cm));
      int dy = static_cast<int>(std::lround(jitter(rng) / params.grid_step_cm));
      if (dx == 0 && dy == 0) {
        const int sign = unit(rng) < 0.5 ? -1 : 1;
        (unit(rng) < 0.5 ? dx : dy) = sign;
      }
      for (int k : problem.subtree(i)) {
        Pose p = problem.poses()[k];
        p.ix += dx;
        p.iy += dy;
        moves.emplace_back(k, p);
      }
    } else if (r < 0.7) {
      // Relocate anywhere on the lattice; escapes basins jitter cannot leave.
      const int i = pick_item(rng);
      const Pose from = problem.poses()[i];
      const int tx = std::uniform_int_distribution<int>(0, problem.lattice().nx - 1)(rng);
      const int ty = std::uniform_int_distribution<int>(0, problem.lattice().ny - 1)(rng);
      for (int k : problem.subtree(i)) {
        Pose p = problem.poses()[k];
        p.ix += tx - from.ix;
        p.iy += ty - from.iy;
        if (k == i && !problem.item(i).fixed) p.orientation = kAllOrientations[rng() % 4];
        moves.emplace_back(k, p);
      }
    } else if (r < 0.85) {
      if (free_items.empty()) continue;
      const int i = free_items[static_cast<std::size_t>(unit(rng) * free_items.size()) % free_items.size()];
      Pose p = problem.poses()[i];
      const int turns = 1 + static_cast<int>(unit(rng) * 3.0) % 3;
      p.orientation = p.orientation.rotated(turns);
      moves.emplace_back(i, p);
    } else {
      if (n < 2) continue;
      const int a = pick_item(rng);
      const int b = pick_item(rng);
      if (a == b || problem.item(a).level != problem.item(b).level) continue;
      const Pose pa = problem.poses()[a];
      const Pose pb = problem.poses()[b];
      for (int k : problem.subtree(a)) {
        Pose p = problem.poses()[k];
        p.ix += pb.ix - pa.ix;
        p.iy += pb.iy - pa.iy;
        moves.emplace_back(k, p);
      }
      for (int k : problem.subtree(b)) {
        Pose p = problem.poses()[k];
        p.ix += pa.ix - pb.ix;
        p.iy += pa.iy - pb.iy;
        moves.emplace_back(k, p);
      }
    }

    group.clear();
    for (const auto& m : moves) group.push_back(m.first);
    const double before = problem.group_objective(group);
    if (!problem.try_apply(moves, saved)) {
      ++stats.rejected_infeasible;
      continue;
    }
    const double delta = problem.group_objective(group) - before;
    if (delta >= 0.0 || unit(rng) < std::exp(delta / temperature)) {
      current += delta;
      ++stats.accepted_moves;
      if (current > best_value + kImprovementEps) {
        best_value = current;
        best = problem.poses();
      }
    } else {
      problem.revert(moves, saved);
    }
  }
  problem.poses() = best;
}

}  // namespace

SolveResult solve_detailed(const ConstraintSet& cs, std::span<const Surface> surfaces,
                           const SolverParams& params, const SolveOptions& options) {
  params.validate();
  SolveResult result;
  const auto orders = construction_order(cs);
  std::set<int> solved;

  for (const auto& [surface_index, ids] : orders) {
    if (options.surfaces && !options.surfaces->contains(surface_index)) continue;
    const Surface* surface = nullptr;
    for (const auto& s : surfaces) {
      if (s.index == surface_index) surface = &s;
    }
    if (surface == nullptr) throw OutOfBoundsError("no surface with index " + std::to_string(surface_index));
    solved.insert(surface_index);

    SurfaceProblem problem(cs, *surface, ids, params, options.warm_start);
    SurfaceSolveStats stats;
    stats.surface_index = surface_index;

    // Warm-started assets go first, keeping the construction order otherwise.
    std::vector<int> order(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) order[k] = static_cast<int>(k);
    std::stable_partition(order.begin(), order.end(), [&](int i) {
      for (int k = i; k >= 0; k = problem.item(k).base) {
        if (!problem.item(k).warm) return false;
      }
      return true;
    });

    const int max_attempts = 2 * static_cast<int>(ids.size()) + 3;
    std::array<int, kRejectCount> rejections{};
    std::optional<int> failed;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      ++stats.phase1_attempts;
      failed = problem.construct(order, rejections);
      if (!failed) break;
      order = promote(order, *failed, problem);
    }
    if (failed) {
      long budget = kBacktrackBudget;
      problem.reset();
      if (problem.backtrack(order, 0, budget)) failed.reset();
    }
    if (failed) {
      std::ostringstream msg;
      msg << "no feasible position for asset '" << problem.id(*failed) << "' on surface "
          << surface_index << " (rejected candidates:";
      for (int k = 0; k < kRejectCount; ++k) {
        if (rejections[k] > 0) msg << ' ' << kRejectionNames[k] << '=' << rejections[k];
      }
      msg << ')';
      throw InfeasibleError(problem.id(*failed), msg.str());
    }
    stats.phase1_objective = problem.objective();
    for (auto& [id, p] : problem.to_layout()) result.constructive[id] = p;

    anneal(problem, params, params.seed, stats);
    stats.final_objective = problem.objective();
    for (auto& [id, p] : problem.to_layout()) result.layout[id] = p;
    result.stats.push_back(stats);
  }

  std::vector<AssetSpec> assets;
  for (const auto& [id, a] : cs.assets) assets.push_back(a);
  assign_stack_heights(result.layout, assets, surfaces);
  assign_stack_heights(result.constructive, assets, surfaces);

  const ConstraintSet checked = restrict_to_surfaces(cs, solved);
  const auto violations = check_hard(result.layout, checked, surfaces, params);
  if (!violations.empty()) {
    // Unreachable unless the solver and the checker disagree.
    throw InfeasibleError(violations.front().subjects.front(),
                          "solver produced a layout violating " +
                              std::string(to_string(violations.front().kind)));
  }
  return result;
}

Layout solve(const ConstraintSet& cs, std::span<const Surface> surfaces, const SolverParams& params,
             const SolveOptions& options) {
  return solve_detailed(cs, surfaces, params, options).layout;
}

}  // namespace decor
