#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hpsgc/solver.hpp"

namespace hpsgc {

struct PropagationTarget {
  std::size_t clause_id = 0;
  std::size_t body_index = 0;
  friend bool operator==(const PropagationTarget&, const PropagationTarget&) = default;
};

struct PropagationStrategy {
  enum class Interpreter {
    Plain,         // terminating programs only
    DepthBounded,  // partial solutions take part in the fold
    Specialized,
  };
  enum class OnEmpty { DeleteClause, Error };

  Interpreter interpreter = Interpreter::Plain;
  // DepthBounded: the cap. Specialized: optional budget for
  // non-interaction predicates.
  std::optional<std::size_t> max_depth;
  OnEmpty on_empty = OnEmpty::DeleteClause;
  // Plain enumeration that blows this fuse is an error, not a factor.
  std::uint64_t step_limit = 1'000'000;

  static PropagationStrategy plain() { return {}; }
  static PropagationStrategy depth_bounded(std::size_t max) { return {Interpreter::DepthBounded, max}; }
  static PropagationStrategy specialized(std::optional<std::size_t> aux = std::nullopt) {
    return {Interpreter::Specialized, aux};
  }
};

struct CommonFactor {
  FeatureStructure fs;  // msg of every solution; one root per goal argument
  std::size_t solution_count = 0;
  bool any_partial = false;
};

struct TargetReport {
  PropagationTarget target;  // ids as in the program the target was applied to
  PredicateId predicate;
  int line = 0;
  FeatureStructure original_goal;
  std::optional<CommonFactor> factor;  // empty: no solutions
  bool more_specific = false;
  bool clause_deleted = false;
  SolveStats stats;
};

// Solver settings an interpreter choice stands for.
SolveOptions solve_options_for(const PropagationStrategy& strategy);

// Enumerates the goal's solutions under `strategy` and folds them with msg.
// nullopt when there are none. Throws UnsupportedProgram when the plain
// interpreter is asked to run on a potentially nonterminating program or
// blows its fuse.
std::optional<CommonFactor> generalized_solutions_for_goal(const Program& program, const Goal& goal,
                                                           const PropagationStrategy& strategy,
                                                           SolveStats* stats = nullptr);

// Replaces the target goal by its unification with the common factor.
// Throws InputError for an unsatisfiable goal under OnEmpty::Error.
std::pair<Program, TargetReport> propagate_goal(const Program& program, const PropagationTarget& target,
                                                const PropagationStrategy& strategy);

// Every body goal, clause source order, left to right.
std::vector<PropagationTarget> all_body_goals(const Program& program);

// Applies propagate_goal to each target in order. Target ids refer to the
// input program; deleted clauses make their later targets vanish. Without
// explicit targets every body goal is visited in source order.
std::pair<Program, std::vector<TargetReport>> propagate_program(
    const Program& program, const std::optional<std::vector<PropagationTarget>>& targets,
    const PropagationStrategy& strategy);

}  // namespace hpsgc
