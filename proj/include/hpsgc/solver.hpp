#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hpsgc/program.hpp"

namespace hpsgc {

// The program uses a construct an interpreter refuses to handle.
class UnsupportedProgram : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  // Skip the lexical-rule call of directly recursive interaction clauses
  // and forbid re-retrieving that clause for the adapted call.
  bool specialized = false;
  // Resolution-depth budget. A literal at depth >= max_depth is cut off.
  // With `specialized`, the budget only applies to non-interaction
  // predicates.
  std::optional<std::size_t> max_depth;
  enum class Cutoff {
    Partial,  // the literal succeeds without binding; solution flagged partial
    Fail,     // the branch fails
  };
  Cutoff cutoff = Cutoff::Partial;
  // Caps the chain of interaction-predicate calls along one branch: the
  // goal (or first interaction call) is level 1, each nested interaction
  // call one more. Calls above max_rule_applications + 1 fail, so at most
  // that many lexical rules apply.
  std::optional<std::size_t> max_rule_applications;
  // Fuse on resolution steps; enumeration stops when it blows.
  std::optional<std::uint64_t> step_limit;
  std::optional<std::size_t> max_solutions;
};

struct SolveStats {
  std::uint64_t clause_tries = 0;
  std::uint64_t unification_attempts = 0;
  std::uint64_t choice_points = 0;
  std::uint64_t solutions = 0;
  std::uint64_t steps = 0;
  bool fuse_blown = false;
  std::vector<std::uint64_t> tries_per_clause;

  std::uint64_t tries_for(const Program& program, const PredicateId& pred) const;
  SolveStats& operator+=(const SolveStats& other);
  friend bool operator==(const SolveStats&, const SolveStats&) = default;
};

struct Solution {
  FeatureStructure args;  // the goal's arguments under the final bindings
  bool partial = false;   // some literal was cut off by the depth budget
};

// Depth-first, leftmost-literal SLD resolution over feature structures.
// Enumeration is pulled one solution at a time; without a depth budget or
// fuse it may not terminate.
class Solver {
 public:
  // Throws UnsupportedProgram for a specialized solve over indirectly
  // recursive interaction predicates.
  Solver(const Program& program, const Goal& goal, SolveOptions options = {});
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  std::optional<Solution> next();
  const SolveStats& stats() const { return stats_; }

 private:
  struct Cell;
  using GoalList = std::shared_ptr<const Cell>;
  struct ChoicePoint;

  bool cut_off(const Cell& cell) const;
  bool try_from(std::size_t alternative);
  bool resolve(const Cell& cell, std::size_t clause_id);
  bool backtrack();
  std::vector<std::size_t> candidates(const Cell& cell) const;

  const Program& program_;
  SolveOptions options_;
  Store store_;
  PredicateId pred_;
  std::vector<NodeId> goal_roots_;
  GoalList goals_;
  bool partial_ = false;
  std::vector<ChoicePoint> choice_points_;
  std::vector<bool> recursive_interaction_;
  SolveStats stats_;
  bool started_ = false;
  bool done_ = false;
};

// All solutions (subject to options) plus the final counters.
struct SolveResult {
  std::vector<Solution> solutions;
  SolveStats stats;
};

SolveResult solve_all(const Program& program, const Goal& goal, const SolveOptions& options);

// Plain top-down interpreter. CAUTION: need not terminate; use `limit`
// or a fuse in `options` for open-ended programs.
SolveResult solve(const Program& program, const Goal& goal, std::optional<std::size_t> limit = std::nullopt);
// Cuts off (and flags partial) every literal at depth >= max.
SolveResult solve_depth_bounded(const Program& program, const Goal& goal, std::size_t max);
// Interpreter specialized for calls to interaction predicates.
SolveResult solve_specialized(const Program& program, const Goal& goal,
                              std::optional<std::size_t> aux_max_depth = std::nullopt);

// True iff `clause` belongs to an interaction predicate and calls that
// same predicate in its body.
bool recursive_interaction_clause(const Program& program, const Clause& clause);

struct AdaptedBody {
  std::vector<Literal> body;  // over the original clause graph
  Literal removed;
  std::size_t removed_index = 0;
};

// Drops the lexical-rule call from a recursive interaction clause,
// keeping the interaction call and every sharing. Throws InputError when
// the body is not exactly one rule call plus one interaction call.
AdaptedBody make_body_more_general(const Program& program, const Clause& clause);

// Fresh isomorphic copy (node identities are positional, so this is the
// clause itself re-extracted through a new store).
Clause rename_clause(const Clause& clause);

// Throws UnsupportedProgram if interaction predicates are mutually
// recursive through each other.
void check_direct_recursion_only(const Program& program);

}  // namespace hpsgc
