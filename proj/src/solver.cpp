#include "hpsgc/solver.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace hpsgc {

struct Solver::Cell {
  const PredicateId* pred;
  std::vector<NodeId> args;
  std::size_t depth;
  std::size_t interaction_level;
  std::optional<std::size_t> forbidden;
  std::optional<std::size_t> pinned;
  GoalList next;
};

struct Solver::ChoicePoint {
  Store::Mark mark;
  GoalList goals;  // selected literal still at the front
  std::size_t next_alternative;
  bool partial;
};

std::uint64_t SolveStats::tries_for(const Program& program, const PredicateId& pred) const {
  std::uint64_t total = 0;
  for (std::size_t id : program.clauses_for(pred)) {
    if (id < tries_per_clause.size()) total += tries_per_clause[id];
  }
  return total;
}

SolveStats& SolveStats::operator+=(const SolveStats& o) {
  clause_tries += o.clause_tries;
  unification_attempts += o.unification_attempts;
  choice_points += o.choice_points;
  solutions += o.solutions;
  steps += o.steps;
  fuse_blown = fuse_blown || o.fuse_blown;
  if (tries_per_clause.size() < o.tries_per_clause.size()) tries_per_clause.resize(o.tries_per_clause.size());
  for (std::size_t i = 0; i < o.tries_per_clause.size(); ++i) tries_per_clause[i] += o.tries_per_clause[i];
  return *this;
}

bool recursive_interaction_clause(const Program& program, const Clause& clause) {
  if (!program.is_interaction(clause.head().pred)) return false;
  return std::any_of(clause.body().begin(), clause.body().end(),
                     [&](const Literal& l) { return l.pred == clause.head().pred; });
}

AdaptedBody make_body_more_general(const Program& program, const Clause& clause) {
  const auto& body = clause.body();
  auto shape_error = [&] {
    return InputError("recursive interaction clause for " + clause.head().pred.str() +
                          " must have exactly one rule call and one interaction call",
                      clause.line);
  };
  if (body.size() != 2) throw shape_error();
  const bool first_is_interaction = program.is_interaction(body[0].pred);
  const bool second_is_interaction = program.is_interaction(body[1].pred);
  if (first_is_interaction == second_is_interaction) throw shape_error();
  const std::size_t removed = first_is_interaction ? 1 : 0;
  AdaptedBody out{{body[1 - removed]}, body[removed], removed};
  return out;
}

Clause rename_clause(const Clause& clause) {
  Store store(clause.graph().signature());
  std::vector<NodeId> map;
  store.import(clause.graph(), map);
  auto remap = [&](Literal l) {
    for (auto& a : l.args) a = map[a];
    return l;
  };
  std::vector<Literal> body;
  for (const auto& l : clause.body()) body.push_back(remap(l));
  Clause out = Clause::build(store, remap(clause.head()), std::move(body));
  out.line = clause.line;
  return out;
}

void check_direct_recursion_only(const Program& program) {
  const auto& preds = program.interaction_predicates();
  std::map<PredicateId, std::set<PredicateId>> edges;
  for (const auto& p : preds) {
    for (std::size_t id : program.clauses_for(p)) {
      for (const auto& l : program.clause(id).body()) {
        if (preds.count(l.pred) && l.pred != p) edges[p].insert(l.pred);
      }
    }
  }
  // A cycle among distinct predicates is indirect recursion.
  std::map<PredicateId, int> state;  // 0 new, 1 on stack, 2 done
  std::function<void(const PredicateId&)> visit = [&](const PredicateId& p) {
    state[p] = 1;
    for (const auto& q : edges[p]) {
      if (state[q] == 1) {
        throw UnsupportedProgram("indirect recursion requires tabling (unsupported): " + p.str() + " -> " +
                                 q.str());
      }
      if (state[q] == 0) visit(q);
    }
    state[p] = 2;
  };
  for (const auto& p : preds) {
    if (state[p] == 0) visit(p);
  }
}

Solver::Solver(const Program& program, const Goal& goal, SolveOptions options)
    : program_(program), options_(options), store_(program.signature()) {
  if (options_.specialized) check_direct_recursion_only(program_);
  recursive_interaction_.assign(program_.size(), false);
  if (options_.specialized) {
    for (const auto& p : program_.interaction_predicates()) {
      for (std::size_t id : program_.clauses_for(p)) {
        recursive_interaction_[id] = recursive_interaction_clause(program_, program_.clause(id));
      }
    }
  }
  stats_.tries_per_clause.assign(program_.size(), 0);
  goal_roots_ = store_.import(goal.args);
  auto cell = std::make_shared<Cell>();
  cell->pred = &goal.pred;
  cell->args = goal_roots_;
  cell->depth = 0;
  cell->interaction_level = program_.is_interaction(goal.pred) ? 1 : 0;
  cell->pinned = goal.pinned_clause;
  goals_ = cell;
  pred_ = goal.pred;
  cell->pred = &pred_;
}

Solver::~Solver() = default;

bool Solver::cut_off(const Cell& cell) const {
  if (!options_.max_depth) return false;
  if (options_.specialized && program_.is_interaction(*cell.pred)) return false;
  return cell.depth >= *options_.max_depth;
}

std::vector<std::size_t> Solver::candidates(const Cell& cell) const {
  if (options_.max_rule_applications && cell.interaction_level > *options_.max_rule_applications + 1) return {};
  if (cell.pinned) {
    if (*cell.pinned >= program_.size() || program_.clause(*cell.pinned).head().pred != *cell.pred) return {};
    return {*cell.pinned};
  }
  std::span<const std::size_t> ids = program_.clauses_for(*cell.pred);
  std::vector<std::size_t> bucket;
  if (const ArgIndex* idx = program_.arg_index(*cell.pred); idx && !cell.args.empty()) {
    if (auto key = atom_list_key(store_, cell.args[0])) {
      auto it = idx->keyed.find(*key);
      if (it != idx->keyed.end()) bucket = it->second;
      bucket.insert(bucket.end(), idx->unkeyed.begin(), idx->unkeyed.end());
      std::sort(bucket.begin(), bucket.end());
      ids = bucket;
    }
  }
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) {
    if (cell.forbidden && *cell.forbidden == id) continue;
    out.push_back(id);
  }
  return out;
}

bool Solver::resolve(const Cell& cell, std::size_t clause_id) {
  ++stats_.clause_tries;
  ++stats_.tries_per_clause[clause_id];
  ++stats_.steps;
  const Clause& clause = program_.clause(clause_id);
  const FeatureStructure& graph = clause.graph();
  const auto& head = clause.head();
  const Signature& sig = store_.sig();

  // Cheap type filter before copying the clause in.
  for (std::size_t i = 0; i < head.args.size(); ++i) {
    if (sig.meet(store_.type(cell.args[i]), graph.type(head.args[i])) == kBottom) {
      ++stats_.unification_attempts;
      return false;
    }
  }

  std::vector<NodeId> map;
  store_.import(graph, map);
  for (std::size_t i = 0; i < head.args.size(); ++i) {
    ++stats_.unification_attempts;
    if (!store_.unify(cell.args[i], map[head.args[i]])) return false;
  }

  GoalList rest = cell.next;
  auto push = [&](const Literal& lit, std::optional<std::size_t> forbidden) {
    auto c = std::make_shared<Cell>();
    c->pred = &lit.pred;
    c->args.reserve(lit.args.size());
    for (NodeId a : lit.args) c->args.push_back(map[a]);
    c->depth = cell.depth + 1;
    c->interaction_level = cell.interaction_level + (program_.is_interaction(lit.pred) ? 1 : 0);
    c->forbidden = forbidden;
    c->pinned = lit.pinned_clause;
    c->next = rest;
    rest = c;
  };

  // An adapted call resolves its other clauses with their full bodies.
  if (recursive_interaction_[clause_id] && !cell.forbidden) {
    const AdaptedBody adapted = make_body_more_general(program_, clause);
    push(clause.body()[1 - adapted.removed_index], clause_id);
  } else {
    const auto& body = clause.body();
    for (auto it = body.rbegin(); it != body.rend(); ++it) push(*it, std::nullopt);
  }
  goals_ = rest;
  return true;
}

bool Solver::try_from(std::size_t alternative) {
  const GoalList selected = goals_;
  const bool partial_before = partial_;
  const auto alts = candidates(*selected);
  for (std::size_t j = alternative; j < alts.size(); ++j) {
    if (options_.step_limit && stats_.steps >= *options_.step_limit) {
      stats_.fuse_blown = true;
      done_ = true;
      return false;
    }
    const Store::Mark mark = store_.mark();
    if (resolve(*selected, alts[j])) {
      if (j + 1 < alts.size()) {
        choice_points_.push_back({mark, selected, j + 1, partial_before});
        ++stats_.choice_points;
      }
      return true;
    }
    store_.undo(mark);
    goals_ = selected;
  }
  return false;
}

bool Solver::backtrack() {
  while (!choice_points_.empty() && !done_) {
    ChoicePoint cp = std::move(choice_points_.back());
    choice_points_.pop_back();
    store_.undo(cp.mark);
    goals_ = cp.goals;
    partial_ = cp.partial;
    if (try_from(cp.next_alternative)) return true;
  }
  return false;
}

std::optional<Solution> Solver::next() {
  if (done_) return std::nullopt;
  if (options_.max_solutions && stats_.solutions >= *options_.max_solutions) {
    done_ = true;
    return std::nullopt;
  }
  if (started_ && !backtrack()) {
    done_ = true;
    return std::nullopt;
  }
  started_ = true;
  while (true) {
    if (!goals_) {
      if (auto fs = store_.extract(goal_roots_)) {
        ++stats_.solutions;
        return Solution{std::move(*fs), partial_};
      }
      if (!backtrack()) break;
      continue;
    }
    const Cell& cell = *goals_;
    if (cut_off(cell)) {
      if (options_.cutoff == SolveOptions::Cutoff::Partial) {
        partial_ = true;
        goals_ = cell.next;
        continue;
      }
      if (!backtrack()) break;
      continue;
    }
    if (!try_from(0) && !backtrack()) break;
  }
  done_ = true;
  return std::nullopt;
}

SolveResult solve_all(const Program& program, const Goal& goal, const SolveOptions& options) {
  Solver solver(program, goal, options);
  SolveResult out;
  while (auto s = solver.next()) out.solutions.push_back(std::move(*s));
  out.stats = solver.stats();
  return out;
}

SolveResult solve(const Program& program, const Goal& goal, std::optional<std::size_t> limit) {
  SolveOptions o;
  o.max_solutions = limit;
  return solve_all(program, goal, o);
}

SolveResult solve_depth_bounded(const Program& program, const Goal& goal, std::size_t max) {
  SolveOptions o;
  o.max_depth = max;
  return solve_all(program, goal, o);
}

SolveResult solve_specialized(const Program& program, const Goal& goal, std::optional<std::size_t> aux_max_depth) {
  SolveOptions o;
  o.specialized = true;
  o.max_depth = aux_max_depth;
  return solve_all(program, goal, o);
}

}  // namespace hpsgc
