#include "hpsgc/propagation.hpp"

#include "hpsgc/lattice.hpp"

namespace hpsgc {

SolveOptions solve_options_for(const PropagationStrategy& strategy) {
  using I = PropagationStrategy::Interpreter;
  SolveOptions opts;
  switch (strategy.interpreter) {
    case I::Plain:
      opts.step_limit = strategy.step_limit;
      break;
    case I::DepthBounded:
      if (!strategy.max_depth) throw InputError("depth-bounded propagation needs a maximum depth");
      opts.max_depth = strategy.max_depth;
      break;
    case I::Specialized:
      opts.specialized = true;
      opts.max_depth = strategy.max_depth;
      break;
  }
  return opts;
}

std::optional<CommonFactor> generalized_solutions_for_goal(const Program& program, const Goal& goal,
                                                           const PropagationStrategy& strategy,
                                                           SolveStats* stats) {
  if (strategy.interpreter == PropagationStrategy::Interpreter::Plain && program.potentially_nonterminating()) {
    throw UnsupportedProgram("plain interpreter refused: recursive interaction predicates make enumeration "
                             "nonterminating; use the specialized or depth-bounded interpreter");
  }
  const SolveOptions opts = solve_options_for(strategy);
  Solver solver(program, goal, opts);
  std::optional<FeatureStructure> acc;
  CommonFactor out{goal.args, 0, false};
  while (auto s = solver.next()) {
    acc = acc ? msg(*acc, s->args) : std::move(s->args);
    ++out.solution_count;
    out.any_partial = out.any_partial || s->partial;
  }
  if (stats) *stats = solver.stats();
  if (solver.stats().fuse_blown) {
    throw UnsupportedProgram("enumeration of " + goal.pred.str() + " exceeded " +
                             std::to_string(strategy.step_limit) +
                             " steps; use the depth-bounded or specialized interpreter");
  }
  if (!acc) return std::nullopt;
  out.fs = std::move(*acc);
  return out;
}

namespace {

// Rewrites `program` in place.
TargetReport propagate_in_place(Program& program, const PropagationTarget& target,
                                const PropagationStrategy& strategy) {
  if (target.clause_id >= program.size() ||
      target.body_index >= program.clause(target.clause_id).body().size()) {
    throw InputError("propagation target (" + std::to_string(target.clause_id) + ", " +
                     std::to_string(target.body_index) + ") does not exist");
  }
  const Clause& clause = program.clause(target.clause_id);
  const Literal& lit = clause.body()[target.body_index];
  const Goal goal{lit.pred, clause.literal_args(static_cast<int>(target.body_index)), lit.pinned_clause};

  TargetReport report{target, lit.pred, clause.line, goal.args, std::nullopt, false, false, {}};
  report.factor = generalized_solutions_for_goal(program, goal, strategy, &report.stats);

  Program& out = program;
  if (!report.factor) {
    if (strategy.on_empty == PropagationStrategy::OnEmpty::Error) {
      throw InputError("goal " + lit.pred.str() + " in clause " + std::to_string(target.clause_id) +
                           " has no solutions",
                       clause.line);
    }
    out.remove(target.clause_id);
    report.clause_deleted = true;
    return report;
  }

  Store store(program.signature());
  std::vector<NodeId> map;
  store.import(clause.graph(), map);
  const auto factor_roots = store.import(report.factor->fs);
  for (std::size_t k = 0; k < lit.args.size(); ++k) {
    if (!store.unify(map[lit.args[k]], factor_roots[k])) {
      throw InternalError("common factor does not unify with its own goal: " +
                          store.last_clash().str(store.sig()));
    }
  }
  auto remap = [&](Literal l) {
    for (auto& a : l.args) a = map[a];
    return l;
  };
  std::vector<Literal> body;
  for (const auto& l : clause.body()) body.push_back(remap(l));
  std::optional<Clause> rewritten;
  try {
    rewritten = Clause::build(store, remap(clause.head()), std::move(body));
  } catch (const InputError& e) {
    throw InternalError(std::string("propagation produced an invalid clause: ") + e.what());
  }
  rewritten->line = clause.line;
  report.more_specific = !(rewritten->literal_args(static_cast<int>(target.body_index)) == goal.args);
  out.replace(target.clause_id, std::move(*rewritten));
  return report;
}

}  // namespace

std::pair<Program, TargetReport> propagate_goal(const Program& program, const PropagationTarget& target,
                                                const PropagationStrategy& strategy) {
  Program out = program;
  TargetReport report = propagate_in_place(out, target, strategy);
  return {std::move(out), std::move(report)};
}

std::vector<PropagationTarget> all_body_goals(const Program& program) {
  std::vector<PropagationTarget> out;
  for (std::size_t c = 0; c < program.size(); ++c) {
    for (std::size_t b = 0; b < program.clause(c).body().size(); ++b) out.push_back({c, b});
  }
  return out;
}

std::pair<Program, std::vector<TargetReport>> propagate_program(
    const Program& program, const std::optional<std::vector<PropagationTarget>>& targets,
    const PropagationStrategy& strategy) {
  const auto todo = targets ? *targets : all_body_goals(program);
  // current[i]: where input clause i now lives, if it still exists.
  std::vector<std::optional<std::size_t>> current(program.size());
  for (std::size_t i = 0; i < program.size(); ++i) current[i] = i;

  Program prog = program;
  std::vector<TargetReport> reports;
  for (const auto& t : todo) {
    if (t.clause_id >= current.size()) throw InputError("propagation target clause out of range");
    if (!current[t.clause_id]) continue;
    TargetReport report = propagate_in_place(prog, {*current[t.clause_id], t.body_index}, strategy);
    if (report.clause_deleted) {
      const std::size_t gone = *current[t.clause_id];
      for (auto& c : current) {
        if (!c) continue;
        if (*c == gone) {
          c.reset();
        } else if (*c > gone) {
          --*c;
        }
      }
    }
    reports.push_back(std::move(report));
  }
  return {std::move(prog), std::move(reports)};
}

}  // namespace hpsgc
