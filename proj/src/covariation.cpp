#include "hpsgc/covariation.hpp"

#include <set>
#include <unordered_map>

#include "hpsgc/lattice.hpp"
#include "hpsgc/solver.hpp"

namespace hpsgc {

namespace {

std::vector<int> reference_counts(const FeatureStructure& fs) {
  std::vector<int> refs(fs.size(), 0);
  for (NodeId r : fs.roots()) ++refs[r];
  for (const auto& n : fs.nodes()) {
    for (const auto& a : n.arcs) ++refs[a.target];
  }
  return refs;
}

void frame_walk(const FeatureStructure& spec, const std::vector<int>& refs, NodeId out_node, Path& path,
                std::vector<Path>& out) {
  const Signature& sig = spec.sig();
  for (FeatId f : sig.features_of(spec.type(out_node))) {
    path.features.push_back(f);
    if (get_path(spec, path, 0)) {
      if (auto child = spec.follow(out_node, f)) {
        if (refs[*child] == 1 && !spec.node(*child).arcs.empty()) frame_walk(spec, refs, *child, path, out);
      } else {
        out.push_back(path);
      }
    }
    path.features.pop_back();
  }
}

}  // namespace

Frame compute_frame(const LexicalRule& rule, const Signature& sig, Diagnostics* warnings) {
  // The whole clause graph, so sharing with an attachment counts as mention.
  const FeatureStructure& spec = rule.clause.graph();
  Frame frame{rule.name, {}};
  Path path;
  frame_walk(spec, reference_counts(spec), spec.root(1), path, frame.shared_paths);

  bool common = false;
  for (FeatId f : sig.features_of(spec.type(spec.root(1)))) {
    common = common || sig.approp(spec.type(spec.root(0)), f) != kBottom;
  }
  if (!common && warnings) {
    warnings->push_back({Diagnostic::Severity::Warning, rule.clause.line, 0,
                         "rule " + rule.name + ": input and output share no appropriate features; empty frame"});
  }
  return frame;
}

FeatureStructure framed_spec(const LexicalRule& rule, const Frame& frame) {
  const FeatureStructure spec = rule.spec();
  Store store(spec.signature());
  const auto roots = store.import(spec);
  for (const auto& p : frame.shared_paths) {
    auto a = store.descend(roots[0], p);
    auto b = store.descend(roots[1], p);
    if (!a || !b || !store.unify(*a, *b)) {
      throw InputError("rule " + rule.name + ": frame path " + p.str(spec.sig()) + " cannot be shared",
                       rule.clause.line);
    }
  }
  auto out = store.extract(roots);
  if (!out) throw InputError("rule " + rule.name + ": frame makes the rule cyclic", rule.clause.line);
  return std::move(*out);
}

std::optional<std::size_t> InteractionAutomaton::next(std::size_t state, std::size_t rule) const {
  auto it = transitions.find({state, rule});
  if (it == transitions.end()) return std::nullopt;
  return it->second;
}

InteractionAutomaton build_automaton(std::span<const LexicalRule> rules, std::span<const Frame> frames) {
  const std::size_t n = rules.size();
  std::vector<FeatureStructure> outs, ins;
  for (std::size_t r = 0; r < n; ++r) {
    outs.push_back(framed_spec(rules[r], frames[r]).project(1));
    ins.push_back(rules[r].in_spec());
  }
  // Successor set of each rule, independent of the state it fires in.
  std::vector<std::vector<std::size_t>> after(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t q = 0; q < n; ++q) {
      if (unify(outs[r], ins[q])) after[r].push_back(q);
    }
  }

  InteractionAutomaton a;
  std::map<std::vector<std::size_t>, std::size_t> ids;
  std::vector<std::size_t> all(n);
  for (std::size_t r = 0; r < n; ++r) all[r] = r;
  ids[all] = 0;
  a.permitted.push_back(all);
  for (std::size_t s = 0; s < a.permitted.size(); ++s) {
    const auto perm = a.permitted[s];
    for (std::size_t r : perm) {
      auto [it, fresh] = ids.emplace(after[r], a.permitted.size());
      if (fresh) a.permitted.push_back(after[r]);
      a.transitions[{s, r}] = it->second;
    }
  }
  return a;
}

InteractionAutomaton build_automaton(std::span<const LexicalRule> rules, const Signature& sig) {
  std::vector<Frame> frames;
  for (const auto& r : rules) frames.push_back(compute_frame(r, sig));
  return build_automaton(rules, frames);
}

std::string interaction_name(std::size_t state) { return "interaction_" + std::to_string(state); }

CompiledLexicon compile_lexicon(const Grammar& grammar, const SignaturePtr& sig) {
  Program prog(sig);
  Diagnostics warnings;
  std::vector<Frame> frames;
  for (const auto& r : grammar.rules) frames.push_back(compute_frame(r, *sig, &warnings));
  InteractionAutomaton automaton = build_automaton(grammar.rules, frames);

  std::set<PredicateId> defined;
  for (const auto& c : grammar.clauses) defined.insert(c.head().pred);
  Diagnostics errors;
  for (const auto& r : grammar.rules) {
    if (defined.count({r.name, 2})) {
      errors.push_back({Diagnostic::Severity::Error, r.clause.line, 0,
                        "lexical rule " + r.name + " clashes with predicate " + r.name + "/2"});
    }
    for (const auto& lit : r.clause.body()) {
      if (!defined.count(lit.pred)) {
        errors.push_back({Diagnostic::Severity::Error, r.clause.line, 0,
                          "lexical rule " + r.name + " calls undefined predicate " + lit.pred.str()});
      }
    }
  }
  if (!errors.empty()) throw InputError(std::move(errors));

  auto ipred = [](std::size_t s) { return PredicateId{interaction_name(s), 2}; };
  for (std::size_t s = 0; s < automaton.state_count(); ++s) {
    for (std::size_t r : automaton.permitted[s]) {
      Store store(sig);
      const NodeId in = store.add_node(sig->top());
      const NodeId aux = store.add_node(sig->top());
      const NodeId out = store.add_node(sig->top());
      for (const auto& p : frames[r].shared_paths) {
        auto a = store.descend(in, p);
        auto b = store.descend(aux, p);
        if (!a || !b || !store.unify(*a, *b)) throw InternalError("frame path not appropriate on a top node");
      }
      const PredicateId rule_pred{grammar.rules[r].name, 2};
      prog.add(Clause::build(store, {ipred(s), {in, out}, std::nullopt},
                             {{rule_pred, {in, aux}, std::nullopt},
                              {ipred(*automaton.next(s, r)), {aux, out}, std::nullopt}}));
    }
  }
  for (std::size_t s = 0; s < automaton.state_count(); ++s) {
    Store store(sig);
    const NodeId x = store.add_node(sig->top());
    prog.add(Clause::build(store, {ipred(s), {x, x}, std::nullopt}, {}));
    prog.mark_interaction(ipred(s));
  }
  for (const auto& r : grammar.rules) prog.add(r.clause);
  for (const auto& c : grammar.clauses) prog.add(c);
  for (const auto& p : grammar.interaction) prog.mark_interaction(p);

  std::vector<std::size_t> extended;
  for (const auto& e : grammar.entries) {
    Store store(sig);
    const NodeId base = store.import(e.fs)[0];
    const NodeId out = store.add_node(sig->top());
    Clause c = Clause::build(store, {kExtendedLexEntry, {out}, std::nullopt}, {{ipred(0), {base, out}, std::nullopt}});
    c.line = e.line;
    extended.push_back(prog.add(std::move(c)));
  }
  return {std::move(prog), std::move(automaton), std::move(frames), std::move(extended), std::move(warnings)};
}

ExpandedLexicon expand_lexicon(const Grammar& grammar, const SignaturePtr& sig, std::size_t bound) {
  // Rule clauses carry their frames here; attachments come from the
  // grammar's own clauses.
  Program prog(sig);
  std::vector<Frame> frames;
  for (const auto& r : grammar.rules) {
    frames.push_back(compute_frame(r, *sig));
    // The framed IN/OUT graph unified with the rule clause keeps the
    // attachment literals.
    Store store(sig);
    const auto roots = store.import(framed_spec(r, frames.back()));
    std::vector<NodeId> map;
    store.import(r.clause.graph(), map);
    for (std::size_t k = 0; k < 2; ++k) {
      if (!store.unify(roots[k], map[r.clause.head().args[k]])) throw InternalError("framed rule does not unify");
    }
    std::vector<Literal> body;
    for (auto lit : r.clause.body()) {
      for (auto& a : lit.args) a = map[a];
      body.push_back(std::move(lit));
    }
    Clause c = Clause::build(store, {{r.name, 2}, {roots[0], roots[1]}, std::nullopt}, std::move(body));
    c.line = r.clause.line;
    prog.add(std::move(c));
  }
  for (const auto& c : grammar.clauses) prog.add(c);
  const InteractionAutomaton automaton = build_automaton(grammar.rules, frames);

  ExpandedLexicon out;
  std::unordered_map<FeatureStructure, std::set<std::size_t>, FeatureStructureHash> visited;
  std::unordered_map<FeatureStructure, bool, FeatureStructureHash> emitted;
  auto emit = [&](const FeatureStructure& fs) {
    if (emitted.emplace(fs, true).second) out.entries.push_back(fs);
  };

  std::vector<std::pair<FeatureStructure, std::size_t>> frontier;
  for (const auto& e : grammar.entries) {
    emit(e.fs);
    if (visited[e.fs].insert(0).second) frontier.emplace_back(e.fs, 0);
  }

  auto apply = [&](const FeatureStructure& fs, std::size_t rule) {
    Store store(sig);
    const NodeId in = store.import(fs)[0];
    const NodeId o = store.add_node(sig->top());
    auto args = store.extract(std::vector<NodeId>{in, o});
    SolveOptions opts;
    opts.step_limit = 1'000'000;
    auto res = solve_all(prog, Goal{{grammar.rules[rule].name, 2}, std::move(*args), std::nullopt}, opts);
    if (res.stats.fuse_blown) {
      throw InputError("attachments of rule " + grammar.rules[rule].name + " do not terminate");
    }
    std::vector<FeatureStructure> results;
    for (auto& s : res.solutions) results.push_back(s.args.project(1));
    return results;
  };

  for (std::size_t level = 0; level < bound && !frontier.empty(); ++level) {
    std::vector<std::pair<FeatureStructure, std::size_t>> next;
    for (const auto& [fs, state] : frontier) {
      for (std::size_t r : automaton.permitted[state]) {
        const std::size_t to = *automaton.next(state, r);
        for (auto& derived : apply(fs, r)) {
          emit(derived);
          if (visited[derived].insert(to).second) next.emplace_back(std::move(derived), to);
        }
      }
    }
    frontier = std::move(next);
  }

  // One probe step beyond the bound tells whether the lexicon is closed.
  for (const auto& [fs, state] : frontier) {
    for (std::size_t r : automaton.permitted[state]) {
      for (const auto& derived : apply(fs, r)) {
        if (!emitted.count(derived)) out.saturated = false;
      }
      if (!out.saturated) break;
    }
    if (!out.saturated) break;
  }
  if (!out.saturated) {
    out.warnings.push_back({Diagnostic::Severity::Warning, 0, 0,
                            "lexicon infinite at this bound (" + std::to_string(bound) + ")"});
  }
  return out;
}

}  // namespace hpsgc
