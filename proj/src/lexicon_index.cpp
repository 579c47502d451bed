#include "hpsgc/lexicon_index.hpp"

#include <algorithm>
#include <set>

#include "hpsgc/covariation.hpp"

namespace hpsgc {

namespace {

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> out(1);
  for (char c : key) {
    if (c == '\x1f') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (key.empty()) out.clear();
  return out;
}

FeatId phon_feature(const Signature& sig) {
  auto f = sig.find_feature("PHON");
  if (!f) throw InputError("lexicon indexing needs a PHON feature");
  return *f;
}

}  // namespace

std::pair<Program, std::vector<TargetReport>> propagate_extended_entries(const Program& covariation,
                                                                        const PropagationStrategy& strategy) {
  std::vector<PropagationTarget> targets;
  for (std::size_t id : covariation.clauses_for(kExtendedLexEntry)) {
    if (!covariation.clause(id).is_unit()) targets.push_back({id, 0});
  }
  return propagate_program(covariation, targets, strategy);
}

std::vector<std::vector<std::string>> IndexedLexicon::keys() const {
  std::vector<std::vector<std::string>> out;
  for (const auto& [k, _] : buckets().keyed) out.push_back(split_key(k));
  std::sort(out.begin(), out.end());
  return out;
}

IndexedLexicon split_entries(const Program& optimized, const SplitOptions& options) {
  const SignaturePtr& sig = optimized.signature();
  const FeatId phon = phon_feature(*sig);
  if (optimized.defines(kIndexedLexEntry)) throw InputError("program is already indexed");

  IndexedLexicon out{optimized, {}, {}};
  out.program.mark_indexed(kIndexedLexEntry);
  const std::vector<std::size_t> entries(optimized.clauses_for(kExtendedLexEntry).begin(),
                                         optimized.clauses_for(kExtendedLexEntry).end());
  for (std::size_t k : entries) {
    SolveOptions so;
    so.specialized = true;
    so.max_depth = options.aux_max_depth;
    so.cutoff = SolveOptions::Cutoff::Fail;
    so.step_limit = options.step_limit;
    Goal g{kExtendedLexEntry, FeatureStructure::top(sig), k};
    auto res = solve_all(optimized, g, so);

    // Distinct keys in first-seen order; any non-ground PHON sends the
    // whole entry to the fallback list.
    std::vector<std::string> keys;
    std::set<std::string> seen;
    bool ground = !res.stats.fuse_blown;
    for (const auto& s : res.solutions) {
      auto v = s.args.follow(s.args.root(0), phon);
      auto key = v ? atom_list_key(s.args, *v) : std::nullopt;
      if (!key) {
        ground = false;
        break;
      }
      if (seen.insert(*key).second) keys.push_back(*key);
    }

    const int line = optimized.clause(k).line;
    if (!ground) {
      out.fallback.push_back(k);
      out.warnings.push_back({Diagnostic::Severity::Warning, line, 0,
                              "extended entry " + std::to_string(k) +
                                  (res.stats.fuse_blown ? " exceeds the step limit"
                                                        : " has phonology that is not fully instantiated") +
                                  "; not indexed"});
      Store store(sig);
      const NodeId o = store.add_node(sig->top());
      const NodeId w = *store.descend(o, phon);
      Clause c = Clause::build(store, {kIndexedLexEntry, {w, o}, std::nullopt}, {{kExtendedLexEntry, {o}, k}});
      c.line = line;
      out.program.add(std::move(c));
      continue;
    }
    for (const auto& key : keys) {
      Store store(sig);
      const NodeId o = store.add_node(sig->top());
      const NodeId w = *store.descend(o, phon);
      put_atom_list(store, w, split_key(key));
      Clause c = Clause::build(store, {kIndexedLexEntry, {w, o}, std::nullopt}, {{kExtendedLexEntry, {o}, k}});
      c.line = line;
      out.program.add(std::move(c));
    }
  }
  return out;
}

LookupResult lookup(const Program& indexed, const std::vector<std::string>& words, const SolveOptions& options) {
  if (!indexed.is_indexed(kIndexedLexEntry)) throw InputError("program has no lexicon index");
  const SignaturePtr& sig = indexed.signature();
  Store store(sig);
  const NodeId w = store.add_node(sig->top());
  const NodeId o = store.add_node(sig->top());
  put_atom_list(store, w, words);
  auto args = store.extract(std::vector<NodeId>{w, o});
  auto res = solve_all(indexed, Goal{kIndexedLexEntry, std::move(*args), std::nullopt}, options);
  LookupResult out;
  for (auto& s : res.solutions) out.entries.push_back(s.args.project(1));
  out.stats = res.stats;
  return out;
}

}  // namespace hpsgc
