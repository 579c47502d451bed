#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hpsgc/feature_structure.hpp"
#include "hpsgc/store.hpp"

namespace hpsgc {

struct PredicateId {
  std::string name;
  std::uint32_t arity = 0;

  std::string str() const { return name + "/" + std::to_string(arity); }
  friend auto operator<=>(const PredicateId&, const PredicateId&) = default;
};

struct Literal {
  PredicateId pred;
  std::vector<NodeId> args;  // nodes of the owning clause's graph
  // When set, only this clause of the program may resolve the literal.
  std::optional<std::size_t> pinned_clause;

  friend bool operator==(const Literal&, const Literal&) = default;
};

// A definite clause. Head and body arguments share one multi-rooted graph
// whose roots are all literal arguments in order (head first).
class Clause {
 public:
  // Literal args are ids in `store`; the graph is extracted from it.
  // Throws InputError if the arguments form a cyclic graph.
  static Clause build(const Store& store, Literal head, std::vector<Literal> body);
  // A clause over an existing multi-rooted graph: roots are consumed in
  // order, head arity first, then each body literal's arity.
  static Clause from_graph(FeatureStructure graph, PredicateId head, std::vector<Literal> body_shape);

  const FeatureStructure& graph() const { return graph_; }
  const Literal& head() const { return head_; }
  const std::vector<Literal>& body() const { return body_; }
  bool is_unit() const { return body_.empty(); }

  // Copy of the clause graph restricted to one literal's arguments
  // (-1 = head, otherwise body index).
  FeatureStructure literal_args(int literal) const;
  // Index of the first graph root belonging to a literal.
  std::size_t root_offset(int literal) const;

  int line = 0;  // source line, 0 if synthesized

  friend bool operator==(const Clause& a, const Clause& b) {
    return a.graph_ == b.graph_ && a.head_ == b.head_ && a.body_ == b.body_;
  }

 private:
  FeatureStructure graph_;
  Literal head_;
  std::vector<Literal> body_;
};

// Key of a fully instantiated list of atoms (words joined by '\x1f');
// nullopt for anything else.
std::optional<std::string> atom_list_key(const FeatureStructure& fs, NodeId node);
std::optional<std::string> atom_list_key(const Store& store, NodeId node);
std::string atom_list_key(const std::vector<std::string>& words);
// Constrains `node` to the list of atoms `words`; InputError if it cannot be.
void put_atom_list(Store& store, NodeId node, const std::vector<std::string>& words);

// Clauses of an indexed predicate by their first head argument.
struct ArgIndex {
  std::unordered_map<std::string, std::vector<std::size_t>> keyed;
  std::vector<std::size_t> unkeyed;  // first argument not a ground atom list
};

// Clauses in source order, indexed by predicate, plus the set of
// predicates marked as interaction predicates by the lexicon compiler.
class Program {
 public:
  explicit Program(SignaturePtr sig) : sig_(std::move(sig)) {}

  const SignaturePtr& signature() const { return sig_; }

  std::size_t add(Clause clause);
  const Clause& clause(std::size_t id) const { return clauses_[id]; }
  std::size_t size() const { return clauses_.size(); }
  const std::vector<Clause>& clauses() const { return clauses_; }
  std::span<const std::size_t> clauses_for(const PredicateId& pred) const;
  bool defines(const PredicateId& pred) const { return index_.count(pred) != 0; }

  void replace(std::size_t id, Clause clause);
  // Removes clause `id`; pins to later clauses are renumbered. Throws
  // InternalError if some literal is pinned to the removed clause.
  void remove(std::size_t id);

  void mark_interaction(const PredicateId& pred) { interaction_.insert(pred); }
  bool is_interaction(const PredicateId& pred) const { return interaction_.count(pred) != 0; }
  const std::set<PredicateId>& interaction_predicates() const { return interaction_; }

  // Indexed predicates are resolved through their first argument when a
  // call binds it to a ground atom list.
  void mark_indexed(const PredicateId& pred);
  bool is_indexed(const PredicateId& pred) const { return arg_index_.count(pred) != 0; }
  const ArgIndex* arg_index(const PredicateId& pred) const;
  std::set<PredicateId> indexed_predicates() const;

  // True iff some interaction clause calls its own predicate; plain
  // enumeration over such a program need not terminate.
  bool potentially_nonterminating() const;

  friend bool operator==(const Program& a, const Program& b) {
    return a.clauses_ == b.clauses_ && a.interaction_ == b.interaction_ &&
           a.indexed_predicates() == b.indexed_predicates();
  }

 private:
  void reindex();
  void rebuild_arg_index(const PredicateId& pred);

  SignaturePtr sig_;
  std::vector<Clause> clauses_;
  std::map<PredicateId, std::vector<std::size_t>> index_;
  std::set<PredicateId> interaction_;
  std::map<PredicateId, ArgIndex> arg_index_;
};

// A goal: one literal whose arguments are the roots of `args`.
struct Goal {
  PredicateId pred;
  FeatureStructure args;
  std::optional<std::size_t> pinned_clause;
};

}  // namespace hpsgc
