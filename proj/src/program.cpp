#include "hpsgc/program.hpp"

#include <algorithm>

namespace hpsgc {

Clause Clause::build(const Store& store, Literal head, std::vector<Literal> body) {
  std::vector<NodeId> roots(head.args);
  for (const auto& lit : body) roots.insert(roots.end(), lit.args.begin(), lit.args.end());
  auto graph = store.extract(roots);
  if (!graph) throw InputError("clause for " + head.pred.str() + " has a cyclic feature structure");
  return from_graph(std::move(*graph), std::move(head.pred), std::move(body));
}

Clause Clause::from_graph(FeatureStructure graph, PredicateId head, std::vector<Literal> body_shape) {
  Clause c;
  std::size_t next = 0;
  auto take = [&](Literal& lit) {
    lit.args.resize(lit.pred.arity);
    for (auto& a : lit.args) {
      if (next >= graph.arity()) throw InternalError("clause graph has too few roots");
      a = graph.root(next++);
    }
  };
  c.head_.pred = std::move(head);
  take(c.head_);
  c.body_ = std::move(body_shape);
  for (auto& lit : c.body_) take(lit);
  if (next != graph.arity()) throw InternalError("clause graph has too many roots");
  c.graph_ = std::move(graph);
  return c;
}

std::size_t Clause::root_offset(int literal) const {
  std::size_t off = head_.pred.arity;
  for (int i = 0; i < literal; ++i) off += body_[i].pred.arity;
  return literal < 0 ? 0 : off;
}

FeatureStructure Clause::literal_args(int literal) const {
  const auto& lit = literal < 0 ? head_ : body_.at(literal);
  std::vector<std::size_t> picked;
  const auto off = root_offset(literal);
  for (std::size_t i = 0; i < lit.pred.arity; ++i) picked.push_back(off + i);
  return graph_.select(picked);
}

namespace {

constexpr char kKeySep = '\x1f';

template <class TypeOf, class Follow>
std::optional<std::string> list_key(const Signature& sig, NodeId n, TypeOf type_of, Follow follow) {
  if (!sig.ne_list_type() || !sig.e_list_type() || !sig.first_feature() || !sig.rest_feature()) return std::nullopt;
  std::string key;
  bool first_word = true;
  while (type_of(n) != *sig.e_list_type()) {
    if (type_of(n) != *sig.ne_list_type()) return std::nullopt;
    auto head = follow(n, *sig.first_feature());
    auto tail = follow(n, *sig.rest_feature());
    if (!head || !tail || !sig.is_atom(type_of(*head))) return std::nullopt;
    if (!first_word) key += kKeySep;
    key += sig.atom_text(type_of(*head));
    first_word = false;
    n = *tail;
  }
  return key;
}

}  // namespace

std::optional<std::string> atom_list_key(const FeatureStructure& fs, NodeId node) {
  return list_key(
      fs.sig(), node, [&](NodeId n) { return fs.type(n); }, [&](NodeId n, FeatId f) { return fs.follow(n, f); });
}

std::optional<std::string> atom_list_key(const Store& store, NodeId node) {
  return list_key(
      store.sig(), node, [&](NodeId n) { return store.type(n); },
      [&](NodeId n, FeatId f) { return store.arc(n, f); });
}

void put_atom_list(Store& store, NodeId n, const std::vector<std::string>& words) {
  const Signature& sig = store.sig();
  bool ok = true;
  for (const auto& w : words) {
    ok = ok && store.constrain(n, *sig.ne_list_type());
    auto first = ok ? store.descend(n, *sig.first_feature()) : std::nullopt;
    ok = ok && first && store.constrain(*first, sig.intern_atom(w));
    auto rest = ok ? store.descend(n, *sig.rest_feature()) : std::nullopt;
    ok = ok && rest;
    if (ok) n = *rest;
  }
  ok = ok && store.constrain(n, *sig.e_list_type());
  if (!ok) throw InputError("PHON does not admit a list of atoms");
}

std::string atom_list_key(const std::vector<std::string>& words) {
  std::string key;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) key += kKeySep;
    key += words[i];
  }
  return key;
}

std::size_t Program::add(Clause clause) {
  clauses_.push_back(std::move(clause));
  const std::size_t id = clauses_.size() - 1;
  const auto& pred = clauses_.back().head().pred;
  index_[pred].push_back(id);
  if (auto it = arg_index_.find(pred); it != arg_index_.end()) {
    const Clause& c = clauses_.back();
    if (auto key = c.head().args.empty() ? std::nullopt : atom_list_key(c.graph(), c.head().args[0])) {
      it->second.keyed[*key].push_back(id);
    } else {
      it->second.unkeyed.push_back(id);
    }
  }
  return id;
}

void Program::mark_indexed(const PredicateId& pred) {
  arg_index_[pred];
  rebuild_arg_index(pred);
}

const ArgIndex* Program::arg_index(const PredicateId& pred) const {
  auto it = arg_index_.find(pred);
  return it == arg_index_.end() ? nullptr : &it->second;
}

std::set<PredicateId> Program::indexed_predicates() const {
  std::set<PredicateId> out;
  for (const auto& [p, _] : arg_index_) out.insert(p);
  return out;
}

void Program::rebuild_arg_index(const PredicateId& pred) {
  auto it = arg_index_.find(pred);
  if (it == arg_index_.end()) return;
  ArgIndex idx;
  for (std::size_t id : clauses_for(pred)) {
    const Clause& c = clauses_[id];
    if (auto key = c.head().args.empty() ? std::nullopt : atom_list_key(c.graph(), c.head().args[0])) {
      idx.keyed[*key].push_back(id);
    } else {
      idx.unkeyed.push_back(id);
    }
  }
  it->second = std::move(idx);
}

std::span<const std::size_t> Program::clauses_for(const PredicateId& pred) const {
  if (auto it = index_.find(pred); it != index_.end()) return it->second;
  return {};
}

void Program::replace(std::size_t id, Clause clause) {
  const bool same_head = clauses_.at(id).head().pred == clause.head().pred;
  const PredicateId old = clauses_.at(id).head().pred;
  clauses_[id] = std::move(clause);
  if (!same_head) {
    reindex();
  } else {
    rebuild_arg_index(old);
  }
}

void Program::remove(std::size_t id) {
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    if (i == id) continue;
    for (const auto& lit : clauses_[i].body()) {
      if (lit.pinned_clause == id) {
        throw InternalError("cannot remove clause " + std::to_string(id) + ": clause " + std::to_string(i) +
                            " is pinned to it");
      }
    }
  }
  clauses_.erase(clauses_.begin() + static_cast<std::ptrdiff_t>(id));
  for (auto& c : clauses_) {
    std::vector<Literal> body = c.body();
    bool changed = false;
    for (auto& lit : body) {
      if (lit.pinned_clause && *lit.pinned_clause > id) {
        --*lit.pinned_clause;
        changed = true;
      }
    }
    if (changed) {
      const int line = c.line;
      c = Clause::from_graph(c.graph(), c.head().pred, std::move(body));
      c.line = line;
    }
  }
  reindex();
}

void Program::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < clauses_.size(); ++i) index_[clauses_[i].head().pred].push_back(i);
  for (const auto& p : indexed_predicates()) rebuild_arg_index(p);
}

bool Program::potentially_nonterminating() const {
  return std::any_of(clauses_.begin(), clauses_.end(), [&](const Clause& c) {
    if (!is_interaction(c.head().pred)) return false;
    return std::any_of(c.body().begin(), c.body().end(),
                       [&](const Literal& l) { return l.pred == c.head().pred; });
  });
}

}  // namespace hpsgc
