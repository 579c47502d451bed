#include "hpsgc/lattice.hpp"

#include <map>

namespace hpsgc {

Unification unify(const FeatureStructure& a, const FeatureStructure& b) {
  if (a.arity() != b.arity()) throw InternalError("unify: arity mismatch");
  Store store(a.signature());
  auto ra = store.import(a);
  auto rb = store.import(b);
  Unification out;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (!store.unify(ra[i], rb[i])) {
      out.clash = store.last_clash();
      return out;
    }
  }
  out.result = store.extract(ra);
  if (!out.result) out.clash.kind = Clash::Kind::Cyclic;
  return out;
}

namespace {

// A position in the specific structure: a stored node or an implied value
// of some type that has no node of its own.
struct Position {
  bool implied;
  NodeId node;
  TypeId type;
};

class SubsumptionCheck {
 public:
  SubsumptionCheck(const FeatureStructure& g, const FeatureStructure& s)
      : g_(g), s_(s), sig_(g.sig()), map_(g.size(), kUnmapped) {}

  bool run() {
    if (g_.arity() != s_.arity()) return false;
    for (std::size_t i = 0; i < g_.arity(); ++i) {
      const NodeId sr = s_.root(i);
      if (!visit(g_.root(i), {false, sr, s_.type(sr)})) return false;
    }
    return true;
  }

 private:
  static constexpr std::int64_t kUnmapped = -1;
  static constexpr std::int64_t kImplied = -2;

  bool visit(NodeId g, Position s) {
    if (map_[g] != kUnmapped) return !s.implied && map_[g] == static_cast<std::int64_t>(s.node);
    map_[g] = s.implied ? kImplied : static_cast<std::int64_t>(s.node);
    if (!sig_.type_subsumes(g_.type(g), s.type)) return false;
    for (const auto& arc : g_.node(g).arcs) {
      std::optional<NodeId> child = s.implied ? std::nullopt : s_.follow(s.node, arc.feature);
      Position next;
      if (child) {
        next = {false, *child, s_.type(*child)};
      } else {
        const TypeId r = sig_.approp(s.type, arc.feature);
        if (r == kBottom) return false;
        next = {true, 0, r};
      }
      if (!visit(arc.target, next)) return false;
    }
    return true;
  }

  const FeatureStructure& g_;
  const FeatureStructure& s_;
  const Signature& sig_;
  std::vector<std::int64_t> map_;
};

class Generalizer {
 public:
  Generalizer(const FeatureStructure& a, const FeatureStructure& b)
      : a_(a), b_(b), sig_(a.sig()), store_(a.signature()) {}

  FeatureStructure run() {
    std::vector<NodeId> roots;
    for (std::size_t i = 0; i < a_.arity(); ++i) {
      roots.push_back(pair({false, a_.root(i), a_.type(a_.root(i))}, {false, b_.root(i), b_.type(b_.root(i))}));
    }
    return *store_.extract(roots);
  }

 private:
  Position child(const FeatureStructure& fs, Position p, FeatId f) const {
    if (!p.implied) {
      if (auto c = fs.follow(p.node, f)) return {false, *c, fs.type(*c)};
    }
    return {true, 0, sig_.approp(p.type, f)};
  }

  NodeId pair(Position pa, Position pb) {
    const bool memo = !pa.implied && !pb.implied;
    if (memo) {
      if (auto it = seen_.find({pa.node, pb.node}); it != seen_.end()) return it->second;
    }
    const TypeId joined = sig_.join(pa.type, pb.type);
    const NodeId out = store_.add_node(joined);
    if (memo) seen_.emplace(std::pair{pa.node, pb.node}, out);
    for (FeatId f : sig_.features_of(joined)) {
      const Position ca = child(a_, pa, f);
      const Position cb = child(b_, pb, f);
      if (ca.implied && cb.implied) {
        const TypeId t = sig_.join(ca.type, cb.type);
        if (t != sig_.approp(joined, f)) store_.link(out, f, store_.add_node(t));
        continue;
      }
      store_.link(out, f, pair(ca, cb));
    }
    return out;
  }

  const FeatureStructure& a_;
  const FeatureStructure& b_;
  const Signature& sig_;
  Store store_;
  std::map<std::pair<NodeId, NodeId>, NodeId> seen_;
};

}  // namespace

bool subsumes(const FeatureStructure& general, const FeatureStructure& specific) {
  return SubsumptionCheck(general, specific).run();
}

FeatureStructure msg(const FeatureStructure& a, const FeatureStructure& b) {
  if (a.arity() != b.arity()) throw InternalError("msg: arity mismatch");
  if (a == b) return a;
  return Generalizer(a, b).run();
}

std::optional<FeatureStructure> msg_all(std::span<const FeatureStructure> items) {
  if (items.empty()) return std::nullopt;
  FeatureStructure acc = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) acc = msg(acc, items[i]);
  return acc;
}

std::optional<PathValue> get_path(const FeatureStructure& fs, const Path& path, std::size_t root) {
  const auto& sig = fs.sig();
  PathValue v{fs.type(fs.root(root)), fs.root(root)};
  for (FeatId f : path.features) {
    const TypeId r = sig.approp(v.type, f);
    if (r == kBottom) return std::nullopt;
    if (v.node) {
      if (auto c = fs.follow(*v.node, f)) {
        v = {fs.type(*c), *c};
        continue;
      }
    }
    v = {r, std::nullopt};
  }
  return v;
}

FeatureStructure put_path(const FeatureStructure& fs, const Path& path, TypeId type, std::size_t root) {
  Store store(fs.signature());
  auto roots = store.import(fs);
  auto target = store.descend(roots.at(root), path);
  if (!target || !store.constrain(*target, type)) {
    throw InputError("cannot put " + fs.sig().type_name(type) + " at " + path.str(fs.sig()) + ": " +
                     store.last_clash().str(fs.sig()));
  }
  auto out = store.extract(roots);
  if (!out) throw InputError("put_path produced a cyclic structure");
  return *out;
}

std::optional<FeatureStructure> share_paths(const FeatureStructure& fs, const Path& a, const Path& b,
                                            std::size_t root) {
  Store store(fs.signature());
  auto roots = store.import(fs);
  auto na = store.descend(roots.at(root), a);
  if (!na) return std::nullopt;
  auto nb = store.descend(roots.at(root), b);
  if (!nb || !store.unify(*na, *nb)) return std::nullopt;
  return store.extract(roots);
}

}  // namespace hpsgc
