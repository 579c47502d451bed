#include "hpsgc/store.hpp"

#include <algorithm>
#include <unordered_map>

namespace hpsgc {

std::string Clash::str(const Signature& sig) const {
  std::string where = path.features.empty() ? "<root>" : path.str(sig);
  switch (kind) {
    case Kind::TypeClash:
      return "type clash at " + where + ": " + sig.type_name(left) + " vs " + sig.type_name(right);
    case Kind::NotAppropriate:
      return "feature not appropriate at " + where;
    case Kind::Cyclic:
      return "cyclic result";
  }
  return "unification failure";
}

Store::Store(SignaturePtr sig) : sig_(std::move(sig)) {}

NodeId Store::add_node(TypeId type) {
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({type, id, kNoArc});
  return id;
}

std::vector<NodeId> Store::import(const FeatureStructure& fs) {
  std::vector<NodeId> map;
  return import(fs, map);
}

std::vector<NodeId> Store::import(const FeatureStructure& fs, std::vector<NodeId>& node_map) {
  const auto base = static_cast<NodeId>(nodes_.size());
  const auto nodes = fs.nodes();
  node_map.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    node_map[i] = base + static_cast<NodeId>(i);
    nodes_.push_back({nodes[i].type, base + static_cast<NodeId>(i), kNoArc});
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    // Reverse so the linked list reads in ascending feature order.
    for (auto it = nodes[i].arcs.rbegin(); it != nodes[i].arcs.rend(); ++it) {
      arcs_.push_back({it->feature, base + it->target, nodes_[base + i].first_arc});
      nodes_[base + i].first_arc = static_cast<std::uint32_t>(arcs_.size() - 1);
    }
  }
  std::vector<NodeId> roots;
  roots.reserve(fs.arity());
  for (NodeId r : fs.roots()) roots.push_back(base + r);
  return roots;
}

NodeId Store::find(NodeId n) const {
  while (nodes_[n].parent != n) n = nodes_[n].parent;
  return n;
}

std::optional<NodeId> Store::arc(NodeId n, FeatId f) const {
  n = find(n);
  for (auto i = nodes_[n].first_arc; i != kNoArc; i = arcs_[i].next) {
    if (arcs_[i].feature == f) return arcs_[i].target;
  }
  return std::nullopt;
}

std::vector<Arc> Store::arcs(NodeId n) const {
  n = find(n);
  std::vector<Arc> out;
  for (auto i = nodes_[n].first_arc; i != kNoArc; i = arcs_[i].next) {
    out.push_back({arcs_[i].feature, find(arcs_[i].target)});
  }
  std::sort(out.begin(), out.end(), [](const Arc& a, const Arc& b) { return a.feature < b.feature; });
  return out;
}

bool Store::fail(Clash::Kind kind, TypeId left, TypeId right) {
  clash_.kind = kind;
  clash_.path.features = path_;
  clash_.left = left;
  clash_.right = right;
  path_.clear();
  return false;
}

void Store::set_type(NodeId n, TypeId t) {
  if (nodes_[n].type == t) return;
  trail_.push_back({TrailEntry::Kind::Type, n, nodes_[n].type});
  nodes_[n].type = t;
}

void Store::push_arc(NodeId n, FeatId f, NodeId target) {
  trail_.push_back({TrailEntry::Kind::FirstArc, n, nodes_[n].first_arc});
  arcs_.push_back({f, target, nodes_[n].first_arc});
  nodes_[n].first_arc = static_cast<std::uint32_t>(arcs_.size() - 1);
}

void Store::link(NodeId n, FeatId f, NodeId target) { push_arc(find(n), f, target); }

bool Store::unify(NodeId a, NodeId b) {
  a = find(a);
  b = find(b);
  if (a == b) return true;
  const TypeId ta = nodes_[a].type;
  const TypeId tb = nodes_[b].type;
  const TypeId t = sig_->meet(ta, tb);
  if (t == kBottom) return fail(Clash::Kind::TypeClash, ta, tb);

  trail_.push_back({TrailEntry::Kind::Parent, b, b});
  nodes_[b].parent = a;
  set_type(a, t);

  for (auto i = nodes_[b].first_arc; i != kNoArc; i = arcs_[i].next) {
    const FeatId f = arcs_[i].feature;
    const NodeId target = arcs_[i].target;
    const NodeId ra = find(a);
    if (auto existing = arc(ra, f)) {
      path_.push_back(f);
      if (!unify(*existing, target)) return false;
      path_.pop_back();
    } else {
      push_arc(ra, f, target);
    }
  }
  if (t != ta || t != tb) return enforce_appropriateness(a);
  return true;
}

bool Store::enforce_appropriateness(NodeId n) {
  n = find(n);
  for (auto i = nodes_[n].first_arc; i != kNoArc; i = arcs_[i].next) {
    const FeatId f = arcs_[i].feature;
    const TypeId restriction = sig_->approp(nodes_[find(n)].type, f);
    path_.push_back(f);
    if (restriction == kBottom) return fail(Clash::Kind::NotAppropriate, nodes_[find(n)].type, kBottom);
    if (!constrain(arcs_[i].target, restriction)) return false;
    path_.pop_back();
  }
  return true;
}

bool Store::constrain(NodeId n, TypeId type) {
  n = find(n);
  const TypeId old = nodes_[n].type;
  const TypeId t = sig_->meet(old, type);
  if (t == kBottom) return fail(Clash::Kind::TypeClash, old, type);
  if (t == old) return true;
  set_type(n, t);
  return enforce_appropriateness(n);
}

std::optional<NodeId> Store::descend(NodeId n, FeatId f) {
  if (auto existing = arc(n, f)) return existing;
  if (!constrain(n, sig_->intro_type(f))) return std::nullopt;
  n = find(n);
  const NodeId child = add_node(sig_->approp(nodes_[n].type, f));
  push_arc(n, f, child);
  return child;
}

std::optional<NodeId> Store::descend(NodeId n, const Path& path) {
  for (FeatId f : path.features) {
    auto next = descend(n, f);
    if (!next) return std::nullopt;
    n = *next;
  }
  return n;
}

void Store::undo(Mark m) {
  while (trail_.size() > m.trail) {
    const auto& e = trail_.back();
    switch (e.kind) {
      case TrailEntry::Kind::Parent:
        nodes_[e.node].parent = e.old;
        break;
      case TrailEntry::Kind::Type:
        nodes_[e.node].type = e.old;
        break;
      case TrailEntry::Kind::FirstArc:
        nodes_[e.node].first_arc = e.old;
        break;
    }
    trail_.pop_back();
  }
  nodes_.resize(m.nodes);
  arcs_.resize(m.arcs);
  path_.clear();
}

namespace {

// Local view of the reachable subgraph, keyed by store representative.
struct Snapshot {
  std::vector<NodeId> ids;               // local -> store rep
  std::vector<TypeId> types;
  std::vector<std::vector<Arc>> arcs;    // targets are local indices
  std::vector<std::uint32_t> postorder;  // local indices
  std::vector<std::uint32_t> roots;      // local indices
};

}  // namespace

static std::optional<Snapshot> snapshot(const Store& store, std::span<const NodeId> roots) {
  Snapshot snap;
  std::unordered_map<NodeId, std::uint32_t> local;
  std::vector<std::uint8_t> color;  // 1 = on stack, 2 = done

  auto intern = [&](NodeId rep) {
    auto [it, inserted] = local.emplace(rep, static_cast<std::uint32_t>(snap.ids.size()));
    if (inserted) {
      snap.ids.push_back(rep);
      snap.types.push_back(store.type(rep));
      snap.arcs.push_back(store.arcs(rep));
      color.push_back(0);
    }
    return it->second;
  };

  struct Frame {
    std::uint32_t node;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (NodeId r : roots) {
    const auto lr = intern(store.find(r));
    snap.roots.push_back(lr);
    if (color[lr] != 0) continue;
    color[lr] = 1;
    stack.push_back({lr, 0});
    while (!stack.empty()) {
      auto& top = stack.back();
      if (top.next == snap.arcs[top.node].size()) {
        color[top.node] = 2;
        snap.postorder.push_back(top.node);
        stack.pop_back();
        continue;
      }
      auto& a = snap.arcs[top.node][top.next++];
      const auto child = intern(a.target);
      a.target = child;
      if (color[child] == 1) return std::nullopt;
      if (color[child] == 0) {
        color[child] = 1;
        stack.push_back({child, 0});
      }
    }
  }
  return snap;
}

bool Store::acyclic_from(std::span<const NodeId> roots) const { return snapshot(*this, roots).has_value(); }

std::optional<FeatureStructure> Store::extract(std::span<const NodeId> roots) const {
  auto snap = snapshot(*this, roots);
  if (!snap) return std::nullopt;
  const std::size_t n = snap->ids.size();

  std::vector<std::uint32_t> indegree(n, 0);
  std::vector<bool> is_root(n, false);
  for (auto r : snap->roots) is_root[r] = true;
  for (const auto& arcs : snap->arcs) {
    for (const auto& a : arcs) ++indegree[a.target];
  }

  // Drop arcs to unshared, arc-less nodes carrying exactly the
  // appropriateness value; children are decided before their parents.
  for (auto v : snap->postorder) {
    auto& arcs = snap->arcs[v];
    std::erase_if(arcs, [&](const Arc& a) {
      const auto c = a.target;
      return !is_root[c] && indegree[c] == 1 && snap->arcs[c].empty() &&
             snap->types[c] == sig_->approp(snap->types[v], a.feature);
    });
  }

  FeatureStructure fs;
  fs.sig_ = sig_;
  std::vector<NodeId> number(n, UINT32_MAX);
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> stack;
  for (auto r : snap->roots) {
    if (number[r] != UINT32_MAX) continue;
    stack.push_back(r);
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (number[v] != UINT32_MAX) continue;
      number[v] = static_cast<NodeId>(order.size());
      order.push_back(v);
      const auto& arcs = snap->arcs[v];
      for (auto it = arcs.rbegin(); it != arcs.rend(); ++it) {
        if (number[it->target] == UINT32_MAX) stack.push_back(it->target);
      }
    }
  }
  fs.nodes_.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& node = fs.nodes_[i];
    node.type = snap->types[order[i]];
    for (const auto& a : snap->arcs[order[i]]) node.arcs.push_back({a.feature, number[a.target]});
  }
  for (auto r : snap->roots) fs.roots_.push_back(number[r]);
  return fs;
}

}  // namespace hpsgc
