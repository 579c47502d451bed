#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hpsgc/feature_structure.hpp"

namespace hpsgc {

// Describes why a unification failed.
struct Clash {
  enum class Kind { TypeClash, NotAppropriate, Cyclic };

  Kind kind = Kind::TypeClash;
  Path path;  // relative to the pair of nodes the failing call started from
  TypeId left = kBottom;
  TypeId right = kBottom;

  std::string str(const Signature& sig) const;
};

// A mutable working graph with union-find node merging and a trail for
// undoing to an earlier mark. All feature-structure construction and the
// resolution engine's bindings go through this type.
//
// Unification is well-typed: a node that receives a feature is met with the
// feature's introducing type, and every arc target is met with the value
// restriction of its host's type.
class Store {
 public:
  explicit Store(SignaturePtr sig);

  const SignaturePtr& signature() const { return sig_; }
  const Signature& sig() const { return *sig_; }

  NodeId add_node(TypeId type);
  // Copies all of `fs` in; returns the new ids of its roots.
  std::vector<NodeId> import(const FeatureStructure& fs);
  // As import(), also returning the mapping for every node of `fs`.
  std::vector<NodeId> import(const FeatureStructure& fs, std::vector<NodeId>& node_map);

  NodeId find(NodeId n) const;
  TypeId type(NodeId n) const { return nodes_[find(n)].type; }
  std::optional<NodeId> arc(NodeId n, FeatId f) const;
  // Arcs of the representative of `n`, ascending feature id.
  std::vector<Arc> arcs(NodeId n) const;

  // These return false on failure; the store is then in an inconsistent
  // intermediate state and must be undone to a mark taken before the call.
  bool unify(NodeId a, NodeId b);
  bool constrain(NodeId n, TypeId type);
  // Returns the node at `f` below `n`, creating it if needed.
  std::optional<NodeId> descend(NodeId n, FeatId f);
  std::optional<NodeId> descend(NodeId n, const Path& path);

  // Adds an arc without type inference. Caller guarantees well-typedness
  // and that `n` has no `f` arc yet.
  void link(NodeId n, FeatId f, NodeId target);

  const Clash& last_clash() const { return clash_; }

  struct Mark {
    std::size_t trail;
    std::size_t nodes;
    std::size_t arcs;
  };
  Mark mark() const { return {trail_.size(), nodes_.size(), arcs_.size()}; }
  void undo(Mark m);

  std::size_t node_count() const { return nodes_.size(); }

  // Normal-form snapshot of the graph reachable from `roots`; nullopt if it
  // contains a cycle.
  std::optional<FeatureStructure> extract(std::span<const NodeId> roots) const;
  bool acyclic_from(std::span<const NodeId> roots) const;

 private:
  static constexpr std::uint32_t kNoArc = UINT32_MAX;

  struct StoreNode {
    TypeId type;
    NodeId parent;
    std::uint32_t first_arc;
  };
  struct ArcRecord {
    FeatId feature;
    NodeId target;
    std::uint32_t next;
  };
  struct TrailEntry {
    enum class Kind : std::uint8_t { Parent, Type, FirstArc };
    Kind kind;
    NodeId node;
    std::uint32_t old;
  };

  bool fail(Clash::Kind kind, TypeId left, TypeId right);
  bool enforce_appropriateness(NodeId n);
  void set_type(NodeId n, TypeId t);
  void push_arc(NodeId n, FeatId f, NodeId target);

  SignaturePtr sig_;
  std::vector<StoreNode> nodes_;
  std::vector<ArcRecord> arcs_;
  std::vector<TrailEntry> trail_;
  std::vector<FeatId> path_;
  Clash clash_;
};

}  // namespace hpsgc
