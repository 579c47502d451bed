#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpsgc/signature.hpp"

namespace hpsgc {

using NodeId = std::uint32_t;

struct Arc {
  FeatId feature;
  NodeId target;

  friend bool operator==(const Arc&, const Arc&) = default;
};

struct Node {
  TypeId type;
  std::vector<Arc> arcs;  // ascending feature id

  friend bool operator==(const Node&, const Node&) = default;
};

// A feature path such as SYNSEM|LOC|CAT|HEAD.
struct Path {
  std::vector<FeatId> features;

  // Parses `A|B|C`; throws InputError on a name that is not a feature.
  static Path parse(const Signature& sig, std::string_view text);
  std::string str(const Signature& sig) const;

  friend bool operator==(const Path&, const Path&) = default;
  friend auto operator<=>(const Path&, const Path&) = default;
};

// An immutable, acyclic, possibly multi-rooted typed feature graph.
//
// Values are always in normal form: nodes are numbered in canonical order
// (roots first, depth-first, features ascending) and arcs whose target is
// the unshared, arc-less appropriateness value of the feature are dropped
// (an absent arc means "the most general appropriate value"). Two
// structures are therefore isomorphic iff they compare equal.
class FeatureStructure {
 public:
  FeatureStructure() = default;

  // One root of the given type, no arcs.
  static FeatureStructure atomic(SignaturePtr sig, TypeId type);
  // `arity` distinct roots, each the most general structure.
  static FeatureStructure top(SignaturePtr sig, std::size_t arity = 1);

  const SignaturePtr& signature() const { return sig_; }
  const Signature& sig() const { return *sig_; }

  std::span<const Node> nodes() const { return nodes_; }
  const Node& node(NodeId n) const { return nodes_[n]; }
  TypeId type(NodeId n) const { return nodes_[n].type; }
  std::span<const NodeId> roots() const { return roots_; }
  NodeId root(std::size_t i = 0) const { return roots_[i]; }
  std::size_t arity() const { return roots_.size(); }
  std::size_t size() const { return nodes_.size(); }

  std::optional<NodeId> follow(NodeId n, FeatId f) const;

  // Single-rooted view of root `i` (reachable part only).
  FeatureStructure project(std::size_t i) const;
  // Structure whose roots are `picked` roots of this one, in that order.
  FeatureStructure select(std::span<const std::size_t> picked) const;

  std::size_t hash() const;

  friend bool operator==(const FeatureStructure& a, const FeatureStructure& b) {
    return a.nodes_ == b.nodes_ && a.roots_ == b.roots_;
  }

 private:
  friend class Store;

  SignaturePtr sig_;
  std::vector<Node> nodes_;
  std::vector<NodeId> roots_;
};

struct FeatureStructureHash {
  std::size_t operator()(const FeatureStructure& fs) const { return fs.hash(); }
};

}  // namespace hpsgc
