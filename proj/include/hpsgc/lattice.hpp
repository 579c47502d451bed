#pragma once

#include <optional>
#include <span>

#include "hpsgc/feature_structure.hpp"
#include "hpsgc/store.hpp"

namespace hpsgc {

struct Unification {
  std::optional<FeatureStructure> result;
  Clash clash;  // meaningful only when !result

  explicit operator bool() const { return result.has_value(); }
  const FeatureStructure& operator*() const { return *result; }
  const FeatureStructure* operator->() const { return &*result; }
};

// Most general structure subsumed by both (roots unified pairwise).
// Both arguments must have the same arity.
Unification unify(const FeatureStructure& a, const FeatureStructure& b);

// True iff `general` subsumes `specific`: every path, type and sharing of
// `general` is entailed by `specific`.
bool subsumes(const FeatureStructure& general, const FeatureStructure& specific);

// Most specific generalization (anti-unification).
FeatureStructure msg(const FeatureStructure& a, const FeatureStructure& b);

// Left fold of msg; nullopt for an empty list ("no solutions").
std::optional<FeatureStructure> msg_all(std::span<const FeatureStructure> items);

// The value at `path` below root `root`.
struct PathValue {
  TypeId type;
  std::optional<NodeId> node;  // empty when the value is implied, not stored
};

// Empty if some feature on the way is not appropriate.
std::optional<PathValue> get_path(const FeatureStructure& fs, const Path& path, std::size_t root = 0);

// Constrains the value at `path` to `type`. Throws InputError when the path
// or the type is incompatible with the structure.
FeatureStructure put_path(const FeatureStructure& fs, const Path& path, TypeId type, std::size_t root = 0);

// Token-identifies the values at two paths (both below root `root`).
std::optional<FeatureStructure> share_paths(const FeatureStructure& fs, const Path& a, const Path& b,
                                            std::size_t root = 0);

}  // namespace hpsgc
