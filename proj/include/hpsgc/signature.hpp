#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hpsgc/diagnostic.hpp"

namespace hpsgc {

using TypeId = std::uint32_t;
using FeatId = std::uint32_t;

// Result of a failed meet; also "not appropriate" for approp().
inline constexpr TypeId kBottom = std::numeric_limits<TypeId>::max();

// One `type T sub [..] intro [F:R, ..].` declaration as written.
struct TypeDecl {
  std::string name;
  std::vector<std::string> subtypes;
  std::vector<std::pair<std::string, std::string>> intro;  // feature, restriction
  int line = 0;
  int column = 0;
};

struct RawSignature {
  std::vector<TypeDecl> decls;
  // Optional: fixes feature ids (otherwise order of first declaration).
  std::vector<std::string> feature_order;
};

// A validated type hierarchy with precomputed meet/join tables and
// appropriateness conditions.
//
// Dense types (declared in the signature) live in ids [0, dense_count()).
// Atoms such as phonological word forms are leaf subtypes of the declared
// type `atom`; they are interned on demand and get ids from dense_count()
// upward. The lattice part is immutable; the atom table only grows.
class Signature {
 public:
  // Validates `raw`. Throws InputError listing every problem found.
  static std::shared_ptr<const Signature> build(const RawSignature& raw);

  TypeId top() const { return 0; }

  std::optional<TypeId> find_type(std::string_view name) const;
  std::optional<FeatId> find_feature(std::string_view name) const;

  TypeId meet(TypeId a, TypeId b) const;
  TypeId join(TypeId a, TypeId b) const;
  // True iff `general` is at or above `specific` in the hierarchy.
  bool type_subsumes(TypeId general, TypeId specific) const;

  // Value restriction of `f` on `t`, or kBottom if `f` is not appropriate.
  TypeId approp(TypeId t, FeatId f) const;
  // Appropriate features of `t`, ascending feature id (= declaration order).
  const std::vector<FeatId>& features_of(TypeId t) const;
  TypeId intro_type(FeatId f) const { return feature_intro_[f]; }

  std::string type_name(TypeId t) const;
  const std::string& feature_name(FeatId f) const { return feature_names_[f]; }

  std::size_t dense_count() const { return type_names_.size(); }
  std::size_t feature_count() const { return feature_names_.size(); }

  bool is_atom(TypeId t) const { return t != kBottom && t >= dense_count(); }
  // Interns `text` as an atom type. Throws InputError if the signature
  // declares no `atom` type.
  TypeId intern_atom(std::string_view text) const;
  std::optional<TypeId> find_atom(std::string_view text) const;
  const std::string& atom_text(TypeId t) const;
  std::size_t atom_count() const;
  std::optional<TypeId> atom_type() const { return atom_type_; }

  // Standard list encoding, when the signature declares it.
  std::optional<TypeId> list_type() const { return list_; }
  std::optional<TypeId> ne_list_type() const { return ne_list_; }
  std::optional<TypeId> e_list_type() const { return e_list_; }
  std::optional<FeatId> first_feature() const { return first_; }
  std::optional<FeatId> rest_feature() const { return rest_; }

  // Normalized declarations: one per dense type in id order (top first).
  const std::vector<TypeDecl>& declarations() const { return decls_; }
  // Rebuilds to an identical signature (same type and feature ids).
  RawSignature raw() const { return {decls_, feature_names_}; }

 private:
  Signature() = default;

  TypeId lift_atom(TypeId t) const { return is_atom(t) ? *atom_type_ : t; }

  std::vector<std::string> type_names_;
  std::unordered_map<std::string, TypeId> type_index_;
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, FeatId> feature_index_;
  std::vector<TypeId> feature_intro_;

  std::vector<TypeId> meet_;  // dense_count()^2
  std::vector<TypeId> join_;
  std::vector<std::vector<TypeId>> approp_;  // [type][feat], kBottom if absent
  std::vector<std::vector<FeatId>> features_;
  std::vector<TypeDecl> decls_;

  std::optional<TypeId> atom_type_;
  std::optional<TypeId> list_, ne_list_, e_list_;
  std::optional<FeatId> first_, rest_;

  mutable std::mutex atom_mutex_;
  mutable std::deque<std::string> atoms_;
  mutable std::unordered_map<std::string, TypeId> atom_index_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

}  // namespace hpsgc
