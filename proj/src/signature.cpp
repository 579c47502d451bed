#include "hpsgc/signature.hpp"

#include <algorithm>
#include <functional>

namespace hpsgc {

namespace {

// Fixed-width bitset over dense type ids.
class TypeSet {
 public:
  explicit TypeSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void merge(const TypeSet& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
  }
  TypeSet intersect(const TypeSet& o) const {
    TypeSet r = *this;
    for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= o.words_[w];
    return r;
  }
  bool subset_of(const TypeSet& o) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] & ~o.words_[w]) return false;
    }
    return true;
  }
  bool empty() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
  }

 private:
  std::vector<std::uint64_t> words_;
};

// Picks the unique element of `common` whose `closure` covers all of
// `common`; kBottom if `common` is empty, nullopt if no such element exists.
std::optional<TypeId> unique_extreme(const TypeSet& common, const std::vector<TypeSet>& closure,
                                     const std::vector<std::size_t>& closure_size, std::size_t n) {
  if (common.empty()) return kBottom;
  TypeId best = kBottom;
  for (TypeId c = 0; c < n; ++c) {
    if (common.test(c) && (best == kBottom || closure_size[c] > closure_size[best])) best = c;
  }
  if (common.subset_of(closure[best])) return best;
  return std::nullopt;
}

}  // namespace

std::shared_ptr<const Signature> Signature::build(const RawSignature& raw) {
  std::shared_ptr<Signature> sig(new Signature());
  Diagnostics diags;
  auto error = [&](const TypeDecl& at, std::string msg) {
    diags.push_back({Diagnostic::Severity::Error, at.line, at.column, std::move(msg)});
  };

  auto ensure = [&](const std::string& name) {
    auto [it, inserted] = sig->type_index_.emplace(name, static_cast<TypeId>(sig->type_names_.size()));
    if (inserted) sig->type_names_.push_back(name);
    return it->second;
  };
  // Declared names first, so raw() round-trips ids exactly.
  ensure("top");
  for (const auto& d : raw.decls) ensure(d.name);
  for (const auto& d : raw.decls) {
    for (const auto& s : d.subtypes) ensure(s);
  }
  const std::size_t n = sig->type_names_.size();

  std::vector<std::vector<TypeId>> children(n);
  std::vector<bool> has_parent(n, false);
  for (const auto& d : raw.decls) {
    TypeId p = sig->type_index_.at(d.name);
    for (const auto& s : d.subtypes) {
      TypeId c = sig->type_index_.at(s);
      if (c == sig->top()) {
        error(d, "top cannot be a subtype of '" + d.name + "'");
        continue;
      }
      if (c == p) {
        error(d, "cycle in subtype edges: '" + d.name + "' is its own subtype");
        continue;
      }
      if (std::find(children[p].begin(), children[p].end(), c) == children[p].end()) {
        children[p].push_back(c);
        has_parent[c] = true;
      }
    }
  }
  for (TypeId t = 1; t < n; ++t) {
    if (!has_parent[t]) children[0].push_back(t);
  }

  // Cycle detection (colors: 0 new, 1 on stack, 2 done) and a postorder.
  std::vector<int> color(n, 0);
  std::vector<TypeId> postorder;
  std::function<bool(TypeId)> visit = [&](TypeId t) {
    color[t] = 1;
    for (TypeId c : children[t]) {
      if (color[c] == 1) return false;
      if (color[c] == 0 && !visit(c)) return false;
    }
    color[t] = 2;
    postorder.push_back(t);
    return true;
  };
  for (TypeId t = 0; t < n; ++t) {
    if (color[t] == 0 && !visit(t)) {
      TypeDecl at;
      for (const auto& d : raw.decls) {
        if (d.name == sig->type_names_[t]) at = d;
      }
      error(at, "cycle in subtype edges involving '" + sig->type_names_[t] + "'");
      throw InputError(std::move(diags));
    }
  }
  if (has_errors(diags)) throw InputError(std::move(diags));

  std::vector<TypeSet> desc(n, TypeSet(n)), anc(n, TypeSet(n));
  for (TypeId t : postorder) {
    desc[t].set(t);
    for (TypeId c : children[t]) desc[t].merge(desc[c]);
  }
  for (auto it = postorder.rbegin(); it != postorder.rend(); ++it) {
    anc[*it].set(*it);
    for (TypeId c : children[*it]) anc[c].merge(anc[*it]);
  }
  std::vector<std::size_t> desc_size(n), anc_size(n);
  for (TypeId t = 0; t < n; ++t) {
    for (TypeId u = 0; u < n; ++u) {
      desc_size[t] += desc[t].test(u);
      anc_size[t] += anc[t].test(u);
    }
  }

  TypeDecl no_pos;
  sig->meet_.assign(n * n, kBottom);
  sig->join_.assign(n * n, kBottom);
  for (TypeId a = 0; a < n; ++a) {
    for (TypeId b = a; b < n; ++b) {
      auto m = unique_extreme(desc[a].intersect(desc[b]), desc, desc_size, n);
      if (!m) {
        error(no_pos, "non-unique GLB for (" + sig->type_names_[a] + "," + sig->type_names_[b] + ")");
      } else {
        sig->meet_[a * n + b] = sig->meet_[b * n + a] = *m;
      }
      auto j = unique_extreme(anc[a].intersect(anc[b]), anc, anc_size, n);
      if (!j) {
        error(no_pos, "non-unique LUB for (" + sig->type_names_[a] + "," + sig->type_names_[b] + ")");
      } else {
        sig->join_[a * n + b] = sig->join_[b * n + a] = *j;
      }
    }
  }
  if (has_errors(diags)) throw InputError(std::move(diags));

  // Features: id by first declaration; each must have one most general
  // introducing type.
  struct FeatDecl {
    TypeId at;
    std::string restriction;
    const TypeDecl* src;
  };
  std::vector<std::vector<FeatDecl>> feat_decls;
  for (const auto& f : raw.feature_order) {
    if (sig->feature_index_.emplace(f, static_cast<FeatId>(sig->feature_names_.size())).second) {
      sig->feature_names_.push_back(f);
      feat_decls.emplace_back();
    }
  }
  for (const auto& d : raw.decls) {
    TypeId t = sig->type_index_.at(d.name);
    for (const auto& [f, r] : d.intro) {
      auto [it, inserted] =
          sig->feature_index_.emplace(f, static_cast<FeatId>(sig->feature_names_.size()));
      if (inserted) {
        sig->feature_names_.push_back(f);
        feat_decls.emplace_back();
      }
      if (!sig->type_index_.count(r)) {
        error(d, "unknown type '" + r + "' as value of feature " + f);
        continue;
      }
      feat_decls[it->second].push_back({t, r, &d});
    }
  }
  if (has_errors(diags)) throw InputError(std::move(diags));

  const std::size_t nf = sig->feature_names_.size();
  sig->feature_intro_.assign(nf, kBottom);
  for (FeatId f = 0; f < nf; ++f) {
    const auto& ds = feat_decls[f];
    for (const auto& d : ds) {
      bool most_general = std::all_of(ds.begin(), ds.end(), [&](const FeatDecl& o) {
        return desc[d.at].test(o.at);
      });
      if (most_general) sig->feature_intro_[f] = d.at;
    }
    if (sig->feature_intro_[f] == kBottom) {
      // Name two incomparable introduction sites.
      for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = i + 1; j < ds.size(); ++j) {
          if (!desc[ds[i].at].test(ds[j].at) && !desc[ds[j].at].test(ds[i].at)) {
            error(*ds[j].src, "feature " + sig->feature_names_[f] + " introduced at incomparable types (" +
                                  sig->type_names_[ds[i].at] + "," + sig->type_names_[ds[j].at] + ")");
            i = j = ds.size();
          }
        }
      }
    }
  }
  if (has_errors(diags)) throw InputError(std::move(diags));

  sig->approp_.assign(n, std::vector<TypeId>(nf, kBottom));
  sig->features_.assign(n, {});
  for (TypeId t = 0; t < n; ++t) {
    for (FeatId f = 0; f < nf; ++f) {
      if (!desc[sig->feature_intro_[f]].test(t)) continue;
      TypeId r = sig->top();
      for (const auto& d : feat_decls[f]) {
        if (desc[d.at].test(t)) r = sig->meet_[r * n + sig->type_index_.at(d.restriction)];
      }
      if (r == kBottom) {
        error(no_pos, "inconsistent value restrictions for " + sig->feature_names_[f] + " on type " +
                          sig->type_names_[t]);
        continue;
      }
      sig->approp_[t][f] = r;
      sig->features_[t].push_back(f);
    }
  }
  if (has_errors(diags)) throw InputError(std::move(diags));

  sig->decls_.resize(n);
  for (TypeId t = 0; t < n; ++t) {
    auto& d = sig->decls_[t];
    d.name = sig->type_names_[t];
    for (TypeId c : children[t]) d.subtypes.push_back(sig->type_names_[c]);
  }
  for (FeatId f = 0; f < nf; ++f) {
    for (const auto& d : feat_decls[f]) sig->decls_[d.at].intro.emplace_back(sig->feature_names_[f], d.restriction);
  }

  auto opt_type = [&](const char* name) -> std::optional<TypeId> {
    if (auto it = sig->type_index_.find(name); it != sig->type_index_.end()) return it->second;
    return std::nullopt;
  };
  auto opt_feat = [&](const char* name) -> std::optional<FeatId> {
    if (auto it = sig->feature_index_.find(name); it != sig->feature_index_.end()) return it->second;
    return std::nullopt;
  };
  sig->atom_type_ = opt_type("atom");
  if (sig->atom_type_ && !sig->features_[*sig->atom_type_].empty()) {
    throw InputError("type 'atom' must not bear features");
  }
  sig->list_ = opt_type("list");
  sig->ne_list_ = opt_type("ne_list");
  sig->e_list_ = opt_type("e_list");
  sig->first_ = opt_feat("FIRST");
  sig->rest_ = opt_feat("REST");
  return sig;
}

std::optional<TypeId> Signature::find_type(std::string_view name) const {
  if (auto it = type_index_.find(std::string(name)); it != type_index_.end()) return it->second;
  return std::nullopt;
}

std::optional<FeatId> Signature::find_feature(std::string_view name) const {
  if (auto it = feature_index_.find(std::string(name)); it != feature_index_.end()) return it->second;
  return std::nullopt;
}

TypeId Signature::meet(TypeId a, TypeId b) const {
  if (a == kBottom || b == kBottom) return kBottom;
  if (a == b) return a;
  const std::size_t n = dense_count();
  if (is_atom(a) || is_atom(b)) {
    if (is_atom(a) && is_atom(b)) return kBottom;
    TypeId atom = is_atom(a) ? a : b;
    TypeId other = is_atom(a) ? b : a;
    return meet_[other * n + *atom_type_] == *atom_type_ ? atom : kBottom;
  }
  return meet_[a * n + b];
}

TypeId Signature::join(TypeId a, TypeId b) const {
  if (a == kBottom) return b;
  if (b == kBottom) return a;
  if (a == b) return a;
  return join_[lift_atom(a) * dense_count() + lift_atom(b)];
}

bool Signature::type_subsumes(TypeId general, TypeId specific) const {
  return meet(general, specific) == specific;
}

TypeId Signature::approp(TypeId t, FeatId f) const {
  if (t == kBottom || is_atom(t)) return kBottom;
  return approp_[t][f];
}

const std::vector<FeatId>& Signature::features_of(TypeId t) const {
  static const std::vector<FeatId> none;
  if (t == kBottom || is_atom(t)) return none;
  return features_[t];
}

std::string Signature::type_name(TypeId t) const {
  if (t == kBottom) return "_|_";
  if (is_atom(t)) return "\"" + atom_text(t) + "\"";
  return type_names_[t];
}

TypeId Signature::intern_atom(std::string_view text) const {
  if (!atom_type_) throw InputError("atom \"" + std::string(text) + "\" used but the signature declares no type 'atom'");
  std::lock_guard lock(atom_mutex_);
  auto [it, inserted] = atom_index_.emplace(std::string(text), static_cast<TypeId>(dense_count() + atoms_.size()));
  if (inserted) atoms_.emplace_back(text);
  return it->second;
}

std::optional<TypeId> Signature::find_atom(std::string_view text) const {
  std::lock_guard lock(atom_mutex_);
  if (auto it = atom_index_.find(std::string(text)); it != atom_index_.end()) return it->second;
  return std::nullopt;
}

const std::string& Signature::atom_text(TypeId t) const {
  std::lock_guard lock(atom_mutex_);
  return atoms_.at(t - dense_count());
}

std::size_t Signature::atom_count() const {
  std::lock_guard lock(atom_mutex_);
  return atoms_.size();
}

}  // namespace hpsgc
