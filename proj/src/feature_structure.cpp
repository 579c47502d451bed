#include "hpsgc/feature_structure.hpp"

#include "hpsgc/store.hpp"

namespace hpsgc {

Path Path::parse(const Signature& sig, std::string_view text) {
  Path p;
  if (text.empty()) return p;
  std::size_t start = 0;
  while (true) {
    auto bar = text.find('|', start);
    auto name = text.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
    auto f = sig.find_feature(name);
    if (!f) throw InputError("'" + std::string(name) + "' is not a feature");
    p.features.push_back(*f);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return p;
}

std::string Path::str(const Signature& sig) const {
  std::string out;
  for (FeatId f : features) {
    if (!out.empty()) out += '|';
    out += sig.feature_name(f);
  }
  return out;
}

FeatureStructure FeatureStructure::atomic(SignaturePtr sig, TypeId type) {
  FeatureStructure fs;
  fs.sig_ = std::move(sig);
  fs.nodes_.push_back({type, {}});
  fs.roots_.push_back(0);
  return fs;
}

FeatureStructure FeatureStructure::top(SignaturePtr sig, std::size_t arity) {
  FeatureStructure fs;
  const TypeId t = sig->top();
  fs.sig_ = std::move(sig);
  for (std::size_t i = 0; i < arity; ++i) {
    fs.nodes_.push_back({t, {}});
    fs.roots_.push_back(static_cast<NodeId>(i));
  }
  return fs;
}

std::optional<NodeId> FeatureStructure::follow(NodeId n, FeatId f) const {
  for (const auto& a : nodes_[n].arcs) {
    if (a.feature == f) return a.target;
    if (a.feature > f) break;
  }
  return std::nullopt;
}

FeatureStructure FeatureStructure::select(std::span<const std::size_t> picked) const {
  Store store(sig_);
  auto roots = store.import(*this);
  std::vector<NodeId> chosen;
  for (auto i : picked) chosen.push_back(roots.at(i));
  return *store.extract(chosen);
}

FeatureStructure FeatureStructure::project(std::size_t i) const {
  const std::size_t picked[] = {i};
  return select(picked);
}

std::size_t FeatureStructure::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  for (const auto& n : nodes_) {
    mix(n.type);
    for (const auto& a : n.arcs) {
      mix(a.feature);
      mix(a.target);
    }
    mix(0xffff);
  }
  for (auto r : roots_) mix(r);
  return static_cast<std::size_t>(h);
}

}  // namespace hpsgc
