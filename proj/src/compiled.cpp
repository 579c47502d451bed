#include "hpsgc/compiled.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>

namespace hpsgc {

namespace {

constexpr char kMagic[8] = {'H', 'P', 'S', 'G', 'C', 'B', 'I', 'N'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kNone = 0xffffffffu;

std::uint32_t tag(const char (&s)[5]) {
  return std::uint32_t(s[0]) | std::uint32_t(s[1]) << 8 | std::uint32_t(s[2]) << 16 | std::uint32_t(s[3]) << 24;
}

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(char((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(char((v >> (8 * i)) & 0xff));
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  void pred(const PredicateId& p) {
    str(p.name);
    u32(p.arity);
  }
  std::string take() { return std::move(out_); }
  const std::string& bytes() const { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string str() { return std::string(raw(u32())); }
  PredicateId pred() {
    PredicateId p;
    p.name = str();
    p.arity = u32();
    return p;
  }
  // A count of items each at least `min_bytes` long.
  std::size_t count(std::size_t min_bytes) {
    const std::size_t n = u32();
    if (n * min_bytes > in_.size() - pos_) throw IntegrityError("count exceeds section size");
    return n;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw IntegrityError("truncated data");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

void section(Writer& w, std::uint32_t id, const std::string& payload) {
  w.u32(id);
  w.u64(payload.size());
  w.raw(payload);
}

std::string signature_section(const Signature& sig) {
  Writer w;
  const RawSignature raw = sig.raw();
  w.u32(static_cast<std::uint32_t>(raw.decls.size()));
  for (const auto& d : raw.decls) {
    w.str(d.name);
    w.u32(static_cast<std::uint32_t>(d.subtypes.size()));
    for (const auto& s : d.subtypes) w.str(s);
    w.u32(static_cast<std::uint32_t>(d.intro.size()));
    for (const auto& [f, r] : d.intro) {
      w.str(f);
      w.str(r);
    }
    w.u32(static_cast<std::uint32_t>(d.line));
    w.u32(static_cast<std::uint32_t>(d.column));
  }
  w.u32(static_cast<std::uint32_t>(raw.feature_order.size()));
  for (const auto& f : raw.feature_order) w.str(f);
  return w.take();
}

RawSignature read_signature(Reader& r) {
  RawSignature raw;
  raw.decls.resize(r.count(20));
  for (auto& d : raw.decls) {
    d.name = r.str();
    d.subtypes.resize(r.count(4));
    for (auto& s : d.subtypes) s = r.str();
    d.intro.resize(r.count(8));
    for (auto& [f, t] : d.intro) {
      f = r.str();
      t = r.str();
    }
    d.line = static_cast<int>(r.u32());
    d.column = static_cast<int>(r.u32());
  }
  raw.feature_order.resize(r.count(4));
  for (auto& f : raw.feature_order) f = r.str();
  return raw;
}

}  // namespace

std::string write_compiled(const Program& program, const std::vector<std::size_t>* fallback) {
  const Signature& sig = *program.signature();
  const TypeId dense = static_cast<TypeId>(sig.dense_count());

  std::unordered_map<TypeId, std::uint32_t> atom_ids;
  std::vector<TypeId> atoms;
  auto encode = [&](TypeId t) -> std::uint32_t {
    if (!sig.is_atom(t)) return t;
    auto [it, fresh] = atom_ids.emplace(t, static_cast<std::uint32_t>(atoms.size()));
    if (fresh) atoms.push_back(t);
    return dense + it->second;
  };

  Writer clauses;
  clauses.u32(static_cast<std::uint32_t>(program.size()));
  for (const auto& c : program.clauses()) {
    clauses.pred(c.head().pred);
    clauses.u32(static_cast<std::uint32_t>(c.body().size()));
    for (const auto& lit : c.body()) {
      clauses.pred(lit.pred);
      clauses.u32(lit.pinned_clause ? static_cast<std::uint32_t>(*lit.pinned_clause) : kNone);
    }
    const FeatureStructure& g = c.graph();
    clauses.u32(static_cast<std::uint32_t>(g.size()));
    for (const auto& n : g.nodes()) {
      clauses.u32(encode(n.type));
      clauses.u32(static_cast<std::uint32_t>(n.arcs.size()));
      for (const auto& a : n.arcs) {
        clauses.u32(a.feature);
        clauses.u32(a.target);
      }
    }
    clauses.u32(static_cast<std::uint32_t>(g.arity()));
    for (NodeId root : g.roots()) clauses.u32(root);
  }

  Writer atom_table;
  atom_table.u32(static_cast<std::uint32_t>(atoms.size()));
  for (TypeId t : atoms) atom_table.str(sig.atom_text(t));

  Writer meta;
  for (const auto& c : program.clauses()) meta.u32(static_cast<std::uint32_t>(c.line));
  meta.u32(static_cast<std::uint32_t>(program.interaction_predicates().size()));
  for (const auto& p : program.interaction_predicates()) meta.pred(p);
  const auto indexed = program.indexed_predicates();
  meta.u32(static_cast<std::uint32_t>(indexed.size()));
  for (const auto& p : indexed) meta.pred(p);

  Writer out;
  out.raw(std::string_view(kMagic, sizeof kMagic));
  out.u32(kVersion);
  out.u32(fallback ? 5 : 4);
  section(out, tag("SIGN"), signature_section(sig));
  section(out, tag("ATOM"), atom_table.take());
  section(out, tag("CLAU"), clauses.take());
  section(out, tag("META"), meta.take());
  if (fallback) {
    Writer index;
    index.u32(static_cast<std::uint32_t>(fallback->size()));
    for (auto id : *fallback) index.u32(static_cast<std::uint32_t>(id));
    section(out, tag("INDX"), index.take());
  }
  const std::string& body = out.bytes();
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  out.u32(static_cast<std::uint32_t>(crc));
  return out.take();
}

CompiledFile read_compiled(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic + 12 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw IntegrityError("not a compiled program");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  if (tail.u32() != static_cast<std::uint32_t>(crc)) throw IntegrityError("checksum mismatch");

  Reader r(body.substr(sizeof kMagic));
  if (const auto v = r.u32(); v != kVersion) throw IntegrityError("unsupported version " + std::to_string(v));
  const std::uint32_t n_sections = r.u32();
  std::unordered_map<std::uint32_t, std::string_view> sections;
  for (std::uint32_t i = 0; i < n_sections; ++i) {
    const std::uint32_t id = r.u32();
    const std::uint64_t len = r.u64();
    if (len > body.size()) throw IntegrityError("section length out of range");
    sections[id] = r.raw(static_cast<std::size_t>(len));
  }
  if (!r.done()) throw IntegrityError("trailing data");
  auto get = [&](const char (&name)[5]) {
    auto it = sections.find(tag(name));
    if (it == sections.end()) throw IntegrityError(std::string("missing section ") + name);
    return Reader(it->second);
  };

  Reader sr = get("SIGN");
  SignaturePtr sig = Signature::build(read_signature(sr));
  const TypeId dense = static_cast<TypeId>(sig->dense_count());

  Reader ar = get("ATOM");
  std::vector<TypeId> atoms(ar.count(4));
  for (auto& a : atoms) a = sig->intern_atom(ar.str());
  auto decode = [&](std::uint32_t t) {
    if (t < dense) return static_cast<TypeId>(t);
    if (t - dense >= atoms.size()) throw IntegrityError("type id out of range");
    return atoms[t - dense];
  };

  Reader cr = get("CLAU");
  std::vector<Clause> clauses(cr.count(16));
  for (auto& c : clauses) {
    PredicateId head = cr.pred();
    std::vector<Literal> body(cr.count(12));
    for (auto& lit : body) {
      lit.pred = cr.pred();
      const auto pin = cr.u32();
      if (pin != kNone) lit.pinned_clause = pin;
    }
    const std::size_t n = cr.count(8);
    std::vector<std::pair<TypeId, std::vector<Arc>>> nodes(n);
    for (auto& [type, arcs] : nodes) {
      type = decode(cr.u32());
      arcs.resize(cr.count(8));
      for (auto& a : arcs) {
        a.feature = cr.u32();
        a.target = cr.u32();
        if (a.feature >= sig->feature_count() || a.target >= n) throw IntegrityError("bad arc");
      }
    }
    Store store(sig);
    for (const auto& node : nodes) store.add_node(node.first);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& a : nodes[i].second) {
        if (store.arc(static_cast<NodeId>(i), a.feature)) throw IntegrityError("duplicate arc");
        store.link(static_cast<NodeId>(i), a.feature, a.target);
      }
    }
    std::vector<NodeId> roots(cr.count(4));
    for (auto& root : roots) {
      root = cr.u32();
      if (root >= n) throw IntegrityError("bad root");
    }
    auto graph = store.extract(roots);
    if (!graph) throw IntegrityError("cyclic clause graph");
    try {
      c = Clause::from_graph(std::move(*graph), std::move(head), std::move(body));
    } catch (const InternalError& e) {
      throw IntegrityError(e.what());
    }
  }
  if (!cr.done()) throw IntegrityError("trailing clause data");

  Reader mr = get("META");
  for (auto& c : clauses) c.line = static_cast<int>(mr.u32());
  Program program(sig);
  for (auto& c : clauses) {
    for (const auto& lit : c.body()) {
      if (lit.pinned_clause && *lit.pinned_clause >= clauses.size()) throw IntegrityError("pin out of range");
    }
    program.add(std::move(c));
  }
  for (std::size_t i = 0, n = mr.count(8); i < n; ++i) program.mark_interaction(mr.pred());
  for (std::size_t i = 0, n = mr.count(8); i < n; ++i) program.mark_indexed(mr.pred());

  CompiledFile out{std::move(program), std::nullopt};
  if (sections.count(tag("INDX"))) {
    Reader ir = get("INDX");
    out.fallback.emplace(ir.count(4));
    for (auto& id : *out.fallback) {
      id = ir.u32();
      if (id >= out.program.size()) throw IntegrityError("fallback clause out of range");
    }
  }
  return out;
}

void write_compiled_file(const std::string& path, const Program& program, const std::vector<std::size_t>* fallback) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  const std::string bytes = write_compiled(program, fallback);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw InputError("cannot write " + path);
}

CompiledFile read_compiled_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read " + path);
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return read_compiled(bytes);
}

}  // namespace hpsgc
