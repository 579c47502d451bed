#include <sstream>

#include "hpsgc/text.hpp"

namespace hpsgc {

namespace {

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

class AvmPrinter {
 public:
  explicit AvmPrinter(const FeatureStructure& fs) : fs_(fs), sig_(fs.sig()), tags_(fs.size(), 0), refs_(fs.size(), 0) {
    for (NodeId r : fs.roots()) ++refs_[r];
    for (const auto& n : fs.nodes()) {
      for (const auto& a : n.arcs) ++refs_[a.target];
    }
  }

  std::string value(NodeId n) {
    if (refs_[n] <= 1) return body(n);
    if (tags_[n] != 0) return "#" + std::to_string(tags_[n]);
    tags_[n] = next_tag_++;
    std::string tag = "#" + std::to_string(tags_[n]);
    if (fs_.type(n) == sig_.top() && fs_.node(n).arcs.empty()) return tag;
    return tag + " " + body(n);
  }

 private:
  bool plain_list_cell(NodeId n, std::optional<TypeId> type) const {
    return refs_[n] <= 1 && type && fs_.type(n) == *type;
  }

  std::string body(NodeId n) {
    const TypeId t = fs_.type(n);
    const auto& arcs = fs_.node(n).arcs;
    if (sig_.is_atom(t)) return quote(sig_.atom_text(t));
    if (sig_.e_list_type() == t && arcs.empty()) return "<>";
    if (sig_.ne_list_type() == t && sig_.first_feature() && sig_.rest_feature()) return list(n);
    if (arcs.empty()) return sig_.type_name(t);
    std::string out = "(" + sig_.type_name(t);
    for (const auto& a : arcs) out += " " + sig_.feature_name(a.feature) + ":" + value(a.target);
    return out + ")";
  }

  std::string list(NodeId n) {
    const FeatId first = *sig_.first_feature();
    const FeatId rest = *sig_.rest_feature();
    std::string out = "<";
    NodeId cell = n;
    while (true) {
      if (auto f = fs_.follow(cell, first)) {
        out += value(*f);
      } else {
        out += sig_.type_name(sig_.approp(fs_.type(cell), first));
      }
      auto r = fs_.follow(cell, rest);
      if (!r) {
        out += " | " + sig_.type_name(sig_.approp(fs_.type(cell), rest));
        break;
      }
      if (plain_list_cell(*r, sig_.e_list_type()) && fs_.node(*r).arcs.empty()) break;
      if (plain_list_cell(*r, sig_.ne_list_type())) {
        out += ", ";
        cell = *r;
        continue;
      }
      out += " | " + value(*r);
      break;
    }
    return out + ">";
  }

  const FeatureStructure& fs_;
  const Signature& sig_;
  std::vector<int> tags_;
  std::vector<int> refs_;
  int next_tag_ = 1;
};

std::string literal_text(AvmPrinter& p, const Literal& lit) {
  std::string out = lit.pred.name;
  if (lit.pinned_clause) out += "@" + std::to_string(*lit.pinned_clause);
  if (lit.args.empty()) return out;
  out += "(";
  for (std::size_t i = 0; i < lit.args.size(); ++i) {
    if (i) out += ", ";
    out += p.value(lit.args[i]);
  }
  return out + ")";
}

std::string body_text(AvmPrinter& p, const std::vector<Literal>& body) {
  if (body.empty()) return "";
  std::string out = " :- ";
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += ", ";
    out += literal_text(p, body[i]);
  }
  return out;
}

}  // namespace

std::string print_avm(const FeatureStructure& fs) {
  AvmPrinter p(fs);
  std::string out;
  for (std::size_t i = 0; i < fs.arity(); ++i) {
    if (i) out += ", ";
    out += p.value(fs.root(i));
  }
  return out;
}

std::string print_goal(const PredicateId& pred, const FeatureStructure& args) {
  if (pred.arity == 0) return pred.name;
  return pred.name + "(" + print_avm(args) + ")";
}

std::string print_clause(const Clause& clause) {
  AvmPrinter p(clause.graph());
  std::string out = literal_text(p, clause.head());
  return out + body_text(p, clause.body()) + ".";
}

std::string print_rule(const LexicalRule& rule) {
  const auto& c = rule.clause;
  AvmPrinter p(c.graph());
  std::string out = "lexrule " + rule.name + " in: " + p.value(c.head().args[0]);
  out += " out: " + p.value(c.head().args[1]);
  return out + body_text(p, c.body()) + ".";
}

std::string print_program(const Program& program) {
  std::ostringstream out;
  for (const auto& p : program.interaction_predicates()) out << ":- interaction " << p.str() << ".\n";
  for (const auto& p : program.indexed_predicates()) out << ":- indexed " << p.str() << ".\n";
  for (const auto& c : program.clauses()) out << print_clause(c) << "\n";
  return out.str();
}

std::string print_grammar(const Grammar& grammar) {
  std::ostringstream out;
  for (const auto& p : grammar.interaction) out << ":- interaction " << p.str() << ".\n";
  for (const auto& p : grammar.indexed) out << ":- indexed " << p.str() << ".\n";
  for (const auto& c : grammar.clauses) out << print_clause(c) << "\n";
  for (const auto& r : grammar.rules) out << print_rule(r) << "\n";
  for (const auto& e : grammar.entries) out << "entry " << print_avm(e.fs) << ".\n";
  return out.str();
}

std::string print_signature(const Signature& sig) {
  std::ostringstream out;
  for (const auto& d : sig.declarations()) {
    out << "type " << d.name;
    if (!d.subtypes.empty()) {
      out << " sub [";
      for (std::size_t i = 0; i < d.subtypes.size(); ++i) out << (i ? ", " : "") << d.subtypes[i];
      out << "]";
    }
    if (!d.intro.empty()) {
      out << " intro [";
      for (std::size_t i = 0; i < d.intro.size(); ++i) {
        out << (i ? ", " : "") << d.intro[i].first << ":" << d.intro[i].second;
      }
      out << "]";
    }
    out << ".\n";
  }
  return out.str();
}

}  // namespace hpsgc
