#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "hpsgc/text.hpp"

namespace hpsgc {

namespace {

enum class Tok {
  Ident,
  String,
  Tag,
  LParen,
  RParen,
  LAngle,
  RAngle,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Bar,
  Dot,
  Neck,
  At,
  Slash,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

struct SyntaxError {
  Diagnostic diag;
};

bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c == '\'' || c >= 0x80;
}

std::vector<Token> tokenize(std::string_view src, Diagnostics& diags) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const unsigned char c = src[i];
    if (std::isspace(c)) {
      advance();
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    const int l = line;
    const int cl = col;
    if (c == '"') {
      advance();
      std::string text;
      bool closed = false;
      while (i < src.size()) {
        if (src[i] == '\\' && i + 1 < src.size()) {
          text += src[i + 1];
          advance(2);
        } else if (src[i] == '"') {
          advance();
          closed = true;
          break;
        } else {
          text += src[i];
          advance();
        }
      }
      if (!closed) diags.push_back({Diagnostic::Severity::Error, l, cl, "unterminated string"});
      out.push_back({Tok::String, std::move(text), l, cl});
      continue;
    }
    if (c == '#' || ident_char(c)) {
      const bool tag = c == '#';
      if (tag) advance();
      std::size_t start = i;
      while (i < src.size() && ident_char(static_cast<unsigned char>(src[i]))) advance();
      std::string text(src.substr(start, i - start));
      if (tag && text.empty()) {
        diags.push_back({Diagnostic::Severity::Error, l, cl, "empty tag name"});
        continue;
      }
      out.push_back({tag ? Tok::Tag : Tok::Ident, std::move(text), l, cl});
      continue;
    }
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '<': kind = Tok::LAngle; break;
      case '>': kind = Tok::RAngle; break;
      case '[': kind = Tok::LBracket; break;
      case ']': kind = Tok::RBracket; break;
      case ',': kind = Tok::Comma; break;
      case '|': kind = Tok::Bar; break;
      case '.': kind = Tok::Dot; break;
      case '@': kind = Tok::At; break;
      case '/': kind = Tok::Slash; break;
      case ':':
        if (i + 1 < src.size() && src[i + 1] == '-') {
          kind = Tok::Neck;
          len = 2;
        } else {
          kind = Tok::Colon;
        }
        break;
      default:
        diags.push_back({Diagnostic::Severity::Error, l, cl, std::string("unexpected character '") +
                                                                 static_cast<char>(c) + "'"});
        advance();
        continue;
    }
    out.push_back({kind, std::string(src.substr(i, len)), l, cl});
    advance(len);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::String: return "string";
    case Tok::Tag: return "tag";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LAngle: return "'<'";
    case Tok::RAngle: return "'>'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Bar: return "'|'";
    case Tok::Dot: return "'.'";
    case Tok::Neck: return "':-'";
    case Tok::At: return "'@'";
    case Tok::Slash: return "'/'";
    case Tok::End: return "end of input";
  }
  return "token";
}

class Parser {
 public:
  Parser(std::string_view text, SignaturePtr sig) : sig_(std::move(sig)) { tokens_ = tokenize(text, diags_); }

  Diagnostics& diagnostics() { return diags_; }
  bool at_end() const { return peek().kind == Tok::End; }

  // Runs `statement` repeatedly, recovering at the next '.' after an error.
  template <typename F>
  void statements(F&& statement) {
    while (!at_end()) {
      try {
        statement();
      } catch (const SyntaxError& e) {
        diags_.push_back(e.diag);
        while (!at_end() && peek().kind != Tok::Dot) ++pos_;
        if (!at_end()) ++pos_;
      } catch (const InputError& e) {
        for (auto d : e.diagnostics()) {
          if (d.line == 0) {
            d.line = peek().line;
            d.column = peek().column;
          }
          diags_.push_back(d);
        }
        while (!at_end() && peek().kind != Tok::Dot) ++pos_;
        if (!at_end()) ++pos_;
      }
    }
  }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++pos_;
    return t;
  }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }
  bool accept_word(std::string_view word) {
    if (peek().kind != Tok::Ident || peek().text != word) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const Token& at, std::string message) const {
    throw SyntaxError{{Diagnostic::Severity::Error, at.line, at.column, std::move(message)}};
  }
  const Token& expect(Tok kind) {
    if (peek().kind != kind) {
      fail(peek(), std::string("expected ") + describe(kind) + ", found " + describe(peek().kind) +
                       (peek().text.empty() ? "" : " '" + peek().text + "'"));
    }
    return next();
  }
  void expect_word(std::string_view word) {
    if (!accept_word(word)) fail(peek(), "expected '" + std::string(word) + "'");
  }

  // ---- signature ----------------------------------------------------

  TypeDecl type_decl() {
    const Token& kw = peek();
    expect_word("type");
    TypeDecl d;
    d.line = kw.line;
    d.column = kw.column;
    d.name = expect(Tok::Ident).text;
    if (accept_word("sub")) {
      expect(Tok::LBracket);
      if (!accept(Tok::RBracket)) {
        do d.subtypes.push_back(expect(Tok::Ident).text);
        while (accept(Tok::Comma));
        expect(Tok::RBracket);
      }
    }
    if (accept_word("intro")) {
      expect(Tok::LBracket);
      if (!accept(Tok::RBracket)) {
        do {
          std::string f = expect(Tok::Ident).text;
          expect(Tok::Colon);
          d.intro.emplace_back(std::move(f), expect(Tok::Ident).text);
        } while (accept(Tok::Comma));
        expect(Tok::RBracket);
      }
    }
    expect(Tok::Dot);
    return d;
  }

  // ---- AVMs -----------------------------------------------------------

  struct Scope {
    explicit Scope(SignaturePtr sig) : store(std::move(sig)) {}
    Store store;
    std::map<std::string, NodeId> tags;
  };

  // `F:` or `F|G|..:`; a bare type before a list tail bar is not a path.
  bool feature_ahead() const {
    std::size_t k = 0;
    while (peek(k).kind == Tok::Ident) {
      if (peek(k + 1).kind == Tok::Colon) return true;
      if (peek(k + 1).kind != Tok::Bar) return false;
      k += 2;
    }
    return false;
  }

  bool value_ahead() const {
    switch (peek().kind) {
      case Tok::LParen:
      case Tok::LAngle:
      case Tok::String:
        return true;
      case Tok::Ident:
        return !feature_ahead();
      default:
        return false;
    }
  }

  void unify_or_fail(Scope& s, NodeId a, NodeId b, const Token& at) {
    if (!s.store.unify(a, b)) fail(at, "inconsistent description: " + s.store.last_clash().str(*sig_));
  }

  NodeId value(Scope& s) {
    const Token& start = peek();
    if (start.kind == Tok::Tag) {
      next();
      auto [it, inserted] = s.tags.emplace(start.text, 0);
      if (inserted) it->second = s.store.add_node(sig_->top());
      const NodeId tagged = it->second;
      if (value_ahead()) {
        const NodeId v = value_body(s);
        unify_or_fail(s, tagged, v, start);
      }
      return tagged;
    }
    return value_body(s);
  }

  TypeId type_named(const Token& t) const {
    auto id = sig_->find_type(t.text);
    if (!id) fail(t, "unknown type '" + t.text + "'");
    return *id;
  }

  TypeId required(std::optional<TypeId> t, const Token& at, const char* name) const {
    if (!t) fail(at, std::string("list syntax needs type '") + name + "' in the signature");
    return *t;
  }

  NodeId value_body(Scope& s) {
    const Token& start = next();
    switch (start.kind) {
      case Tok::Ident:
        return s.store.add_node(type_named(start));
      case Tok::String:
        return s.store.add_node(sig_->intern_atom(start.text));
      case Tok::LParen: {
        TypeId type = sig_->top();
        if (peek().kind == Tok::Ident && !feature_ahead()) type = type_named(next());
        const NodeId node = s.store.add_node(type);
        while (!accept(Tok::RParen)) {
          accept(Tok::Comma);
          const Token& at = peek();
          Path path;
          do {
            const Token& f = expect(Tok::Ident);
            auto id = sig_->find_feature(f.text);
            if (!id) fail(f, "unknown feature '" + f.text + "'");
            path.features.push_back(*id);
          } while (accept(Tok::Bar));
          expect(Tok::Colon);
          auto target = s.store.descend(node, path);
          if (!target) fail(at, "path " + path.str(*sig_) + " not appropriate: " + s.store.last_clash().str(*sig_));
          const NodeId v = value(s);
          unify_or_fail(s, *target, v, at);
        }
        return node;
      }
      case Tok::LAngle: {
        const TypeId e_list = required(sig_->e_list_type(), start, "e_list");
        if (accept(Tok::RAngle)) return s.store.add_node(e_list);
        const TypeId ne_list = required(sig_->ne_list_type(), start, "ne_list");
        if (!sig_->first_feature() || !sig_->rest_feature()) fail(start, "list syntax needs features FIRST and REST");
        const FeatId first = *sig_->first_feature();
        const FeatId rest = *sig_->rest_feature();
        const NodeId head = s.store.add_node(ne_list);
        NodeId cell = head;
        while (true) {
          const Token& at = peek();
          const NodeId elem = value(s);
          unify_or_fail(s, *s.store.descend(cell, first), elem, at);
          const NodeId tail = *s.store.descend(cell, rest);
          if (accept(Tok::Comma)) {
            const NodeId next_cell = s.store.add_node(ne_list);
            unify_or_fail(s, tail, next_cell, at);
            cell = next_cell;
            continue;
          }
          if (accept(Tok::Bar)) {
            const Token& tat = peek();
            unify_or_fail(s, tail, value(s), tat);
          } else if (!s.store.constrain(tail, e_list)) {
            fail(at, "inconsistent list end: " + s.store.last_clash().str(*sig_));
          }
          expect(Tok::RAngle);
          return head;
        }
      }
      default:
        fail(start, std::string("expected a value, found ") + describe(start.kind));
    }
  }

  // ---- clauses ----------------------------------------------------------

  Literal literal(Scope& s) {
    Literal lit;
    lit.pred.name = expect(Tok::Ident).text;
    if (accept(Tok::At)) {
      const Token& n = expect(Tok::Ident);
      try {
        lit.pinned_clause = std::stoul(n.text);
      } catch (const std::exception&) {
        fail(n, "expected a clause number after '@'");
      }
    }
    if (accept(Tok::LParen)) {
      do lit.args.push_back(value(s));
      while (accept(Tok::Comma));
      expect(Tok::RParen);
    }
    lit.pred.arity = static_cast<std::uint32_t>(lit.args.size());
    return lit;
  }

  std::vector<Literal> body(Scope& s) {
    std::vector<Literal> out;
    if (accept(Tok::Neck)) {
      do out.push_back(literal(s));
      while (accept(Tok::Comma));
    }
    return out;
  }

  void grammar_statement(Grammar& g) {
    const Token& start = peek();
    if (start.kind == Tok::Neck) {
      next();
      const bool indexed = accept_word("indexed");
      if (!indexed) expect_word("interaction");
      PredicateId p;
      p.name = expect(Tok::Ident).text;
      expect(Tok::Slash);
      const Token& n = expect(Tok::Ident);
      try {
        p.arity = static_cast<std::uint32_t>(std::stoul(n.text));
      } catch (const std::exception&) {
        fail(n, "expected an arity");
      }
      expect(Tok::Dot);
      (indexed ? g.indexed : g.interaction).push_back(std::move(p));
      return;
    }
    if (start.kind == Tok::Ident && start.text == "type") fail(start, "type declarations belong in the signature");
    Scope s(sig_);
    if (accept_word("entry")) {
      const NodeId root = value(s);
      expect(Tok::Dot);
      auto fs = s.store.extract(std::span<const NodeId>(&root, 1));
      if (!fs) fail(start, "cyclic lexical entry");
      g.entries.push_back({std::move(*fs), start.line});
      return;
    }
    if (accept_word("lexrule")) {
      LexicalRule rule;
      rule.name = expect(Tok::Ident).text;
      expect_word("in");
      expect(Tok::Colon);
      const NodeId in = value(s);
      expect_word("out");
      expect(Tok::Colon);
      const NodeId out = value(s);
      auto attachments = body(s);
      expect(Tok::Dot);
      Literal head{{rule.name, 2}, {in, out}, std::nullopt};
      rule.clause = Clause::build(s.store, std::move(head), std::move(attachments));
      rule.clause.line = start.line;
      g.rules.push_back(std::move(rule));
      return;
    }
    Literal head = literal(s);
    if (head.pinned_clause) fail(start, "a clause head cannot be pinned");
    auto lits = body(s);
    expect(Tok::Dot);
    Clause c = Clause::build(s.store, std::move(head), std::move(lits));
    c.line = start.line;
    g.clauses.push_back(std::move(c));
  }

  SignaturePtr sig_;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Diagnostics diags_;
};

}  // namespace

RawSignature parse_signature(std::string_view text) {
  Parser p(text, nullptr);
  RawSignature raw;
  p.statements([&] { raw.decls.push_back(p.type_decl()); });
  if (has_errors(p.diagnostics())) throw InputError(std::move(p.diagnostics()));
  return raw;
}

SignaturePtr load_signature(std::string_view text) { return Signature::build(parse_signature(text)); }

Grammar parse_grammar(std::string_view text, const SignaturePtr& sig) {
  Parser p(text, sig);
  Grammar g;
  p.statements([&] { p.grammar_statement(g); });
  if (has_errors(p.diagnostics())) throw InputError(std::move(p.diagnostics()));
  return g;
}

FeatureStructure parse_avm(std::string_view text, const SignaturePtr& sig) {
  Parser p(text, sig);
  std::optional<FeatureStructure> out;
  p.statements([&] {
    Parser::Scope s(sig);
    std::vector<NodeId> roots{p.value(s)};
    while (p.accept(Tok::Comma)) roots.push_back(p.value(s));
    p.expect(Tok::End);
    out = s.store.extract(roots);
    if (!out) p.fail(p.peek(), "cyclic feature structure");
  });
  if (has_errors(p.diagnostics()) || !out) throw InputError(std::move(p.diagnostics()));
  return std::move(*out);
}

Goal parse_goal(std::string_view text, const SignaturePtr& sig) {
  Parser p(text, sig);
  std::optional<Goal> out;
  p.statements([&] {
    Parser::Scope s(sig);
    Literal lit = p.literal(s);
    p.accept(Tok::Dot);
    p.expect(Tok::End);
    auto args = s.store.extract(lit.args);
    if (!args) p.fail(p.peek(), "cyclic goal");
    out = Goal{lit.pred, std::move(*args), lit.pinned_clause};
  });
  if (has_errors(p.diagnostics()) || !out) throw InputError(std::move(p.diagnostics()));
  return std::move(*out);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool operator==(const Grammar& a, const Grammar& b) {
  auto same_rules = [&] {
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
      if (a.rules[i].name != b.rules[i].name || !(a.rules[i].clause == b.rules[i].clause)) return false;
    }
    return true;
  };
  auto same_entries = [&] {
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      if (!(a.entries[i].fs == b.entries[i].fs)) return false;
    }
    return true;
  };
  return a.clauses == b.clauses && a.interaction == b.interaction && a.indexed == b.indexed &&
         a.rules.size() == b.rules.size() && same_rules() && a.entries.size() == b.entries.size() &&
         same_entries();
}

void Grammar::append(Grammar other) {
  auto move_into = [](auto& to, auto& from) {
    to.insert(to.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
  };
  move_into(clauses, other.clauses);
  move_into(rules, other.rules);
  move_into(entries, other.entries);
  move_into(interaction, other.interaction);
  move_into(indexed, other.indexed);
}

Program Grammar::program(const SignaturePtr& sig) const {
  Program prog(sig);
  for (const auto& c : clauses) prog.add(c);
  for (const auto& p : interaction) prog.mark_interaction(p);
  for (const auto& p : indexed) prog.mark_indexed(p);
  return prog;
}

}  // namespace hpsgc
