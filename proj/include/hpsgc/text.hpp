#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hpsgc/program.hpp"
#include "hpsgc/signature.hpp"

namespace hpsgc {

// A lexical rule: the clause `name(IN, OUT) :- attachments.` where IN and
// OUT are the rule's input and output descriptions.
struct LexicalRule {
  std::string name;
  Clause clause;

  FeatureStructure in_spec() const { return clause.literal_args(-1).project(0); }
  FeatureStructure out_spec() const { return clause.literal_args(-1).project(1); }
  // IN and OUT as the two roots of one graph (sharings preserved).
  FeatureStructure spec() const { return clause.literal_args(-1); }
};

struct LexicalEntry {
  FeatureStructure fs;
  int line = 0;
};

struct Grammar {
  std::vector<Clause> clauses;
  std::vector<LexicalRule> rules;
  std::vector<LexicalEntry> entries;
  std::vector<PredicateId> interaction;
  std::vector<PredicateId> indexed;

  Program program(const SignaturePtr& sig) const;
  // Adds the contents of another file's grammar.
  void append(Grammar other);

  friend bool operator==(const Grammar& a, const Grammar& b);
};

// Syntax:
//   type NAME [sub [T1, ..]] [intro [F1:R1, ..]].
//   head(A1, ..) [:- lit, ..].         clauses; `p@N(..)` pins clause N
//   lexrule NAME in: AVM out: AVM [:- lit, ..].
//   entry AVM.
//   :- interaction NAME/ARITY.
//   :- indexed NAME/ARITY.             first-argument index
//   % comment to end of line
// AVMs: `(type F:V G|H:V)`, bare type names, "atom" strings, tags `#t`
// (first use may carry a value), lists `<A, B | T>` and `<>`.
//
// All parse functions throw InputError carrying positioned diagnostics.
RawSignature parse_signature(std::string_view text);
SignaturePtr load_signature(std::string_view text);
Grammar parse_grammar(std::string_view text, const SignaturePtr& sig);
// Comma-separated AVMs give a multi-rooted structure with shared tags.
FeatureStructure parse_avm(std::string_view text, const SignaturePtr& sig);
// `pred(AVM, ..)`
Goal parse_goal(std::string_view text, const SignaturePtr& sig);

// Whole file as text; throws InputError if it cannot be read.
std::string read_text_file(const std::string& path);

// Printing is deterministic: tags numbered by first occurrence, features in
// declaration order. Every printed form parses back to an equal value.
std::string print_avm(const FeatureStructure& fs);
std::string print_goal(const PredicateId& pred, const FeatureStructure& args);
std::string print_clause(const Clause& clause);
std::string print_rule(const LexicalRule& rule);
std::string print_program(const Program& program);
std::string print_grammar(const Grammar& grammar);
std::string print_signature(const Signature& sig);

}  // namespace hpsgc
