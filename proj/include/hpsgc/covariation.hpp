#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpsgc/text.hpp"

namespace hpsgc {

// Paths a lexical rule transfers unchanged from input to output.
struct Frame {
  std::string rule;
  std::vector<Path> shared_paths;
};

// Maximal paths left unmentioned on the OUT side that are also
// appropriate on the IN side. A path below an OUT node is only considered
// when that node is unshared and bears arcs of its own.
Frame compute_frame(const LexicalRule& rule, const Signature& sig, Diagnostics* warnings = nullptr);

// The rule's IN/OUT graph with the frame sharings added.
FeatureStructure framed_spec(const LexicalRule& rule, const Frame& frame);

// State 0 permits every rule. Applying R leads to the state permitting
// the rules whose input unifies with R's framed output.
struct InteractionAutomaton {
  std::vector<std::vector<std::size_t>> permitted;  // rule indices, declaration order
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> transitions;  // (state, rule) -> state

  std::size_t state_count() const { return permitted.size(); }
  std::optional<std::size_t> next(std::size_t state, std::size_t rule) const;
};

InteractionAutomaton build_automaton(std::span<const LexicalRule> rules, std::span<const Frame> frames);
InteractionAutomaton build_automaton(std::span<const LexicalRule> rules, const Signature& sig);

std::string interaction_name(std::size_t state);
inline const PredicateId kExtendedLexEntry{"extended_lex_entry", 1};

struct CompiledLexicon {
  Program program;
  InteractionAutomaton automaton;
  std::vector<Frame> frames;
  std::vector<std::size_t> extended_entries;  // clause ids, entry order
  Diagnostics warnings;
};

// Covariation encoding: per state, one recursive clause per permitted
// rule and a unit clause; the rule clauses; the grammar's own clauses;
// one extended_lex_entry clause per base entry. Throws InputError when an
// attachment predicate is undefined or a rule name clashes with a
// grammar predicate.
CompiledLexicon compile_lexicon(const Grammar& grammar, const SignaturePtr& sig);

struct ExpandedLexicon {
  std::vector<FeatureStructure> entries;  // base entries first, then by number of applications
  bool saturated = true;                  // false when the bound cut off new entries
  Diagnostics warnings;
};

// Closes the base entries under automaton-permitted rule sequences of
// length <= bound; isomorphic results are merged.
ExpandedLexicon expand_lexicon(const Grammar& grammar, const SignaturePtr& sig, std::size_t bound);

}  // namespace hpsgc
