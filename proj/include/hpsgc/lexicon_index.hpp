#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hpsgc/propagation.hpp"

namespace hpsgc {

inline const PredicateId kIndexedLexEntry{"indexed_lex_entry", 2};

// An optimized program extended with one indexed_lex_entry clause per
// (extended entry, reachable phonology):
//   indexed_lex_entry(W, OUT (PHON W)) :- extended_lex_entry@k(OUT).
// Entries whose phonology cannot be enumerated get one unkeyed clause
// and are listed in `fallback`.
struct IndexedLexicon {
  Program program;
  std::vector<std::size_t> fallback;  // extended_lex_entry clause ids
  Diagnostics warnings;

  const ArgIndex& buckets() const { return *program.arg_index(kIndexedLexEntry); }
  // Words of every key, sorted.
  std::vector<std::vector<std::string>> keys() const;
};

// Propagates the interaction call of every extended_lex_entry clause
// (the OPT lexicon before indexing).
std::pair<Program, std::vector<TargetReport>> propagate_extended_entries(
    const Program& covariation, const PropagationStrategy& strategy = PropagationStrategy::specialized());

struct SplitOptions {
  // Budget for non-interaction predicates during key enumeration.
  std::optional<std::size_t> aux_max_depth;
  std::uint64_t step_limit = 1'000'000;
};

// Keys come from the specialized interpreter's solutions of each
// extended entry, which terminate even for infinite lexica.
IndexedLexicon split_entries(const Program& optimized, const SplitOptions& options = {});

struct LookupResult {
  std::vector<FeatureStructure> entries;
  SolveStats stats;
};

// Solves indexed_lex_entry(<words>, OUT): only the word's bucket and the
// fallback clauses are tried. An unknown word gives no entries.
LookupResult lookup(const Program& indexed, const std::vector<std::string>& words, const SolveOptions& options);

}  // namespace hpsgc
