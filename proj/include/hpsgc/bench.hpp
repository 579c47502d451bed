#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpsgc/lexicon_index.hpp"
#include "hpsgc/text.hpp"

namespace hpsgc {

enum class Variant { Exp, Cov, Opt };

std::string variant_name(Variant v);  // EXP, COV, OPT
std::optional<Variant> parse_variant(std::string_view text);

// The lexicon alone, from rules, base entries and attachment clauses:
//   EXP  one unit extended_lex_entry(E) per expanded entry
//   COV  the covariation encoding
//   OPT  COV with its extended entries propagated, then indexed
// EXP without a bound fails when the lexicon does not close; COV and OPT
// ignore the bound (it is applied when solving).
Program lexicon_program(Variant variant, const Grammar& lexicon, const SignaturePtr& sig,
                        std::optional<std::size_t> bound, Diagnostics* warnings = nullptr,
                        std::vector<std::size_t>* fallback = nullptr);

// A grammar whose clauses call lex/1, completed with a lexicon variant:
//   EXP, COV  lex(S) :- extended_lex_entry(S).
//   OPT       lex(S (PHON W)) :- indexed_lex_entry(W, S).
struct VariantProgram {
  Variant variant;
  Program program;
  Diagnostics warnings;
};
VariantProgram build_variant(Variant variant, const Grammar& grammar, const Grammar& lexicon, const SignaturePtr& sig,
                             std::optional<std::size_t> bound);

// start(C) with C the category (or top) carrying PHON = words.
Goal sentence_goal(const SignaturePtr& sig, const std::vector<std::string>& words, const std::string& start,
                   const std::optional<FeatureStructure>& category);
std::vector<std::string> split_words(std::string_view line);

struct ParseResult {
  std::vector<FeatureStructure> parses;  // distinct, in order found
  SolveStats stats;
  double ms = 0;
};
ParseResult parse_sentence(const Program& program, const Goal& goal, const SolveOptions& options);

struct BenchConfig {
  std::vector<Variant> variants{Variant::Exp, Variant::Cov, Variant::Opt};
  std::optional<std::size_t> bound;  // rule applications; also the EXP bound
  std::size_t max_depth = 64;
  std::string start = "sign";
  std::optional<FeatureStructure> category;
  std::size_t repeat = 1;  // ms is the fastest of `repeat` runs
};

struct BenchRow {
  Variant variant;
  std::string sentence_id;
  double ms = 0;
  SolveStats stats;
  std::size_t solutions = 0;  // distinct parses
};

struct BenchReport {
  std::vector<BenchRow> rows;  // variant-major, sentence order
  // parses[v][s]: canonical text of each parse, sorted.
  std::vector<std::vector<std::vector<std::string>>> parses;
  std::vector<Variant> variants;
  Diagnostics warnings;

  bool parses_agree() const;
  double total_ms(Variant v) const;
  std::uint64_t total_clause_tries(Variant v) const;
};

BenchReport run_bench(const Grammar& grammar, const Grammar& lexicon, const SignaturePtr& sig,
                      const std::vector<std::string>& sentences, const BenchConfig& config);

// Header, one row per (variant, sentence), then per variant a `summary`
// row: ms, clause_tries, unif_attempts and choice_points as ratios to
// OPT (to the first variant when OPT was not run), solutions as totals.
std::string bench_tsv(const BenchReport& report);

}  // namespace hpsgc
