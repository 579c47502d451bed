#include "hpsgc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "hpsgc/covariation.hpp"

namespace hpsgc {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Exp: return "EXP";
    case Variant::Cov: return "COV";
    case Variant::Opt: return "OPT";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "exp") return Variant::Exp;
  if (t == "cov") return Variant::Cov;
  if (t == "opt") return Variant::Opt;
  return std::nullopt;
}

namespace {

constexpr std::size_t kClosureLimit = 64;

void add_all(Program& to, const std::vector<Clause>& clauses) {
  for (const auto& c : clauses) to.add(c);
}

}  // namespace

Program lexicon_program(Variant variant, const Grammar& lexicon, const SignaturePtr& sig,
                        std::optional<std::size_t> bound, Diagnostics* warnings, std::vector<std::size_t>* fallback) {
  Diagnostics local;
  Diagnostics& warn = warnings ? *warnings : local;
  switch (variant) {
    case Variant::Exp: {
      ExpandedLexicon exp = expand_lexicon(lexicon, sig, bound.value_or(kClosureLimit));
      if (!bound && !exp.saturated) throw InputError("lexicon is infinite: EXP needs a bound");
      warn.insert(warn.end(), exp.warnings.begin(), exp.warnings.end());
      Program prog(sig);
      add_all(prog, lexicon.clauses);
      for (const auto& e : exp.entries) {
        Store store(sig);
        const NodeId n = store.import(e)[0];
        prog.add(Clause::build(store, {kExtendedLexEntry, {n}, std::nullopt}, {}));
      }
      return prog;
    }
    case Variant::Cov: {
      CompiledLexicon cov = compile_lexicon(lexicon, sig);
      warn.insert(warn.end(), cov.warnings.begin(), cov.warnings.end());
      return std::move(cov.program);
    }
    case Variant::Opt: {
      CompiledLexicon cov = compile_lexicon(lexicon, sig);
      warn.insert(warn.end(), cov.warnings.begin(), cov.warnings.end());
      IndexedLexicon idx = split_entries(propagate_extended_entries(cov.program).first);
      warn.insert(warn.end(), idx.warnings.begin(), idx.warnings.end());
      if (fallback) *fallback = idx.fallback;
      return std::move(idx.program);
    }
  }
  throw InternalError("unknown variant");
}

VariantProgram build_variant(Variant variant, const Grammar& grammar, const Grammar& lexicon, const SignaturePtr& sig,
                             std::optional<std::size_t> bound) {
  VariantProgram out{variant, Program(sig), {}};
  out.program = lexicon_program(variant, lexicon, sig, bound, &out.warnings);
  const char* bridge = variant == Variant::Opt ? "lex(#s (PHON:#w)) :- indexed_lex_entry(#w, #s)."
                                               : "lex(#s) :- extended_lex_entry(#s).";
  add_all(out.program, parse_grammar(bridge, sig).clauses);
  add_all(out.program, grammar.clauses);
  for (const auto& p : grammar.interaction) out.program.mark_interaction(p);
  for (const auto& p : grammar.indexed) out.program.mark_indexed(p);
  return out;
}

std::vector<std::string> split_words(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

Goal sentence_goal(const SignaturePtr& sig, const std::vector<std::string>& words, const std::string& start,
                   const std::optional<FeatureStructure>& category) {
  const auto phon = sig->find_feature("PHON");
  if (!phon) throw InputError("signature has no PHON feature");
  Store store(sig);
  const NodeId root = category ? store.import(*category)[0] : store.add_node(sig->top());
  auto at = store.descend(root, *phon);
  if (!at) throw InputError("category does not admit PHON");
  put_atom_list(store, *at, words);
  return Goal{{start, 1}, *store.extract(std::vector<NodeId>{root}), std::nullopt};
}

ParseResult parse_sentence(const Program& program, const Goal& goal, const SolveOptions& options) {
  ParseResult out;
  const auto t0 = std::chrono::steady_clock::now();
  Solver solver(program, goal, options);
  std::vector<FeatureStructure> found;
  while (auto s = solver.next()) {
    if (s->partial) continue;
    FeatureStructure p = s->args.project(0);
    if (std::find(found.begin(), found.end(), p) == found.end()) found.push_back(std::move(p));
  }
  out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out.parses = std::move(found);
  out.stats = solver.stats();
  return out;
}

bool BenchReport::parses_agree() const {
  for (std::size_t v = 1; v < parses.size(); ++v) {
    if (parses[v] != parses[0]) return false;
  }
  return true;
}

double BenchReport::total_ms(Variant v) const {
  double t = 0;
  for (const auto& r : rows) t += r.variant == v ? r.ms : 0;
  return t;
}

std::uint64_t BenchReport::total_clause_tries(Variant v) const {
  std::uint64_t t = 0;
  for (const auto& r : rows) t += r.variant == v ? r.stats.clause_tries : 0;
  return t;
}

BenchReport run_bench(const Grammar& grammar, const Grammar& lexicon, const SignaturePtr& sig,
                      const std::vector<std::string>& sentences, const BenchConfig& config) {
  BenchReport report;
  report.variants = config.variants;
  SolveOptions options;
  options.max_depth = config.max_depth;
  options.cutoff = SolveOptions::Cutoff::Fail;
  options.max_rule_applications = config.bound;

  std::vector<Goal> goals;
  for (const auto& s : sentences) goals.push_back(sentence_goal(sig, split_words(s), config.start, config.category));

  for (Variant v : config.variants) {
    VariantProgram vp = build_variant(v, grammar, lexicon, sig, config.bound);
    report.warnings.insert(report.warnings.end(), vp.warnings.begin(), vp.warnings.end());
    auto& sets = report.parses.emplace_back();
    for (std::size_t i = 0; i < goals.size(); ++i) {
      ParseResult best = parse_sentence(vp.program, goals[i], options);
      for (std::size_t k = 1; k < config.repeat; ++k) {
        best.ms = std::min(best.ms, parse_sentence(vp.program, goals[i], options).ms);
      }
      std::vector<std::string> set;
      for (const auto& p : best.parses) set.push_back(print_avm(p));
      std::sort(set.begin(), set.end());
      sets.push_back(std::move(set));
      report.rows.push_back({v, std::to_string(i + 1), best.ms, best.stats, best.parses.size()});
    }
  }
  return report;
}

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string bench_tsv(const BenchReport& report) {
  std::ostringstream out;
  out << "variant\tsentence_id\tms\tclause_tries\tunif_attempts\tchoice_points\tsolutions\n";
  for (const auto& r : report.rows) {
    out << variant_name(r.variant) << '\t' << r.sentence_id << '\t' << fixed(r.ms, 3) << '\t' << r.stats.clause_tries
        << '\t' << r.stats.unification_attempts << '\t' << r.stats.choice_points << '\t' << r.solutions << '\n';
  }
  if (report.rows.empty() || report.variants.empty()) return out.str();

  struct Totals {
    double ms = 0;
    double tries = 0, unif = 0, cps = 0;
    std::size_t solutions = 0;
  };
  auto totals = [&](Variant v) {
    Totals t;
    for (const auto& r : report.rows) {
      if (r.variant != v) continue;
      t.ms += r.ms;
      t.tries += static_cast<double>(r.stats.clause_tries);
      t.unif += static_cast<double>(r.stats.unification_attempts);
      t.cps += static_cast<double>(r.stats.choice_points);
      t.solutions += r.solutions;
    }
    return t;
  };
  const bool has_opt = std::count(report.variants.begin(), report.variants.end(), Variant::Opt) != 0;
  const Totals base = totals(has_opt ? Variant::Opt : report.variants.front());
  auto ratio = [](double a, double b) { return b > 0 ? a / b : 0.0; };
  for (Variant v : report.variants) {
    const Totals t = totals(v);
    out << variant_name(v) << "\tsummary\t" << fixed(ratio(t.ms, base.ms), 3) << '\t'
        << fixed(ratio(t.tries, base.tries), 3) << '\t' << fixed(ratio(t.unif, base.unif), 3) << '\t'
        << fixed(ratio(t.cps, base.cps), 3) << '\t' << t.solutions << '\n';
  }
  return out.str();
}

}  // namespace hpsgc
