// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>

#include "criteria.hpp"
#include "hpsgc/bench.hpp"
#include "hpsgc/lattice.hpp"

using namespace hpsgc;
using testing_support::CriterionResult;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SolveOptions capped(std::size_t apps) {
  SolveOptions o;
  o.max_rule_applications = apps;
  o.cutoff = SolveOptions::Cutoff::Fail;
  return o;
}

std::vector<std::string> phon_of(const FeatureStructure& fs) {
  const Signature& sig = fs.sig();
  std::vector<std::string> words;
  auto n = fs.follow(fs.root(0), *sig.find_feature("PHON"));
  while (n && fs.type(*n) == *sig.ne_list_type()) {
    words.push_back(sig.atom_text(fs.type(*fs.follow(*n, *sig.first_feature()))));
    n = fs.follow(*n, *sig.rest_feature());
  }
  return words;
}

Grammar bench_lexicon(const SignaturePtr& sig) {
  Grammar g = testing_support::load_grammar("bench/rules.tfs", sig);
  g.append(testing_support::load_grammar("bench/entries.tfs", sig));
  return g;
}

std::vector<std::string> bench_sentences() {
  std::vector<std::string> out;
  const std::string text = read_text_file(testing_support::grammar_path("bench/sentences.txt"));
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!split_words(line).empty()) out.push_back(line);
    start = end + 1;
  }
  return out;
}

// Criterion 5: the modals covariation lexicon.
CriterionResult specialized_contract() {
  CriterionResult res;
  const Program cov = testing_support::modals_cov().program;
  std::vector<Goal> goals{{kExtendedLexEntry, FeatureStructure::top(cov.signature()), std::nullopt}};
  for (const auto& t : testing_support::extended_entry_targets(cov)) {
    const Clause& c = cov.clause(t.clause_id);
    goals.push_back({c.body()[t.body_index].pred, c.literal_args(static_cast<int>(t.body_index)), std::nullopt});
  }

  SolveOptions fused;
  fused.step_limit = 1'000'000;
  const auto plain = solve_all(cov, goals.front(), fused);
  ++res.cases;
  if (!plain.stats.fuse_blown) res.fail("plain enumeration finished within 10^6 steps");

  for (const auto& g : goals) {
    const auto spec = solve_specialized(cov, g);
    ++res.cases;
    if (spec.stats.fuse_blown) res.fail("specialized solve of " + print_goal(g.pred, g.args) + " blew the fuse");
    const auto spec_msg = msg_all(testing_support::args_of(spec));
    for (std::size_t cap : {4, 8, 12}) {
      SolveOptions o;
      o.max_depth = cap;
      o.cutoff = SolveOptions::Cutoff::Fail;
      const auto bounded = msg_all(testing_support::args_of(solve_all(cov, g, o)));
      ++res.cases;
      if (bounded && (!spec_msg || !subsumes(*spec_msg, *bounded))) {
        res.fail("cap " + std::to_string(cap) + ": specialized msg does not subsume " + print_avm(*bounded));
      }
    }
  }
  if (res.pass) {
    res.detail = "plain blew the fuse after " + std::to_string(plain.stats.steps) + " steps; " +
                 std::to_string(goals.size()) + " goals x caps {4,8,12}";
  }
  return res;
}

// Criterion 6: a determiner parsed as a functional sign.
CriterionResult schema_pruning() {
  CriterionResult res;
  const Program schema = testing_support::schema_program();
  const SignaturePtr& sig = schema.signature();
  const Program opt = propagate_program(schema, std::nullopt, PropagationStrategy::depth_bounded(8)).first;
  const PredicateId ha{"head_adjunct", 1};

  const auto ids = opt.clauses_for(ha);
  ++res.cases;
  if (ids.empty()) {
    res.fail("head_adjunct clause deleted");
    return res;
  }
  const auto mother = get_path(opt.clause(ids[0]).literal_args(-1), Path::parse(*sig, "SYNSEM|LOC|CAT|HEAD"));
  const TypeId subst = *sig->find_type("subst");
  if (!mother || !sig->type_subsumes(subst, mother->type)) res.fail("head_adjunct mother HEAD is not below subst");

  const Goal g = sentence_goal(sig, {"die"}, "sign", parse_avm("(sign SYNSEM|LOC|CAT|HEAD:func)", sig));
  const auto before = solve_all(schema, g, {});
  const auto after = solve_all(opt, g, {});
  const auto tb = before.stats.tries_for(schema, ha);
  const auto ta = after.stats.tries_for(opt, ha);
  ++res.cases;
  if (tb < 1 || ta != 0) res.fail("head_adjunct tries " + std::to_string(tb) + " -> " + std::to_string(ta));
  ++res.cases;
  if (testing_support::multiset(testing_support::args_of(before)) !=
      testing_support::multiset(testing_support::args_of(after))) {
    res.fail("parses of 'die' changed");
  }
  if (res.pass) res.detail = "head_adjunct tries " + std::to_string(tb) + " -> " + std::to_string(ta);
  return res;
}

// Criterion 7.
CriterionResult constant_lookup() {
  CriterionResult res;
  const SignaturePtr sig = testing_support::load_sig("modals");
  const Grammar base = testing_support::load_grammar("modals/lexicon.tfs", sig);
  auto index_of = [&](const Grammar& g) {
    return split_entries(propagate_extended_entries(compile_lexicon(g, sig).program).first);
  };
  auto generated = [&](std::size_t n) {
    Grammar g = base;
    for (std::size_t i = 1; i < n; ++i) {
      const auto w = "w" + std::to_string(i);
      g.entries.push_back({parse_avm("(sign PHON:<\"" + w + "\"> SUBCAT:<> CONT:(rel PRED:\"" + w + "\"))", sig), 0});
    }
    return g;
  };
  const auto small = index_of(generated(10));
  const auto large = index_of(generated(10000));
  std::string tries;
  for (const char* word : {"kann", "w5"}) {
    const auto a = lookup(small.program, {word}, capped(8));
    const auto b = lookup(large.program, {word}, capped(8));
    ++res.cases;
    if (!small.fallback.empty() || !large.fallback.empty()) res.fail("fallback list not empty");
    if (a.stats.clause_tries != b.stats.clause_tries) {
      res.fail(std::string(word) + ": " + std::to_string(a.stats.clause_tries) + " vs " +
               std::to_string(b.stats.clause_tries) + " clause tries");
    }
    if (!(a.entries == b.entries)) res.fail(std::string(word) + ": entries differ");
    tries += (tries.empty() ? "" : ", ") + std::string(word) + " " + std::to_string(a.stats.clause_tries);
  }

  auto agree = [&](const std::string& name, const Program& cov) {
    const Program opt = propagate_extended_entries(cov).first;
    const auto idx = split_entries(opt);
    const auto all =
        testing_support::args_of(solve_all(cov, {kExtendedLexEntry, FeatureStructure::top(cov.signature()), std::nullopt}, capped(8)));
    std::vector<FeatureStructure> got;
    for (const auto& key : idx.keys()) {
      for (auto& e : lookup(idx.program, key, capped(8)).entries) {
        if (phon_of(e) != key) res.fail(name + ": entry filed under the wrong word");
        got.push_back(std::move(e));
      }
    }
    ++res.cases;
    if (testing_support::multiset(got) != testing_support::multiset(all)) {
      res.fail(name + ": " + std::to_string(got.size()) + " indexed vs " + std::to_string(all.size()) + " unindexed");
    }
    return all.size();
  };
  const auto n = agree("modals", compile_lexicon(base, sig).program);
  const SignaturePtr bench_sig = testing_support::load_sig("bench");
  const auto m = agree("bench", lexicon_program(Variant::Cov, bench_lexicon(bench_sig), bench_sig, std::nullopt));
  if (res.pass) {
    res.detail = "tries per lookup (" + tries + "); " + std::to_string(n) + " + " + std::to_string(m) +
                 " entries at cap 8 agree";
  }
  return res;
}

// Criterion 8.
CriterionResult bench(std::string& ratios) {
  CriterionResult res;
  const auto t0 = Clock::now();
  const SignaturePtr sig = testing_support::load_sig("bench");
  const Grammar grammar = testing_support::load_grammar("bench/grammar.tfs", sig);
  const auto sentences = bench_sentences();
  BenchConfig config;
  config.bound = 3;
  config.repeat = 3;
  config.start = "s";
  const BenchReport r = run_bench(grammar, bench_lexicon(sig), sig, sentences, config);
  const double secs = seconds_since(t0);
  res.cases = sentences.size();
  if (sentences.size() != 20) res.fail(std::to_string(sentences.size()) + " sentences, expected 20");
  if (!r.parses_agree()) res.fail("parse sets differ across variants");
  const auto tries = [&](Variant v) { return static_cast<double>(r.total_clause_tries(v)); };
  if (!(tries(Variant::Opt) < tries(Variant::Cov))) res.fail("OPT clause tries not below COV");
  if (!(r.total_ms(Variant::Opt) <= 0.8 * r.total_ms(Variant::Cov))) res.fail("OPT time above 0.8 x COV");
  if (secs >= 120) res.fail("bench took " + std::to_string(secs) + " s");

  char buf[256];
  std::snprintf(buf, sizeof buf, "OPT : EXP : COV = 1 : %.2f : %.2f (clause tries), 1 : %.2f : %.2f (time)",
                tries(Variant::Exp) / tries(Variant::Opt), tries(Variant::Cov) / tries(Variant::Opt),
                r.total_ms(Variant::Exp) / r.total_ms(Variant::Opt), r.total_ms(Variant::Cov) / r.total_ms(Variant::Opt));
  ratios = buf;
  std::size_t parses = 0;
  for (const auto& p : r.parses[0]) parses += p.size();
  if (res.pass) {
    std::snprintf(buf, sizeof buf, "%zu parses agree; %.1f s", parses, secs);
    res.detail = buf;
  }
  return res;
}

}  // namespace

int main() {
  std::string ratios;
  const std::pair<const char*, std::function<CriterionResult()>> criteria[] = {
      {"lattice properties", [] {
         const auto t0 = Clock::now();
         auto r = testing_support::lattice_properties(1200, 7);
         const double s = seconds_since(t0);
         if (s >= 30) r.fail("took " + std::to_string(s) + " s");
         return r;
       }},
      {"factoring law", [] {
         const SignaturePtr sig = testing_support::load_sig("bench");
         const Program cov = lexicon_program(Variant::Cov, bench_lexicon(sig), sig, std::nullopt);
         return testing_support::factoring_law(50, 11, {{"bench", cov}});
       }},
      {"solution preservation", [] {
         const auto t0 = Clock::now();
         auto r = testing_support::solution_preservation(60, 3000);
         // The benchmark lexicon as well, under the bench bound.
         const SignaturePtr sig = testing_support::load_sig("bench");
         const Program cov = lexicon_program(Variant::Cov, bench_lexicon(sig), sig, std::nullopt);
         const Program opt = propagate_extended_entries(cov).first;
         const Goal lex{kExtendedLexEntry, FeatureStructure::top(sig), std::nullopt};
         ++r.cases;
         if (testing_support::multiset(testing_support::args_of(solve_all(cov, lex, capped(3)))) !=
             testing_support::multiset(testing_support::args_of(solve_all(opt, lex, capped(3))))) {
           r.fail("bench extended entries changed");
         }
         const double s = seconds_since(t0);
         if (s >= 60) r.fail("took " + std::to_string(s) + " s");
         return r;
       }},
      {"depth-bound safety", [] { return testing_support::depth_bound_safety(60, 5000); }},
      {"specialized interpreter", specialized_contract},
      {"schema pruning", schema_pruning},
      {"constant-time lookup", constant_lookup},
      {"benchmark", [&] { return bench(ratios); }},
      {"round trip", [] { return testing_support::round_trips(500, 9); }},
  };

  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what());
    }
    failed += !r.pass;
    std::printf("criterion %d %s: %s (%zu cases, %.2f s) %s\n", n, name, r.pass ? "PASS" : "FAIL", r.cases,
                seconds_since(t0), r.detail.c_str());
    if (n == 8 && !ratios.empty()) std::printf("  %s; reference 1 : 1.3 : 14\n", ratios.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
