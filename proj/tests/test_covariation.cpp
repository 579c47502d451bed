#include <algorithm>
#include <functional>

#include "doctest.h"
#include "support.hpp"

#include "hpsgc/covariation.hpp"
#include "hpsgc/lattice.hpp"
#include "hpsgc/solver.hpp"

using namespace hpsgc;

namespace {

struct Modals {
  SignaturePtr sig = testing_support::load_sig("modals");
  Grammar g = testing_support::load_grammar("modals/lexicon.tfs", sig);
};

std::vector<std::string> names(const Frame& f, const Signature& sig) {
  std::vector<std::string> out;
  for (const auto& p : f.shared_paths) out.push_back(p.str(sig));
  return out;
}

LexicalRule rule_from(const char* text, const SignaturePtr& sig) {
  auto g = parse_grammar(text, sig);
  REQUIRE(g.rules.size() == 1);
  return g.rules[0];
}

bool same_set(std::vector<FeatureStructure> a, std::vector<FeatureStructure> b) {
  auto has = [](const std::vector<FeatureStructure>& v, const FeatureStructure& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  for (const auto& x : a) {
    if (!has(b, x)) return false;
  }
  for (const auto& x : b) {
    if (!has(a, x)) return false;
  }
  return true;
}

std::vector<FeatureStructure> cov_solutions(const Program& p, std::size_t apps) {
  SolveOptions o;
  o.max_rule_applications = apps;
  o.step_limit = 1'000'000;
  auto r = solve_all(p, Goal{kExtendedLexEntry, FeatureStructure::top(p.signature()), std::nullopt}, o);
  REQUIRE_FALSE(r.stats.fuse_blown);
  std::vector<FeatureStructure> out;
  for (auto& s : r.solutions) out.push_back(std::move(s.args));
  return out;
}

}  // namespace

TEST_CASE("frames of the two rules") {
  Modals f;
  CHECK(names(compute_frame(f.g.rules[0], *f.sig), *f.sig) == std::vector<std::string>{"PHON", "VFORM", "CONT"});
  // PHON is rewritten through the attachment, so it does not transfer.
  CHECK(names(compute_frame(f.g.rules[1], *f.sig), *f.sig) == std::vector<std::string>{"SUBCAT", "SLASH", "CONT"});
}

TEST_CASE("a rule mentioning every feature has an empty frame") {
  Modals f;
  auto r = rule_from("lexrule all in: (sign) out: (sign PHON:<> VFORM:fin SUBCAT:<> SLASH:<> CONT:rel).", f.sig);
  CHECK(compute_frame(r, *f.sig).shared_paths.empty());
}

TEST_CASE("nested mention yields the sibling frontier") {
  auto sig = testing_support::load_sig("schema");
  auto r = rule_from("lexrule nest in: (sign) out: (sign SYNSEM|LOC|CAT|HEAD:noun).", sig);
  auto frame = compute_frame(r, *sig);

  // Oracle: enumerate appropriate paths from sign up to length 4; keep the
  // unmentioned ones whose parent is mentioned.
  const auto out = r.out_spec();
  std::vector<Path> expected;
  std::function<void(Path, TypeId)> walk = [&](Path p, TypeId t) {
    if (p.features.size() == 4) return;
    for (FeatId f : sig->features_of(t)) {
      Path q = p;
      q.features.push_back(f);
      auto v = get_path(out, q);
      REQUIRE(v);
      const bool parent_mentioned = p.features.empty() || get_path(out, p)->node.has_value();
      if (!v->node && parent_mentioned) {
        expected.push_back(q);
      } else if (v->node) {
        walk(q, v->type);
      }
    }
  };
  walk({}, *sig->find_type("sign"));
  CHECK(names({"", expected}, *sig) == std::vector<std::string>{"PHON", "SYNSEM|LOC|CAT|SPR"});
  CHECK(frame.shared_paths == expected);
}

TEST_CASE("frame paths are prefix-free") {
  Modals f;
  for (const auto& r : f.g.rules) {
    auto paths = compute_frame(r, *f.sig).shared_paths;
    for (const auto& a : paths) {
      for (const auto& b : paths) {
        if (&a == &b) continue;
        CHECK_FALSE(std::equal(a.features.begin(), a.features.end(), b.features.begin(),
                               b.features.begin() + std::min(a.features.size(), b.features.size())));
      }
    }
  }
}

TEST_CASE("automaton for celr and finlr") {
  Modals f;
  auto a = build_automaton(f.g.rules, *f.sig);
  REQUIRE(a.state_count() == 2);
  CHECK(a.permitted[0] == std::vector<std::size_t>{0, 1});
  CHECK(a.permitted[1].empty());
  CHECK(a.next(0, 0) == 0u);
  CHECK(a.next(0, 1) == 1u);
  CHECK(a.transitions.size() == 2);
}

TEST_CASE("automaton edge cases") {
  Modals f;
  auto none = build_automaton(std::span<const LexicalRule>{}, *f.sig);
  CHECK(none.state_count() == 1);
  CHECK(none.transitions.empty());

  // Output (bse) unifies with the rule's own input: a single looping state.
  auto r = rule_from("lexrule loop in: (sign VFORM:bse) out: (sign SLASH:<>).", f.sig);
  auto a = build_automaton(std::span<const LexicalRule>(&r, 1), *f.sig);
  CHECK(a.state_count() == 1);
  CHECK(a.next(0, 0) == 0u);
}

TEST_CASE("compiled program has the covariation shape") {
  Modals f;
  auto c = compile_lexicon(f.g, f.sig);
  const Program& p = c.program;
  CHECK(p.size() == 8);
  CHECK(p.clauses_for({"interaction_0", 2}).size() == 3);
  CHECK(p.clauses_for({"interaction_1", 2}).size() == 1);
  CHECK(p.is_interaction({"interaction_0", 2}));
  CHECK(p.is_interaction({"interaction_1", 2}));
  CHECK(p.potentially_nonterminating());
  REQUIRE(c.extended_entries.size() == 1);
  std::size_t recursive = 0;
  for (const auto& cl : p.clauses()) {
    if (!p.is_interaction(cl.head().pred) || cl.is_unit()) continue;
    auto adapted = make_body_more_general(p, cl);
    CHECK(adapted.removed.pred.arity == 2);
    recursive += recursive_interaction_clause(p, cl);
  }
  CHECK(recursive == 1);
}

TEST_CASE("undefined attachment is reported by name") {
  Modals f;
  auto g = parse_grammar("lexrule r in: (sign PHON:<#1>) out: (sign PHON:<#2>) :- nosuch(#1, #2).", f.sig);
  try {
    compile_lexicon(g, f.sig);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("nosuch/2") != std::string::npos);
  }
}

TEST_CASE("no rules: extended entries are the base entries") {
  Modals f;
  Grammar g;
  g.entries = f.g.entries;
  auto c = compile_lexicon(g, f.sig);
  auto sols = cov_solutions(c.program, 3);
  REQUIRE(sols.size() == 1);
  CHECK(sols[0] == f.g.entries[0].fs);
}

TEST_CASE("können derivations up to two rule applications") {
  Modals f;
  // Hand derivation: base; celr; finlr; celr twice; celr then finlr.
  const char* expected[] = {
      R"((sign PHON:<"können"> VFORM:bse SUBCAT:<(sign VFORM:bse SUBCAT:#1 CONT:#2) | #1>
               CONT:(rel PRED:"können" ARG:#2)))",
      R"((sign PHON:<"können"> VFORM:bse SUBCAT:#1 SLASH:<(sign VFORM:bse SUBCAT:#1 CONT:#2) | list>
               CONT:(rel PRED:"können" ARG:#2)))",
      R"((sign PHON:<"kann"> VFORM:fin SUBCAT:<(sign VFORM:bse SUBCAT:#1 CONT:#2) | #1>
               CONT:(rel PRED:"können" ARG:#2)))",
      R"((sign PHON:<"können"> VFORM:bse SUBCAT:#1
               SLASH:<#2, (sign VFORM:bse SUBCAT:<#2 | #1> CONT:#3) | list>
               CONT:(rel PRED:"können" ARG:#3)))",
      R"((sign PHON:<"kann"> VFORM:fin SUBCAT:#1 SLASH:<(sign VFORM:bse SUBCAT:#1 CONT:#2) | list>
               CONT:(rel PRED:"können" ARG:#2)))",
  };
  std::vector<FeatureStructure> oracle;
  for (const char* e : expected) oracle.push_back(parse_avm(e, f.sig));

  auto exp = expand_lexicon(f.g, f.sig, 2);
  CHECK(exp.entries == oracle);
  CHECK_FALSE(exp.saturated);
  REQUIRE(exp.warnings.size() == 1);
  CHECK(exp.warnings[0].message.find("lexicon infinite at this bound") != std::string::npos);

  auto c = compile_lexicon(f.g, f.sig);
  CHECK(same_set(cov_solutions(c.program, 2), oracle));
}

TEST_CASE("bound zero gives the base entries") {
  Modals f;
  auto exp = expand_lexicon(f.g, f.sig, 0);
  REQUIRE(exp.entries.size() == 1);
  CHECK(exp.entries[0] == f.g.entries[0].fs);
}

TEST_CASE("expansion agrees with capped covariation solutions") {
  Modals f;
  auto c = compile_lexicon(f.g, f.sig);
  for (std::size_t b = 0; b <= 5; ++b) {
    CAPTURE(b);
    CHECK(same_set(expand_lexicon(f.g, f.sig, b).entries, cov_solutions(c.program, b)));
  }
}
