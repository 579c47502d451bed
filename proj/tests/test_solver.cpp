#include "doctest.h"
#include "support.hpp"

#include "hpsgc/lattice.hpp"
#include "hpsgc/solver.hpp"

using namespace hpsgc;

namespace {

struct Fixture {
  SignaturePtr sig = testing_support::load_sig("schema");
  Program prog = testing_support::load_grammar("schema/grammar.tfs", sig).program(sig);
};

}  // namespace

TEST_CASE("append enumerates every split") {
  Fixture f;
  auto goal = parse_goal("append(#a, #b, <\"die\", \"kleine\", \"Liste\">)", f.sig);
  auto r = solve(f.prog, goal);
  // Hand oracle: the four splits, shortest prefix first. Prefix elements
  // are shared with the third argument through the clause's #h.
  const char* expected[] = {
      "<>, #1 <\"die\", \"kleine\", \"Liste\">, #1",
      "<#1 \"die\">, #2 <\"kleine\", \"Liste\">, <#1 | #2>",
      "<#1 \"die\", #2 \"kleine\">, #3 <\"Liste\">, <#1, #2 | #3>",
      "<#1 \"die\", #2 \"kleine\", #3 \"Liste\">, #4 <>, <#1, #2, #3 | #4>",
  };
  REQUIRE(r.solutions.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CAPTURE(i);
    CHECK_FALSE(r.solutions[i].partial);
    CHECK(r.solutions[i].args == parse_avm(expected[i], f.sig));
  }
  CHECK(r.stats.solutions == 4);
}

TEST_CASE("parsing with the ID schemata") {
  Fixture f;
  auto parses = [&](const char* words) {
    return solve(f.prog, parse_goal(std::string("sign((sign PHON:") + words + "))", f.sig)).solutions.size();
  };
  CHECK(parses("<\"kleine\", \"Liste\">") == 1);
  CHECK(parses("<\"die\", \"kleine\", \"Liste\">") == 1);
  CHECK(parses("<\"die\", \"Liste\">") == 1);
  CHECK(parses("<\"schnell\", \"läuft\">") == 1);
  CHECK(parses("<\"Liste\", \"die\">") == 0);
  CHECK(parses("<\"kleine\", \"läuft\">") == 0);
}

TEST_CASE("depth bound flags cut-off solutions partial") {
  Fixture f;
  auto goal = parse_goal("append(#a, #b, #c)", f.sig);
  auto r = solve_depth_bounded(f.prog, goal, 3);
  // Depths 0..2 resolve; each level yields the base case, depth 3 is cut.
  REQUIRE(r.solutions.size() == 4);
  for (std::size_t i = 0; i < 3; ++i) CHECK_FALSE(r.solutions[i].partial);
  CHECK(r.solutions[3].partial);
}

TEST_CASE("step fuse stops open-ended enumeration") {
  Fixture f;
  SolveOptions o;
  o.step_limit = 1000;
  auto r = solve_all(f.prog, parse_goal("append(#a, #b, #c)", f.sig), o);
  CHECK(r.stats.fuse_blown);
  CHECK(r.stats.steps == 1000);
}

TEST_CASE("counters are deterministic") {
  Fixture f;
  auto goal = parse_goal("sign((sign PHON:<\"die\", \"kleine\", \"Liste\">))", f.sig);
  auto a = solve(f.prog, goal);
  auto b = solve(f.prog, goal);
  CHECK(a.stats == b.stats);
  CHECK(a.stats.clause_tries > 0);
}

TEST_CASE("pinned literal only sees its clause") {
  Fixture f;
  auto ids = f.prog.clauses_for({"lex", 1});
  REQUIRE(ids.size() == 5);
  auto goal = parse_goal("lex(#x)", f.sig);
  goal.pinned_clause = ids[2];
  auto r = solve(f.prog, goal);
  REQUIRE(r.solutions.size() == 1);
  CHECK(r.stats.clause_tries == 1);
  CHECK(r.solutions[0].args == f.prog.clause(ids[2]).literal_args(-1));
}
