#pragma once

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>

#include "hpsgc/compiled.hpp"
#include "hpsgc/covariation.hpp"
#include "hpsgc/lexicon_index.hpp"
#include "hpsgc/propagation.hpp"
#include "random_program.hpp"

#include "lattice_oracle.hpp"
#include "random_fs.hpp"
#include "support.hpp"

namespace testing_support {

struct CriterionResult {
  bool pass = true;
  std::size_t cases = 0;
  std::string detail;  // first failure, or a summary

  void fail(const std::string& what) {
    if (pass) detail = what;
    pass = false;
  }
};

// Random pairs and triples over the shipped signatures. The second and
// third structures are usually refinements of generalizations of the
// first, so that a good share of them unify.
inline CriterionResult lattice_properties(std::size_t count, std::uint32_t seed) {
  using namespace hpsgc;
  CriterionResult res;
  const SignaturePtr sigs[] = {load_sig("schema"), load_sig("modals")};
  std::size_t unified = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const SignaturePtr& sig = sigs[i % 2];
    RandomFs gen(sig, seed + static_cast<std::uint32_t>(i));
    const std::size_t arity = 1 + gen.pick(2);
    const FeatureStructure a = gen.make(5, arity);
    auto relative = [&] {
      if (gen.pick(4) == 0) return gen.make(5, arity);
      FeatureStructure g = a;
      for (std::size_t k = gen.pick(4); k > 0; --k) {
        auto up = generalizations(g);
        if (up.empty()) break;
        g = up[gen.pick(up.size())];
      }
      return gen.refine(g, 5, gen.pick(6));
    };
    const FeatureStructure b = relative();
    const FeatureStructure c = relative();
    ++res.cases;
    auto where = [&](const std::string& what) {
      std::ostringstream s;
      s << what << " for a=" << print_avm(a) << " b=" << print_avm(b) << " c=" << print_avm(c);
      return s.str();
    };

    const auto ab = unify(a, b);
    const auto ba = unify(b, a);
    if (ab.result != ba.result) res.fail(where("unify not commutative"));
    if (unify(a, a).result != a) res.fail(where("unify not idempotent"));
    const auto bc = unify(b, c);
    std::optional<FeatureStructure> left, right;
    if (ab) left = unify(*ab, c).result;
    if (bc) right = unify(a, *bc).result;
    if (left != right) res.fail(where("unify not associative"));

    if (ab) {
      ++unified;
      if (!subsumes(a, *ab) || !subsumes(b, *ab)) res.fail(where("unify result not subsumed by both inputs"));
      for (const auto& v : generalizations(*ab)) {
        if (subsumes(a, v) && subsumes(b, v)) res.fail(where("unify result not the greatest lower bound"));
      }
    } else {
      for (int k = 0; k < 8; ++k) {
        if (subsumes(b, gen.refine(a, 8, 1 + gen.pick(8)))) res.fail(where("unify failed on a unifiable pair"));
      }
    }

    const FeatureStructure m = msg(a, b);
    if (!(msg(b, a) == m)) res.fail(where("msg not commutative"));
    if (!(msg(a, a) == a)) res.fail(where("msg not idempotent"));
    if (!subsumes(m, a) || !subsumes(m, b)) res.fail(where("msg does not subsume both inputs"));
    for (const auto& x : upward_closure(a, 100000)) {
      if (subsumes(x, b) && !subsumes(x, m)) res.fail(where("msg not the least upper bound"));
    }
  }
  if (res.pass) {
    res.detail = std::to_string(res.cases) + " cases, " + std::to_string(unified) + " unifiable";
  }
  return res;
}

// Every grammar file shipped under grammars/ (text and binary) plus
// `random_count` random structures per shipped signature.
inline CriterionResult round_trips(std::size_t random_count, std::uint32_t seed) {
  using namespace hpsgc;
  namespace fs = std::filesystem;
  CriterionResult res;
  auto binary = [&](const Program& p, const std::string& what) {
    const std::string bytes = write_compiled(p);
    const CompiledFile back = read_compiled(bytes);
    if (print_program(back.program) != print_program(p) || write_compiled(back.program) != bytes) {
      res.fail("binary round trip: " + what);
    }
  };

  std::vector<fs::path> dirs;
  for (const auto& d : fs::directory_iterator(HPSGC_GRAMMAR_DIR)) {
    if (d.is_directory() && fs::exists(d.path() / "signature.tfs")) dirs.push_back(d.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const SignaturePtr sig = load_signature(read_text_file((dir / "signature.tfs").string()));
    ++res.cases;
    if (print_signature(*load_signature(print_signature(*sig))) != print_signature(*sig)) {
      res.fail("signature text round trip: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(dir)) {
      if (f.path().extension() == ".tfs" && f.path().filename() != "signature.tfs") files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      ++res.cases;
      const Grammar g = parse_grammar(read_text_file(file.string()), sig);
      if (!(parse_grammar(print_grammar(g), sig) == g)) res.fail("text round trip: " + file.string());
      binary(g.program(sig), file.string());
    }

    RandomFs gen(sig, seed);
    Program units(sig);
    for (std::size_t i = 0; i < random_count; ++i) {
      ++res.cases;
      const FeatureStructure x = gen.make(12, 1 + gen.pick(3));
      if (!(parse_avm(print_avm(x), sig) == x)) res.fail("text round trip: " + print_avm(x));
      Store store(sig);
      const auto roots = store.import(x);
      units.add(Clause::build(store, {{"p", static_cast<std::uint32_t>(roots.size())}, roots, std::nullopt}, {}));
    }
    binary(units, "random structures over " + dir.string());
  }
  if (res.pass) res.detail = std::to_string(res.cases) + " files and structures";
  return res;
}

// Generated programs whose queries all have between 1 and 64 solutions.
inline std::vector<RandomProgram> generated_programs(std::size_t count, std::uint32_t seed) {
  using namespace hpsgc;
  const SignaturePtr sigs[] = {load_sig("schema"), load_sig("modals")};
  std::vector<RandomProgram> out;
  for (std::uint32_t s = seed; out.size() < count && s < seed + 200 * count; ++s) {
    RandomProgram rp = random_program(sigs[s % 2], s);
    bool ok = true;
    for (const auto& p : rp.preds) {
      SolveOptions o;
      o.max_solutions = 65;
      const auto n = solve_all(rp.program, Goal{p, FeatureStructure::top(rp.program.signature(), p.arity), {}}, o)
                         .solutions.size();
      ok = ok && n >= 1 && n <= 64;
    }
    if (ok) out.push_back(std::move(rp));
  }
  return out;
}

inline std::vector<hpsgc::FeatureStructure> args_of(const hpsgc::SolveResult& r) {
  std::vector<hpsgc::FeatureStructure> out;
  for (const auto& s : r.solutions) out.push_back(s.args);
  return out;
}

// Parse goals over the schema grammar.
inline const std::vector<std::string>& schema_sentences() {
  static const std::vector<std::string> s = {
      "kleine Liste", "die kleine Liste", "die Liste", "schnell läuft", "Liste die", "kleine läuft", "Liste",
      "die kleine kleine Liste", "läuft",
  };
  return s;
}

inline hpsgc::Goal schema_parse_goal(const std::string& sentence, const hpsgc::SignaturePtr& sig) {
  std::istringstream in(sentence);
  std::string w, list;
  while (in >> w) list += (list.empty() ? "\"" : ", \"") + w + "\"";
  return hpsgc::parse_goal("sign((sign PHON:<" + list + ">))", sig);
}

inline hpsgc::Program schema_program() {
  auto sig = load_sig("schema");
  return load_grammar("schema/grammar.tfs", sig).program(sig);
}

inline hpsgc::CompiledLexicon modals_cov() {
  auto sig = load_sig("modals");
  return hpsgc::compile_lexicon(load_grammar("modals/lexicon.tfs", sig), sig);
}

// Propagates `targets` one after the other, as propagate_program does, and
// checks unify(C, D) = D for every solution D behind each factor C.
inline void check_factoring(hpsgc::Program prog, const std::vector<hpsgc::PropagationTarget>& targets,
                            const hpsgc::PropagationStrategy& strategy, const std::string& name,
                            CriterionResult& res) {
  using namespace hpsgc;
  std::vector<std::optional<std::size_t>> current(prog.size());
  for (std::size_t i = 0; i < prog.size(); ++i) current[i] = i;
  for (const auto& t : targets) {
    if (!current[t.clause_id]) continue;
    const PropagationTarget here{*current[t.clause_id], t.body_index};
    const Clause& c = prog.clause(here.clause_id);
    const Literal& lit = c.body()[here.body_index];
    const Goal goal{lit.pred, c.literal_args(static_cast<int>(here.body_index)), lit.pinned_clause};
    const auto solutions = solve_all(prog, goal, solve_options_for(strategy)).solutions;
    const auto factor = generalized_solutions_for_goal(prog, goal, strategy);
    ++res.cases;
    if (factor.has_value() == solutions.empty()) res.fail(name + ": factor presence disagrees with solutions");
    for (const auto& d : solutions) {
      const auto u = unify(factor->fs, d.args);
      if (!u || !(*u == d.args)) {
        res.fail(name + ": clause " + std::to_string(here.clause_id) + " goal " + lit.pred.str() +
                 " solution " + print_avm(d.args) + " not factored by " + print_avm(factor->fs));
      }
    }
    auto [next, report] = propagate_goal(prog, here, strategy);
    prog = std::move(next);
    if (report.clause_deleted) {
      for (auto& k : current) {
        if (k && *k == here.clause_id) {
          k.reset();
        } else if (k && *k > here.clause_id) {
          --*k;
        }
      }
    }
  }
}

inline std::vector<hpsgc::PropagationTarget> extended_entry_targets(const hpsgc::Program& p) {
  std::vector<hpsgc::PropagationTarget> out;
  for (std::size_t id : p.clauses_for(hpsgc::kExtendedLexEntry)) {
    if (!p.clause(id).is_unit()) out.push_back({id, 0});
  }
  return out;
}

// Criterion 2 on the shipped grammars plus `generated` random programs.
inline CriterionResult factoring_law(std::size_t generated, std::uint32_t seed,
                                     const std::vector<std::pair<std::string, hpsgc::Program>>& extra_opt = {}) {
  using namespace hpsgc;
  CriterionResult res;
  const Program schema = schema_program();
  check_factoring(schema, all_body_goals(schema), PropagationStrategy::depth_bounded(6), "schema", res);
  const Program cov = modals_cov().program;
  check_factoring(cov, extended_entry_targets(cov), PropagationStrategy::specialized(), "modals", res);
  for (const auto& [name, p] : extra_opt) {
    check_factoring(p, extended_entry_targets(p), PropagationStrategy::specialized(), name, res);
  }
  for (const auto& rp : generated_programs(generated, seed)) {
    check_factoring(rp.program, all_body_goals(rp.program), PropagationStrategy::plain(), "generated", res);
  }
  if (res.pass) res.detail = std::to_string(res.cases) + " targets";
  return res;
}

// Criterion 3: answers before and after propagate_program.
inline CriterionResult solution_preservation(std::size_t generated, std::uint32_t seed) {
  using namespace hpsgc;
  CriterionResult res;
  const auto programs = generated_programs(generated, seed);
  if (programs.size() < generated) res.fail("only " + std::to_string(programs.size()) + " programs generated");
  for (std::size_t i = 0; i < programs.size(); ++i) {
    const auto& rp = programs[i];
    const Program after = propagate_program(rp.program, std::nullopt, PropagationStrategy::plain()).first;
    ++res.cases;
    for (const auto& p : rp.preds) {
      const Goal g{p, FeatureStructure::top(rp.program.signature(), p.arity), {}};
      if (multiset(args_of(solve_all(rp.program, g, {}))) != multiset(args_of(solve_all(after, g, {})))) {
        res.fail("generated program " + std::to_string(i) + ": answers of " + p.str() + " changed\n" +
                 print_program(rp.program));
      }
    }
  }

  const Program schema = schema_program();
  const Program schema_opt = propagate_program(schema, std::nullopt, PropagationStrategy::depth_bounded(6)).first;
  for (const auto& s : schema_sentences()) {
    ++res.cases;
    const Goal g = schema_parse_goal(s, schema.signature());
    if (multiset(args_of(solve_all(schema, g, {}))) != multiset(args_of(solve_all(schema_opt, g, {})))) {
      res.fail("schema parses of '" + s + "' changed");
    }
  }

  const Program cov = modals_cov().program;
  const Program opt = propagate_extended_entries(cov).first;
  SolveOptions capped;
  capped.max_rule_applications = 8;
  capped.cutoff = SolveOptions::Cutoff::Fail;
  const Goal lex{kExtendedLexEntry, FeatureStructure::top(cov.signature()), {}};
  ++res.cases;
  if (multiset(args_of(solve_all(cov, lex, capped))) != multiset(args_of(solve_all(opt, lex, capped)))) {
    res.fail("modals extended entries changed");
  }
  if (res.pass) res.detail = std::to_string(programs.size()) + " generated programs, " + std::to_string(res.cases) + " checks";
  return res;
}

// Criterion 4: depth-bounded factors are never more specific than exact ones.
inline CriterionResult depth_bound_safety(std::size_t generated, std::uint32_t seed) {
  using namespace hpsgc;
  CriterionResult res;
  const auto programs = generated_programs(generated, seed);
  for (std::size_t i = 0; i < programs.size(); ++i) {
    const Program& prog = programs[i].program;
    std::vector<Goal> goals;
    for (const auto& p : programs[i].preds) goals.push_back({p, FeatureStructure::top(prog.signature(), p.arity), {}});
    for (const auto& t : all_body_goals(prog)) {
      const Clause& c = prog.clause(t.clause_id);
      goals.push_back({c.body()[t.body_index].pred, c.literal_args(static_cast<int>(t.body_index)), {}});
    }
    for (const auto& g : goals) {
      const auto exact = msg_all(args_of(solve_all(prog, g, {})));
      for (std::size_t cap : {1, 2, 4, 8}) {
        ++res.cases;
        const auto bounded = msg_all(args_of(solve_depth_bounded(prog, g, cap)));
        if (exact && (!bounded || !subsumes(*bounded, *exact))) {
          res.fail("generated program " + std::to_string(i) + ", goal " + print_goal(g.pred, g.args) + ", cap " +
                   std::to_string(cap));
        }
      }
    }
  }
  if (res.pass) res.detail = std::to_string(res.cases) + " goal/cap pairs";
  return res;
}

}  // namespace testing_support
