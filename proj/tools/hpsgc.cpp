#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>

#include "hpsgc/bench.hpp"
#include "hpsgc/compiled.hpp"
#include "hpsgc/covariation.hpp"
#include "hpsgc/lexicon_index.hpp"
#include "hpsgc/propagation.hpp"

using namespace hpsgc;

namespace {

enum Exit { kOk = 0, kDiagnostics = 1, kUsage = 2, kInternal = 3 };

// Diagnostics already printed with their file name.
struct Reported {};

void report(const std::string& file, const Diagnostics& diags) {
  for (const auto& d : diags) std::cerr << (file.empty() ? "" : file + ": ") << d.str() << "\n";
}

template <class F>
auto in_file(const std::string& file, F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    report(file, e.diagnostics());
    throw Reported{};
  }
}

SignaturePtr signature_file(const std::string& path) {
  return in_file(path, [&] { return load_signature(read_text_file(path)); });
}

Grammar grammar_file(const std::string& path, const SignaturePtr& sig) {
  return in_file(path, [&] { return parse_grammar(read_text_file(path), sig); });
}

// Several grammar files read as one.
Grammar grammar_files(const std::vector<std::string>& paths, const SignaturePtr& sig) {
  Grammar all;
  for (const auto& p : paths) all.append(grammar_file(p, sig));
  return all;
}

bool is_compiled(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  char magic[8] = {};
  f.read(magic, sizeof magic);
  return f && std::string(magic, 8) == "HPSGCBIN";
}

// A compiled file, or grammar text read against --signature.
CompiledFile program_file(const std::string& path, const std::string& signature) {
  if (is_compiled(path)) return in_file(path, [&] { return read_compiled_file(path); });
  if (signature.empty()) throw InputError(path + " is not a compiled program; pass --signature to read it as text");
  const SignaturePtr sig = signature_file(signature);
  return CompiledFile{grammar_file(path, sig).program(sig), std::nullopt};
}

void print_stats(const SolveStats& s) {
  std::cout << "% clause_tries " << s.clause_tries << " unification_attempts " << s.unification_attempts
            << " choice_points " << s.choice_points << " solutions " << s.solutions << " steps " << s.steps << "\n";
}

void print_tries_per_predicate(const Program& program, const SolveStats& s) {
  std::set<PredicateId> preds;
  for (const auto& c : program.clauses()) preds.insert(c.head().pred);
  for (const auto& p : preds) std::cout << "% tries " << p.str() << " " << s.tries_for(program, p) << "\n";
}

std::optional<FeatureStructure> category_avm(const std::string& text, const SignaturePtr& sig) {
  if (text.empty()) return std::nullopt;
  return in_file("--category", [&] { return parse_avm(text, sig); });
}

std::vector<PropagationTarget> target_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<PropagationTarget> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '%') continue;
    std::istringstream ls(line);
    PropagationTarget t;
    if (!(ls >> t.clause_id >> t.body_index)) throw InputError(path + ": expected 'clause body-index'", n, 1);
    out.push_back(t);
  }
  return out;
}

PropagationStrategy interpreter_option(const std::string& text) {
  if (text == "specialized") return PropagationStrategy::specialized();
  if (text == "plain") return PropagationStrategy::plain();
  if (text.rfind("depth:", 0) == 0) {
    try {
      return PropagationStrategy::depth_bounded(std::stoul(text.substr(6)));
    } catch (const std::exception&) {
    }
  }
  throw CLI::ValidationError("--interpreter", "expected specialized, plain or depth:N");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Typed feature structure grammars: checking, lexicon compilation, constraint propagation"};
  app.require_subcommand(1);

  std::string signature, program, out;
  std::vector<std::string> grammars;

  auto* check = app.add_subcommand("check", "Parse a signature and grammar files, report diagnostics");
  check->add_option("--signature", signature, "Type signature")->required();
  check->add_option("grammar", grammars, "Grammar files")->required();

  std::vector<std::string> rules, entries;
  std::string variant = "cov";
  std::optional<std::size_t> bound;
  auto* compile = app.add_subcommand("compile-lexicon", "Compile lexical rules and base entries");
  compile->add_option("--signature", signature)->required();
  compile->add_option("--rules", rules, "Lexical rules and their attachment clauses")->required();
  compile->add_option("--entries", entries, "Base lexical entries")->required();
  compile->add_option("--variant", variant, "cov or exp")->check(CLI::IsMember({"cov", "exp"}));
  compile->add_option("--bound", bound, "Rule applications (exp)");
  compile->add_option("--out", out, "Compiled output")->required();

  std::string targets = "all", interpreter = "specialized";
  bool index = false;
  auto* propagate = app.add_subcommand("propagate", "Constraint propagation over body goals");
  propagate->add_option("program", program, "Compiled program or grammar text")->required();
  propagate->add_option("--signature", signature, "Signature for grammar text");
  propagate->add_option("--targets", targets, "all, entries (extended lexical entries) or a file of 'clause body' lines");
  propagate->add_option("--interpreter", interpreter, "specialized, plain or depth:N");
  propagate->add_flag("--index", index, "Index the result's lexical entries by phonology");
  propagate->add_option("--out", out)->required();

  std::string goal_text;
  std::optional<std::size_t> depth;
  std::optional<std::size_t> max_solutions;
  bool specialized = false;
  auto* solve = app.add_subcommand("solve", "Solve a goal");
  solve->add_option("program", program)->required();
  solve->add_option("--signature", signature);
  solve->add_option("--goal", goal_text, "pred(AVM, ..)")->required();
  solve->add_option("--depth", depth, "Depth bound; cut-off solutions are flagged partial");
  solve->add_option("--max-solutions", max_solutions);
  solve->add_option("--bound", bound, "Rule application cap");
  solve->add_flag("--specialized", specialized, "Specialized interpretation of interaction predicates");

  std::string words, start = "sign", category;
  auto* parse = app.add_subcommand("parse", "Parse a word sequence");
  parse->add_option("program", program)->required();
  parse->add_option("--signature", signature);
  parse->add_option("--words", words)->required();
  parse->add_option("--depth", depth);
  parse->add_option("--bound", bound, "Rule application cap");
  parse->add_option("--start", start, "Start predicate");
  parse->add_option("--category", category, "AVM the parse must satisfy");

  std::string word;
  auto* lookup_cmd = app.add_subcommand("lookup", "Indexed lexical lookup");
  lookup_cmd->add_option("program", program, "Compiled program with an index")->required();
  lookup_cmd->add_option("--word", word)->required();
  lookup_cmd->add_option("--bound", bound, "Rule application cap");

  auto* print = app.add_subcommand("print", "Print a compiled program as text");
  print->add_option("program", program)->required();
  print->add_option("--signature", signature);

  std::string sentences, variants = "exp,cov,opt", format = "tsv";
  std::size_t bench_depth = 64, repeat = 1;
  std::size_t bench_bound = 3;
  auto* bench = app.add_subcommand("bench", "Parse sentences with the EXP, COV and OPT lexica");
  bench->add_option("--signature", signature)->required();
  bench->add_option("--grammar", grammars)->required();
  bench->add_option("--rules", rules)->required();
  bench->add_option("--entries", entries)->required();
  bench->add_option("--sentences", sentences, "One word sequence per line")->required();
  bench->add_option("--variants", variants);
  bench->add_option("--bound", bench_bound, "Rule applications, all variants");
  bench->add_option("--depth", bench_depth, "Depth budget, all variants");
  bench->add_option("--start", start);
  bench->add_option("--category", category);
  bench->add_option("--repeat", repeat, "Report the fastest of N runs")->check(CLI::PositiveNumber);
  bench->add_option("--format", format)->check(CLI::IsMember({"tsv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) {
      const SignaturePtr sig = signature_file(signature);
      std::size_t clauses = 0;
      for (const auto& g : grammars) {
        const Grammar gr = grammar_file(g, sig);
        clauses += gr.clauses.size() + gr.rules.size() + gr.entries.size();
        if (!gr.rules.empty()) {
          Diagnostics warnings;
          for (const auto& r : gr.rules) compute_frame(r, *sig, &warnings);
          report(g, warnings);
        }
      }
      std::cout << "ok: " << sig->dense_count() << " types, " << clauses << " clauses, rules and entries\n";
    } else if (*compile) {
      const SignaturePtr sig = signature_file(signature);
      std::vector<std::string> files = rules;
      files.insert(files.end(), entries.begin(), entries.end());
      const Grammar lexicon = grammar_files(files, sig);
      Diagnostics warnings;
      const Program p = in_file("", [&] {
        return lexicon_program(*parse_variant(variant), lexicon, sig, bound, &warnings);
      });
      report("", warnings);
      write_compiled_file(out, p);
      std::cout << "wrote " << out << ": " << p.size() << " clauses\n";
    } else if (*propagate) {
      CompiledFile in = program_file(program, signature);
      const PropagationStrategy strategy = interpreter_option(interpreter);
      std::optional<std::vector<PropagationTarget>> list;
      if (targets == "entries") {
        list.emplace();
        for (std::size_t id : in.program.clauses_for(kExtendedLexEntry)) {
          if (!in.program.clause(id).is_unit()) list->push_back({id, 0});
        }
      } else if (targets != "all") {
        list = in_file(targets, [&] { return target_file(targets); });
      }
      auto [result, reports] = in_file(program, [&] { return propagate_program(in.program, list, strategy); });
      for (const auto& r : reports) {
        std::cout << "clause " << r.target.clause_id << " goal " << r.target.body_index << " " << r.predicate.str();
        if (r.line) std::cout << " (line " << r.line << ")";
        if (r.clause_deleted) {
          std::cout << ": no solutions, clause deleted\n";
          continue;
        }
        std::cout << ": " << r.factor->solution_count << " solutions" << (r.factor->any_partial ? " (some partial)" : "")
                  << (r.more_specific ? ", more specific" : ", unchanged") << "\n";
      }
      if (index) {
        IndexedLexicon idx = split_entries(result);
        report("", idx.warnings);
        std::cout << "index: " << idx.keys().size() << " keys, " << idx.fallback.size() << " fallback entries\n";
        write_compiled_file(out, idx.program, &idx.fallback);
      } else {
        write_compiled_file(out, result, in.fallback ? &*in.fallback : nullptr);
      }
    } else if (*solve) {
      const CompiledFile in = program_file(program, signature);
      const Goal goal = in_file("--goal", [&] { return parse_goal(goal_text, in.program.signature()); });
      if (!depth && !specialized && !bound && in.program.potentially_nonterminating()) {
        std::cerr << "error: program has recursive interaction predicates; enumeration may not terminate "
                     "(pass --depth, --bound or --specialized)\n";
        return kDiagnostics;
      }
      SolveOptions o;
      o.max_depth = depth;
      o.max_solutions = max_solutions;
      o.max_rule_applications = bound;
      o.specialized = specialized;
      Solver solver(in.program, goal, o);
      while (auto s = solver.next()) {
        std::cout << print_goal(goal.pred, s->args) << (s->partial ? "  % partial" : "") << "\n";
      }
      print_stats(solver.stats());
    } else if (*parse) {
      const CompiledFile in = program_file(program, signature);
      const SignaturePtr& sig = in.program.signature();
      const Goal goal = in_file("", [&] { return sentence_goal(sig, split_words(words), start, category_avm(category, sig)); });
      SolveOptions o;
      o.max_depth = depth;
      o.cutoff = SolveOptions::Cutoff::Fail;
      o.max_rule_applications = bound;
      const ParseResult r = parse_sentence(in.program, goal, o);
      for (const auto& p : r.parses) std::cout << print_avm(p) << "\n";
      std::cout << "% parses " << r.parses.size() << "\n";
      print_stats(r.stats);
      print_tries_per_predicate(in.program, r.stats);
    } else if (*lookup_cmd) {
      const CompiledFile in = program_file(program, "");
      SolveOptions o;
      o.max_rule_applications = bound;
      o.cutoff = SolveOptions::Cutoff::Fail;
      const LookupResult r = in_file(program, [&] { return lookup(in.program, split_words(word), o); });
      for (const auto& e : r.entries) std::cout << print_avm(e) << "\n";
      print_stats(r.stats);
    } else if (*print) {
      const CompiledFile in = program_file(program, signature);
      std::cout << print_program(in.program);
      if (in.fallback) {
        std::cout << "% fallback entries:";
        for (auto id : *in.fallback) std::cout << " " << id;
        std::cout << "\n";
      }
    } else if (*bench) {
      const SignaturePtr sig = signature_file(signature);
      const Grammar g = grammar_files(grammars, sig);
      std::vector<std::string> files = rules;
      files.insert(files.end(), entries.begin(), entries.end());
      const Grammar lexicon = grammar_files(files, sig);
      BenchConfig config;
      config.variants.clear();
      std::istringstream vs(variants);
      for (std::string v; std::getline(vs, v, ',');) {
        auto parsed = parse_variant(v);
        if (!parsed) {
          std::cerr << "error: unknown variant '" << v << "'\n";
          return kUsage;
        }
        config.variants.push_back(*parsed);
      }
      config.bound = bench_bound;
      config.max_depth = bench_depth;
      config.start = start;
      config.category = category_avm(category, sig);
      config.repeat = repeat;
      std::vector<std::string> lines;
      std::istringstream sl(in_file(sentences, [&] { return read_text_file(sentences); }));
      for (std::string l; std::getline(sl, l);) {
        if (!split_words(l).empty()) lines.push_back(l);
      }
      const BenchReport r = in_file("", [&] { return run_bench(g, lexicon, sig, lines, config); });
      report("", r.warnings);
      std::cout << bench_tsv(r);
      if (!r.parses_agree()) {
        std::cerr << "error: variants disagree on parse sets\n";
        return kInternal;
      }
    }
  } catch (const Reported&) {
    return kDiagnostics;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    report("", e.diagnostics());
    return kDiagnostics;
  } catch (const UnsupportedProgram& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiagnostics;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
