// Command line front end: load models, actions and algebras from json,
// evaluate and normalize formulas, run the checkers and the verification
// suites. Exit codes: 0 on success, 1 when a check or property fails,
// 2 on malformed input or usage.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ieak/cards.hpp"
#include "ieak/duality.hpp"
#include "ieak/io.hpp"
#include "ieak/model.hpp"
#include "ieak/rewrite.hpp"
#include "ieak/semantics.hpp"
#include "ieak/verify.hpp"

using namespace ieak;

namespace {

struct Inputs {
  std::vector<std::string> actions;
  std::vector<std::string> agents;
};

Env make_env(const Inputs& in, const Model* m) {
  Env env;
  if (m != nullptr) env.agents = m->frame.agents;
  for (const auto& ag : in.agents)
    if (std::find(env.agents.begin(), env.agents.end(), ag) == env.agents.end())
      env.agents.push_back(ag);
  for (const auto& path : in.actions) env.add_action(action_from_json(read_json_file(path), env));
  env.validate_acyclic();
  return env;
}

std::string mask_to_text(Mask x, const std::vector<std::string>& names) {
  std::string out = "{";
  bool first = true;
  for (int w : mask_members(x)) {
    if (!first) out += ", ";
    out += names.at(static_cast<size_t>(w));
    first = false;
  }
  return out + "}";
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

bool report_lawful(const Model& m) {
  CheckReport rep = check_model(m);
  if (rep.ok()) return true;
  std::cerr << "model violates its frame conditions:\n";
  for (const auto& v : rep.violations) std::cerr << "  " << v << "\n";
  return false;
}

AlgebraicModel algebraize(const Model& m, const ComplexAlgebra& ca) {
  AlgebraicModel am;
  am.alg = ca.algebra;
  for (const auto& [atom, x] : m.val) am.val[atom] = ca.index_of(x);
  return am;
}

int world_index(const Model& m, const std::string& name) {
  for (int w = 0; w < m.frame.n(); ++w)
    if (m.frame.worlds[static_cast<size_t>(w)] == name) return w;
  throw InputError("model has no world '" + name + "'");
}

int run_parse(const std::string& text, const Inputs& in) {
  Env env = make_env(in, nullptr);
  FormulaPtr f = parse_formula(text, env);
  std::cout << print_formula(f) << "\n";
  std::cout << "static: " << (is_static(f) ? "yes" : "no") << ", size " << formula_size(f)
            << ", depth " << formula_depth(f) << "\n";
  std::set<Atom> atoms;
  std::set<Agent> agents;
  std::set<std::string> actions;
  collect_atoms(f, atoms);
  collect_agents(f, agents);
  collect_action_names(f, actions);
  auto list = [](const std::set<std::string>& s) {
    std::string out;
    for (const auto& e : s) out += (out.empty() ? "" : ", ") + e;
    return out.empty() ? "none" : out;
  };
  std::cout << "atoms: " << list(atoms) << "\n";
  std::cout << "agents: " << list(agents) << "\n";
  std::cout << "actions: " << list(actions) << "\n";
  return 0;
}

int run_eval(const std::string& text, const std::string& model_path, const Inputs& in,
             const std::string& world_name) {
  Model m = model_from_json(read_json_file(model_path));
  Env env = make_env(in, &m);
  if (!report_lawful(m)) return 1;
  Mask x = evaluate(m, env, parse_formula(text, env));
  std::cout << "truth set: " << mask_to_text(x, m.frame.worlds) << "\n";
  std::cout << "holds everywhere: " << (x == mask_universe(m.frame.n()) ? "yes" : "no") << "\n";
  if (!world_name.empty())
    std::cout << "at " << world_name << ": "
              << (mask_get(x, world_index(m, world_name)) ? "true" : "false") << "\n";
  return 0;
}

int run_eval_alg(const std::string& text, const std::string& model_path, const Inputs& in) {
  Model m = model_from_json(read_json_file(model_path));
  Env env = make_env(in, &m);
  if (!report_lawful(m)) return 1;
  ComplexAlgebra ca = complex_algebra(m.frame);
  AlgebraicModel am = algebraize(m, ca);
  FormulaPtr f = parse_formula(text, env);
  int el = eval_algebraic(am, env, f);
  Mask rel = evaluate(m, env, f);
  std::cout << "element: " << ca.algebra->element_name(el) << "\n";
  std::cout << "downset: " << mask_to_text(ca.downsets[static_cast<size_t>(el)], m.frame.worlds)
            << "\n";
  bool agree = ca.downsets[static_cast<size_t>(el)] == rel;
  std::cout << "agrees with the relational value: " << (agree ? "yes" : "no") << "\n";
  return agree ? 0 : 1;
}

int run_update(const std::string& name, const std::string& model_path, const Inputs& in,
               const std::string& out_path, const std::string& dot_path) {
  Model m = model_from_json(read_json_file(model_path));
  Env env = make_env(in, &m);
  if (!report_lawful(m)) return 1;
  if (!env.has_action(name)) throw InputError("no action named '" + name + "' was loaded");
  UpdateResult u = update_model(m, env, ActionRef{name, ""});
  std::cout << "intermediate model: " << u.intermediate.frame.n() << " worlds\n";
  std::cout << "updated model: " << u.updated.frame.n() << " worlds";
  if (u.updated.frame.n() > 0) {
    std::cout << " ";
    Mask all = mask_universe(u.updated.frame.n());
    std::cout << mask_to_text(all, u.updated.frame.worlds);
  }
  std::cout << "\n";
  if (!report_lawful(u.updated)) return 1;
  if (!out_path.empty()) write_text_file(out_path, model_to_json(u.updated).dump(2) + "\n");
  if (!dot_path.empty()) write_text_file(dot_path, model_to_dot(u.updated));
  return 0;
}

int run_normalize(const std::string& text, const Inputs& in, bool trace, bool check, int max_steps) {
  Env env = make_env(in, nullptr);
  FormulaPtr f = parse_formula(text, env);
  NormalizeResult r = normalize(f, env, max_steps, trace);
  if (trace) {
    for (size_t i = 0; i < r.steps.size(); ++i)
      std::cout << "step " << (i + 1) << " [" << r.steps[i].rule
                << "]: " << print_formula(r.steps[i].before) << "  =>  "
                << print_formula(r.steps[i].after) << "\n";
    std::cout << r.steps.size() << " steps\n";
  }
  std::cout << print_formula(r.formula) << "\n";
  if (check) {
    EquivResult eq = equivalence_check(f, r.formula, env, EquivBounds{});
    std::cout << "equivalence checked on " << eq.models_checked << " models: "
              << (eq.equivalent ? "ok" : "FAILED") << "\n";
    if (!eq.equivalent) {
      std::cout << eq.countermodel << "\n";
      return 1;
    }
  }
  return 0;
}

int run_check_frame(const std::string& model_path) {
  Model m = model_from_json(read_json_file(model_path));
  CheckReport rep = check_model(m);
  if (rep.ok()) {
    std::cout << "ok: " << to_string(m.frame.kind) << " model on " << m.frame.n() << " worlds\n";
    return 0;
  }
  for (const auto& v : rep.violations) std::cout << v << "\n";
  return 1;
}

int run_check_algebra(const std::string& algebra_path, bool mha) {
  auto alg = algebra_from_json(read_json_file(algebra_path));
  CheckReport rep = check_fsa(*alg, mha);
  if (rep.ok()) {
    std::cout << "ok: " << alg->isize() << " elements, " << alg->agents().size() << " agents\n";
    return 0;
  }
  for (const auto& v : rep.violations) std::cout << v << "\n";
  return 1;
}

int run_dualize(const std::string& model_path, const std::string& algebra_path,
                const std::string& out_path) {
  if (model_path.empty() == algebra_path.empty())
    throw InputError("dualize needs exactly one of --model and --algebra");
  if (!model_path.empty()) {
    Model m = model_from_json(read_json_file(model_path));
    if (!report_lawful(m)) return 1;
    ComplexAlgebra ca = complex_algebra(m.frame);
    auto ta = tense_adjoints(*ca.algebra);
    Frame back = prime_structure(*ta, m.frame.kind);
    bool round = isomorphic(frame_structure(m.frame), frame_structure(back));
    std::cout << "downset algebra: " << ca.algebra->isize() << " elements\n";
    std::cout << "prime structure: " << back.n() << " points, round trip "
              << (round ? "isomorphic" : "NOT isomorphic") << "\n";
    emit(algebra_to_json(*ca.algebra).dump(2) + "\n", out_path);
    return round ? 0 : 1;
  }
  auto alg = algebra_from_json(read_json_file(algebra_path));
  auto ta = tense_adjoints(*alg);
  Frame primes = prime_structure(*ta);
  std::cout << "prime structure: " << primes.n() << " points\n";
  Model dual;
  dual.frame = primes;
  CheckReport rep = check_frame(dual.frame);
  std::cout << "frame conditions: " << (rep.ok() ? "ok" : "violated") << "\n";
  for (const auto& v : rep.violations) std::cout << "  " << v << "\n";
  emit(model_to_json(dual).dump(2) + "\n", out_path);
  return rep.ok() ? 0 : 1;
}

int run_export_dot(const std::string& model_path, const std::string& algebra_path,
                   const std::string& out_path) {
  if (model_path.empty() == algebra_path.empty())
    throw InputError("export-dot needs exactly one of --model and --algebra");
  if (!model_path.empty()) {
    emit(model_to_dot(model_from_json(read_json_file(model_path))), out_path);
  } else {
    auto alg = algebra_from_json(read_json_file(algebra_path));
    emit(algebra_to_dot(*alg), out_path);
  }
  return 0;
}

int run_scenario(const std::string& name) {
  if (name != "cards") throw InputError("unknown scenario '" + name + "' (try: cards)");
  CardsScenario sc = cards_scenario();
  CheckReport rep = cards_example_regression();
  std::cout << "worked example: " << (rep.ok() ? "reproduced" : "BROKEN") << "\n";
  for (const auto& v : rep.violations) std::cout << "  " << v << "\n";
  Mask premise = evaluate(sc.model, sc.env, sc.premise);
  Mask conclusion = evaluate(sc.model, sc.env, sc.conclusion);
  std::cout << "premise holds at: " << mask_to_text(premise, sc.model.frame.worlds) << "\n";
  std::cout << "conclusion holds at: " << mask_to_text(conclusion, sc.model.frame.worlds) << "\n";
  bool entailed = (premise & ~conclusion) == 0;
  std::cout << "premise entails conclusion here: " << (entailed ? "yes" : "no") << "\n";
  return rep.ok() && entailed ? 0 : 1;
}

int run_verify(std::vector<std::string> suites, bool full, std::uint64_t seed) {
  if (suites.empty()) suites = suite_names();
  SuiteConfig cfg;
  cfg.full = full;
  cfg.seed = seed;
  bool all_ok = true;
  for (const auto& name : suites) {
    SuiteResult r = run_suite(name, cfg);
    std::cout << r.to_string() << "\n";
    all_ok = all_ok && r.passed;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite epistemic models, updates and their algebras"};
  app.require_subcommand(1);

  Inputs in;
  std::string model_path, algebra_path, out_path, dot_path;
  std::string formula_text, world_name, apply_name, scenario_name;
  bool trace = false, do_check = false, full = false, mha = false;
  int max_steps = 10000;
  std::uint64_t seed = 20260821ULL;
  std::vector<std::string> suites;

  auto add_actions = [&](CLI::App* cmd) {
    cmd->add_option("--action", in.actions, "action json file (repeatable, order matters)");
  };
  auto add_agents = [&](CLI::App* cmd) {
    cmd->add_option("--agents", in.agents, "extra agent names, comma separated")->delimiter(',');
  };

  CLI::App* cmd_parse = app.add_subcommand("parse", "parse a formula and print its canonical form");
  cmd_parse->add_option("formula", formula_text, "formula text")->required();
  add_actions(cmd_parse);
  add_agents(cmd_parse);

  CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate a formula on a model");
  cmd_eval->add_option("formula", formula_text, "formula text")->required();
  cmd_eval->add_option("--model", model_path, "model json file")->required();
  cmd_eval->add_option("--world", world_name, "also report the value at this world");
  add_actions(cmd_eval);

  CLI::App* cmd_eval_alg =
      app.add_subcommand("eval-alg", "evaluate a formula in the downset algebra of a model");
  cmd_eval_alg->add_option("formula", formula_text, "formula text")->required();
  cmd_eval_alg->add_option("--model", model_path, "model json file")->required();
  add_actions(cmd_eval_alg);

  CLI::App* cmd_update = app.add_subcommand("update", "apply an action to a model");
  cmd_update->add_option("name", apply_name, "name of a loaded action")->required();
  cmd_update->add_option("--model", model_path, "model json file")->required();
  cmd_update->add_option("-o,--out", out_path, "write the updated model as json");
  cmd_update->add_option("--dot", dot_path, "write the updated model as graphviz");
  add_actions(cmd_update);

  CLI::App* cmd_norm =
      app.add_subcommand("normalize", "rewrite a dynamic formula into a static one");
  cmd_norm->add_option("formula", formula_text, "formula text")->required();
  cmd_norm->add_flag("--trace", trace, "print every rewrite step");
  cmd_norm->add_flag("--check", do_check, "model-check the result against the input");
  cmd_norm->add_option("--max-steps", max_steps, "rewrite step budget");
  add_actions(cmd_norm);
  add_agents(cmd_norm);

  CLI::App* cmd_cf = app.add_subcommand("check-frame", "check frame conditions and valuation");
  cmd_cf->add_option("--model", model_path, "model json file")->required();

  CLI::App* cmd_ca = app.add_subcommand("check-algebra", "check the modal algebra laws");
  cmd_ca->add_option("--algebra", algebra_path, "algebra json file")->required();
  cmd_ca->add_flag("--mha", mha, "also require the monadic laws");

  CLI::App* cmd_dual = app.add_subcommand(
      "dualize", "downset algebra of a model, or prime structure of an algebra");
  cmd_dual->add_option("--model", model_path, "model json file");
  cmd_dual->add_option("--algebra", algebra_path, "algebra json file");
  cmd_dual->add_option("-o,--out", out_path, "write the dual as json");

  CLI::App* cmd_dot = app.add_subcommand("export-dot", "render a model or algebra as graphviz");
  cmd_dot->add_option("--model", model_path, "model json file");
  cmd_dot->add_option("--algebra", algebra_path, "algebra json file");
  cmd_dot->add_option("-o,--out", out_path, "output file, default stdout");

  CLI::App* cmd_scen = app.add_subcommand("scenario", "run a bundled scenario");
  cmd_scen->add_option("name", scenario_name, "scenario name (cards)")->required();

  CLI::App* cmd_verify = app.add_subcommand("verify", "run verification suites");
  cmd_verify->add_option("suites", suites, "suite names, default all");
  cmd_verify->add_flag("--full", full, "acceptance depth instead of the quick pass");
  cmd_verify->add_option("--seed", seed, "seed for the randomized suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(cmd_parse)) return run_parse(formula_text, in);
    if (app.got_subcommand(cmd_eval)) return run_eval(formula_text, model_path, in, world_name);
    if (app.got_subcommand(cmd_eval_alg)) return run_eval_alg(formula_text, model_path, in);
    if (app.got_subcommand(cmd_update))
      return run_update(apply_name, model_path, in, out_path, dot_path);
    if (app.got_subcommand(cmd_norm))
      return run_normalize(formula_text, in, trace, do_check, max_steps);
    if (app.got_subcommand(cmd_cf)) return run_check_frame(model_path);
    if (app.got_subcommand(cmd_ca)) return run_check_algebra(algebra_path, mha);
    if (app.got_subcommand(cmd_dual)) return run_dualize(model_path, algebra_path, out_path);
    if (app.got_subcommand(cmd_dot)) return run_export_dot(model_path, algebra_path, out_path);
    if (app.got_subcommand(cmd_scen)) return run_scenario(scenario_name);
    if (app.got_subcommand(cmd_verify)) return run_verify(suites, full, seed);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const LimitError& e) {
    std::cerr << "limit exceeded: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
