#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "helpers.hpp"
#include "ieak/cards.hpp"
#include "ieak/duality.hpp"
#include "ieak/semantics.hpp"

using namespace ieak;

namespace {

// Algebraic model over the complex algebra of a relational model, with the
// same valuation.
AlgebraicModel algebraize(const Model& m, ComplexAlgebra& ca) {
  AlgebraicModel am;
  am.alg = ca.algebra;
  for (const auto& [atom, x] : m.val) am.val[atom] = ca.index_of(x);
  return am;
}

}  // namespace

TEST_CASE("algebraic evaluation matches the operator tables") {
  Frame f = th::make_frame(ModelKind::IK, 2, th::rel_of(2, {{0, 1}}), {Rel::identity(2)}, {"a"});
  ComplexAlgebra ca = complex_algebra(f);
  AlgebraicModel m;
  m.alg = ca.algebra;
  m.val["p"] = ca.index_of(mask_bit(0));
  Env env;
  env.agents = {"a"};

  CHECK(eval_algebraic(m, env, f_bot()) == ca.algebra->bot());
  CHECK(eval_algebraic(m, env, f_top()) == ca.algebra->top());
  CHECK(eval_algebraic(m, env, f_atom("p")) == m.val["p"]);
  CHECK(eval_algebraic(m, env, f_atom("missing")) == ca.algebra->bot());
  CHECK(eval_algebraic(m, env, f_neg(f_atom("p"))) == ca.algebra->bot());
  CHECK(eval_algebraic(m, env, f_neg(f_neg(f_atom("p")))) == ca.algebra->top());
  CHECK(eval_algebraic(m, env, f_dia("a", f_atom("p"))) == m.val["p"]);
  CHECK(eval_algebraic(m, env, f_box("a", f_atom("p"))) == m.val["p"]);
}

TEST_CASE("relational and algebraic evaluation agree on fixed instances") {
  Env env;
  env.agents = {"a"};
  env.add_action(th::simple_action("cut", {"k"}, 0, {{"a", Rel::identity(1)}}, {f_atom("p")}));
  env.add_action(th::simple_action("two", {"k", "l"}, 0, {{"a", Rel::full(2)}},
                                   {f_atom("p"), f_neg(f_atom("p"))}));

  std::vector<Model> models;
  {
    Model m = th::classical_model(2, {Rel::full(2)});
    m.val["p"] = mask_bit(0);
    m.val["q"] = mask_bit(1);
    models.push_back(m);
  }
  {
    Model m = th::chain_model(3);
    m.val["p"] = mask_bit(0) | mask_bit(1);
    m.val["q"] = mask_bit(0);
    models.push_back(m);
  }

  std::vector<FormulaPtr> formulas = {
      f_atom("p"),
      f_imp(f_atom("p"), f_atom("q")),
      f_box("a", f_imp(f_atom("p"), f_atom("q"))),
      f_dia("a", f_atom("q")),
      f_dyn_dia({"cut", ""}, f_top()),
      f_dyn_box({"cut", ""}, f_box("a", f_atom("p"))),
      f_dyn_dia({"two", ""}, f_dia("a", f_atom("p"))),
      f_dyn_box({"two", "l"}, f_atom("q")),
      f_dyn_box({"cut", ""}, f_dyn_dia({"two", ""}, f_atom("p"))),
  };

  for (const Model& m : models) {
    Evaluator rel(m, env);
    ComplexAlgebra ca = complex_algebra(m.frame);
    AlgebraicModel am = algebraize(m, ca);
    AlgEvaluator alg(am, env);
    for (const FormulaPtr& f : formulas) {
      CAPTURE(print_formula(f));
      CHECK(ca.downsets[static_cast<size_t>(alg.eval(f))] == rel.eval(f));
    }
  }
}

TEST_CASE("update pipeline exposes product and quotient") {
  Model m = th::classical_model(2, {Rel::full(2)});
  m.val["p"] = mask_bit(0);
  Env env;
  env.agents = {"a"};
  env.add_action(th::simple_action("cut", {"k"}, 0, {{"a", Rel::identity(1)}}, {f_atom("p")}));

  ComplexAlgebra ca = complex_algebra(m.frame);
  AlgebraicModel am = algebraize(m, ca);
  AlgebraicUpdate u = update_algebraic_model(am, env, "cut");

  CHECK(u.induced.state_count() == 1);
  CHECK(u.induced.pre == std::vector<int>{ca.index_of(mask_bit(0))});
  CHECK(u.product->states() == 1);
  CHECK(u.quotient->size() == 2);
  // Updated p is the whole new top (every surviving point satisfied p).
  CHECK(u.updated.valuation("p") == u.quotient->top());

  AlgebraAction ind = induced_action(am, env, env.action("cut"));
  CHECK(ind.pre == u.induced.pre);
  CHECK(ind.rel == u.induced.rel);
}

TEST_CASE("cards scenario agrees across both semantics") {
  CardsScenario s = cards_scenario();
  Evaluator rel(s.model, s.env);
  ComplexAlgebra ca = complex_algebra(s.model.frame);
  AlgebraicModel am = algebraize(s.model, ca);
  AlgEvaluator alg(am, s.env);
  for (const FormulaPtr& f : {s.aut, s.one, s.other_q, s.premise, s.conclusion}) {
    CAPTURE(print_formula(f));
    CHECK(ca.downsets[static_cast<size_t>(alg.eval(f))] == rel.eval(f));
  }
}

TEST_CASE("validity checking sweeps all assignments") {
  Frame f = th::make_frame(ModelKind::IK, 2, th::rel_of(2, {{0, 1}}), {Rel::identity(2)}, {"a"});
  Alg a = complex_algebra(f).algebra;
  Env env;
  env.agents = {"a"};

  FormulaPtr p = f_atom("p"), q = f_atom("q");
  ValidityResult k = check_validity(
      a, env, f_imp(f_box("a", f_imp(p, q)), f_imp(f_box("a", p), f_box("a", q))));
  CHECK(k.valid);
  CHECK(k.checked == 9);

  ValidityResult fs = check_validity(
      a, env, f_imp(f_dia("a", f_imp(p, q)), f_imp(f_box("a", p), f_dia("a", q))));
  CHECK(fs.valid);

  // Excluded middle fails on the chain; the witness must falsify it.
  ValidityResult em = check_validity(a, env, f_or(p, f_neg(p)));
  REQUIRE_FALSE(em.valid);
  AlgebraicModel wit;
  wit.alg = a;
  wit.val = em.witness;
  CHECK(eval_algebraic(wit, env, f_or(p, f_neg(p))) != a->top());

  // Dynamic validity: a diamond over truth is exactly the precondition.
  Env denv;
  denv.agents = {"a"};
  denv.add_action(th::simple_action("cut", {"k"}, 0, {{"a", Rel::identity(1)}}, {p}));
  ValidityResult dyn = check_validity(a, denv, f_iff(f_dyn_dia({"cut", ""}, f_top()), p));
  CHECK(dyn.valid);
  CHECK(dyn.checked == 3);

  CHECK_THROWS_AS(check_validity(a, env, f_and(p, f_and(q, f_and(f_atom("r"), f_atom("s")))), 10),
                  LimitError);
}

TEST_CASE("validity over a classical algebra recovers boolean laws") {
  Frame f = th::make_frame(ModelKind::Classical, 2, Rel::identity(2), {Rel::full(2)}, {"a"});
  Alg a = complex_algebra(f).algebra;
  Env env;
  env.agents = {"a"};
  FormulaPtr p = f_atom("p");
  CHECK(check_validity(a, env, f_or(p, f_neg(p))).valid);
  CHECK(check_validity(a, env, f_imp(f_neg(f_neg(p)), p)).valid);
  CHECK_FALSE(check_validity(a, env, f_imp(p, f_box("a", p))).valid);
}
