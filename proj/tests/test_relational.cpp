#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "helpers.hpp"
#include "ieak/enumerate.hpp"
#include "ieak/model.hpp"

using namespace ieak;

TEST_CASE("mask helpers") {
  Mask m = mask_bit(0) | mask_bit(3);
  CHECK(mask_get(m, 0));
  CHECK_FALSE(mask_get(m, 1));
  CHECK(mask_count(m) == 2);
  CHECK(mask_members(m) == std::vector<int>{0, 3});
  CHECK(mask_universe(3) == 0b111u);
  CHECK(mask_universe(0) == 0u);
}

TEST_CASE("relation operations against definitional loops") {
  Rng rng(11);
  for (int t = 0; t < 120; ++t) {
    int n = 1 + rng.below(6);
    Rel r(n), s(n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (rng.flip() && rng.flip()) r.set(x, y);
        if (rng.flip() && rng.flip()) s.set(x, y);
      }

    Rel comp = r.compose(s);
    Rel conv = r.converse();
    Rel inter = r.intersect(s);
    Rel closed = r.reflexive_transitive_closure();
    Rel oracle = th::closure_oracle(r);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        bool comp_def = false;
        for (int z = 0; z < n; ++z) comp_def = comp_def || (r.at(x, z) && s.at(z, y));
        CHECK(comp.at(x, y) == comp_def);
        CHECK(conv.at(x, y) == r.at(y, x));
        CHECK(inter.at(x, y) == (r.at(x, y) && s.at(x, y)));
        CHECK(closed.at(x, y) == oracle.at(x, y));
      }

    Mask xs = static_cast<Mask>(rng.next()) & mask_universe(n);
    Mask pre = r.preimage(xs);
    for (int x = 0; x < n; ++x) {
      bool def = false;
      for (int y = 0; y < n; ++y) def = def || (r.at(x, y) && mask_get(xs, y));
      CHECK(mask_get(pre, x) == def);
    }

    CHECK(r.subset_of(s) == (inter == r));
  }
}

TEST_CASE("relation properties against definitions") {
  for (int n = 1; n <= 3; ++n) {
    long long total = 1LL << (n * n);
    for (long long bits = 0; bits < total; ++bits) {
      Rel r(n);
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if ((bits >> (x * n + y)) & 1) r.set(x, y);
      bool refl = true, trans = true, anti = true, sym = true;
      for (int x = 0; x < n; ++x) {
        refl = refl && r.at(x, x);
        for (int y = 0; y < n; ++y) {
          if (r.at(x, y) && r.at(y, x) && x != y) anti = false;
          if (r.at(x, y) != r.at(y, x)) sym = false;
          for (int z = 0; z < n; ++z)
            if (r.at(x, y) && r.at(y, z) && !r.at(x, z)) trans = false;
        }
      }
      CHECK(r.reflexive() == refl);
      CHECK(r.transitive() == trans);
      CHECK(r.antisymmetric() == anti);
      CHECK(r.is_partial_order() == (refl && trans && anti));
      CHECK(r.is_equivalence() == (refl && trans && sym));
    }
  }
}

TEST_CASE("up-closure and downsets") {
  // Chain w0 <= w1 <= w2; geq is the converse order.
  Model m = th::chain_model(3);
  Rel geq = m.frame.order.converse();
  CHECK(up_closure(mask_bit(0), geq) == mask_universe(3));
  CHECK(up_closure(mask_bit(2), geq) == mask_bit(2));
  CHECK(up_closure(0, geq) == 0u);
  CHECK(is_downset(mask_bit(0), geq));
  CHECK(is_downset(mask_bit(0) | mask_bit(1), geq));
  CHECK_FALSE(is_downset(mask_bit(1), geq));
  CHECK(is_downset(0, geq));
  CHECK(is_downset(mask_universe(3), geq));
}

TEST_CASE("poset and downset enumeration counts") {
  CHECK(all_posets(1).size() == 1);
  CHECK(all_posets(2).size() == 3);
  CHECK(all_posets(3).size() == 19);
  CHECK(all_posets(4).size() == 219);
  for (const Rel& p : all_posets(3)) CHECK(p.is_partial_order());

  CHECK(all_downsets(th::chain_model(3).frame.order).size() == 4);
  CHECK(all_downsets(Rel::identity(3)).size() == 8);
  // V shape: w0 below w1 and w2.
  Rel v = th::rel_of(3, {{0, 1}, {0, 2}});
  CHECK(all_downsets(v).size() == 5);
  for (Mask d : all_downsets(v)) CHECK(is_downset(d, v.converse()));
}

TEST_CASE("frame conditions against definitional loops") {
  for (int n = 1; n <= 3; ++n) {
    for (const Rel& ord : all_posets(n)) {
      Rel geq = ord.converse();
      long long total = 1LL << (n * n);
      for (long long bits = 0; bits < total; ++bits) {
        Rel r(n);
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y)
            if ((bits >> (x * n + y)) & 1) r.set(x, y);
        // back-step commutation, forward confluence, and the pinning of R
        // by its order closures
        Rel c1l = r.compose(geq), c1r = geq.compose(r);
        Rel c2l = ord.compose(r), c2r = r.compose(ord);
        bool c1 = c1l.subset_of(c1r);
        bool c2 = c2l.subset_of(c2r);
        bool c3 = r == c1r.intersect(c2r);
        CHECK(ik_conditions_hold(ord, r) == (c1 && c2 && c3));
      }
    }
  }
  for (const Rel& ord : all_posets(3)) {
    for (const Rel& r : ik_relations(ord, false)) CHECK(ik_conditions_hold(ord, r));
    for (const Rel& r : ik_relations(ord, true)) {
      CHECK(r.is_equivalence());
      CHECK(ik_conditions_hold(ord, r));
    }
  }
}

TEST_CASE("frame checks accept the lawful and flag the lawless") {
  Frame good = th::make_frame(ModelKind::IK, 2, th::rel_of(2, {{0, 1}}),
                              {Rel::identity(2)}, {"a"});
  CHECK(check_frame(good).ok());

  Frame bad = good;
  bad.rel = {th::rel_of(2, {{1, 0}}, false)};
  CHECK_FALSE(check_frame(bad).ok());

  Frame classical = good;
  classical.kind = ModelKind::Classical;
  CHECK_FALSE(check_frame(classical).ok());

  Frame mipc = good;
  mipc.kind = ModelKind::MIPC;
  mipc.order = Rel::identity(2);
  mipc.rel = {th::rel_of(2, {{0, 1}})};
  CHECK_FALSE(check_frame(mipc).ok());
  mipc.rel = {Rel::full(2)};
  CHECK(check_frame(mipc).ok());

  Model m;
  m.frame = good;
  m.val["p"] = mask_bit(1);
  CHECK_FALSE(check_model(m).ok());
  m.val["p"] = mask_bit(0);
  CHECK(check_model(m).ok());
}

TEST_CASE("evaluation on a two-world chain") {
  Model m = th::chain_model(2);
  m.val["p"] = mask_bit(0);
  m.val["q"] = 0;
  Env env;
  env.agents = {"a"};
  Evaluator ev(m, env);

  CHECK(ev.eval(f_atom("p")) == mask_bit(0));
  CHECK(ev.eval(f_bot()) == 0u);
  CHECK(ev.eval(f_top()) == mask_universe(2));
  // p -> q holds where no smaller world has p without q.
  CHECK(ev.eval(f_imp(f_atom("p"), f_atom("q"))) == 0u);
  CHECK(ev.eval(f_imp(f_atom("q"), f_atom("p"))) == mask_universe(2));
  CHECK(ev.eval(f_neg(f_atom("p"))) == 0u);
  CHECK(ev.eval(f_neg(f_neg(f_atom("p")))) == mask_universe(2));
  // Identity relation: dia is truth at the world itself, box closes upward.
  CHECK(ev.eval(f_dia("a", f_atom("p"))) == mask_bit(0));
  CHECK(ev.eval(f_box("a", f_atom("p"))) == mask_bit(0));
}

TEST_CASE("evaluation on a classical pair with full relation") {
  Model m = th::classical_model(2, {Rel::full(2)});
  m.val["p"] = mask_bit(0);
  Env env;
  env.agents = {"a"};
  Evaluator ev(m, env);
  CHECK(ev.eval(f_dia("a", f_atom("p"))) == mask_universe(2));
  CHECK(ev.eval(f_box("a", f_atom("p"))) == 0u);
  CHECK(ev.eval(f_neg(f_atom("p"))) == mask_bit(1));
  CHECK(ev.eval(f_everyone({"a"}, f_top())) == mask_universe(2));
}

TEST_CASE("box looks along the order before the relation") {
  // w0 <= w1, relation only loops: box at w0 quantifies over the relation
  // successors of every larger world.
  Model m = th::chain_model(2);
  m.frame.rel = {th::rel_of(2, {})};
  m.val["p"] = mask_bit(0);
  Env env;
  env.agents = {"a"};
  Evaluator ev(m, env);
  CHECK(ev.eval(f_box("a", f_atom("p"))) == mask_bit(0));
  Mask down = ev.eval(f_box("a", f_atom("p")));
  CHECK(is_downset(down, m.frame.order.converse()));
}

TEST_CASE("coproduct and update on a hand-built instance") {
  Model m = th::classical_model(2, {Rel::full(2)});
  m.val["p"] = mask_bit(0);
  Env env;
  env.agents = {"a"};
  ActionStructure trivial = th::simple_action("t", {"k"}, 0, {{"a", Rel::identity(1)}}, {f_top()});
  env.add_action(trivial);

  Evaluator ev(m, env);
  const UpdateResult& u = ev.update("t");
  CHECK(u.intermediate.frame.n() == 2);
  CHECK(u.updated.frame.n() == 2);
  CHECK(u.updated.frame.rel[0] == Rel::full(2));
  CHECK(u.updated.val.at("p") == mask_bit(0));
  CHECK(&ev.update("t") == &u);

  Env env2;
  env2.agents = {"a"};
  env2.add_action(th::simple_action("only_p", {"k"}, 0, {{"a", Rel::identity(1)}}, {f_atom("p")}));
  Evaluator ev2(m, env2);
  const UpdateResult& u2 = ev2.update("only_p");
  CHECK(u2.updated.frame.n() == 1);
  CHECK(u2.updated.val.at("p") == mask_bit(0));
  CHECK(u2.updated.frame.worlds[0] == "(w0,k)");

  // Two states with full action relation over a one-world model: the
  // coproduct doubles the world, preconditions then cut it back.
  Env env3;
  env3.agents = {"a"};
  env3.add_action(th::simple_action("two", {"k", "l"}, 0, {{"a", Rel::full(2)}},
                                    {f_atom("p"), f_neg(f_atom("p"))}));
  Model one = th::classical_model(1, {Rel::identity(1)});
  one.val["p"] = mask_bit(0);
  Evaluator ev3(one, env3);
  const UpdateResult& u3 = ev3.update("two");
  CHECK(u3.intermediate.frame.n() == 2);
  CHECK(u3.intermediate.frame.worlds == std::vector<std::string>{"(w0,k)", "(w0,l)"});
  CHECK(u3.updated.frame.n() == 1);
  CHECK(u3.K == 2);
}

TEST_CASE("update evaluates dynamic modalities") {
  Model m = th::classical_model(2, {Rel::full(2)});
  m.val["p"] = mask_bit(0);
  Env env;
  env.agents = {"a"};
  env.add_action(th::simple_action("cut", {"k"}, 0, {{"a", Rel::identity(1)}}, {f_atom("p")}));
  Evaluator ev(m, env);
  // <cut>true holds where the precondition does; [cut]false where it fails.
  CHECK(ev.eval(f_dyn_dia({"cut", ""}, f_top())) == mask_bit(0));
  CHECK(ev.eval(f_dyn_box({"cut", ""}, f_bot())) == mask_bit(1));
  // After cutting to p-worlds, box a p holds everywhere that survives.
  CHECK(ev.eval(f_dyn_box({"cut", ""}, f_box("a", f_atom("p")))) == mask_universe(2));
  CHECK(ev.eval(f_dyn_dia({"cut", ""}, f_box("a", f_atom("p")))) == mask_bit(0));
}

TEST_CASE("strided index sampling") {
  std::set<long long> seen;
  strided_indices(10, 100, [&](long long i) { seen.insert(i); });
  CHECK(seen.size() == 10);

  seen.clear();
  strided_indices(1000, 10, [&](long long i) {
    CHECK(i >= 0);
    CHECK(i < 1000);
    seen.insert(i);
  });
  CHECK(seen.size() == 10);

  std::vector<long long> a, b;
  strided_indices(777, 33, [&](long long i) { a.push_back(i); });
  strided_indices(777, 33, [&](long long i) { b.push_back(i); });
  CHECK(a == b);

  seen.clear();
  strided_indices(0, 5, [&](long long i) { seen.insert(i); });
  CHECK(seen.empty());
}

TEST_CASE("model banks stay within their class") {
  for (ModelKind kind : {ModelKind::Classical, ModelKind::IK, ModelKind::MIPC}) {
    BankSpec spec;
    spec.kind = kind;
    spec.worlds = 2;
    spec.agents = {"a"};
    spec.atoms = {"p"};
    spec.cap = 50;
    long long count = 0;
    BankStats st = for_each_model(spec, [&](const Model& m) {
      ++count;
      REQUIRE(check_model(m).ok());
    });
    CHECK(count == st.visited);
    CHECK(st.visited <= st.total);
    CHECK(st.visited > 0);
  }

  ActionBankSpec as;
  as.kind = ModelKind::MIPC;
  as.states = 2;
  as.agents = {"a"};
  as.pre_atoms = {"p"};
  as.cap = 100;
  for_each_action(as, [&](const ActionStructure& a) {
    for (const auto& [ag, r] : a.rel) {
      (void)ag;
      CHECK(r.is_equivalence());
    }
    CHECK(a.pre.size() == 2);
  });
}

TEST_CASE("random generators respect their contracts") {
  Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    int n = 1 + rng.below(4);
    Rel ord = random_poset(rng, n);
    CHECK(ord.is_partial_order());
    Rel r = random_ik_relation(rng, ord);
    CHECK(ik_conditions_hold(ord, r));
    Rel e = random_equivalence(rng, n);
    CHECK(e.is_equivalence());
    Mask d = random_downset(rng, ord);
    CHECK(is_downset(d, ord.converse()));
  }
  for (ModelKind kind : {ModelKind::Classical, ModelKind::IK, ModelKind::MIPC}) {
    for (int t = 0; t < 30; ++t) {
      Model m = random_model(rng, kind, 1 + rng.below(4), {"a", "b"}, {"p", "q"});
      REQUIRE(check_model(m).ok());
    }
  }

  Rng r1(99), r2(99);
  for (int t = 0; t < 50; ++t) CHECK(r1.next() == r2.next());
}
