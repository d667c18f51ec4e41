#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <vector>

#include "helpers.hpp"
#include "ieak/duality.hpp"
#include "ieak/model.hpp"

using namespace ieak;

TEST_CASE("isomorphism finder on relabeled copies") {
  Structure x;
  x.n = 4;
  x.labels = numbered_names("x", 4);
  x.rels = {{"order", th::rel_of(4, {{0, 1}, {1, 2}, {0, 2}, {3, 1}, {3, 2}})}};

  // Same shape under the permutation 0->2, 1->0, 2->3, 3->1.
  std::vector<int> perm = {2, 0, 3, 1};
  Structure y;
  y.n = 4;
  y.labels = numbered_names("y", 4);
  Rel r(4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (x.rels[0].second.at(a, b)) r.set(perm[static_cast<size_t>(a)], perm[static_cast<size_t>(b)]);
  y.rels = {{"order", r}};

  auto iso = find_isomorphism(x, y);
  REQUIRE(iso.has_value());
  CHECK(verify_isomorphism(x, y, *iso));
  CHECK(isomorphic(x, y));
  CHECK(isomorphic(y, x));

  Structure z = x;
  z.rels[0].second = Rel::identity(4);
  CHECK_FALSE(isomorphic(x, z));

  Structure w = x;
  w.labels = {"other"};
  w.rels[0].first = "other";
  CHECK_FALSE(isomorphic(x, w));

  Structure small;
  small.n = 3;
  small.labels = numbered_names("s", 3);
  small.rels = {{"order", Rel::identity(3)}};
  CHECK_FALSE(isomorphic(x, small));
}

TEST_CASE("isomorphism finder needs backtracking on regular graphs") {
  // One six-cycle against two three-cycles: every node looks alike locally,
  // so color refinement alone cannot separate them.
  Structure c6, c33;
  c6.n = c33.n = 6;
  c6.labels = c33.labels = numbered_names("v", 6);
  Rel a(6), b(6);
  for (int i = 0; i < 6; ++i) a.set(i, (i + 1) % 6);
  b.set(0, 1), b.set(1, 2), b.set(2, 0);
  b.set(3, 4), b.set(4, 5), b.set(5, 3);
  c6.rels = {{"e", a}};
  c33.rels = {{"e", b}};
  CHECK_FALSE(isomorphic(c6, c33));
  CHECK(isomorphic(c33, c33));

  Structure c33b = c33;
  Rel b2(6);
  b2.set(1, 3), b2.set(3, 5), b2.set(5, 1);
  b2.set(0, 2), b2.set(2, 4), b2.set(4, 0);
  c33b.rels = {{"e", b2}};
  CHECK(isomorphic(c33, c33b));

  std::vector<int> wrong = {0, 1, 2, 3, 4, 5};
  CHECK_FALSE(verify_isomorphism(c6, c33, wrong));
}

TEST_CASE("frames embed as structures") {
  Frame f = th::make_frame(ModelKind::IK, 2, th::rel_of(2, {{0, 1}}), {Rel::identity(2)}, {"a"});
  Structure s = frame_structure(f);
  CHECK(s.n == 2);
  REQUIRE(s.rels.size() == 2);
  CHECK(s.rels[0].first == "order");
  CHECK(s.rels[1].first == "rel:a");

  Frame g = f;
  g.rel[0] = th::rel_of(2, {{0, 1}});
  CHECK_FALSE(isomorphic(frame_structure(f), frame_structure(g)));
}

TEST_CASE("prime structure inverts the complex algebra") {
  for (int n = 1; n <= 3; ++n) {
    for (const Rel& ord : all_posets(n)) {
      std::vector<Rel> rels = ik_relations(ord, false);
      for (size_t ri = 0; ri < rels.size(); ri += (rels.size() > 6 ? 3 : 1)) {
        Frame f = th::make_frame(ModelKind::IK, n, ord, {rels[ri]}, {"a"});
        auto a = tense_adjoints(*complex_algebra(f).algebra);
        Frame back = prime_structure(*a, f.kind);
        CHECK(back.n() == n);
        CAPTURE(n, ri);
        CHECK(isomorphic(frame_structure(f), frame_structure(back)));
        ComplexAlgebra ca2 = complex_algebra(back);
        CHECK(isomorphic(algebra_structure(*a), algebra_structure(*ca2.algebra)));
      }
    }
  }
}

TEST_CASE("primes of a product match the coproduct of primes") {
  Frame f = th::make_frame(ModelKind::IK, 2, th::rel_of(2, {{0, 1}}), {Rel::identity(2)}, {"a"});
  auto a = tense_adjoints(*complex_algebra(f).algebra);

  AlgebraAction act;
  act.name = "act";
  act.states = {"s0", "s1"};
  act.designated = 0;
  act.rel["a"] = Rel::full(2);
  act.pre = {a->top(), a->top()};
  auto prod = product_algebra(a, act);

  ActionStructure shadow = th::simple_action("act", {"s0", "s1"}, 0, {{"a", Rel::full(2)}},
                                             {f_top(), f_top()});
  Model primes;
  primes.frame = prime_structure(*a, ModelKind::IK);
  Model co = coproduct_model(primes, shadow);
  CHECK(co.frame.n() == 4);
  CHECK(isomorphic(frame_structure(prime_structure(*prod, ModelKind::IK)),
                   frame_structure(co.frame)));
}

TEST_CASE("primes of a quotient match the updated primes") {
  Frame f = th::make_frame(ModelKind::IK, 2, th::rel_of(2, {{0, 1}}), {Rel::identity(2)}, {"a"});
  auto a = tense_adjoints(*complex_algebra(f).algebra);

  AlgebraAction act;
  act.name = "act";
  act.states = {"s0", "s1"};
  act.designated = 0;
  act.rel["a"] = Rel::identity(2);
  act.pre = {1, a->top()};
  auto quot = quotient_algebra(product_algebra(a, act));

  ActionStructure shadow = th::simple_action("act", {"s0", "s1"}, 0, {{"a", Rel::identity(2)}},
                                             {f_top(), f_top()});
  Model primes;
  primes.frame = prime_structure(*a, ModelKind::IK);
  std::vector<int> js = join_primes(*a);
  std::vector<Mask> pre_sets(2, 0);
  for (size_t x = 0; x < js.size(); ++x) {
    if (a->leq(js[x], 1)) pre_sets[0] |= mask_bit(static_cast<int>(x));
    pre_sets[1] |= mask_bit(static_cast<int>(x));
  }
  UpdateResult ur = product_update(primes, shadow, pre_sets);
  CHECK(isomorphic(frame_structure(prime_structure(*quot, ModelKind::IK)),
                   frame_structure(ur.updated.frame)));
  CHECK(check_frame(ur.updated.frame).ok());
}

TEST_CASE("structure encodings of algebras separate distinct operators") {
  Frame f = th::make_frame(ModelKind::IK, 2, Rel::identity(2), {Rel::identity(2)}, {"a"});
  Frame g = th::make_frame(ModelKind::IK, 2, Rel::identity(2), {Rel::full(2)}, {"a"});
  auto fa = complex_algebra(f).algebra;
  auto ga = complex_algebra(g).algebra;
  CHECK(isomorphic(algebra_structure(*fa), algebra_structure(*fa)));
  CHECK_FALSE(isomorphic(algebra_structure(*fa), algebra_structure(*ga)));
}
