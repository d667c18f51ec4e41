#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "helpers.hpp"
#include "ieak/algebra.hpp"
#include "ieak/duality.hpp"

using namespace ieak;

namespace {

// Three-element chain 0 < m < 1 with identity operators.
std::shared_ptr<TableAlgebra> three_chain() {
  std::vector<char> leq = {1, 1, 1, 0, 1, 1, 0, 0, 1};
  std::vector<int> id = {0, 1, 2};
  return algebra_from_order({"0", "m", "1"}, leq, {"a"}, {id}, {id});
}

// Four-element boolean algebra 0 < a,b < 1 with identity operators.
std::shared_ptr<TableAlgebra> four_boolean() {
  std::vector<std::string> names = {"0", "a", "b", "1"};
  std::vector<char> leq(16, 0);
  auto le = [&](int x, int y) { leq[static_cast<size_t>(x) * 4 + y] = 1; };
  for (int x = 0; x < 4; ++x) le(x, x);
  le(0, 1), le(0, 2), le(0, 3), le(1, 3), le(2, 3);
  std::vector<int> id = {0, 1, 2, 3};
  return algebra_from_order(names, leq, {"a"}, {id}, {id});
}

}  // namespace

TEST_CASE("order analysis derives the lattice and rejects non-lattices") {
  auto a = three_chain();
  CHECK(a->isize() == 3);
  CHECK(a->bot() == 0);
  CHECK(a->top() == 2);
  // Residuated implication on a chain: 1 when x <= y, else y.
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) CHECK(a->imp(x, y) == (a->leq(x, y) ? 2 : y));
  CHECK(th::residuation_holds(*a));
  CHECK(a->neg(0) == 2);
  CHECK(a->neg(1) == 0);
  CHECK(a->neg(2) == 0);

  auto b = four_boolean();
  CHECK(th::residuation_holds(*b));
  CHECK(b->meet(1, 2) == 0);
  CHECK(b->join(1, 2) == 3);
  CHECK(b->imp(1, 0) == 2);
  CHECK(b->imp(3, 1) == 1);

  // Two maximal elements: no top, no join.
  std::vector<char> vee = {1, 1, 1, 0, 1, 0, 0, 0, 1};
  CHECK_FALSE(analyze_order({"0", "x", "y"}, vee, {}, {}, {}).report.ok());
  CHECK(analyze_order({"0", "x", "y"}, vee, {}, {}, {}).algebra == nullptr);

  // Diamond with three atoms: a lattice but not residuated.
  std::vector<std::string> m3 = {"0", "x", "y", "z", "1"};
  std::vector<char> leq(25, 0);
  auto le = [&](int x, int y) { leq[static_cast<size_t>(x) * 5 + y] = 1; };
  for (int i = 0; i < 5; ++i) le(i, i);
  for (int i = 1; i <= 3; ++i) le(0, i), le(i, 4);
  le(0, 4);
  CHECK_FALSE(analyze_order(m3, leq, {}, {}, {}).report.ok());

  // Cyclic "order".
  CHECK_FALSE(analyze_order({"x", "y"}, {1, 1, 1, 1}, {}, {}, {}).report.ok());

  // Modal table out of range.
  std::vector<char> two = {1, 1, 0, 1};
  CHECK_FALSE(analyze_order({"0", "1"}, two, {"a"}, {{0, 7}}, {{0, 1}}).report.ok());
  CHECK(analyze_order({"0", "1"}, two, {"a"}, {{0, 1}}, {{0, 1}}).report.ok());
}

TEST_CASE("heyting implication helper agrees with residuation") {
  auto a = three_chain();
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) CHECK(heyting_imp(*a, x, y) == a->imp(x, y));
}

TEST_CASE("interaction law checker flags broken operators") {
  std::vector<char> two = {1, 1, 0, 1};
  // dia of bottom is top: breaks normality.
  auto bad = analyze_order({"0", "1"}, two, {"a"}, {{1, 1}}, {{0, 1}}).algebra;
  REQUIRE(bad != nullptr);
  CHECK_FALSE(check_fsa(*bad).ok());

  // Identity operators on a boolean algebra satisfy everything, including
  // the monadic laws.
  auto good = four_boolean();
  CHECK(check_fsa(*good, true).ok());
}

TEST_CASE("complex algebras are residuated and match downset structure") {
  for (int n = 1; n <= 3; ++n) {
    for (const Rel& ord : all_posets(n)) {
      Frame f = th::make_frame(ModelKind::IK, n, ord, {ik_relations(ord, false).front()}, {"a"});
      ComplexAlgebra ca = complex_algebra(f);
      CHECK(static_cast<size_t>(ca.algebra->isize()) == ca.downsets.size());
      CHECK(static_cast<size_t>(ca.algebra->isize()) == all_downsets(ord).size());
      CHECK(th::residuation_holds(*ca.algebra));
      Rel geq = ord.converse();
      for (size_t i = 0; i < ca.downsets.size(); ++i) {
        CHECK(is_downset(ca.downsets[i], geq));
        CHECK(ca.index_of(ca.downsets[i]) == static_cast<int>(i));
      }
      // The order is inclusion of truth sets.
      for (size_t i = 0; i < ca.downsets.size(); ++i)
        for (size_t j = 0; j < ca.downsets.size(); ++j)
          CHECK(ca.algebra->leq(static_cast<int>(i), static_cast<int>(j)) ==
                ((ca.downsets[i] & ~ca.downsets[j]) == 0));
    }
  }
}

TEST_CASE("complex algebra of a two-world chain is the three-chain") {
  Frame f = th::make_frame(ModelKind::IK, 2, th::rel_of(2, {{0, 1}}), {Rel::identity(2)}, {"a"});
  ComplexAlgebra ca = complex_algebra(f);
  REQUIRE(ca.algebra->isize() == 3);
  auto chain = three_chain();
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      CHECK(ca.algebra->leq(x, y) == chain->leq(x, y));
      CHECK(ca.algebra->imp(x, y) == chain->imp(x, y));
    }
  // Identity relation: dia is the identity on downsets, box closes up-down.
  CHECK(ca.algebra->dia(0, 1) == 1);
  CHECK(ca.algebra->box(0, 1) == 1);
}

TEST_CASE("join and meet primes against the definitional oracle") {
  for (int n = 1; n <= 3; ++n) {
    for (const Rel& ord : all_posets(n)) {
      Frame f = th::make_frame(ModelKind::IK, n, ord, {Rel::identity(n)}, {"a"});
      ComplexAlgebra ca = complex_algebra(f);
      const AlgebraBase& a = *ca.algebra;
      std::vector<int> js = join_primes(a);
      std::vector<int> ms = meet_primes(a);
      for (int x = 0; x < a.isize(); ++x) {
        bool in_js = std::find(js.begin(), js.end(), x) != js.end();
        CHECK(in_js == th::join_prime_oracle(a, x));
        bool mp = x != a.top();
        for (int u = 0; u < a.isize() && mp; ++u)
          for (int v = 0; v < a.isize() && mp; ++v)
            if (a.leq(a.meet(u, v), x) && !a.leq(u, x) && !a.leq(v, x)) mp = false;
        bool in_ms = std::find(ms.begin(), ms.end(), x) != ms.end();
        CHECK(in_ms == mp);
      }
      // In a distributive lattice of downsets the join primes are the
      // principal downsets, one per world.
      CHECK(js.size() == static_cast<size_t>(n));
    }
  }
}

TEST_CASE("kappa picks the largest element missing a prime") {
  Frame f = th::make_frame(ModelKind::IK, 3, th::rel_of(3, {{0, 1}, {0, 2}}), {Rel::identity(3)}, {"a"});
  ComplexAlgebra ca = complex_algebra(f);
  const AlgebraBase& a = *ca.algebra;
  for (int x : join_primes(a)) {
    int k = kappa(a, x);
    CHECK_FALSE(a.leq(x, k));
    for (int u = 0; u < a.isize(); ++u)
      if (!a.leq(x, u)) CHECK(a.leq(u, k));
  }
  CHECK(a.leq(a.bot(), kappa(a, a.bot())));
}

TEST_CASE("tense adjoints satisfy both adjunction laws") {
  for (int n = 1; n <= 3; ++n) {
    for (const Rel& ord : all_posets(n)) {
      for (const Rel& r : {ik_relations(ord, false).front(), ik_relations(ord, false).back()}) {
        Frame f = th::make_frame(ModelKind::IK, n, ord, {r}, {"a"});
        ComplexAlgebra ca = complex_algebra(f);
        auto a = tense_adjoints(*ca.algebra);
        REQUIRE(a->has_tense());
        for (int x = 0; x < a->isize(); ++x)
          for (int y = 0; y < a->isize(); ++y) {
            CHECK(a->leq(a->dia(0, x), y) == a->leq(x, a->black_box(0, y)));
            CHECK(a->leq(a->black_dia(0, x), y) == a->leq(x, a->box(0, y)));
          }
        CHECK(check_adjunctions(*a).ok());
      }
    }
  }

  // A non-monotone diamond has no adjoint.
  std::vector<char> two = {1, 1, 0, 1};
  auto bad = analyze_order({"0", "1"}, two, {"a"}, {{1, 0}}, {{0, 1}}).algebra;
  REQUIRE(bad != nullptr);
  CHECK_THROWS_AS(tense_adjoints(*bad), Error);

  // Black operators are refused without tense tables.
  auto plain = three_chain();
  CHECK_FALSE(plain->has_tense());
  CHECK_THROWS_AS(plain->black_dia(0, 1), InputError);
  CHECK_FALSE(check_adjunctions(*plain).ok());
}

TEST_CASE("product algebra is pointwise with relation-driven modalities") {
  Frame f = th::make_frame(ModelKind::IK, 2, th::rel_of(2, {{0, 1}}), {Rel::identity(2)}, {"a"});
  auto base = tense_adjoints(*complex_algebra(f).algebra);
  int n = base->isize();

  AlgebraAction act;
  act.name = "act";
  act.states = {"s0", "s1"};
  act.designated = 0;
  act.rel["a"] = Rel::full(2);
  act.pre = {base->top(), base->top()};

  auto prod = product_algebra(base, act);
  CHECK(prod->size() == static_cast<long long>(n) * n);
  for (long long x = 0; x < prod->size(); ++x) {
    int c[2];
    prod->decode(x, c);
    CHECK(prod->encode(c) == x);
    CHECK(prod->coordinate(x, 0) == c[0]);
    CHECK(prod->coordinate(x, 1) == c[1]);
  }
  for (long long x = 0; x < prod->size(); ++x)
    for (long long y = 0; y < prod->size(); ++y) {
      int cx[2], cy[2];
      prod->decode(x, cx);
      prod->decode(y, cy);
      long long m = prod->meet(x, y), j = prod->join(x, y), i = prod->imp(x, y);
      for (int s = 0; s < 2; ++s) {
        CHECK(prod->coordinate(m, s) == base->meet(cx[s], cy[s]));
        CHECK(prod->coordinate(j, s) == base->join(cx[s], cy[s]));
        CHECK(prod->coordinate(i, s) == base->imp(cx[s], cy[s]));
      }
      CHECK(prod->leq(x, y) == (base->leq(cx[0], cy[0]) && base->leq(cx[1], cy[1])));
    }
  // Full action relation: each slot joins the dias (meets the boxes) of both
  // coordinates.
  for (long long x = 0; x < prod->size(); ++x) {
    int c[2];
    prod->decode(x, c);
    long long d = prod->dia(0, x), b = prod->box(0, x);
    int dboth = base->join(base->dia(0, c[0]), base->dia(0, c[1]));
    int bboth = base->meet(base->box(0, c[0]), base->box(0, c[1]));
    CHECK(prod->coordinate(d, 0) == dboth);
    CHECK(prod->coordinate(d, 1) == dboth);
    CHECK(prod->coordinate(b, 0) == bboth);
    CHECK(prod->coordinate(b, 1) == bboth);
  }

  // Empty action relation: dia collapses to bottom, box to top.
  AlgebraAction lone = act;
  lone.rel["a"] = Rel(2);
  auto prod2 = product_algebra(base, lone);
  for (long long x = 0; x < prod2->size(); ++x) {
    CHECK(prod2->dia(0, x) == prod2->bot());
    CHECK(prod2->box(0, x) == prod2->top());
  }
}

TEST_CASE("quotient algebra relativizes to the precondition") {
  Frame f = th::make_frame(ModelKind::IK, 2, th::rel_of(2, {{0, 1}}), {Rel::identity(2)}, {"a"});
  auto base = tense_adjoints(*complex_algebra(f).algebra);
  // Preconditions (m, 1) on the three-chain coordinates.
  AlgebraAction act;
  act.name = "act";
  act.states = {"s0", "s1"};
  act.designated = 0;
  act.rel["a"] = Rel::identity(2);
  act.pre = {1, 2};

  auto prod = product_algebra(base, act);
  auto quot = quotient_algebra(prod);
  CHECK(quot->size() == 2 * 3);
  CHECK(th::residuation_holds(*quot));
  int c[2];
  quot->decode_base(quot->top(), c);
  CHECK(c[0] == 1);
  CHECK(c[1] == 2);
  for (int b = 0; b < quot->isize(); ++b) {
    long long ib = quot->include(b);
    CHECK(quot->project(ib) == b);
    CHECK(prod->coordinate(ib, 0) <= 1);
    quot->decode_base(b, c);
    CHECK(base->leq(c[0], 1));
  }
  // Projection then inclusion meets with the precondition tuple.
  for (long long x = 0; x < prod->size(); ++x) {
    long long back = quot->include(quot->project(x));
    prod->decode(x, c);
    int d[2];
    prod->decode(back, d);
    CHECK(d[0] == base->meet(c[0], 1));
    CHECK(d[1] == base->meet(c[1], 2));
  }
  CHECK(check_fsa(*quot).ok());
  CHECK(check_adjunctions(*quot).ok());
}

TEST_CASE("algebra size guards") {
  AlgebraAction act;
  act.name = "big";
  act.states.assign(17, "");
  for (int i = 0; i < 17; ++i) act.states[static_cast<size_t>(i)] = "s" + std::to_string(i);
  act.rel["a"] = Rel::identity(17);
  act.pre.assign(17, 0);
  auto base = three_chain();
  CHECK_THROWS_AS(product_algebra(base, act), LimitError);
  CHECK_THROWS_AS(act.relation("b"), InputError);
}
