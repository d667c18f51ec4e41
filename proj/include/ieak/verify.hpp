#pragma once

#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ieak/algebra.hpp"
#include "ieak/cards.hpp"
#include "ieak/core.hpp"
#include "ieak/duality.hpp"
#include "ieak/enumerate.hpp"
#include "ieak/model.hpp"
#include "ieak/rewrite.hpp"
#include "ieak/semantics.hpp"
#include "ieak/syntax.hpp"

namespace ieak {

// Verification suites over deterministic instance families. `full` selects
// the documented bounds; the quick bounds keep unit runs short. Banks larger
// than their budget are sampled by a fixed stride and each suite reports the
// visited/total counts, so coverage is never silently overstated.
struct SuiteConfig {
  uint64_t seed = 20260821;
  bool full = false;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  long long checked = 0;
  long long failure_count = 0;
  double seconds = 0.0;
  std::vector<std::string> notes;
  std::vector<std::string> failures;  // first few, for reporting

  void fail(const std::string& what) {
    passed = false;
    ++failure_count;
    if (failures.size() < 8) failures.push_back(what);
  }

  void absorb(const CheckReport& rep, const std::string& context) {
    for (const auto& v : rep.violations) fail(context + ": " + v);
  }

  void note(const std::string& s) { notes.push_back(s); }

  std::string to_string() const {
    std::ostringstream os;
    os << name << ": " << (passed ? "PASS" : "FAIL") << " (" << checked << " checks";
    if (failure_count) os << ", " << failure_count << " failures";
    os << ", " << std::fixed << std::setprecision(2) << seconds << "s)";
    for (const auto& n : notes) os << "\n  " << n;
    for (const auto& f : failures) os << "\n  FAIL " << f;
    if (failure_count > static_cast<long long>(failures.size()))
      os << "\n  ... " << (failure_count - static_cast<long long>(failures.size())) << " more failures";
    return os.str();
  }
};

namespace detail {

inline std::string frame_label(const Frame& f) {
  Model m;
  m.frame = f;
  return describe_model(m);
}

// Every poset on up to max_worlds points, each with a strided choice of
// relation assignments for two agents. Posets up to landmark_worlds also get
// the all-identity and all-full assignments (both equivalences, so the family
// always contains instances suitable for the equivalence-relation checks).
// The 4-point stratum keeps every keep_nth_4 poset.
inline std::vector<Frame> frame_family(int max_worlds, int landmark_worlds, long long cap_per_poset,
                                       int keep_nth_4 = 1) {
  std::vector<Agent> agents = {"a", "b"};
  std::vector<Frame> out;
  for (int n = 1; n <= max_worlds; ++n) {
    std::vector<Rel> posets = all_posets(n);
    for (size_t pi = 0; pi < posets.size(); ++pi) {
      if (n == 4 && keep_nth_4 > 1 && pi % static_cast<size_t>(keep_nth_4) != 0) continue;
      const Rel& ord = posets[pi];
      std::vector<Rel> rels = ik_relations(ord, false);
      long long nr = static_cast<long long>(rels.size());
      std::set<long long> pick;
      strided_indices(nr * nr, cap_per_poset, [&](long long i) { pick.insert(i); });
      if (n <= landmark_worlds) {
        long long id_pos = -1, full_pos = -1;
        for (size_t i = 0; i < rels.size(); ++i) {
          if (rels[i] == Rel::identity(n)) id_pos = static_cast<long long>(i);
          if (rels[i] == Rel::full(n)) full_pos = static_cast<long long>(i);
        }
        if (id_pos >= 0) pick.insert(id_pos * nr + id_pos);
        if (full_pos >= 0) pick.insert(full_pos * nr + full_pos);
      }
      for (long long idx : pick) {
        Frame f;
        f.kind = ModelKind::IK;
        f.worlds = numbered_names("w", n);
        f.agents = agents;
        f.order = ord;
        f.rel = {rels[static_cast<size_t>(idx % nr)], rels[static_cast<size_t>(idx / nr)]};
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

inline bool frame_equivalences(const Frame& f) {
  for (const Rel& r : f.rel)
    if (!r.is_equivalence()) return false;
  return true;
}

inline bool action_equivalences(const AlgebraAction& act) {
  for (const auto& [ag, r] : act.rel) {
    (void)ag;
    if (!r.is_equivalence()) return false;
  }
  return true;
}

// Deterministic actions over an algebra: a strided sample of the whole
// (relations x preconditions) space per state count, optionally with the
// all-identity and all-full landmark assignments (both equivalences).
inline std::vector<AlgebraAction> algebra_action_family(const AlgebraBase& a, int max_states,
                                                        long long cap_per_k, uint64_t salt,
                                                        bool landmarks) {
  std::vector<AlgebraAction> out;
  long long n = a.size();
  const std::vector<Agent>& ags = a.agents();
  for (int K = 1; K <= max_states; ++K) {
    std::vector<Rel> rels = all_relations(K);
    long long nr = static_cast<long long>(rels.size());
    long long total = 1;
    for (size_t i = 0; i < ags.size(); ++i) total *= nr;
    for (int j = 0; j < K; ++j) total *= n;
    long long offset = static_cast<long long>(salt % static_cast<uint64_t>(total));
    strided_indices(total, cap_per_k, [&](long long i) {
      long long v = (i + offset) % total;
      AlgebraAction act;
      act.name = "act";
      act.states = numbered_names("s", K);
      act.designated = 0;
      for (const Agent& ag : ags) {
        act.rel[ag] = rels[static_cast<size_t>(v % nr)];
        v /= nr;
      }
      act.pre.resize(static_cast<size_t>(K));
      for (int j = 0; j < K; ++j) {
        act.pre[static_cast<size_t>(j)] = static_cast<int>(v % n);
        v /= n;
      }
      out.push_back(std::move(act));
    });
    if (landmarks) {
      AlgebraAction id;
      id.name = "act";
      id.states = numbered_names("s", K);
      id.designated = 0;
      for (const Agent& ag : ags) id.rel[ag] = Rel::identity(K);
      id.pre.assign(static_cast<size_t>(K), a.top());
      AlgebraAction fu = id;
      for (const Agent& ag : ags) fu.rel[ag] = Rel::full(K);
      for (int j = 0; j < K; ++j)
        fu.pre[static_cast<size_t>(j)] = static_cast<int>((static_cast<long long>(j + 1) * (n - 1)) / K);
      out.push_back(std::move(id));
      out.push_back(std::move(fu));
    }
  }
  return out;
}

// Verdicts of the three lax interaction forms, each quantified over all
// element pairs and agents:
//   (1) dia(x -> y) <= box x -> dia y
//   (2) box x & dia y <= dia(x & y)
//   (3) box(x -> y) <= dia x -> dia y
inline std::array<bool, 3> fs_verdicts(const AlgebraBase& a) {
  std::array<bool, 3> v{true, true, true};
  int n = a.isize();
  int na = static_cast<int>(a.agents().size());
  for (int ag = 0; ag < na; ++ag)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        int ixy = a.imp(x, y);
        if (!a.leq(a.dia(ag, ixy), a.imp(a.box(ag, x), a.dia(ag, y)))) v[0] = false;
        if (!a.leq(a.meet(a.box(ag, x), a.dia(ag, y)), a.dia(ag, a.meet(x, y)))) v[1] = false;
        if (!a.leq(a.box(ag, ixy), a.imp(a.dia(ag, x), a.dia(ag, y)))) v[2] = false;
      }
  return v;
}

// Random normal operators over the lattice of `src`: a diamond is fixed by
// arbitrary values on the completely join-prime elements, a box dually on the
// meet-primes. Join/meet preservation then holds by construction, while the
// interaction laws usually fail.
inline std::shared_ptr<TableAlgebra> random_normal_algebra(const AlgebraBase& src, Rng& rng) {
  int n = src.isize();
  std::vector<std::string> names;
  names.reserve(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) names.push_back(src.element_name(x));
  std::vector<char> leq(static_cast<size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) leq[static_cast<size_t>(x) * n + y] = src.leq(x, y) ? 1 : 0;
  std::vector<int> js = join_primes(src), ms = meet_primes(src);
  std::vector<int> dseed(js.size()), bseed(ms.size());
  for (auto& d : dseed) d = rng.below(n);
  for (auto& b : bseed) b = rng.below(n);
  std::vector<int> dia(static_cast<size_t>(n)), box(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) {
    int acc = src.bot();
    for (size_t i = 0; i < js.size(); ++i)
      if (src.leq(js[i], x)) acc = src.join(acc, dseed[i]);
    dia[static_cast<size_t>(x)] = acc;
    acc = src.top();
    for (size_t i = 0; i < ms.size(); ++i)
      if (src.leq(x, ms[i])) acc = src.meet(acc, bseed[i]);
    box[static_cast<size_t>(x)] = acc;
  }
  return algebra_from_order(names, std::move(leq), {"a"}, {std::move(dia)}, {std::move(box)});
}

inline Rel rel_from_bits(int n, long long bits) {
  Rel r(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if ((bits >> (x * n + y)) & 1) r.set(x, y);
  return r;
}

}  // namespace detail

// Frame and model checkers: the deterministic family passes, handcrafted
// violations are flagged, and coproducts and updates stay inside each model
// class.
inline SuiteResult suite_frames(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "frames";
  auto family = detail::frame_family(cfg.full ? 4 : 3, 3, cfg.full ? 2 : 1);
  for (const Frame& f : family) {
    res.absorb(check_frame(f), "family frame");
    ++res.checked;
  }
  res.note("frame family: " + std::to_string(family.size()) + " frames");

  {
    Frame bad;  // down-step relation on a chain breaks <= o R <= R o <=
    bad.kind = ModelKind::IK;
    bad.worlds = numbered_names("w", 2);
    bad.agents = {"a"};
    bad.order = Rel::identity(2);
    bad.order.set(0, 1);
    Rel r(2);
    r.set(1, 0);
    bad.rel = {r};
    ++res.checked;
    if (check_frame(bad).ok()) res.fail("down-step relation on a chain passed the frame check");
  }
  {
    Frame bad;  // classical frames must carry the discrete order
    bad.kind = ModelKind::Classical;
    bad.worlds = numbered_names("w", 2);
    bad.agents = {"a"};
    bad.order = Rel::identity(2);
    bad.order.set(0, 1);
    bad.rel = {Rel::identity(2)};
    ++res.checked;
    if (check_frame(bad).ok()) res.fail("classical frame with a nontrivial order passed the check");
  }
  {
    Frame bad;  // mipc needs equivalences
    bad.kind = ModelKind::MIPC;
    bad.worlds = numbered_names("w", 2);
    bad.agents = {"a"};
    bad.order = Rel::identity(2);
    Rel r = Rel::identity(2);
    r.set(0, 1);
    bad.rel = {r};
    ++res.checked;
    if (check_frame(bad).ok()) res.fail("non-symmetric relation passed the mipc frame check");
  }
  {
    Model bad;  // valuations must be downsets
    bad.frame.kind = ModelKind::IK;
    bad.frame.worlds = numbered_names("w", 2);
    bad.frame.agents = {"a"};
    bad.frame.order = Rel::identity(2);
    bad.frame.order.set(0, 1);
    bad.frame.rel = {Rel::identity(2)};
    bad.val["p"] = mask_bit(1);
    ++res.checked;
    if (check_model(bad).ok()) res.fail("non-downset valuation passed the model check");
  }

  for (ModelKind kind : {ModelKind::Classical, ModelKind::IK, ModelKind::MIPC}) {
    std::vector<ActionStructure> acts;
    ActionBankSpec as;
    as.kind = kind;
    as.states = 2;
    as.agents = {"a", "b"};
    as.pre_atoms = {"p"};
    as.cap = cfg.full ? 6 : 3;
    BankStats astats = for_each_action(as, [&](const ActionStructure& a) { acts.push_back(a); });
    long long mvisited = 0, mtotal = 0;
    for (int n = 1; n <= 3; ++n) {
      BankSpec ms;
      ms.kind = kind;
      ms.worlds = n;
      ms.agents = {"a", "b"};
      ms.atoms = {"p"};
      ms.cap = cfg.full ? 80 : 25;
      BankStats st = for_each_model(ms, [&](const Model& m) {
        res.absorb(check_model(m), "bank model (" + to_string(kind) + ")");
        ++res.checked;
        for (const ActionStructure& a : acts) {
          Env env;
          env.agents = m.frame.agents;
          env.add_action(a);
          Evaluator ev(m, env);
          const UpdateResult& u = ev.update("act");
          res.absorb(check_model(u.intermediate), "coproduct (" + to_string(kind) + ")");
          res.absorb(check_model(u.updated), "updated model (" + to_string(kind) + ")");
          res.checked += 2;
        }
      });
      mvisited += st.visited;
      mtotal += st.total;
    }
    res.note(to_string(kind) + ": " + std::to_string(mvisited) + "/" + std::to_string(mtotal) +
             " models x " + std::to_string(astats.visited) + "/" + std::to_string(astats.total) + " actions");
  }
  return res;
}

// Every rule of the reduction table, the boolean reduction axioms, and the
// point-shifted variants hold as semantic equivalences on exhaustive
// (stride-sampled) banks of models and actions.
inline SuiteResult suite_reduction(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "reduction";
  std::vector<Agent> agents = {"a", "b"};
  std::vector<Atom> atoms = {"p", "q"};
  FormulaPtr p = f_atom("p"), q = f_atom("q");

  // Argument shapes covering every outermost connective the table matches.
  std::vector<FormulaPtr> shapes = {
      f_bot(),
      f_top(),
      p,
      q,
      f_and(p, q),
      f_or(p, q),
      f_imp(p, q),
      f_imp(q, p),
      f_dia("a", p),
      f_dia("b", f_and(p, q)),
      f_box("a", p),
      f_box("b", f_or(p, q)),
  };

  for (ModelKind kind : {ModelKind::Classical, ModelKind::IK}) {
    std::vector<Model> models;
    long long mvisited = 0, mtotal = 0;
    for (int n = 1; n <= 3; ++n) {
      BankSpec ms;
      ms.kind = kind;
      ms.worlds = n;
      ms.agents = agents;
      ms.atoms = atoms;
      ms.cap = cfg.full ? (n == 1 ? 100 : 1200) : 120;
      BankStats st = for_each_model(ms, [&](const Model& m) { models.push_back(m); });
      mvisited += st.visited;
      mtotal += st.total;
    }
    long long avisited = 0, atotal = 0;
    for (int K = 1; K <= 2; ++K) {
      ActionBankSpec as;
      as.kind = kind;
      as.states = K;
      as.agents = agents;
      as.pre_atoms = atoms;
      as.cap = cfg.full ? 12 : 4;
      BankStats ast = for_each_action(as, [&](const ActionStructure& act) {
        Env env;
        env.agents = agents;
        env.add_action(act);
        std::vector<std::pair<FormulaPtr, FormulaPtr>> pairs;
        auto add_reduct = [&](FormulaPtr lhs) {
          auto st = reduce_step(lhs, env);
          if (!st) {
            res.fail("no reduction applies to " + print_formula(lhs));
            return;
          }
          pairs.emplace_back(std::move(lhs), st->first);
        };
        for (const FormulaPtr& sh : shapes) {
          add_reduct(f_dyn_dia({"act", ""}, sh));
          add_reduct(f_dyn_box({"act", ""}, sh));
        }
        if (K == 2) {
          add_reduct(f_dyn_dia({"act", "s1"}, p));
          add_reduct(f_dyn_box({"act", "s1"}, f_imp(p, q)));
        }
        if (kind == ModelKind::Classical) {
          const FormulaPtr& pre = act.pre[static_cast<size_t>(act.designated)];
          // atoms: <act>p <-> Pre & p
          pairs.emplace_back(f_dyn_dia({"act", ""}, p), f_and(pre, p));
          // negation: <act>~phi <-> Pre & ~<act>phi
          for (const FormulaPtr& phi : {p, f_and(p, q), f_dia("a", p)})
            pairs.emplace_back(f_dyn_dia({"act", ""}, f_neg(phi)),
                               f_and(pre, f_neg(f_dyn_dia({"act", ""}, phi))));
          // disjunction: <act>(phi | psi) <-> <act>phi | <act>psi
          pairs.emplace_back(f_dyn_dia({"act", ""}, f_or(p, q)),
                             f_or(f_dyn_dia({"act", ""}, p), f_dyn_dia({"act", ""}, q)));
          // diamond: <act>dia phi <-> Pre & Join of dia <act@i> phi over successors
          FormulaPtr big = f_bot();
          bool first = true;
          Mask succ = act.relation("a").row(act.designated);
          while (succ) {
            int i = std::countr_zero(succ);
            succ &= succ - 1;
            FormulaPtr piece = f_dia("a", f_dyn_dia({"act", act.states[static_cast<size_t>(i)]}, p));
            big = first ? piece : f_or(big, piece);
            first = false;
          }
          pairs.emplace_back(f_dyn_dia({"act", ""}, f_dia("a", p)), f_and(pre, big));
        }
        for (const Model& m : models) {
          Evaluator ev(m, env);
          for (const auto& [l, r] : pairs) {
            ++res.checked;
            if (ev.eval(l) != ev.eval(r))
              res.fail(print_formula(l) + " differs from " + print_formula(r) + " on " +
                       detail::describe_model(m));
          }
        }
      });
      avisited += ast.visited;
      atotal += ast.total;
    }
    res.note(to_string(kind) + ": " + std::to_string(mvisited) + "/" + std::to_string(mtotal) +
             " models x " + std::to_string(avisited) + "/" + std::to_string(atotal) + " actions");
  }
  return res;
}

// Complex algebras pass the interaction laws, their products and
// pseudo-quotients pass them again, tense adjunctions hold on all pairs, and
// the equivalence-relation instances additionally satisfy the monadic laws.
inline SuiteResult suite_closure(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "closure";
  auto family = detail::frame_family(cfg.full ? 4 : 3, 3, 1, cfg.full ? 6 : 1);
  long long mha_instances = 0;
  uint64_t counter = 0;
  for (const Frame& f : family) {
    ComplexAlgebra ca = complex_algebra(f);
    std::shared_ptr<TableAlgebra> a;
    try {
      a = tense_adjoints(*ca.algebra);
    } catch (const Error& e) {
      res.fail(std::string(e.what()) + " for " + detail::frame_label(f));
      continue;
    }
    bool frame_eq = detail::frame_equivalences(f);
    res.absorb(check_fsa(*a, frame_eq), "complex algebra of " + detail::frame_label(f));
    res.absorb(check_adjunctions(*a), "complex algebra of " + detail::frame_label(f));
    res.checked += 2;
    if (frame_eq) ++mha_instances;

    auto actions = detail::algebra_action_family(*a, 2, 1, counter++, frame_eq);
    for (const AlgebraAction& act : actions) {
      bool mha = frame_eq && detail::action_equivalences(act);
      long long fsa_cap = a->size() > 16 ? 16384 : (1LL << 22);
      auto prod = product_algebra(a, act);
      std::string where = " for a " + std::to_string(act.state_count()) + "-state action over " +
                          detail::frame_label(f);
      res.absorb(check_fsa(*prod, mha, fsa_cap), "product" + where);
      res.absorb(check_adjunctions(*prod), "product" + where);
      auto quot = quotient_algebra(prod);
      res.absorb(check_fsa(*quot, mha, fsa_cap), "quotient" + where);
      res.absorb(check_adjunctions(*quot), "quotient" + where);
      res.checked += 4;
      if (mha) ++mha_instances;
    }
  }
  res.note("frames: " + std::to_string(family.size()) +
           ", monadic instances: " + std::to_string(mha_instances));
  if (mha_instances == 0) res.fail("the family contains no equivalence-relation instances");
  return res;
}

// Discrete duality: frames are isomorphic to the prime structures of their
// complex algebras, complex algebras to the double duals, and the prime
// structure functor exchanges products with coproducts and pseudo-quotients
// with updates.
inline SuiteResult suite_duality(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "duality";
  auto family = detail::frame_family(cfg.full ? 4 : 3, 3, 1, cfg.full ? 3 : 1);
  uint64_t counter = 0;
  for (const Frame& f : family) {
    ComplexAlgebra ca = complex_algebra(f);
    std::shared_ptr<TableAlgebra> a;
    try {
      a = tense_adjoints(*ca.algebra);
    } catch (const Error& e) {
      res.fail(std::string(e.what()) + " for " + detail::frame_label(f));
      continue;
    }
    Frame back = prime_structure(*a, f.kind);
    ++res.checked;
    if (!isomorphic(frame_structure(f), frame_structure(back)))
      res.fail("frame differs from the primes of its complex algebra: " + detail::frame_label(f));
    ComplexAlgebra ca2 = complex_algebra(back);
    ++res.checked;
    if (!isomorphic(algebra_structure(*ca.algebra), algebra_structure(*ca2.algebra)))
      res.fail("complex algebra differs from its double dual: " + detail::frame_label(f));

    Model primes;
    primes.frame = back;
    std::vector<int> js = join_primes(*a);
    auto actions = detail::algebra_action_family(*a, 2, 1, counter++, false);
    for (const AlgebraAction& act : actions) {
      int K = act.state_count();
      ActionStructure sact;
      sact.name = act.name;
      sact.states = act.states;
      sact.designated = act.designated;
      sact.rel = act.rel;
      sact.pre.assign(static_cast<size_t>(K), f_top());
      std::string where = " for a " + std::to_string(K) + "-state action over " + detail::frame_label(f);

      auto prod = product_algebra(a, act);
      Model co = coproduct_model(primes, sact);
      ++res.checked;
      if (!isomorphic(frame_structure(prime_structure(*prod, f.kind)), frame_structure(co.frame)))
        res.fail("primes of the product differ from the coproduct of primes" + where);

      auto quot = quotient_algebra(prod);
      std::vector<Mask> pre_sets(static_cast<size_t>(K), 0);
      for (int j = 0; j < K; ++j)
        for (size_t x = 0; x < js.size(); ++x)
          if (a->leq(js[x], act.pre[static_cast<size_t>(j)]))
            pre_sets[static_cast<size_t>(j)] |= mask_bit(static_cast<int>(x));
      UpdateResult ur = product_update(primes, sact, pre_sets);
      ++res.checked;
      if (!isomorphic(frame_structure(prime_structure(*quot, f.kind)), frame_structure(ur.updated.frame)))
        res.fail("primes of the quotient differ from the updated primes" + where);
      res.absorb(check_frame(ur.updated.frame), "updated prime structure" + where);
    }
  }
  res.note("frames: " + std::to_string(family.size()));
  return res;
}

// Relational and algebraic evaluation agree through the complex algebra, on
// random models, actions and formulas, dynamic modalities included.
inline SuiteResult suite_agreement(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "agreement";
  Rng rng(cfg.seed);
  long long count = cfg.full ? 1000 : 200;
  std::vector<Agent> agents = {"a", "b"};
  std::vector<Atom> atoms = {"p", "q", "r"};
  for (long long t = 0; t < count; ++t) {
    ModelKind kind = t % 3 == 0 ? ModelKind::Classical : (t % 3 == 1 ? ModelKind::IK : ModelKind::MIPC);
    int n = 1 + rng.below(4);
    Model m = random_model(rng, kind, n, agents, atoms);
    Env env;
    env.agents = agents;
    std::vector<std::string> names;
    int nacts = 1 + rng.below(2);
    for (int i = 0; i < nacts; ++i) {
      std::string name = "act" + std::to_string(i);
      env.add_action(random_action(rng, name, kind, 1 + rng.below(2), agents, atoms));
      names.push_back(name);
    }
    FormulaPtr phi = random_formula(rng, 4, atoms, agents, names, 2);

    Mask relational = evaluate(m, env, phi);
    ComplexAlgebra ca = complex_algebra(m.frame);
    AlgebraicModel am;
    am.alg = ca.algebra;
    for (const auto& [at, v] : m.val) am.val[at] = ca.index_of(v);
    int el = eval_algebraic(am, env, phi);
    ++res.checked;
    if (ca.downsets[static_cast<size_t>(el)] != relational)
      res.fail("relational and algebraic truth sets differ for " + print_formula(phi) + " on " +
               detail::describe_model(m));
  }
  res.note(std::to_string(count) + " random model/action/formula triples");
  return res;
}

// The rewriter terminates within the step budget on random dynamic formulas,
// returns static output, and preserves semantic equivalence.
inline SuiteResult suite_rewriter(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "rewriter";
  Rng rng(cfg.seed ^ 0x5eedULL);
  long long count = cfg.full ? 200 : 60;
  std::vector<Agent> agents = {"a", "b"};
  std::vector<Atom> atoms = {"p", "q"};
  long long max_steps = 0, eq_models = 0;
  for (long long t = 0; t < count; ++t) {
    ModelKind kind = t % 2 == 0 ? ModelKind::Classical : ModelKind::IK;
    Env env;
    env.agents = agents;
    std::vector<std::string> names;
    int nacts = 1 + rng.below(2);
    for (int i = 0; i < nacts; ++i) {
      std::string name = "act" + std::to_string(i);
      env.add_action(random_action(rng, name, kind, 1 + rng.below(2), agents, atoms));
      names.push_back(name);
    }
    FormulaPtr phi = random_formula(rng, 4, atoms, agents, names, 2);
    if (is_static(phi)) {
      ActionRef ref{names[0], ""};
      phi = rng.flip() ? f_dyn_dia(ref, phi) : f_dyn_box(ref, phi);
    }
    try {
      NormalizeResult nr = normalize(phi, env, 10000, true);
      max_steps = std::max(max_steps, static_cast<long long>(nr.steps.size()));
      EquivBounds eb;
      eb.max_worlds = 3;
      eb.cap_per_stratum = cfg.full ? 400 : 150;
      eb.ordered_cap = cfg.full ? 200 : 80;
      EquivResult eq = equivalence_check(phi, nr.formula, env, eb);
      eq_models += eq.models_checked;
      ++res.checked;
      if (!eq.equivalent)
        res.fail("normalization changed the meaning of " + print_formula(phi) + ": " + eq.countermodel);
    } catch (const Error& e) {
      res.fail(std::string(e.what()) + " for " + print_formula(phi));
    }
  }
  res.note(std::to_string(count) + " formulas, max " + std::to_string(max_steps) +
           " steps, equivalence over " + std::to_string(eq_models) + " models");
  return res;
}

// Cards scenario: the worked example is reproduced exactly, and on every
// admissible model (classical sweeps, then random ordered models) each world
// satisfying the premise satisfies the conclusion.
inline SuiteResult suite_cards(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "cards";
  res.absorb(cards_example_regression(), "worked example");
  ++res.checked;

  CardsScenario s = cards_scenario();
  FormulaPtr assumptions = f_and(s.aut, s.one);

  // The background assumptions hold globally exactly for the valuations
  // induced by a green-card assignment; checked against all valuations on
  // tiny classical carriers.
  for (int n = 1; n <= 2; ++n) {
    std::vector<Rel> rels(3, Rel::identity(n));
    long long options = 1LL << n;
    long long total = 1;
    for (int i = 0; i < 6; ++i) total *= options;
    for (long long idx = 0; idx < total; ++idx) {
      long long v = idx;
      std::array<Mask, 6> masks{};
      for (auto& mk : masks) {
        mk = static_cast<Mask>(v % options);
        v /= options;
      }
      Model m;
      m.frame.kind = ModelKind::Classical;
      m.frame.worlds = numbered_names("w", n);
      m.frame.agents = s.agents;
      m.frame.order = Rel::identity(n);
      m.frame.rel = rels;
      for (int i = 0; i < 3; ++i) {
        m.val[s.green_atoms[static_cast<size_t>(i)]] = masks[static_cast<size_t>(i)];
        m.val[s.white_atoms[static_cast<size_t>(i)]] = masks[static_cast<size_t>(i + 3)];
      }
      Evaluator ev(m, s.env);
      bool global = ev.eval(assumptions) == mask_universe(n);
      bool shaped = true;
      for (int w = 0; w < n && shaped; ++w) {
        int greens = 0;
        for (int i = 0; i < 3; ++i) {
          if (mask_get(masks[static_cast<size_t>(i)], w)) ++greens;
          if (mask_get(masks[static_cast<size_t>(i + 3)], w) == mask_get(masks[static_cast<size_t>(i)], w))
            shaped = false;
        }
        if (greens != 1) shaped = false;
      }
      ++res.checked;
      if (global != shaped) {
        res.fail("assumption characterization differs on " + detail::describe_model(m));
        break;
      }
    }
  }

  // Classical sweep over relation triples and green assignments.
  for (int n = 1; n <= 3; ++n) {
    long long rel_opts = 1LL << (n * n);
    long long assigns = 1;
    for (int w = 0; w < n; ++w) assigns *= 3;
    long long total = rel_opts * rel_opts * rel_opts * assigns;
    long long budget = n <= 2 ? total : (cfg.full ? 3000000 : 60000);
    long long visited = 0;
    strided_indices(total, budget, [&](long long idx) {
      long long v = idx;
      std::vector<Rel> rels;
      for (int i = 0; i < 3; ++i) {
        rels.push_back(detail::rel_from_bits(n, v % rel_opts));
        v /= rel_opts;
      }
      std::vector<int> green;
      for (int w = 0; w < n; ++w) {
        green.push_back(static_cast<int>(v % 3));
        v /= 3;
      }
      Model m = cards_model(ModelKind::Classical, Rel::identity(n), rels, green);
      Evaluator ev(m, s.env);
      ++visited;
      ++res.checked;
      Mask premise = ev.eval(s.premise);
      if (!premise) return;
      Mask conclusion = ev.eval(s.conclusion);
      if (premise & ~conclusion)
        res.fail("premise world without the conclusion on " + detail::describe_model(m));
    });
    res.note("classical n=" + std::to_string(n) + ": " + std::to_string(visited) + "/" +
             std::to_string(total) + " models");
  }

  // Random ordered models with component-constant assignments.
  Rng rng(cfg.seed ^ 0xca4d5ULL);
  long long rcount = cfg.full ? 500 : 120;
  for (long long t = 0; t < rcount; ++t) {
    int n = 1 + rng.below(3);
    Rel order = random_poset(rng, n);
    std::vector<Rel> rels;
    for (int i = 0; i < 3; ++i) rels.push_back(random_ik_relation(rng, order));
    std::vector<int> comp = order_components(order);
    int ncomp = 0;
    for (int c : comp) ncomp = std::max(ncomp, c + 1);
    std::vector<int> color(static_cast<size_t>(ncomp));
    for (auto& c : color) c = rng.below(3);
    std::vector<int> green(static_cast<size_t>(n));
    for (int w = 0; w < n; ++w) green[static_cast<size_t>(w)] = color[static_cast<size_t>(comp[static_cast<size_t>(w)])];
    Model m = cards_model(ModelKind::IK, order, rels, green);
    res.absorb(check_model(m), "random ordered cards model");
    Evaluator ev(m, s.env);
    ++res.checked;
    if (ev.eval(assumptions) != mask_universe(n)) {
      res.fail("assumptions fail on a component-constant assignment: " + detail::describe_model(m));
      continue;
    }
    Mask premise = ev.eval(s.premise);
    if (!premise) continue;
    Mask conclusion = ev.eval(s.conclusion);
    if (premise & ~conclusion)
      res.fail("premise world without the conclusion on " + detail::describe_model(m));
  }
  res.note(std::to_string(rcount) + " random ordered models");
  return res;
}

// Heyting identities, the equivalence of the three lax interaction forms,
// and the inclusion clauses linking quotient operations to product ones.
inline SuiteResult suite_appendix(const SuiteConfig& cfg) {
  SuiteResult res;
  res.name = "appendix";
  Rng rng(cfg.seed ^ 0xa99e4d1ULL);
  auto family = detail::frame_family(cfg.full ? 4 : 3, 3, 1, cfg.full ? 3 : 1);
  for (const Frame& f : family) {
    ComplexAlgebra ca = complex_algebra(f);
    const AlgebraBase& a = *ca.algebra;
    int n = a.isize();
    bool ok = true;
    for (int x = 0; x < n && ok; ++x)
      for (int y = 0; y < n && ok; ++y) {
        int ixy = a.imp(x, y);
        if (!a.leq(a.meet(x, ixy), y)) ok = false;                  // modus ponens
        if (!a.leq(a.meet(x, y), ixy)) ok = false;                  // conjunction below implication
        if (ixy != a.imp(x, a.meet(x, y))) ok = false;              // consequent absorption
        for (int z = 0; z < n && ok; ++z) {
          if (a.imp(x, a.meet(y, z)) != a.meet(a.imp(x, y), a.imp(x, z))) ok = false;
          if (a.imp(a.meet(x, y), z) != a.imp(x, a.imp(y, z))) ok = false;
          if (a.meet(x, a.imp(y, z)) != a.meet(x, a.imp(a.meet(x, y), z))) ok = false;
        }
      }
    ++res.checked;
    if (!ok) res.fail("a Heyting identity fails on the complex algebra of " + detail::frame_label(f));

    auto v = detail::fs_verdicts(a);
    ++res.checked;
    if (!(v[0] && v[1] && v[2]))
      res.fail("an interaction form fails on the complex algebra of " + detail::frame_label(f));
    for (int rep = 0; rep < (cfg.full ? 3 : 1); ++rep) {
      auto b = detail::random_normal_algebra(a, rng);
      auto w = detail::fs_verdicts(*b);
      ++res.checked;
      if (w[0] != w[1] || w[1] != w[2])
        res.fail("the three interaction forms disagree on a random normal algebra over " +
                 detail::frame_label(f));
    }
  }

  // Inclusion clauses. The box clause holds as an identity of quotient
  // classes (both sides are projected); the others hold on the nose.
  long long pair_visited = 0, pair_total = 0;
  uint64_t counter = 0;
  for (const Frame& f : family) {
    if (!cfg.full && f.n() > 3) continue;
    ComplexAlgebra ca = complex_algebra(f);
    Alg a = ca.algebra;
    bool big = a->size() > 8;
    auto actions = detail::algebra_action_family(*a, 2, 1, counter++, !big);
    for (const AlgebraAction& act : actions) {
      auto prod = product_algebra(a, act);
      auto quot = quotient_algebra(prod);
      int K = prod->states();
      std::vector<int> coords(static_cast<size_t>(K));
      for (int j = 0; j < K; ++j) coords[static_cast<size_t>(j)] = act.pre[static_cast<size_t>(j)];
      int preP = static_cast<int>(prod->encode(coords.data()));
      long long qn = quot->size();
      long long cap = big ? 8192 : qn * qn;
      std::string where = " for a " + std::to_string(K) + "-state action over " + detail::frame_label(f);
      int na = static_cast<int>(a->agents().size());
      strided_indices(qn * qn, cap, [&](long long pr) {
        int b = static_cast<int>(pr % qn), c = static_cast<int>(pr / qn);
        int ib = static_cast<int>(quot->include(b)), ic = static_cast<int>(quot->include(c));
        ++pair_visited;
        ++res.checked;
        if (static_cast<int>(quot->include(quot->join(b, c))) != prod->join(ib, ic))
          res.fail("inclusion does not preserve joins" + where);
        if (static_cast<int>(quot->include(quot->meet(b, c))) != prod->meet(ib, ic))
          res.fail("inclusion does not preserve meets" + where);
        if (static_cast<int>(quot->include(quot->imp(b, c))) != prod->meet(preP, prod->imp(ib, ic)))
          res.fail("inclusion misses the relativized implication" + where);
        for (int ag = 0; ag < na; ++ag) {
          if (static_cast<int>(quot->include(quot->dia(ag, b))) !=
              prod->meet(prod->dia(ag, prod->meet(ib, preP)), preP))
            res.fail("inclusion misses the guarded diamond" + where);
          if (quot->box(ag, b) != quot->project(prod->imp(preP, prod->box(ag, prod->imp(preP, ib)))))
            res.fail("inclusion misses the guarded box up to the congruence" + where);
        }
      });
      pair_total += qn * qn;
    }
  }
  res.note("inclusion clause pairs: " + std::to_string(pair_visited) + "/" + std::to_string(pair_total));
  return res;
}

inline std::vector<std::string> suite_names() {
  return {"frames", "reduction", "closure", "duality", "agreement", "rewriter", "cards", "appendix"};
}

inline SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  if (name == "frames")
    r = suite_frames(cfg);
  else if (name == "reduction")
    r = suite_reduction(cfg);
  else if (name == "closure")
    r = suite_closure(cfg);
  else if (name == "duality")
    r = suite_duality(cfg);
  else if (name == "agreement")
    r = suite_agreement(cfg);
  else if (name == "rewriter")
    r = suite_rewriter(cfg);
  else if (name == "cards")
    r = suite_cards(cfg);
  else if (name == "appendix")
    r = suite_appendix(cfg);
  else
    throw InputError("unknown suite '" + name + "'");
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace ieak
