#pragma once

#include <string>
#include <vector>

#include "ieak/core.hpp"
#include "ieak/model.hpp"
#include "ieak/syntax.hpp"

namespace ieak {

// Three-cards scenario: agents a, b, c hold one green and two white cards.
// Atom G<i> reads `i holds the green card', W<i> `i holds a white card'.
// Action alpha shows a's card to b with c watching; action beta publicly
// announces that a knows the distribution.
struct CardsScenario {
  std::vector<Agent> agents;
  std::vector<Atom> green_atoms, white_atoms;
  Env env;
  Model model;
  FormulaPtr aut, one, other_q, premise, conclusion, pre_beta;
};

inline CardsScenario cards_scenario() {
  CardsScenario s;
  s.agents = {"a", "b", "c"};
  for (const auto& ag : s.agents) {
    s.green_atoms.push_back("G" + ag);
    s.white_atoms.push_back("W" + ag);
  }
  s.env.agents = s.agents;

  ActionStructure alpha;
  alpha.name = "alpha";
  alpha.states = {"k", "l"};
  alpha.designated = 0;
  alpha.rel["a"] = Rel::identity(2);
  alpha.rel["b"] = Rel::identity(2);
  alpha.rel["c"] = Rel::full(2);
  alpha.pre = {f_atom("Ga"), f_atom("Wa")};
  s.env.add_action(alpha);

  s.pre_beta = f_top();
  for (size_t i = 0; i < s.agents.size(); ++i) {
    FormulaPtr piece = f_imp(f_atom(s.green_atoms[i]), f_box("a", f_atom(s.green_atoms[i])));
    s.pre_beta = i == 0 ? piece : f_and(s.pre_beta, piece);
  }
  ActionStructure beta;
  beta.name = "beta";
  beta.states = {"k"};
  beta.designated = 0;
  beta.rel["a"] = Rel::identity(1);
  beta.rel["b"] = Rel::identity(1);
  beta.rel["c"] = Rel::identity(1);
  beta.pre = {s.pre_beta};
  s.env.add_action(beta);

  // Worlds are named by the agent holding the green card. Each agent knows
  // its own card: its relation joins the two worlds where it holds white.
  s.model.frame.kind = ModelKind::Classical;
  s.model.frame.worlds = {"Ga", "Gb", "Gc"};
  s.model.frame.agents = s.agents;
  s.model.frame.order = Rel::identity(3);
  auto pair_rel = [&](int x, int y) {
    Rel r = Rel::identity(3);
    r.set(x, y);
    r.set(y, x);
    return r;
  };
  s.model.frame.rel = {pair_rel(1, 2), pair_rel(0, 2), pair_rel(0, 1)};
  for (size_t i = 0; i < s.agents.size(); ++i) {
    s.model.val[s.green_atoms[i]] = mask_bit(static_cast<int>(i));
    s.model.val[s.white_atoms[i]] = mask_universe(3) & ~mask_bit(static_cast<int>(i));
  }

  FormulaPtr aut, one, other;
  for (size_t i = 0; i < s.agents.size(); ++i) {
    FormulaPtr ai = f_iff(f_imp(f_atom(s.white_atoms[i]), f_bot()), f_atom(s.green_atoms[i]));
    aut = i == 0 ? ai : f_and(aut, ai);
    FormulaPtr whites;
    bool first = true;
    for (size_t h = 0; h < s.agents.size(); ++h) {
      if (h == i) continue;
      whites = first ? f_atom(s.white_atoms[h]) : f_and(whites, f_atom(s.white_atoms[h]));
      first = false;
    }
    FormulaPtr oi = f_and(f_atom(s.green_atoms[i]), whites);
    one = i == 0 ? oi : f_or(one, oi);
    FormulaPtr doubts;
    first = true;
    for (size_t h = 0; h < s.agents.size(); ++h) {
      if (h == i) continue;
      FormulaPtr d = f_dia(s.agents[i], f_atom(s.green_atoms[h]));
      doubts = first ? d : f_and(doubts, d);
      first = false;
    }
    FormulaPtr qi = f_imp(f_atom(s.white_atoms[i]), doubts);
    other = i == 0 ? qi : f_and(other, qi);
  }
  s.aut = aut;
  s.one = one;
  s.other_q = other;
  s.premise = f_everyone(s.agents, other);
  s.conclusion = f_dyn_box({"alpha", ""}, f_dyn_box({"beta", ""}, f_box("c", f_atom("Ga"))));
  return s;
}

// Connected components of the comparability graph of a poset.
inline std::vector<int> order_components(const Rel& order) {
  int n = order.n();
  std::vector<int> comp(static_cast<size_t>(n), -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<size_t>(s)] >= 0) continue;
    std::vector<int> stack{s};
    comp[static_cast<size_t>(s)] = next;
    while (!stack.empty()) {
      int w = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        if (comp[static_cast<size_t>(v)] >= 0) continue;
        if (order.at(w, v) || order.at(v, w)) {
          comp[static_cast<size_t>(v)] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

inline std::vector<std::string> numbered_names_cards(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

// Model induced by a green-card assignment: world w satisfies G<i> iff
// green[w] = i, and W<i> otherwise. Assignments constant on order components
// are exactly the models validating aut and one globally.
inline Model cards_model(ModelKind kind, const Rel& order, const std::vector<Rel>& rels,
                         const std::vector<int>& green) {
  int n = order.n();
  Model m;
  m.frame.kind = kind;
  m.frame.worlds = numbered_names_cards(n);
  m.frame.agents = {"a", "b", "c"};
  m.frame.order = order;
  m.frame.rel = rels;
  std::vector<Atom> g = {"Ga", "Gb", "Gc"}, w = {"Wa", "Wb", "Wc"};
  for (int i = 0; i < 3; ++i) {
    Mask gm = 0;
    for (int wd = 0; wd < n; ++wd)
      if (green[static_cast<size_t>(wd)] == i) gm |= mask_bit(wd);
    m.val[g[static_cast<size_t>(i)]] = gm;
    m.val[w[static_cast<size_t>(i)]] = mask_universe(n) & ~gm;
  }
  return m;
}

// Exact regression of the worked example: sizes and edges of the coproduct,
// the update by alpha, and the further update by beta.
inline CheckReport cards_example_regression() {
  CheckReport rep;
  CardsScenario s = cards_scenario();
  Evaluator ev(s.model, s.env);
  const UpdateResult& u1 = ev.update("alpha");
  if (u1.intermediate.frame.n() != 6)
    rep.note("coproduct has " + std::to_string(u1.intermediate.frame.n()) + " worlds, expected 6");
  const Model& ma = u1.updated;
  if (ma.frame.n() != 3) {
    rep.note("update by alpha has " + std::to_string(ma.frame.n()) + " worlds, expected 3");
    return rep;
  }
  auto widx = [&](const std::string& name) {
    for (int i = 0; i < ma.frame.n(); ++i)
      if (ma.frame.worlds[static_cast<size_t>(i)] == name) return i;
    return -1;
  };
  int gak = widx("(Ga,k)"), gbl = widx("(Gb,l)"), gcl = widx("(Gc,l)");
  if (gak < 0 || gbl < 0 || gcl < 0) {
    rep.note("update by alpha kept unexpected worlds");
    return rep;
  }
  Rel expect_a = Rel::identity(3), expect_b = Rel::identity(3), expect_c = Rel::identity(3);
  expect_a.set(gbl, gcl);
  expect_a.set(gcl, gbl);
  expect_c.set(gak, gbl);
  expect_c.set(gbl, gak);
  if (!(ma.frame.rel[ma.frame.agent_index("a")] == expect_a)) rep.note("update by alpha: wrong relation for a");
  if (!(ma.frame.rel[ma.frame.agent_index("b")] == expect_b)) rep.note("update by alpha: wrong relation for b");
  if (!(ma.frame.rel[ma.frame.agent_index("c")] == expect_c)) rep.note("update by alpha: wrong relation for c");

  Evaluator ev2(ma, s.env);
  const UpdateResult& u2 = ev2.update("beta");
  if (u2.updated.frame.n() != 1) {
    rep.note("update by beta has " + std::to_string(u2.updated.frame.n()) + " worlds, expected 1");
    return rep;
  }
  auto it = u2.updated.val.find("Ga");
  if (it == u2.updated.val.end() || it->second != mask_universe(1))
    rep.note("the single world after beta does not satisfy Ga");
  return rep;
}

}  // namespace ieak
