#pragma once

#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ieak/algebra.hpp"
#include "ieak/core.hpp"
#include "ieak/enumerate.hpp"
#include "ieak/model.hpp"
#include "ieak/syntax.hpp"

namespace th {

using namespace ieak;

inline Rel rel_of(int n, std::initializer_list<std::pair<int, int>> pairs, bool with_identity = true) {
  Rel r = with_identity ? Rel::identity(n) : Rel(n);
  for (auto [x, y] : pairs) r.set(x, y);
  return r;
}

inline Frame make_frame(ModelKind kind, int n, const Rel& order, std::vector<Rel> rels,
                        std::vector<Agent> agents) {
  Frame f;
  f.kind = kind;
  f.worlds = numbered_names("w", n);
  f.agents = std::move(agents);
  f.order = order;
  f.rel = std::move(rels);
  return f;
}

// Chain w0 <= w1 <= ... with identity epistemic relations.
inline Model chain_model(int n, std::vector<Agent> agents = {"a"}) {
  Rel ord = Rel::identity(n);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) ord.set(x, y);
  std::vector<Rel> rels(agents.size(), Rel::identity(n));
  Model m;
  m.frame = make_frame(ModelKind::IK, n, ord, std::move(rels), std::move(agents));
  return m;
}

inline Model classical_model(int n, std::vector<Rel> rels, std::vector<Agent> agents = {"a"}) {
  Model m;
  m.frame = make_frame(ModelKind::Classical, n, Rel::identity(n), std::move(rels), std::move(agents));
  return m;
}

inline ActionStructure simple_action(const std::string& name, std::vector<std::string> states,
                                     int designated, std::map<Agent, Rel> rel,
                                     std::vector<FormulaPtr> pre) {
  ActionStructure a;
  a.name = name;
  a.states = std::move(states);
  a.designated = designated;
  a.rel = std::move(rel);
  a.pre = std::move(pre);
  return a;
}

// Definitional closure: repeatedly add identity and composites until stable.
inline Rel closure_oracle(const Rel& r) {
  int n = r.n();
  Rel c = r;
  for (int x = 0; x < n; ++x) c.set(x, x);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z)
          if (c.at(x, y) && c.at(y, z) && !c.at(x, z)) {
            c.set(x, z);
            changed = true;
          }
  }
  return c;
}

// Residuation: imp(x, y) is the largest z with z & x <= y.
inline bool residuation_holds(const AlgebraBase& a) {
  int n = a.isize();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      int i = a.imp(x, y);
      for (int z = 0; z < n; ++z)
        if (a.leq(a.meet(z, x), y) != a.leq(z, i)) return false;
    }
  return true;
}

inline bool join_prime_oracle(const AlgebraBase& a, int x) {
  if (x == a.bot()) return false;
  int n = a.isize();
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (a.leq(x, a.join(u, v)) && !a.leq(x, u) && !a.leq(x, v)) return false;
  return true;
}

}  // namespace th
