#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "ieak/core.hpp"
#include "ieak/model.hpp"
#include "ieak/syntax.hpp"

namespace ieak {

// Deterministic generator, identical across platforms and builds.
struct Rng {
  uint64_t s;

  explicit Rng(uint64_t seed) : s(seed + 0x9e3779b97f4a7c15ULL) {}

  uint64_t next() {
    s += 0x9e3779b97f4a7c15ULL;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  int below(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
  bool flip() { return (next() & 1) != 0; }
};

inline std::vector<Rel> all_relations(int n) {
  if (n > 4) throw LimitError("relation enumeration: carrier too large");
  long long total = 1LL << (n * n);
  std::vector<Rel> out;
  out.reserve(static_cast<size_t>(total));
  for (long long bits = 0; bits < total; ++bits) {
    Rel r(n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if ((bits >> (x * n + y)) & 1) r.set(x, y);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<Rel> all_posets(int n) {
  if (n > 4) throw LimitError("poset enumeration: carrier too large");
  std::vector<Rel> out;
  int off = n * n - n;
  for (long long bits = 0; bits < (1LL << off); ++bits) {
    Rel r = Rel::identity(n);
    int at = 0;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (x == y) continue;
        if ((bits >> at) & 1) r.set(x, y);
        ++at;
      }
    if (r.is_partial_order()) out.push_back(std::move(r));
  }
  return out;
}

inline bool ik_conditions_hold(const Rel& order, const Rel& r) {
  Rel geq = order.converse();
  if (!r.compose(geq).subset_of(geq.compose(r))) return false;
  if (!order.compose(r).subset_of(r.compose(order))) return false;
  return r == geq.compose(r).intersect(r.compose(order));
}

inline std::vector<Rel> ik_relations(const Rel& order, bool equivalence_only = false) {
  std::vector<Rel> out;
  for (Rel& r : all_relations(order.n())) {
    if (equivalence_only && !r.is_equivalence()) continue;
    if (ik_conditions_hold(order, r)) out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<Mask> all_downsets(const Rel& order) {
  Rel geq = order.converse();
  std::vector<Mask> out;
  Mask universe = mask_universe(order.n());
  for (Mask m = 0;; ++m) {
    if (is_downset(m, geq)) out.push_back(m);
    if (m == universe) break;
  }
  return out;
}

inline std::vector<std::string> numbered_names(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

// Exhaustive bank of n-world models over the given signature, sampled down
// to `cap` instances by a deterministic stride when the bank is larger.
// Classical banks range over all relations and all valuations; ordered banks
// stratify by poset and range over the relations and downsets it admits.
struct BankSpec {
  ModelKind kind = ModelKind::Classical;
  int worlds = 2;
  std::vector<Agent> agents;
  std::vector<Atom> atoms;
  long long cap = 100000;
};

struct BankStats {
  long long total = 0;
  long long visited = 0;
};

template <class Fn>
BankStats for_each_model(const BankSpec& spec, Fn&& fn) {
  BankStats stats;
  int n = spec.worlds;
  int na = static_cast<int>(spec.agents.size());
  int np = static_cast<int>(spec.atoms.size());

  std::vector<Rel> orders;
  if (spec.kind == ModelKind::Classical)
    orders.push_back(Rel::identity(n));
  else
    orders = all_posets(n);

  struct Stratum {
    Rel order;
    std::vector<Rel> rels;
    std::vector<Mask> vals;
    long long total;
  };
  std::vector<Stratum> strata;
  long long grand = 0;
  for (Rel& ord : orders) {
    Stratum st{ord, {}, {}, 0};
    if (spec.kind == ModelKind::Classical) {
      st.rels = all_relations(n);
      st.vals.clear();
      for (Mask m = 0;; ++m) {
        st.vals.push_back(m);
        if (m == mask_universe(n)) break;
      }
    } else {
      st.rels = ik_relations(ord, spec.kind == ModelKind::MIPC);
      st.vals = all_downsets(ord);
    }
    st.total = 1;
    for (int a = 0; a < na; ++a) st.total *= static_cast<long long>(st.rels.size());
    for (int p = 0; p < np; ++p) st.total *= static_cast<long long>(st.vals.size());
    grand += st.total;
    strata.push_back(std::move(st));
  }
  stats.total = grand;
  if (grand == 0) return stats;

  Model m;
  m.frame.kind = spec.kind;
  m.frame.worlds = numbered_names("w", n);
  m.frame.agents = spec.agents;
  m.frame.rel.assign(spec.agents.size(), Rel(n));
  for (const auto& st : strata) {
    long long want = std::max<long long>(1, spec.cap * st.total / grand);
    m.frame.order = st.order;
    strided_indices(st.total, want, [&](long long idx) {
      for (size_t a = 0; a < spec.agents.size(); ++a) {
        m.frame.rel[a] = st.rels[static_cast<size_t>(idx % st.rels.size())];
        idx /= static_cast<long long>(st.rels.size());
      }
      for (const auto& at : spec.atoms) {
        m.val[at] = st.vals[static_cast<size_t>(idx % st.vals.size())];
        idx /= static_cast<long long>(st.vals.size());
      }
      ++stats.visited;
      fn(m);
    });
  }
  return stats;
}

// Bank of pointed actions with K states over the same signature.
// Preconditions range over the supplied atoms plus truth, per state.
struct ActionBankSpec {
  ModelKind kind = ModelKind::Classical;
  int states = 2;
  std::vector<Agent> agents;
  std::vector<Atom> pre_atoms;
  long long cap = 1000;
  std::string name = "act";
};

template <class Fn>
BankStats for_each_action(const ActionBankSpec& spec, Fn&& fn) {
  BankStats stats;
  int k = spec.states;
  std::vector<Rel> rels =
      spec.kind == ModelKind::MIPC
          ? [&] {
              std::vector<Rel> eq;
              for (Rel& r : all_relations(k))
                if (r.is_equivalence()) eq.push_back(std::move(r));
              return eq;
            }()
          : all_relations(k);

  std::vector<FormulaPtr> pres;
  pres.push_back(f_top());
  for (const auto& p : spec.pre_atoms) pres.push_back(f_atom(p));

  long long total = 1;
  for (size_t a = 0; a < spec.agents.size(); ++a) total *= static_cast<long long>(rels.size());
  for (int j = 0; j < k; ++j) total *= static_cast<long long>(pres.size());
  stats.total = total;

  ActionStructure act;
  act.name = spec.name;
  act.states = numbered_names("s", k);
  act.designated = 0;
  act.pre.resize(static_cast<size_t>(k));
  strided_indices(total, spec.cap, [&](long long idx) {
    for (const auto& ag : spec.agents) {
      act.rel[ag] = rels[static_cast<size_t>(idx % rels.size())];
      idx /= static_cast<long long>(rels.size());
    }
    for (int j = 0; j < k; ++j) {
      act.pre[static_cast<size_t>(j)] = pres[static_cast<size_t>(idx % pres.size())];
      idx /= static_cast<long long>(pres.size());
    }
    ++stats.visited;
    fn(act);
  });
  return stats;
}

inline Rel random_poset(Rng& rng, int n) {
  Rel r = Rel::identity(n);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (rng.below(3) == 0) r.set(x, y);
  return r.reflexive_transitive_closure();
}

inline Rel random_ik_relation(Rng& rng, const Rel& order) {
  int n = order.n();
  for (int attempt = 0; attempt < 40; ++attempt) {
    Rel r(n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (rng.below(3) == 0) r.set(x, y);
    if (ik_conditions_hold(order, r)) return r;
  }
  // Identity, empty and full always satisfy the conditions.
  switch (rng.below(3)) {
    case 0: return Rel::identity(n);
    case 1: return Rel(n);
    default: return Rel::full(n);
  }
}

inline Rel random_equivalence(Rng& rng, int n) {
  std::vector<int> label(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) label[static_cast<size_t>(i)] = rng.below(std::max(1, n - 1));
  Rel r(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (label[static_cast<size_t>(x)] == label[static_cast<size_t>(y)]) r.set(x, y);
  return r;
}

inline Mask random_downset(Rng& rng, const Rel& order) {
  Rel geq = order.converse();
  Mask m = 0;
  for (int w = 0; w < order.n(); ++w)
    if (rng.flip()) m |= geq.row(w);
  return m;
}

inline Model random_model(Rng& rng, ModelKind kind, int n, const std::vector<Agent>& agents,
                          const std::vector<Atom>& atoms) {
  Model m;
  m.frame.kind = kind;
  m.frame.worlds = numbered_names("w", n);
  m.frame.agents = agents;
  m.frame.order = kind == ModelKind::Classical ? Rel::identity(n) : random_poset(rng, n);
  for (size_t a = 0; a < agents.size(); ++a) {
    if (kind == ModelKind::Classical) {
      Rel r(n);
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (rng.below(3) == 0) r.set(x, y);
      m.frame.rel.push_back(r);
    } else if (kind == ModelKind::MIPC) {
      // Random equivalences need not satisfy the interaction conditions on a
      // nontrivial order; rejection with the discrete fallbacks keeps the
      // generator total.
      Rel r = random_equivalence(rng, n);
      if (!ik_conditions_hold(m.frame.order, r)) {
        bool found = false;
        for (int attempt = 0; attempt < 40 && !found; ++attempt) {
          r = random_equivalence(rng, n);
          found = ik_conditions_hold(m.frame.order, r);
        }
        if (!found) r = rng.flip() ? Rel::identity(n) : Rel::full(n);
      }
      m.frame.rel.push_back(r);
    } else {
      m.frame.rel.push_back(random_ik_relation(rng, m.frame.order));
    }
  }
  for (const auto& at : atoms)
    m.val[at] = kind == ModelKind::Classical ? (rng.next() & mask_universe(n)) : random_downset(rng, m.frame.order);
  return m;
}

inline ActionStructure random_action(Rng& rng, const std::string& name, ModelKind kind, int k,
                                     const std::vector<Agent>& agents, const std::vector<Atom>& atoms) {
  ActionStructure act;
  act.name = name;
  act.states = numbered_names("s", k);
  act.designated = rng.below(k);
  for (const auto& ag : agents) {
    if (kind == ModelKind::MIPC) {
      act.rel[ag] = random_equivalence(rng, k);
    } else {
      Rel r(k);
      for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y)
          if (rng.below(2) == 0) r.set(x, y);
      act.rel[ag] = r;
    }
  }
  for (int j = 0; j < k; ++j) {
    switch (rng.below(4)) {
      case 0: act.pre.push_back(f_top()); break;
      case 1: act.pre.push_back(f_atom(atoms[static_cast<size_t>(rng.below(static_cast<int>(atoms.size())))])); break;
      case 2:
        act.pre.push_back(f_or(f_atom(atoms[static_cast<size_t>(rng.below(static_cast<int>(atoms.size())))]),
                               f_atom(atoms[static_cast<size_t>(rng.below(static_cast<int>(atoms.size())))])));
        break;
      default:
        act.pre.push_back(f_and(f_atom(atoms[static_cast<size_t>(rng.below(static_cast<int>(atoms.size())))]),
                                f_atom(atoms[static_cast<size_t>(rng.below(static_cast<int>(atoms.size())))])));
        break;
    }
  }
  return act;
}

// Random formula of bounded depth; dynamic modalities consume the nesting
// budget and reference the supplied action names.
inline FormulaPtr random_formula(Rng& rng, int depth, const std::vector<Atom>& atoms,
                                 const std::vector<Agent>& agents, const std::vector<std::string>& action_names,
                                 int dyn_budget) {
  bool allow_dyn = dyn_budget > 0 && !action_names.empty();
  if (depth <= 0) {
    if (rng.below(8) == 0) return rng.flip() ? f_bot() : f_top();
    return f_atom(atoms[static_cast<size_t>(rng.below(static_cast<int>(atoms.size())))]);
  }
  int pick = rng.below(allow_dyn ? 10 : 8);
  switch (pick) {
    case 0:
      if (rng.below(6) == 0) return rng.flip() ? f_bot() : f_top();
      return f_atom(atoms[static_cast<size_t>(rng.below(static_cast<int>(atoms.size())))]);
    case 1:
    case 2:
      return f_and(random_formula(rng, depth - 1, atoms, agents, action_names, dyn_budget),
                   random_formula(rng, depth - 1, atoms, agents, action_names, dyn_budget));
    case 3:
    case 4:
      return f_or(random_formula(rng, depth - 1, atoms, agents, action_names, dyn_budget),
                  random_formula(rng, depth - 1, atoms, agents, action_names, dyn_budget));
    case 5:
      return f_imp(random_formula(rng, depth - 1, atoms, agents, action_names, dyn_budget),
                   random_formula(rng, depth - 1, atoms, agents, action_names, dyn_budget));
    case 6:
      return f_dia(agents[static_cast<size_t>(rng.below(static_cast<int>(agents.size())))],
                   random_formula(rng, depth - 1, atoms, agents, action_names, dyn_budget));
    case 7:
      return f_box(agents[static_cast<size_t>(rng.below(static_cast<int>(agents.size())))],
                   random_formula(rng, depth - 1, atoms, agents, action_names, dyn_budget));
    default: {
      const std::string& nm = action_names[static_cast<size_t>(rng.below(static_cast<int>(action_names.size())))];
      FormulaPtr inner = random_formula(rng, depth - 1, atoms, agents, action_names, dyn_budget - 1);
      ActionRef ref{nm, ""};
      return pick == 8 ? f_dyn_dia(ref, inner) : f_dyn_box(ref, inner);
    }
  }
}

}  // namespace ieak
