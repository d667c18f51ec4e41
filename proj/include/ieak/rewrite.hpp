#pragma once

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ieak/core.hpp"
#include "ieak/enumerate.hpp"
#include "ieak/model.hpp"
#include "ieak/syntax.hpp"

namespace ieak {

struct RewriteStep {
  std::string rule;
  std::vector<int> path;  // child indices from the root to the rewritten node
  FormulaPtr before;
  FormulaPtr after;
};

namespace detail {

// One reduction at a dynamic node whose argument is static. The rule is
// picked by the argument's outermost connective; truth is matched before the
// generic implication case.
inline std::pair<FormulaPtr, std::string> apply_rule(const Formula& f, const Env& env) {
  ActionStructure act = env.resolve(f.act);
  int k = act.designated;
  const FormulaPtr& pre = act.pre[static_cast<size_t>(k)];
  const FormulaPtr& arg = f.lhs;
  bool dia = f.conn == Conn::DynDia;

  auto at_state = [&](int j) { return ActionRef{f.act.name, act.states[static_cast<size_t>(j)]}; };

  if (is_top(*arg)) return {dia ? pre : f_top(), dia ? "dia-true" : "box-true"};
  switch (arg->conn) {
    case Conn::Bot:
      return {dia ? f_bot() : f_neg(pre), dia ? "dia-false" : "box-false"};
    case Conn::Atom:
      return {dia ? f_and(pre, arg) : f_imp(pre, arg), dia ? "dia-atom" : "box-atom"};
    case Conn::Or: {
      FormulaPtr both = f_or(f_dyn_dia(f.act, arg->lhs), f_dyn_dia(f.act, arg->rhs));
      return {dia ? both : f_imp(pre, both), dia ? "dia-or" : "box-or"};
    }
    case Conn::And: {
      if (dia) return {f_and(f_dyn_dia(f.act, arg->lhs), f_dyn_dia(f.act, arg->rhs)), "dia-and"};
      return {f_and(f_dyn_box(f.act, arg->lhs), f_dyn_box(f.act, arg->rhs)), "box-and"};
    }
    case Conn::Imp: {
      FormulaPtr step = f_imp(f_dyn_dia(f.act, arg->lhs), f_dyn_dia(f.act, arg->rhs));
      return {dia ? f_and(pre, step) : step, dia ? "dia-imp" : "box-imp"};
    }
    case Conn::Dia: {
      const Agent& i = arg->agent;
      const Rel& r = act.relation(i);
      FormulaPtr big = f_bot();
      bool first = true;
      for (int j : mask_members(r.row(k))) {
        FormulaPtr piece = f_dia(i, f_dyn_dia(at_state(j), arg->lhs));
        big = first ? piece : f_or(big, piece);
        first = false;
      }
      return {dia ? f_and(pre, big) : f_imp(pre, big), dia ? "dia-dia" : "box-dia"};
    }
    case Conn::Box: {
      const Agent& i = arg->agent;
      const Rel& r = act.relation(i);
      FormulaPtr big = f_top();
      bool first = true;
      for (int j : mask_members(r.row(k))) {
        FormulaPtr piece = f_box(i, f_dyn_box(at_state(j), arg->lhs));
        big = first ? piece : f_and(big, piece);
        first = false;
      }
      return {dia ? f_and(pre, big) : f_imp(pre, big), dia ? "dia-box" : "box-box"};
    }
    default:
      throw Error("internal: dynamic argument is not static");
  }
}

inline std::optional<RewriteStep> reduce_at(const FormulaPtr& f, const Env& env, std::vector<int>& path,
                                            FormulaPtr& rebuilt) {
  switch (f->conn) {
    case Conn::Atom:
    case Conn::Bot:
      return std::nullopt;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp: {
      path.push_back(0);
      FormulaPtr nl;
      if (auto st = reduce_at(f->lhs, env, path, nl)) {
        rebuilt = f_binary(f->conn, nl, f->rhs);
        return st;
      }
      path.back() = 1;
      FormulaPtr nr;
      if (auto st = reduce_at(f->rhs, env, path, nr)) {
        rebuilt = f_binary(f->conn, f->lhs, nr);
        return st;
      }
      path.pop_back();
      return std::nullopt;
    }
    case Conn::Box:
    case Conn::Dia: {
      path.push_back(0);
      FormulaPtr nl;
      if (auto st = reduce_at(f->lhs, env, path, nl)) {
        rebuilt = f->conn == Conn::Box ? f_box(f->agent, nl) : f_dia(f->agent, nl);
        return st;
      }
      path.pop_back();
      return std::nullopt;
    }
    case Conn::DynDia:
    case Conn::DynBox: {
      path.push_back(0);
      FormulaPtr nl;
      if (auto st = reduce_at(f->lhs, env, path, nl)) {
        rebuilt = f->conn == Conn::DynDia ? f_dyn_dia(f->act, nl) : f_dyn_box(f->act, nl);
        return st;
      }
      path.pop_back();
      if (!is_static(f->lhs)) return std::nullopt;
      auto [after, rule] = apply_rule(*f, env);
      rebuilt = after;
      RewriteStep step;
      step.rule = rule;
      step.path = path;
      step.before = f;
      step.after = after;
      return step;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Leftmost-innermost single step. Returns the rewritten formula and the step
// record, or nothing when the formula is already static.
inline std::optional<std::pair<FormulaPtr, RewriteStep>> reduce_step(const FormulaPtr& f, const Env& env) {
  std::vector<int> path;
  FormulaPtr rebuilt;
  if (auto st = detail::reduce_at(f, env, path, rebuilt)) return std::make_pair(rebuilt, *st);
  return std::nullopt;
}

struct NormalizeResult {
  FormulaPtr formula;
  std::vector<RewriteStep> steps;
};

inline NormalizeResult normalize(FormulaPtr f, const Env& env, int max_steps = 10000, bool keep_trace = false) {
  env.validate_acyclic();
  NormalizeResult out;
  int n = 0;
  while (true) {
    auto st = reduce_step(f, env);
    if (!st) break;
    f = st->first;
    if (keep_trace) out.steps.push_back(st->second);
    if (++n > max_steps) throw LimitError("normalization exceeded the step limit");
  }
  if (!is_static(f)) throw Error("internal: normalization stopped on a dynamic formula");
  out.formula = f;
  return out;
}

struct EquivBounds {
  int max_worlds = 3;
  long long cap_per_stratum = 300;
  bool include_ordered = true;
  long long ordered_cap = 150;
};

struct EquivResult {
  bool equivalent = true;
  long long models_checked = 0;
  std::string countermodel;
};

namespace detail {

inline std::string describe_model(const Model& m) {
  std::ostringstream os;
  os << to_string(m.frame.kind) << " model, worlds";
  for (int w = 0; w < m.frame.n(); ++w) os << " " << m.frame.worlds[static_cast<size_t>(w)];
  os << "; order";
  for (int x = 0; x < m.frame.n(); ++x)
    for (int y = 0; y < m.frame.n(); ++y)
      if (x != y && m.frame.order.at(x, y))
        os << " " << m.frame.worlds[static_cast<size_t>(x)] << "<=" << m.frame.worlds[static_cast<size_t>(y)];
  for (size_t ai = 0; ai < m.frame.agents.size(); ++ai) {
    const Rel& r = m.frame.rel[ai];
    os << "; R[" << m.frame.agents[ai] << "]";
    for (int x = 0; x < m.frame.n(); ++x)
      for (int y = 0; y < m.frame.n(); ++y)
        if (r.at(x, y)) os << " (" << m.frame.worlds[static_cast<size_t>(x)] << "," << m.frame.worlds[static_cast<size_t>(y)] << ")";
  }
  for (const auto& [at, v] : m.val) {
    os << "; V(" << at << ") = {";
    bool first = true;
    for (int w : mask_members(v)) {
      if (!first) os << ",";
      os << m.frame.worlds[static_cast<size_t>(w)];
      first = false;
    }
    os << "}";
  }
  return os.str();
}

}  // namespace detail

// Semantic equivalence over bounded banks of classical and ordered models.
// The banks cover the agents and atoms of both formulas and of every
// reachable precondition; the first disagreeing pointed model is reported.
inline EquivResult equivalence_check(const FormulaPtr& f, const FormulaPtr& g, const Env& env,
                                     const EquivBounds& bounds = {}) {
  std::set<Atom> atom_set;
  std::set<Agent> agent_set;
  std::set<std::string> todo, seen;
  collect_atoms(f, atom_set);
  collect_atoms(g, atom_set);
  collect_agents(f, agent_set);
  collect_agents(g, agent_set);
  collect_action_names(f, todo);
  collect_action_names(g, todo);
  while (!todo.empty()) {
    std::string name = *todo.begin();
    todo.erase(todo.begin());
    if (!seen.insert(name).second) continue;
    for (const auto& pf : env.action(name).pre) {
      collect_atoms(pf, atom_set);
      collect_agents(pf, agent_set);
      collect_action_names(pf, todo);
    }
  }
  for (const auto& name : seen)
    for (const auto& [ag, r] : env.action(name).rel) {
      (void)r;
      agent_set.insert(ag);
    }
  if (agent_set.empty()) agent_set.insert("a");
  if (atom_set.empty()) atom_set.insert("p");

  EquivResult res;
  auto run = [&](ModelKind kind, long long cap) {
    if (!res.equivalent) return;
    for (int n = 1; n <= bounds.max_worlds && res.equivalent; ++n) {
      BankSpec spec;
      spec.kind = kind;
      spec.worlds = n;
      spec.agents = std::vector<Agent>(agent_set.begin(), agent_set.end());
      spec.atoms = std::vector<Atom>(atom_set.begin(), atom_set.end());
      spec.cap = cap;
      for_each_model(spec, [&](const Model& m) {
        if (!res.equivalent) return;
        Evaluator ev(m, env);
        Mask a = ev.eval(f), b = ev.eval(g);
        ++res.models_checked;
        if (a != b) {
          res.equivalent = false;
          Mask diff = a ^ b;
          int w = std::countr_zero(diff);
          res.countermodel = "world " + m.frame.worlds[static_cast<size_t>(w)] + " of " + detail::describe_model(m);
        }
      });
    }
  };
  run(ModelKind::Classical, bounds.cap_per_stratum);
  if (bounds.include_ordered) run(ModelKind::IK, bounds.ordered_cap);
  return res;
}

}  // namespace ieak
