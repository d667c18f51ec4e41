#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ieak/algebra.hpp"
#include "ieak/core.hpp"
#include "ieak/syntax.hpp"

namespace ieak {

// Model over an algebra: one element per atom. Absent atoms read as bot,
// matching the empty-valuation default on the relational side.
struct AlgebraicModel {
  Alg alg;
  std::map<Atom, int> val;

  int valuation(const Atom& p) const {
    auto it = val.find(p);
    return it == val.end() ? alg->bot() : it->second;
  }
};

// Product-and-quotient update of an algebraic model. The updated valuation
// is the projection of the constant lift of the old one.
struct AlgebraicUpdate {
  AlgebraAction induced;
  std::shared_ptr<const ProductAlg> product;
  std::shared_ptr<const QuotientAlg> quotient;
  AlgebraicModel updated;
};

class AlgEvaluator {
 public:
  AlgEvaluator(const AlgebraicModel& m, const Env& env) : m_(m), env_(env) {}

  const AlgebraicModel& model() const { return m_; }

  int eval(const FormulaPtr& f) {
    const AlgebraBase& a = *m_.alg;
    switch (f->conn) {
      case Conn::Atom:
        return m_.valuation(f->atom);
      case Conn::Bot:
        return a.bot();
      case Conn::And:
        return a.meet(eval(f->lhs), eval(f->rhs));
      case Conn::Or:
        return a.join(eval(f->lhs), eval(f->rhs));
      case Conn::Imp:
        return a.imp(eval(f->lhs), eval(f->rhs));
      case Conn::Dia:
        return a.dia(a.agent_index(f->agent), eval(f->lhs));
      case Conn::Box:
        return a.box(a.agent_index(f->agent), eval(f->lhs));
      case Conn::DynDia:
      case Conn::DynBox: {
        ActionStructure act = env_.resolve(f->act);
        const AlgebraicUpdate& u = update(f->act.name);
        int k = act.designated;
        int pre_k = eval(act.pre[k]);
        int sub = subevaluator(f->act.name).eval(f->lhs);
        int pulled = u.product->coordinate(u.quotient->include(sub), k);
        return f->conn == Conn::DynDia ? a.meet(pre_k, pulled) : a.imp(pre_k, pulled);
      }
    }
    throw Error("internal: unhandled connective");
  }

  // Update by the named action; designation independent, so memoized by name.
  const AlgebraicUpdate& update(const std::string& name) {
    auto it = updates_.find(name);
    if (it != updates_.end()) return *it->second;
    const ActionStructure& act = env_.action(name);
    auto u = std::make_unique<AlgebraicUpdate>();
    u->induced.name = act.name;
    u->induced.states = act.states;
    u->induced.designated = act.designated;
    u->induced.rel = act.rel;
    for (const auto& ag : m_.alg->agents()) (void)act.relation(ag);
    u->induced.pre.reserve(act.pre.size());
    for (const auto& pf : act.pre) u->induced.pre.push_back(eval(pf));
    u->product = product_algebra(m_.alg, u->induced);
    u->quotient = quotient_algebra(u->product);
    u->updated.alg = u->quotient;
    int K = u->product->states();
    for (const auto& [atom, el] : m_.val) {
      std::vector<int> lift(static_cast<size_t>(K), el);
      long long prod_el = u->product->encode(lift.data());
      u->updated.val[atom] = u->quotient->project(prod_el);
    }
    auto [pos, ok] = updates_.emplace(name, std::move(u));
    (void)ok;
    return *pos->second;
  }

  AlgEvaluator& subevaluator(const std::string& name) {
    auto it = sub_.find(name);
    if (it != sub_.end()) return *it->second;
    const AlgebraicUpdate& u = update(name);
    auto [pos, ok] = sub_.emplace(name, std::make_unique<AlgEvaluator>(u.updated, env_));
    (void)ok;
    return *pos->second;
  }

 private:
  const AlgebraicModel& m_;
  const Env& env_;
  std::map<std::string, std::unique_ptr<AlgebraicUpdate>> updates_;
  std::map<std::string, std::unique_ptr<AlgEvaluator>> sub_;
};

inline int eval_algebraic(const AlgebraicModel& m, const Env& env, const FormulaPtr& f) {
  AlgEvaluator ev(m, env);
  return ev.eval(f);
}

// Induced algebra action of a syntactic action: preconditions evaluated in
// the given model.
inline AlgebraAction induced_action(const AlgebraicModel& m, const Env& env, const ActionStructure& act) {
  AlgEvaluator ev(m, env);
  AlgebraAction out;
  out.name = act.name;
  out.states = act.states;
  out.designated = act.designated;
  out.rel = act.rel;
  out.pre.reserve(act.pre.size());
  for (const auto& pf : act.pre) out.pre.push_back(ev.eval(pf));
  return out;
}

inline AlgebraicUpdate update_algebraic_model(const AlgebraicModel& m, const Env& env,
                                              const std::string& action_name) {
  AlgEvaluator ev(m, env);
  return ev.update(action_name);
}

// Validity: top under every assignment of algebra elements to the atoms of
// the formula. Assignment count is guarded; the first failing assignment is
// reported as a witness.
struct ValidityResult {
  bool valid = true;
  long long checked = 0;
  std::map<Atom, int> witness;
};

inline ValidityResult check_validity(const Alg& a, const Env& env, const FormulaPtr& f,
                                     long long cap = 10'000'000) {
  std::set<Atom> atom_set;
  collect_atoms(f, atom_set);
  std::set<std::string> acts, seen;
  collect_action_names(f, acts);
  while (!acts.empty()) {
    std::string name = *acts.begin();
    acts.erase(acts.begin());
    if (!seen.insert(name).second) continue;
    for (const auto& pf : env.action(name).pre) {
      collect_atoms(pf, atom_set);
      collect_action_names(pf, acts);
    }
  }
  std::vector<Atom> atoms(atom_set.begin(), atom_set.end());

  long long total = 1;
  for (size_t i = 0; i < atoms.size(); ++i) {
    total *= a->size();
    if (total > cap) throw LimitError("validity check: assignment space exceeds the cap");
  }

  ValidityResult res;
  std::vector<int> digits(atoms.size(), 0);
  for (long long t = 0; t < total; ++t) {
    AlgebraicModel m;
    m.alg = a;
    for (size_t i = 0; i < atoms.size(); ++i) m.val[atoms[i]] = digits[i];
    ++res.checked;
    if (eval_algebraic(m, env, f) != a->top()) {
      res.valid = false;
      for (size_t i = 0; i < atoms.size(); ++i) res.witness[atoms[i]] = digits[i];
      return res;
    }
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (++digits[i] < a->size()) break;
      digits[i] = 0;
    }
  }
  return res;
}

}  // namespace ieak
