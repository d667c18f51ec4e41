#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ieak/core.hpp"
#include "ieak/syntax.hpp"

namespace ieak {

enum class ModelKind { Classical, IK, MIPC };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Classical: return "classical";
    case ModelKind::IK: return "ik";
    case ModelKind::MIPC: return "mipc";
  }
  return "?";
}

// Kripke frame with a partial order and one relation per agent. Classical
// frames carry the discrete order, so one set of evaluation clauses serves
// every kind.
struct Frame {
  ModelKind kind = ModelKind::Classical;
  std::vector<std::string> worlds;
  std::vector<Agent> agents;
  Rel order;
  std::vector<Rel> rel;

  int n() const { return static_cast<int>(worlds.size()); }

  int agent_index(const Agent& a) const {
    for (size_t i = 0; i < agents.size(); ++i)
      if (agents[i] == a) return static_cast<int>(i);
    throw InputError("unknown agent '" + a + "'");
  }

  bool has_agent(const Agent& a) const {
    for (const auto& x : agents)
      if (x == a) return true;
    return false;
  }
};

struct Model {
  Frame frame;
  std::map<Atom, Mask> val;

  Mask valuation(const Atom& p) const {
    auto it = val.find(p);
    return it == val.end() ? 0 : it->second;
  }
};

inline Mask up_closure(Mask x, const Rel& geq) { return geq.preimage(x); }

inline bool is_downset(Mask x, const Rel& geq) {
  // geq.row(w) = {v | v <= w}; a downset contains everything below its members.
  Mask todo = x;
  while (todo) {
    int w = std::countr_zero(todo);
    todo &= todo - 1;
    if (geq.row(w) & ~x) return false;
  }
  return true;
}

// Frame conditions: the order is a partial order (discrete when classical),
// and per agent R o >= is contained in >= o R, <= o R is contained in R o <=,
// and R = (>= o R) & (R o <=). MIPC frames additionally need R to be an
// equivalence.
inline CheckReport check_frame(const Frame& f) {
  CheckReport rep;
  if (f.rel.size() != f.agents.size()) {
    rep.note("frame: one relation per agent expected");
    return rep;
  }
  if (f.order.n() != f.n()) {
    rep.note("frame: order carrier does not match world count");
    return rep;
  }
  for (const auto& r : f.rel)
    if (r.n() != f.n()) {
      rep.note("frame: relation carrier does not match world count");
      return rep;
    }
  if (!f.order.reflexive()) rep.note("order: not reflexive");
  if (!f.order.transitive()) rep.note("order: not transitive");
  if (!f.order.antisymmetric()) rep.note("order: not antisymmetric");
  if (f.kind == ModelKind::Classical && f.order != Rel::identity(f.n()))
    rep.note("order: classical frames use the discrete order");
  if (!rep.ok()) return rep;

  Rel geq = f.order.converse();
  for (size_t i = 0; i < f.agents.size(); ++i) {
    const Rel& r = f.rel[i];
    const std::string& a = f.agents[i];
    if (!r.compose(geq).subset_of(geq.compose(r)))
      rep.note("agent " + a + ": R o >= not contained in >= o R");
    if (!f.order.compose(r).subset_of(r.compose(f.order)))
      rep.note("agent " + a + ": <= o R not contained in R o <=");
    if (geq.compose(r).intersect(r.compose(f.order)) != r)
      rep.note("agent " + a + ": R differs from (>= o R) & (R o <=)");
    if (f.kind == ModelKind::MIPC && !r.is_equivalence())
      rep.note("agent " + a + ": not an equivalence");
  }
  return rep;
}

inline CheckReport check_model(const Model& m) {
  CheckReport rep = check_frame(m.frame);
  Rel geq = m.frame.order.converse();
  for (const auto& [p, x] : m.val) {
    if (x & ~mask_universe(m.frame.n())) rep.note("valuation of " + p + ": not a subset of the worlds");
    if (!is_downset(x, geq)) rep.note("valuation of " + p + ": not a downset");
  }
  return rep;
}

// Product update along an action structure whose preconditions have already
// been evaluated (pre_sets[j] is the truth set of the j-th precondition).
// The intermediate model places |K| copies of each world, w-major; the
// updated model keeps the pairs whose world satisfies the state's
// precondition. Both are returned with explicit index maps.
struct UpdateResult {
  Model intermediate;
  Model updated;
  int K = 0;
  std::vector<std::pair<int, int>> pair_of;   // intermediate index -> (world, state)
  std::vector<int> survive_of_intermediate;   // intermediate index -> updated index or -1
  std::vector<int> embed;                     // updated index -> intermediate index

  int intermediate_index(int w, int j) const { return w * K + j; }
  int updated_index(int w, int j) const { return survive_of_intermediate[intermediate_index(w, j)]; }
};

inline Model coproduct_model(const Model& m, const ActionStructure& act) {
  int n = m.frame.n(), K = act.state_count();
  if (n * K > kMaxPoints) throw LimitError("intermediate model exceeds 64 worlds");
  Model out;
  out.frame.kind = m.frame.kind;
  out.frame.agents = m.frame.agents;
  out.frame.worlds.reserve(static_cast<size_t>(n) * K);
  for (int w = 0; w < n; ++w)
    for (int j = 0; j < K; ++j) out.frame.worlds.push_back("(" + m.frame.worlds[w] + "," + act.states[j] + ")");

  // (w,i) <= (v,j) iff w <= v and i = j.
  out.frame.order = Rel(n * K);
  for (int w = 0; w < n; ++w)
    for (int v = 0; v < n; ++v)
      if (m.frame.order.at(w, v))
        for (int j = 0; j < K; ++j) out.frame.order.set(w * K + j, v * K + j);

  // (w,i) R (v,j) iff w R v and i alpha j.
  out.frame.rel.reserve(m.frame.agents.size());
  for (size_t ai = 0; ai < m.frame.agents.size(); ++ai) {
    const Rel& r = m.frame.rel[ai];
    const Rel& alpha = act.relation(m.frame.agents[ai]);
    Rel pr(n * K);
    for (int w = 0; w < n; ++w)
      for (int v = 0; v < n; ++v)
        if (r.at(w, v))
          for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j)
              if (alpha.at(i, j)) pr.set(w * K + i, v * K + j);
    out.frame.rel.push_back(pr);
  }

  for (const auto& [p, x] : m.val) {
    Mask lifted = 0;
    for (int w = 0; w < n; ++w)
      if (mask_get(x, w))
        for (int j = 0; j < K; ++j) lifted |= mask_bit(w * K + j);
    out.val[p] = lifted;
  }
  return out;
}

inline UpdateResult product_update(const Model& m, const ActionStructure& act, const std::vector<Mask>& pre_sets) {
  int n = m.frame.n(), K = act.state_count();
  if (static_cast<int>(pre_sets.size()) != K)
    throw InputError("product update needs one precondition set per action state");
  UpdateResult res;
  res.K = K;
  res.intermediate = coproduct_model(m, act);
  res.pair_of.reserve(static_cast<size_t>(n) * K);
  res.survive_of_intermediate.assign(static_cast<size_t>(n) * K, -1);
  for (int w = 0; w < n; ++w)
    for (int j = 0; j < K; ++j) {
      res.pair_of.emplace_back(w, j);
      if (mask_get(pre_sets[j], w)) {
        res.survive_of_intermediate[w * K + j] = static_cast<int>(res.embed.size());
        res.embed.push_back(w * K + j);
      }
    }

  const Model& im = res.intermediate;
  Model& up = res.updated;
  up.frame.kind = m.frame.kind;
  up.frame.agents = m.frame.agents;
  for (int idx : res.embed) up.frame.worlds.push_back(im.frame.worlds[idx]);
  up.frame.order = im.frame.order.restrict_to(res.embed);
  for (const auto& r : im.frame.rel) up.frame.rel.push_back(r.restrict_to(res.embed));
  for (const auto& [p, x] : im.val) {
    Mask restricted = 0;
    for (size_t t = 0; t < res.embed.size(); ++t)
      if (mask_get(x, res.embed[t])) restricted |= mask_bit(static_cast<int>(t));
    up.val[p] = restricted;
  }
  return res;
}

// Evaluation. Truth sets are world masks; for ik and mipc models every
// computed set must be a downset, which is asserted after each clause.
// Updates are memoized per action name: the updated model does not depend
// on the designated state, only the pullback does.
class Evaluator {
 public:
  Evaluator(const Model& m, const Env& env) : m_(m), env_(env) {
    if (m.frame.kind != ModelKind::Classical) {
      geq_ = m.frame.order.converse();
      box_reach_.reserve(m.frame.rel.size());
      for (const auto& r : m.frame.rel) box_reach_.push_back(geq_.compose(r));
    }
  }

  const Model& model() const { return m_; }

  Mask eval(const FormulaPtr& f) {
    Mask w = mask_universe(m_.frame.n());
    Mask out = 0;
    switch (f->conn) {
      case Conn::Atom: out = m_.valuation(f->atom); break;
      case Conn::Bot: out = 0; break;
      case Conn::And: out = eval(f->lhs) & eval(f->rhs); break;
      case Conn::Or: out = eval(f->lhs) | eval(f->rhs); break;
      case Conn::Imp: out = imp_set(eval(f->lhs), eval(f->rhs)); break;
      case Conn::Dia: {
        int ai = m_.frame.agent_index(f->agent);
        out = m_.frame.rel[ai].preimage(eval(f->lhs));
        break;
      }
      case Conn::Box: {
        int ai = m_.frame.agent_index(f->agent);
        Mask x = eval(f->lhs);
        const Rel& reach = m_.frame.kind == ModelKind::Classical ? m_.frame.rel[ai] : box_reach_[ai];
        out = w & ~reach.preimage(w & ~x);
        break;
      }
      case Conn::DynDia:
      case Conn::DynBox: {
        ActionStructure act = env_.resolve(f->act);
        Mask pre_k = eval(act.pre[act.designated]);
        const UpdateResult& ur = update(f->act.name);
        Mask sub = subevaluator(f->act.name).eval(f->lhs);
        Mask back = 0;
        for (int v = 0; v < m_.frame.n(); ++v) {
          int t = ur.updated_index(v, act.designated);
          if (t >= 0 && mask_get(sub, t)) back |= mask_bit(v);
        }
        out = f->conn == Conn::DynDia ? (pre_k & back) : imp_set(pre_k, back);
        break;
      }
    }
    if (m_.frame.kind != ModelKind::Classical && !is_downset(out, geq_))
      throw Error("internal: evaluation produced a non-downset on an ordered model");
    return out;
  }

  // ((X & ~Y)^up)^c; with the discrete order this is the boolean implication.
  Mask imp_set(Mask x, Mask y) const {
    Mask w = mask_universe(m_.frame.n());
    if (m_.frame.kind == ModelKind::Classical) return w & (~x | y);
    return w & ~up_closure(x & ~y & w, geq_);
  }

  const UpdateResult& update(const std::string& action_name) {
    auto it = updates_.find(action_name);
    if (it != updates_.end()) return *it->second;
    const ActionStructure& act = env_.action(action_name);
    for (const auto& a : m_.frame.agents) (void)act.relation(a);
    std::vector<Mask> pre_sets;
    pre_sets.reserve(act.pre.size());
    for (const auto& p : act.pre) pre_sets.push_back(eval(p));
    auto res = std::make_unique<UpdateResult>(product_update(m_, act, pre_sets));
    return *updates_.emplace(action_name, std::move(res)).first->second;
  }

  Evaluator& subevaluator(const std::string& action_name) {
    auto it = sub_.find(action_name);
    if (it != sub_.end()) return *it->second;
    const UpdateResult& ur = update(action_name);
    auto ev = std::make_unique<Evaluator>(ur.updated, env_);
    return *sub_.emplace(action_name, std::move(ev)).first->second;
  }

 private:
  const Model& m_;
  const Env& env_;
  Rel geq_;
  std::vector<Rel> box_reach_;  // (>= o R) per agent, ordered kinds only
  std::map<std::string, std::unique_ptr<UpdateResult>> updates_;
  std::map<std::string, std::unique_ptr<Evaluator>> sub_;
};

inline Mask evaluate(const Model& m, const Env& env, const FormulaPtr& f) {
  Evaluator ev(m, env);
  return ev.eval(f);
}

inline UpdateResult update_model(const Model& m, const Env& env, const ActionRef& ref) {
  Evaluator ev(m, env);
  UpdateResult copy = ev.update(ref.name);
  return copy;
}

}  // namespace ieak
