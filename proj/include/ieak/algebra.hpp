#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ieak/core.hpp"
#include "ieak/syntax.hpp"

namespace ieak {

// Finite Heyting algebra with one diamond/box pair per agent, optionally a
// tense pair per agent. Elements are 0-based indices local to the algebra.
// Implementations either tabulate the operations or compute them from a
// structured description, so sizes are bounded per implementation.
class AlgebraBase {
 public:
  virtual ~AlgebraBase() = default;

  virtual long long size() const = 0;
  virtual int bot() const = 0;
  virtual int top() const = 0;
  virtual bool leq(int x, int y) const = 0;
  virtual int meet(int x, int y) const = 0;
  virtual int join(int x, int y) const = 0;
  virtual int imp(int x, int y) const = 0;
  virtual const std::vector<Agent>& agents() const = 0;
  virtual int dia(int agent, int x) const = 0;
  virtual int box(int agent, int x) const = 0;
  virtual bool has_tense() const = 0;
  virtual int black_dia(int agent, int x) const = 0;
  virtual int black_box(int agent, int x) const = 0;
  virtual std::string element_name(int x) const = 0;

  int neg(int x) const { return imp(x, bot()); }

  int agent_index(const Agent& a) const {
    const auto& ag = agents();
    for (size_t i = 0; i < ag.size(); ++i)
      if (ag[i] == a) return static_cast<int>(i);
    throw InputError("algebra has no agent '" + a + "'");
  }

  int isize() const {
    long long s = size();
    return static_cast<int>(s);
  }
};

using Alg = std::shared_ptr<const AlgebraBase>;

constexpr int kMaxTableAlgebra = 2048;
constexpr long long kMaxStructuredAlgebra = 1LL << 26;

// Fully tabulated algebra. Trusted constructor: the caller guarantees the
// tables define a Heyting algebra (used by the downset construction and by
// validated loaders).
class TableAlgebra final : public AlgebraBase {
 public:
  TableAlgebra(std::vector<std::string> names, std::vector<char> leq, std::vector<int> meet,
               std::vector<int> join, std::vector<int> imp, int bot, int top,
               std::vector<Agent> agents, std::vector<std::vector<int>> dia,
               std::vector<std::vector<int>> box)
      : names_(std::move(names)),
        n_(static_cast<int>(names_.size())),
        leq_(std::move(leq)),
        meet_(std::move(meet)),
        join_(std::move(join)),
        imp_(std::move(imp)),
        bot_(bot),
        top_(top),
        agents_(std::move(agents)),
        dia_(std::move(dia)),
        box_(std::move(box)) {}

  long long size() const override { return n_; }
  int bot() const override { return bot_; }
  int top() const override { return top_; }
  bool leq(int x, int y) const override { return leq_[static_cast<size_t>(x) * n_ + y] != 0; }
  int meet(int x, int y) const override { return meet_[static_cast<size_t>(x) * n_ + y]; }
  int join(int x, int y) const override { return join_[static_cast<size_t>(x) * n_ + y]; }
  int imp(int x, int y) const override { return imp_[static_cast<size_t>(x) * n_ + y]; }
  const std::vector<Agent>& agents() const override { return agents_; }
  int dia(int agent, int x) const override { return dia_[agent][x]; }
  int box(int agent, int x) const override { return box_[agent][x]; }
  bool has_tense() const override { return !bdia_.empty(); }
  int black_dia(int agent, int x) const override {
    if (!has_tense()) throw InputError("algebra carries no tense operators");
    return bdia_[agent][x];
  }
  int black_box(int agent, int x) const override {
    if (!has_tense()) throw InputError("algebra carries no tense operators");
    return bbox_[agent][x];
  }
  std::string element_name(int x) const override { return names_[x]; }

  void set_tense(std::vector<std::vector<int>> bdia, std::vector<std::vector<int>> bbox) {
    bdia_ = std::move(bdia);
    bbox_ = std::move(bbox);
  }

 private:
  std::vector<std::string> names_;
  int n_;
  std::vector<char> leq_;
  std::vector<int> meet_, join_, imp_;
  int bot_, top_;
  std::vector<Agent> agents_;
  std::vector<std::vector<int>> dia_, box_;
  std::vector<std::vector<int>> bdia_, bbox_;
};

// Validating construction from an order plus modal tables. All lattice and
// Heyting witnesses are derived; violations are reported, not guessed around.
struct AlgebraAnalysis {
  CheckReport report;
  std::shared_ptr<TableAlgebra> algebra;  // null unless report.ok()
};

inline AlgebraAnalysis analyze_order(const std::vector<std::string>& names, std::vector<char> leq,
                                     std::vector<Agent> agents, std::vector<std::vector<int>> dia,
                                     std::vector<std::vector<int>> box) {
  AlgebraAnalysis out;
  CheckReport& rep = out.report;
  int n = static_cast<int>(names.size());
  if (n == 0) {
    rep.note("algebra: empty carrier");
    return out;
  }
  if (n > kMaxTableAlgebra) {
    rep.note("algebra: carrier exceeds " + std::to_string(kMaxTableAlgebra) + " elements");
    return out;
  }
  auto le = [&](int x, int y) { return leq[static_cast<size_t>(x) * n + y] != 0; };

  for (int x = 0; x < n; ++x)
    if (!le(x, x)) rep.note("order: not reflexive at " + names[x]);
  for (int x = 0; x < n && rep.ok(); ++x)
    for (int y = 0; y < n; ++y) {
      if (x != y && le(x, y) && le(y, x)) {
        rep.note("order: " + names[x] + " and " + names[y] + " are mutually below each other");
        break;
      }
    }
  for (int x = 0; x < n && rep.ok(); ++x)
    for (int y = 0; y < n; ++y)
      if (le(x, y))
        for (int z = 0; z < n; ++z)
          if (le(y, z) && !le(x, z)) {
            rep.note("order: not transitive via " + names[x] + " <= " + names[y] + " <= " + names[z]);
            x = n;
            y = n;
            break;
          }
  if (!rep.ok()) return out;

  int bot = -1, top = -1;
  for (int x = 0; x < n; ++x) {
    bool is_bot = true, is_top = true;
    for (int y = 0; y < n; ++y) {
      is_bot = is_bot && le(x, y);
      is_top = is_top && le(y, x);
    }
    if (is_bot) bot = x;
    if (is_top) top = x;
  }
  if (bot < 0) rep.note("order: no least element");
  if (top < 0) rep.note("order: no greatest element");
  if (!rep.ok()) return out;

  std::vector<int> meet(static_cast<size_t>(n) * n, -1), join(static_cast<size_t>(n) * n, -1);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      int m = -1;
      for (int z = 0; z < n; ++z)
        if (le(z, x) && le(z, y) && (m < 0 || le(m, z))) m = z;
      for (int z = 0; z < n && m >= 0; ++z)
        if (le(z, x) && le(z, y) && !le(z, m)) m = -1;
      if (m < 0) {
        rep.note("order: no meet for " + names[x] + ", " + names[y]);
        return out;
      }
      meet[static_cast<size_t>(x) * n + y] = m;
      int j = -1;
      for (int z = 0; z < n; ++z)
        if (le(x, z) && le(y, z) && (j < 0 || le(z, j))) j = z;
      for (int z = 0; z < n && j >= 0; ++z)
        if (le(x, z) && le(y, z) && !le(j, z)) j = -1;
      if (j < 0) {
        rep.note("order: no join for " + names[x] + ", " + names[y]);
        return out;
      }
      join[static_cast<size_t>(x) * n + y] = j;
    }

  // imp(x,y) = join of { z | z & x <= y }; residuation then certifies the
  // Heyting structure (and with it distributivity).
  std::vector<int> imp(static_cast<size_t>(n) * n, -1);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      int acc = bot;
      for (int z = 0; z < n; ++z)
        if (le(meet[static_cast<size_t>(z) * n + x], y)) acc = join[static_cast<size_t>(acc) * n + z];
      imp[static_cast<size_t>(x) * n + y] = acc;
    }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      int r = imp[static_cast<size_t>(x) * n + y];
      for (int z = 0; z < n; ++z) {
        bool lhs = le(meet[static_cast<size_t>(z) * n + x], y);
        bool rhs = le(z, r);
        if (lhs != rhs) {
          rep.note("not residuated: witness x=" + names[z] + " y=" + names[x] + " z=" + names[y]);
          return out;
        }
      }
    }

  if (dia.size() != agents.size() || box.size() != agents.size()) {
    rep.note("algebra: one diamond and one box per agent expected");
    return out;
  }
  for (size_t a = 0; a < agents.size(); ++a) {
    if (static_cast<int>(dia[a].size()) != n || static_cast<int>(box[a].size()) != n) {
      rep.note("algebra: modal table for '" + agents[a] + "' is not total");
      return out;
    }
    for (int x = 0; x < n; ++x)
      if (dia[a][x] < 0 || dia[a][x] >= n || box[a][x] < 0 || box[a][x] >= n) {
        rep.note("algebra: modal table for '" + agents[a] + "' maps outside the carrier");
        return out;
      }
  }

  out.algebra = std::make_shared<TableAlgebra>(names, std::move(leq), std::move(meet), std::move(join),
                                               std::move(imp), bot, top, std::move(agents), std::move(dia),
                                               std::move(box));
  return out;
}

inline std::shared_ptr<TableAlgebra> algebra_from_order(const std::vector<std::string>& names,
                                                        std::vector<char> leq, std::vector<Agent> agents,
                                                        std::vector<std::vector<int>> dia,
                                                        std::vector<std::vector<int>> box) {
  AlgebraAnalysis a = analyze_order(names, std::move(leq), std::move(agents), std::move(dia), std::move(box));
  if (!a.report.ok()) throw InputError("not a Heyting algebra with operators:\n" + a.report.to_string());
  return a.algebra;
}

// Largest x with x & y <= z, computed by scanning; the generic residuation
// witness used by tests and by table derivation.
inline int heyting_imp(const AlgebraBase& a, int y, int z) {
  int acc = a.bot();
  for (int x = 0; x < a.isize(); ++x)
    if (a.leq(a.meet(x, y), z)) acc = a.join(acc, x);
  return acc;
}

// FSA / MHA law scan over all element pairs, or a deterministic sample of
// `pair_cap` pairs on larger carriers. Reports one witness per broken law
// per agent.
inline CheckReport check_fsa(const AlgebraBase& a, bool mha = false, long long pair_cap = 1LL << 22) {
  CheckReport rep;
  long long n = a.size();
  const auto& ags = a.agents();
  for (int ag = 0; ag < static_cast<int>(ags.size()); ++ag) {
    const std::string who = "agent " + ags[ag];
    if (a.dia(ag, a.bot()) != a.bot()) rep.note(who + ": dia bot differs from bot");
    if (a.box(ag, a.top()) != a.top()) rep.note(who + ": box top differs from top");
    bool dia_norm = true, box_norm = true, box_k = true, fs1 = true, fs2 = true;
    bool t_box = true, t_dia = true, s4_dia = true, s4_box = true, k_dia = true;
    strided_indices(n * n, pair_cap, [&](long long idx) {
      int x = static_cast<int>(idx % n), y = static_cast<int>(idx / n);
      auto at = [&] { return " at " + a.element_name(x) + ", " + a.element_name(y); };
      if (dia_norm && a.dia(ag, a.join(x, y)) != a.join(a.dia(ag, x), a.dia(ag, y))) {
        rep.note(who + ": dia does not preserve a join" + at());
        dia_norm = false;
      }
      if (box_norm && a.box(ag, a.meet(x, y)) != a.meet(a.box(ag, x), a.box(ag, y))) {
        rep.note(who + ": box does not preserve a meet" + at());
        box_norm = false;
      }
      if (box_k && !a.leq(a.box(ag, a.imp(x, y)), a.imp(a.box(ag, x), a.box(ag, y)))) {
        rep.note(who + ": box(x->y) <= box x -> box y fails" + at());
        box_k = false;
      }
      if (fs1 && !a.leq(a.dia(ag, a.imp(x, y)), a.imp(a.box(ag, x), a.dia(ag, y)))) {
        rep.note(who + ": dia(x->y) <= box x -> dia y fails" + at());
        fs1 = false;
      }
      if (fs2 && !a.leq(a.imp(a.dia(ag, x), a.box(ag, y)), a.box(ag, a.imp(x, y)))) {
        rep.note(who + ": dia x -> box y <= box(x->y) fails" + at());
        fs2 = false;
      }
      if (mha) {
        if (t_box && !a.leq(a.box(ag, x), x)) {
          rep.note(who + ": box x <= x fails at " + a.element_name(x));
          t_box = false;
        }
        if (t_dia && !a.leq(x, a.dia(ag, x))) {
          rep.note(who + ": x <= dia x fails at " + a.element_name(x));
          t_dia = false;
        }
        if (s4_dia && !a.leq(a.dia(ag, x), a.box(ag, a.dia(ag, x)))) {
          rep.note(who + ": dia x <= box dia x fails at " + a.element_name(x));
          s4_dia = false;
        }
        if (s4_box && !a.leq(a.dia(ag, a.box(ag, x)), a.box(ag, x))) {
          rep.note(who + ": dia box x <= box x fails at " + a.element_name(x));
          s4_box = false;
        }
        if (k_dia && !a.leq(a.box(ag, a.imp(x, y)), a.imp(a.dia(ag, x), a.dia(ag, y)))) {
          rep.note(who + ": box(x->y) <= dia x -> dia y fails" + at());
          k_dia = false;
        }
      }
    });
  }
  return rep;
}

// Both tense adjunction laws over sampled element pairs.
inline CheckReport check_adjunctions(const AlgebraBase& a, long long pair_cap = 1LL << 22) {
  CheckReport rep;
  if (!a.has_tense()) {
    rep.note("algebra carries no tense operators");
    return rep;
  }
  long long n = a.size();
  const auto& ags = a.agents();
  for (int ag = 0; ag < static_cast<int>(ags.size()); ++ag) {
    bool left = true, right = true;
    strided_indices(n * n, pair_cap, [&](long long idx) {
      int x = static_cast<int>(idx % n), y = static_cast<int>(idx / n);
      if (left && a.leq(a.black_dia(ag, x), y) != a.leq(x, a.box(ag, y))) {
        rep.note("agent " + ags[ag] + ": black dia -| box fails at " + a.element_name(x) + ", " + a.element_name(y));
        left = false;
      }
      if (right && a.leq(a.dia(ag, x), y) != a.leq(x, a.black_box(ag, y))) {
        rep.note("agent " + ags[ag] + ": dia -| black box fails at " + a.element_name(x) + ", " + a.element_name(y));
        right = false;
      }
    });
  }
  return rep;
}

// Black diamond is the left adjoint of box, black square the right adjoint
// of dia; both exist in any finite algebra with normal operators, and both
// adjunction laws are re-verified on every pair before returning.
inline std::shared_ptr<TableAlgebra> tense_adjoints(const TableAlgebra& a) {
  int n = a.isize();
  int na = static_cast<int>(a.agents().size());
  std::vector<std::vector<int>> bdia(na, std::vector<int>(n)), bbox(na, std::vector<int>(n));
  for (int ag = 0; ag < na; ++ag) {
    for (int x = 0; x < n; ++x) {
      int acc = a.top();
      for (int y = 0; y < n; ++y)
        if (a.leq(x, a.box(ag, y))) acc = a.meet(acc, y);
      bdia[ag][x] = acc;
      acc = a.bot();
      for (int y = 0; y < n; ++y)
        if (a.leq(a.dia(ag, y), x)) acc = a.join(acc, y);
      bbox[ag][x] = acc;
    }
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (a.leq(bdia[ag][x], y) != a.leq(x, a.box(ag, y)))
          throw Error("tense adjoint: black dia -| box fails for agent " + a.agents()[ag] +
                      " at " + a.element_name(x) + ", " + a.element_name(y));
        if (a.leq(a.dia(ag, x), y) != a.leq(x, bbox[ag][y]))
          throw Error("tense adjoint: dia -| black box fails for agent " + a.agents()[ag] +
                      " at " + a.element_name(x) + ", " + a.element_name(y));
      }
  }
  auto out = std::make_shared<TableAlgebra>(a);
  out->set_tense(std::move(bdia), std::move(bbox));
  return out;
}

// Action over an algebra: pointed state set, one relation per agent on the
// states, one precondition element per state.
struct AlgebraAction {
  std::string name;
  std::vector<std::string> states;
  int designated = 0;
  std::map<Agent, Rel> rel;
  std::vector<int> pre;

  int state_count() const { return static_cast<int>(states.size()); }

  const Rel& relation(const Agent& i) const {
    auto it = rel.find(i);
    if (it == rel.end()) throw InputError("action '" + name + "' has no relation for agent '" + i + "'");
    return it->second;
  }
};

// Pointwise power A^K with the action-relation modal lifts:
//   (dia f)(j) = Join { dia f(i) | j alpha i }    (bot when no successor)
//   (box f)(j) = Meet { box f(i) | j alpha i }    (top when no successor)
// and the tense lifts running along the converse relation. Elements are
// mixed-radix tuples, coordinate j in state order.
class ProductAlg final : public AlgebraBase {
 public:
  ProductAlg(Alg base, AlgebraAction act) : base_(std::move(base)), act_(std::move(act)) {
    K_ = act_.state_count();
    if (K_ <= 0) throw InputError("product needs at least one action state");
    if (K_ > kMaxActionStates) throw LimitError("product supports at most 16 action states");
    long long s = 1;
    for (int j = 0; j < K_; ++j) {
      s *= base_->size();
      if (s > kMaxStructuredAlgebra) throw LimitError("product algebra exceeds the size cap");
    }
    size_ = s;
    arel_.reserve(base_->agents().size());
    for (const auto& a : base_->agents()) {
      const Rel& r = act_.relation(a);
      if (r.n() != K_) throw InputError("action '" + act_.name + "': relation carrier mismatch");
      arel_.push_back(r);
    }
    for (int p : act_.pre)
      if (p < 0 || p >= base_->size()) throw InputError("action '" + act_.name + "': precondition outside the algebra");
    if (static_cast<int>(act_.pre.size()) != K_)
      throw InputError("action '" + act_.name + "': one precondition per state expected");
  }

  const Alg& base() const { return base_; }
  const AlgebraAction& action() const { return act_; }
  int states() const { return K_; }

  void decode(long long x, int* out) const {
    long long nb = base_->size();
    for (int j = 0; j < K_; ++j) {
      out[j] = static_cast<int>(x % nb);
      x /= nb;
    }
  }
  long long encode(const int* in) const {
    long long nb = base_->size(), x = 0;
    for (int j = K_ - 1; j >= 0; --j) x = x * nb + in[j];
    return x;
  }
  int coordinate(long long x, int j) const {
    long long nb = base_->size();
    for (int t = 0; t < j; ++t) x /= nb;
    return static_cast<int>(x % nb);
  }

  long long size() const override { return size_; }
  int bot() const override { return pointwise_const(base_->bot()); }
  int top() const override { return pointwise_const(base_->top()); }

  bool leq(int x, int y) const override {
    int bx[kMaxActionStates], by[kMaxActionStates];
    decode(x, bx);
    decode(y, by);
    for (int j = 0; j < K_; ++j)
      if (!base_->leq(bx[j], by[j])) return false;
    return true;
  }
  int meet(int x, int y) const override { return zip(x, y, [&](int a, int b) { return base_->meet(a, b); }); }
  int join(int x, int y) const override { return zip(x, y, [&](int a, int b) { return base_->join(a, b); }); }
  int imp(int x, int y) const override { return zip(x, y, [&](int a, int b) { return base_->imp(a, b); }); }

  const std::vector<Agent>& agents() const override { return base_->agents(); }

  int dia(int agent, int x) const override {
    int bx[kMaxActionStates], out[kMaxActionStates];
    decode(x, bx);
    for (int j = 0; j < K_; ++j) {
      int acc = base_->bot();
      Mask succ = arel_[agent].row(j);
      while (succ) {
        int i = std::countr_zero(succ);
        succ &= succ - 1;
        acc = base_->join(acc, base_->dia(agent, bx[i]));
      }
      out[j] = acc;
    }
    return static_cast<int>(encode(out));
  }

  int box(int agent, int x) const override {
    int bx[kMaxActionStates], out[kMaxActionStates];
    decode(x, bx);
    for (int j = 0; j < K_; ++j) {
      int acc = base_->top();
      Mask succ = arel_[agent].row(j);
      while (succ) {
        int i = std::countr_zero(succ);
        succ &= succ - 1;
        acc = base_->meet(acc, base_->box(agent, bx[i]));
      }
      out[j] = acc;
    }
    return static_cast<int>(encode(out));
  }

  bool has_tense() const override { return base_->has_tense(); }

  int black_dia(int agent, int x) const override {
    int bx[kMaxActionStates], out[kMaxActionStates];
    decode(x, bx);
    for (int j = 0; j < K_; ++j) {
      int acc = base_->bot();
      for (int i = 0; i < K_; ++i)
        if (arel_[agent].at(i, j)) acc = base_->join(acc, base_->black_dia(agent, bx[i]));
      out[j] = acc;
    }
    return static_cast<int>(encode(out));
  }

  int black_box(int agent, int x) const override {
    int bx[kMaxActionStates], out[kMaxActionStates];
    decode(x, bx);
    for (int j = 0; j < K_; ++j) {
      int acc = base_->top();
      for (int i = 0; i < K_; ++i)
        if (arel_[agent].at(i, j)) acc = base_->meet(acc, base_->black_box(agent, bx[i]));
      out[j] = acc;
    }
    return static_cast<int>(encode(out));
  }

  std::string element_name(int x) const override {
    int bx[kMaxActionStates];
    decode(x, bx);
    std::string s = "(";
    for (int j = 0; j < K_; ++j) {
      if (j) s += ",";
      s += base_->element_name(bx[j]);
    }
    return s + ")";
  }

  static constexpr int kMaxActionStates = 16;

 private:
  int pointwise_const(int b) const {
    int buf[kMaxActionStates];
    for (int j = 0; j < K_; ++j) buf[j] = b;
    return static_cast<int>(encode(buf));
  }

  template <class F>
  int zip(int x, int y, F&& f) const {
    int bx[kMaxActionStates], by[kMaxActionStates], out[kMaxActionStates];
    decode(x, bx);
    decode(y, by);
    for (int j = 0; j < K_; ++j) out[j] = f(bx[j], by[j]);
    return static_cast<int>(encode(out));
  }

  Alg base_;
  AlgebraAction act_;
  int K_ = 0;
  long long size_ = 0;
  std::vector<Rel> arel_;
};

// Pseudo-quotient of the product by f == g iff f & Pre = g & Pre, carried by
// the canonical representatives below Pre. Implication relativizes to Pre,
// box guards its argument with Pre; diamond and the tense lifts follow the
// same two patterns.
class QuotientAlg final : public AlgebraBase {
 public:
  explicit QuotientAlg(std::shared_ptr<const ProductAlg> prod) : prod_(std::move(prod)) {
    const AlgebraAction& act = prod_->action();
    const Alg& base = prod_->base();
    K_ = prod_->states();
    allowed_.resize(K_);
    pos_.assign(K_, std::vector<int>(static_cast<size_t>(base->size()), -1));
    long long s = 1;
    for (int j = 0; j < K_; ++j) {
      for (int b = 0; b < base->size(); ++b)
        if (base->leq(b, act.pre[j])) {
          pos_[j][b] = static_cast<int>(allowed_[j].size());
          allowed_[j].push_back(b);
        }
      s *= static_cast<long long>(allowed_[j].size());
      if (s > kMaxStructuredAlgebra) throw LimitError("quotient algebra exceeds the size cap");
    }
    size_ = s;
  }

  const std::shared_ptr<const ProductAlg>& product() const { return prod_; }

  // pi: product -> quotient, f |-> [f] via the representative f & Pre.
  int project(long long prod_elem) const {
    const Alg& base = prod_->base();
    const AlgebraAction& act = prod_->action();
    int bx[ProductAlg::kMaxActionStates], q[ProductAlg::kMaxActionStates];
    prod_->decode(prod_elem, bx);
    for (int j = 0; j < K_; ++j) q[j] = pos_[j][base->meet(bx[j], act.pre[j])];
    return encode_q(q);
  }

  // i': quotient -> product, the canonical representative itself.
  long long include(int q_elem) const {
    int bx[ProductAlg::kMaxActionStates];
    decode_base(q_elem, bx);
    return prod_->encode(bx);
  }

  // Coordinates of the representative, as base elements.
  void decode_base(int x, int* out) const {
    for (int j = 0; j < K_; ++j) {
      long long d = static_cast<long long>(allowed_[j].size());
      out[j] = allowed_[j][static_cast<size_t>(x % d)];
      x = static_cast<int>(x / d);
    }
  }

  long long size() const override { return size_; }
  int bot() const override {
    int q[ProductAlg::kMaxActionStates];
    for (int j = 0; j < K_; ++j) q[j] = pos_[j][prod_->base()->bot()];
    return encode_q(q);
  }
  int top() const override {
    int q[ProductAlg::kMaxActionStates];
    for (int j = 0; j < K_; ++j) q[j] = pos_[j][prod_->action().pre[j]];
    return encode_q(q);
  }

  bool leq(int x, int y) const override {
    int bx[ProductAlg::kMaxActionStates], by[ProductAlg::kMaxActionStates];
    decode_base(x, bx);
    decode_base(y, by);
    for (int j = 0; j < K_; ++j)
      if (!prod_->base()->leq(bx[j], by[j])) return false;
    return true;
  }

  int meet(int x, int y) const override {
    return zip(x, y, [&](int a, int b, int) { return prod_->base()->meet(a, b); });
  }
  int join(int x, int y) const override {
    return zip(x, y, [&](int a, int b, int) { return prod_->base()->join(a, b); });
  }
  int imp(int x, int y) const override {
    return zip(x, y, [&](int a, int b, int j) {
      const Alg& base = prod_->base();
      return base->meet(prod_->action().pre[j], base->imp(a, b));
    });
  }

  const std::vector<Agent>& agents() const override { return prod_->agents(); }

  int dia(int agent, int x) const override {
    long long d = prod_->dia(agent, static_cast<int>(include(x)));
    return project(d);
  }

  int box(int agent, int x) const override {
    return project(prod_->box(agent, guard(x)));
  }

  bool has_tense() const override { return prod_->has_tense(); }

  int black_dia(int agent, int x) const override {
    return project(prod_->black_dia(agent, static_cast<int>(include(x))));
  }

  int black_box(int agent, int x) const override {
    return project(prod_->black_box(agent, guard(x)));
  }

  std::string element_name(int x) const override {
    int bx[ProductAlg::kMaxActionStates];
    decode_base(x, bx);
    std::string s = "[";
    for (int j = 0; j < K_; ++j) {
      if (j) s += ",";
      s += prod_->base()->element_name(bx[j]);
    }
    return s + "]";
  }

 private:
  // Pre -> rep, as a product element: the box-type operators apply to it.
  int guard(int x) const {
    const Alg& base = prod_->base();
    const AlgebraAction& act = prod_->action();
    int bx[ProductAlg::kMaxActionStates];
    decode_base(x, bx);
    for (int j = 0; j < K_; ++j) bx[j] = base->imp(act.pre[j], bx[j]);
    return static_cast<int>(prod_->encode(bx));
  }

  template <class F>
  int zip(int x, int y, F&& f) const {
    int bx[ProductAlg::kMaxActionStates], by[ProductAlg::kMaxActionStates], q[ProductAlg::kMaxActionStates];
    decode_base(x, bx);
    decode_base(y, by);
    for (int j = 0; j < K_; ++j) q[j] = pos_[j][f(bx[j], by[j], j)];
    return encode_q(q);
  }

  int encode_q(const int* q) const {
    long long x = 0;
    for (int j = K_ - 1; j >= 0; --j) x = x * static_cast<long long>(allowed_[j].size()) + q[j];
    return static_cast<int>(x);
  }

  std::shared_ptr<const ProductAlg> prod_;
  int K_ = 0;
  long long size_ = 0;
  std::vector<std::vector<int>> allowed_;
  std::vector<std::vector<int>> pos_;
};

inline std::shared_ptr<const ProductAlg> product_algebra(Alg base, AlgebraAction act) {
  return std::make_shared<ProductAlg>(std::move(base), std::move(act));
}

inline std::shared_ptr<const QuotientAlg> quotient_algebra(std::shared_ptr<const ProductAlg> prod) {
  return std::make_shared<QuotientAlg>(std::move(prod));
}

}  // namespace ieak
