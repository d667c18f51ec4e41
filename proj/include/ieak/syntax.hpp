#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ieak/core.hpp"

namespace ieak {

enum class Conn { Atom, Bot, And, Or, Imp, Box, Dia, DynDia, DynBox };

// Reference to a declared action; an empty point means its declared
// designated state, a nonempty point re-designates that state.
struct ActionRef {
  std::string name;
  std::string point;
  bool operator==(const ActionRef& o) const { return name == o.name && point == o.point; }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable tree. Unary connectives use lhs only. Negation, truth,
// equivalence and the everybody-knows macro are expanded away at
// construction, so downstream code handles exactly these nine forms.
struct Formula {
  Conn conn;
  Atom atom;       // Atom
  Agent agent;     // Box, Dia
  ActionRef act;   // DynDia, DynBox
  FormulaPtr lhs;
  FormulaPtr rhs;  // And, Or, Imp
};

inline FormulaPtr f_atom(Atom a) {
  auto f = std::make_shared<Formula>();
  f->conn = Conn::Atom;
  f->atom = std::move(a);
  return f;
}

inline FormulaPtr f_bot() {
  static const FormulaPtr bot = [] {
    auto f = std::make_shared<Formula>();
    f->conn = Conn::Bot;
    return f;
  }();
  return bot;
}

inline FormulaPtr f_binary(Conn c, FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->conn = c;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

inline FormulaPtr f_and(FormulaPtr l, FormulaPtr r) { return f_binary(Conn::And, std::move(l), std::move(r)); }
inline FormulaPtr f_or(FormulaPtr l, FormulaPtr r) { return f_binary(Conn::Or, std::move(l), std::move(r)); }
inline FormulaPtr f_imp(FormulaPtr l, FormulaPtr r) { return f_binary(Conn::Imp, std::move(l), std::move(r)); }

inline FormulaPtr f_top() {
  static const FormulaPtr top = f_imp(f_bot(), f_bot());
  return top;
}

inline FormulaPtr f_neg(FormulaPtr x) { return f_imp(std::move(x), f_bot()); }

inline FormulaPtr f_iff(FormulaPtr l, FormulaPtr r) {
  return f_and(f_imp(l, r), f_imp(r, l));
}

inline FormulaPtr f_box(Agent i, FormulaPtr x) {
  auto f = std::make_shared<Formula>();
  f->conn = Conn::Box;
  f->agent = std::move(i);
  f->lhs = std::move(x);
  return f;
}

inline FormulaPtr f_dia(Agent i, FormulaPtr x) {
  auto f = std::make_shared<Formula>();
  f->conn = Conn::Dia;
  f->agent = std::move(i);
  f->lhs = std::move(x);
  return f;
}

inline FormulaPtr f_dyn(Conn c, ActionRef ref, FormulaPtr x) {
  auto f = std::make_shared<Formula>();
  f->conn = c;
  f->act = std::move(ref);
  f->lhs = std::move(x);
  return f;
}

inline FormulaPtr f_dyn_dia(ActionRef ref, FormulaPtr x) { return f_dyn(Conn::DynDia, std::move(ref), std::move(x)); }
inline FormulaPtr f_dyn_box(ActionRef ref, FormulaPtr x) { return f_dyn(Conn::DynBox, std::move(ref), std::move(x)); }

// Everybody-knows over the declared agent list, folded left.
inline FormulaPtr f_everyone(const std::vector<Agent>& agents, const FormulaPtr& x) {
  if (agents.empty()) throw InputError("everybody-knows macro needs a nonempty agent list");
  FormulaPtr acc;
  for (const auto& i : agents) {
    FormulaPtr b = f_box(i, x);
    acc = acc ? f_and(acc, b) : b;
  }
  return acc;
}

inline bool is_bot(const Formula& f) { return f.conn == Conn::Bot; }
inline bool is_top(const Formula& f) {
  return f.conn == Conn::Imp && f.lhs->conn == Conn::Bot && f.rhs->conn == Conn::Bot;
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (a->conn != b->conn) return false;
  switch (a->conn) {
    case Conn::Atom: return a->atom == b->atom;
    case Conn::Bot: return true;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp: return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case Conn::Box:
    case Conn::Dia: return a->agent == b->agent && equal(a->lhs, b->lhs);
    case Conn::DynDia:
    case Conn::DynBox: return a->act == b->act && equal(a->lhs, b->lhs);
  }
  return false;
}

inline bool is_static(const FormulaPtr& f) {
  switch (f->conn) {
    case Conn::Atom:
    case Conn::Bot: return true;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp: return is_static(f->lhs) && is_static(f->rhs);
    case Conn::Box:
    case Conn::Dia: return is_static(f->lhs);
    case Conn::DynDia:
    case Conn::DynBox: return false;
  }
  return false;
}

inline int formula_size(const FormulaPtr& f) {
  switch (f->conn) {
    case Conn::Atom:
    case Conn::Bot: return 1;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp: return 1 + formula_size(f->lhs) + formula_size(f->rhs);
    default: return 1 + formula_size(f->lhs);
  }
}

inline int formula_depth(const FormulaPtr& f) {
  switch (f->conn) {
    case Conn::Atom:
    case Conn::Bot: return 1;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp: return 1 + std::max(formula_depth(f->lhs), formula_depth(f->rhs));
    default: return 1 + formula_depth(f->lhs);
  }
}

inline void collect_atoms(const FormulaPtr& f, std::set<Atom>& out) {
  switch (f->conn) {
    case Conn::Atom: out.insert(f->atom); return;
    case Conn::Bot: return;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      collect_atoms(f->lhs, out);
      collect_atoms(f->rhs, out);
      return;
    default: collect_atoms(f->lhs, out); return;
  }
}

inline void collect_agents(const FormulaPtr& f, std::set<Agent>& out) {
  switch (f->conn) {
    case Conn::Atom:
    case Conn::Bot: return;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      collect_agents(f->lhs, out);
      collect_agents(f->rhs, out);
      return;
    case Conn::Box:
    case Conn::Dia:
      out.insert(f->agent);
      collect_agents(f->lhs, out);
      return;
    default: collect_agents(f->lhs, out); return;
  }
}

inline void collect_action_names(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->conn) {
    case Conn::Atom:
    case Conn::Bot: return;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      collect_action_names(f->lhs, out);
      collect_action_names(f->rhs, out);
      return;
    case Conn::Box:
    case Conn::Dia: collect_action_names(f->lhs, out); return;
    case Conn::DynDia:
    case Conn::DynBox:
      out.insert(f->act.name);
      collect_action_names(f->lhs, out);
      return;
  }
}

// Finite action structure: pointed state set with one relation per agent
// and one precondition formula per state.
struct ActionStructure {
  std::string name;
  std::vector<std::string> states;
  int designated = 0;
  std::map<Agent, Rel> rel;
  std::vector<FormulaPtr> pre;

  int state_count() const { return static_cast<int>(states.size()); }

  int state_index(const std::string& s) const {
    for (int i = 0; i < state_count(); ++i)
      if (states[i] == s) return i;
    throw InputError("action '" + name + "' has no state '" + s + "'");
  }

  const Rel& relation(const Agent& i) const {
    auto it = rel.find(i);
    if (it == rel.end()) throw InputError("action '" + name + "' has no relation for agent '" + i + "'");
    return it->second;
  }

  ActionStructure with_designated(int j) const {
    ActionStructure a = *this;
    a.designated = j;
    return a;
  }
};

// Shared declaration context: the agent set and the named actions that
// formulas may reference.
struct Env {
  std::vector<Agent> agents;
  std::map<std::string, ActionStructure> actions;

  bool has_action(const std::string& n) const { return actions.count(n) != 0; }

  const ActionStructure& action(const std::string& n) const {
    auto it = actions.find(n);
    if (it == actions.end()) throw InputError("unknown action '" + n + "'");
    return it->second;
  }

  // The referenced action with its designation shifted to ref.point.
  ActionStructure resolve(const ActionRef& ref) const {
    const ActionStructure& a = action(ref.name);
    if (ref.point.empty()) return a;
    return a.with_designated(a.state_index(ref.point));
  }

  void add_action(ActionStructure a) {
    if (a.states.empty()) throw InputError("action '" + a.name + "' has no states");
    if (a.designated < 0 || a.designated >= a.state_count())
      throw InputError("action '" + a.name + "' designates a missing state");
    if (static_cast<int>(a.pre.size()) != a.state_count())
      throw InputError("action '" + a.name + "' needs one precondition per state");
    std::set<std::string> seen(a.states.begin(), a.states.end());
    if (static_cast<int>(seen.size()) != a.state_count())
      throw InputError("action '" + a.name + "' has duplicate state names");
    for (const auto& [agent, r] : a.rel)
      if (r.n() != a.state_count())
        throw InputError("action '" + a.name + "': relation for '" + agent + "' has wrong carrier");
    actions[a.name] = std::move(a);
  }

  // Precondition references must be acyclic so that evaluation and
  // rewriting terminate.
  void validate_acyclic() const {
    std::map<std::string, int> state;  // 0 new, 1 open, 2 done
    for (const auto& [n, a] : actions) (void)a, state[n] = 0;
    std::vector<std::string> stack;
    auto visit = [&](auto&& self, const std::string& n) -> void {
      auto it = state.find(n);
      if (it == state.end()) throw InputError("unknown action '" + n + "' referenced in a precondition");
      if (it->second == 1) {
        std::string cyc;
        for (const auto& s : stack) cyc += s + " -> ";
        throw InputError("action preconditions form a cycle: " + cyc + n);
      }
      if (it->second == 2) return;
      it->second = 1;
      stack.push_back(n);
      std::set<std::string> refs;
      for (const auto& p : action(n).pre) collect_action_names(p, refs);
      for (const auto& r : refs) self(self, r);
      stack.pop_back();
      it->second = 2;
    };
    for (const auto& [n, a] : actions) (void)a, visit(visit, n);
  }
};

// ---------------------------------------------------------------------------
// Concrete syntax.
//
//   formula  := imp ( "<->" formula )?
//   imp      := or ( "->" imp )?
//   or       := and ( "|" and )*
//   and      := unary ( "&" unary )*
//   unary    := "~" unary | "box" ID unary | "dia" ID unary | "E" unary
//             | "[" actref "]" unary | "<" actref ">" unary | primary
//   primary  := "false" | "true" | ID | "(" formula ")"
//   actref   := ID ( "@" ID )?
//
// "<->" and "->" associate to the right; "&" and "|" fold to the left.

namespace detail {

struct Token {
  enum Kind { Ident, KwFalse, KwTrue, KwBox, KwDia, KwE, Tilde, Amp, Pipe, Arrow, Iff, LParen, RParen, LBrack, RBrack, LAngle, RAngle, At, End } kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    skip_ws();
    int l = line_, c = col_;
    if (pos_ >= src_.size()) return {Token::End, "", l, c};
    char ch = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string id;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        id += src_[pos_];
        advance();
      }
      if (id == "false") return {Token::KwFalse, id, l, c};
      if (id == "true") return {Token::KwTrue, id, l, c};
      if (id == "box") return {Token::KwBox, id, l, c};
      if (id == "dia") return {Token::KwDia, id, l, c};
      if (id == "E") return {Token::KwE, id, l, c};
      return {Token::Ident, id, l, c};
    }
    switch (ch) {
      case '~': advance(); return {Token::Tilde, "~", l, c};
      case '&': advance(); return {Token::Amp, "&", l, c};
      case '|': advance(); return {Token::Pipe, "|", l, c};
      case '(': advance(); return {Token::LParen, "(", l, c};
      case ')': advance(); return {Token::RParen, ")", l, c};
      case '[': advance(); return {Token::LBrack, "[", l, c};
      case ']': advance(); return {Token::RBrack, "]", l, c};
      case '>': advance(); return {Token::RAngle, ">", l, c};
      case '@': advance(); return {Token::At, "@", l, c};
      case '<':
        if (src_.compare(pos_, 3, "<->") == 0) {
          advance(); advance(); advance();
          return {Token::Iff, "<->", l, c};
        }
        advance();
        return {Token::LAngle, "<", l, c};
      case '-':
        if (src_.compare(pos_, 2, "->") == 0) {
          advance(); advance();
          return {Token::Arrow, "->", l, c};
        }
        throw ParseError("stray '-'", l, c);
      default:
        throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
    }
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& src, const Env& env) : lex_(src), env_(env) { shift(); }

  FormulaPtr parse() {
    FormulaPtr f = formula();
    expect(Token::End, "end of input");
    return f;
  }

 private:
  void shift() { tok_ = lex_.next(); }

  void expect(detail::Token::Kind k, const std::string& what) {
    if (tok_.kind != k)
      throw ParseError("expected " + what + ", found '" + (tok_.kind == Token::End ? "<end>" : tok_.text) + "'", tok_.line, tok_.col);
  }

  FormulaPtr formula() {
    FormulaPtr l = imp();
    if (tok_.kind == Token::Iff) {
      shift();
      FormulaPtr r = formula();
      return f_iff(std::move(l), std::move(r));
    }
    return l;
  }

  FormulaPtr imp() {
    FormulaPtr l = disj();
    if (tok_.kind == Token::Arrow) {
      shift();
      FormulaPtr r = imp();
      return f_imp(std::move(l), std::move(r));
    }
    return l;
  }

  FormulaPtr disj() {
    FormulaPtr l = conj();
    while (tok_.kind == Token::Pipe) {
      shift();
      l = f_or(std::move(l), conj());
    }
    return l;
  }

  FormulaPtr conj() {
    FormulaPtr l = unary();
    while (tok_.kind == Token::Amp) {
      shift();
      l = f_and(std::move(l), unary());
    }
    return l;
  }

  Agent agent_name() {
    expect(Token::Ident, "an agent name");
    Agent a = tok_.text;
    shift();
    return a;
  }

  ActionRef action_ref() {
    expect(Token::Ident, "an action name");
    ActionRef ref;
    ref.name = tok_.text;
    int l = tok_.line, c = tok_.col;
    shift();
    if (tok_.kind == Token::At) {
      shift();
      expect(Token::Ident, "a state name after '@'");
      ref.point = tok_.text;
      shift();
    }
    if (!env_.has_action(ref.name)) throw ParseError("unknown action '" + ref.name + "'", l, c);
    if (!ref.point.empty()) {
      const auto& st = env_.action(ref.name).states;
      if (std::find(st.begin(), st.end(), ref.point) == st.end())
        throw ParseError("action '" + ref.name + "' has no state '" + ref.point + "'", l, c);
    }
    return ref;
  }

  FormulaPtr unary() {
    switch (tok_.kind) {
      case Token::Tilde: {
        shift();
        return f_neg(unary());
      }
      case Token::KwBox: {
        shift();
        Agent a = agent_name();
        return f_box(std::move(a), unary());
      }
      case Token::KwDia: {
        shift();
        Agent a = agent_name();
        return f_dia(std::move(a), unary());
      }
      case Token::KwE: {
        int l = tok_.line, c = tok_.col;
        shift();
        if (env_.agents.empty()) throw ParseError("'E' needs a declared agent list", l, c);
        return f_everyone(env_.agents, unary());
      }
      case Token::LBrack: {
        shift();
        ActionRef ref = action_ref();
        expect(Token::RBrack, "']'");
        shift();
        return f_dyn_box(std::move(ref), unary());
      }
      case Token::LAngle: {
        shift();
        ActionRef ref = action_ref();
        expect(Token::RAngle, "'>'");
        shift();
        return f_dyn_dia(std::move(ref), unary());
      }
      default: return primary();
    }
  }

  FormulaPtr primary() {
    switch (tok_.kind) {
      case Token::KwFalse: shift(); return f_bot();
      case Token::KwTrue: shift(); return f_top();
      case Token::Ident: {
        Atom a = tok_.text;
        shift();
        return f_atom(std::move(a));
      }
      case Token::LParen: {
        shift();
        FormulaPtr f = formula();
        expect(Token::RParen, "')'");
        shift();
        return f;
      }
      default:
        throw ParseError("expected a formula, found '" + (tok_.kind == Token::End ? "<end>" : tok_.text) + "'", tok_.line, tok_.col);
    }
  }

  Lexer lex_;
  Token tok_;
  const Env& env_;
};

}  // namespace detail

inline FormulaPtr parse_formula(const std::string& text, const Env& env) {
  return detail::Parser(text, env).parse();
}

inline FormulaPtr parse_formula(const std::string& text) {
  Env empty;
  return parse_formula(text, empty);
}

// Printing uses minimal parentheses: parse_formula(print_formula(f)) == f.
namespace detail {

// 1: ->, 2: |, 3: &, 4: unary prefixes.
inline int out_prec(const Formula& f) {
  switch (f.conn) {
    case Conn::Imp: return is_top(f) ? 5 : 1;
    case Conn::Or: return 2;
    case Conn::And: return 3;
    case Conn::Box:
    case Conn::Dia:
    case Conn::DynDia:
    case Conn::DynBox: return 4;
    default: return 5;
  }
}

inline void print_rec(const Formula& f, int min_prec, std::string& out) {
  int p = out_prec(f);
  bool paren = p < min_prec;
  if (paren) out += '(';
  switch (f.conn) {
    case Conn::Atom: out += f.atom; break;
    case Conn::Bot: out += "false"; break;
    case Conn::Imp:
      if (is_top(f)) {
        out += "true";
        break;
      }
      print_rec(*f.lhs, 2, out);
      out += " -> ";
      print_rec(*f.rhs, 1, out);
      break;
    case Conn::Or:
      print_rec(*f.lhs, 2, out);
      out += " | ";
      print_rec(*f.rhs, 3, out);
      break;
    case Conn::And:
      print_rec(*f.lhs, 3, out);
      out += " & ";
      print_rec(*f.rhs, 4, out);
      break;
    case Conn::Box:
      out += "box " + f.agent + " ";
      print_rec(*f.lhs, 4, out);
      break;
    case Conn::Dia:
      out += "dia " + f.agent + " ";
      print_rec(*f.lhs, 4, out);
      break;
    case Conn::DynBox:
      out += "[" + f.act.name + (f.act.point.empty() ? "" : "@" + f.act.point) + "]";
      print_rec(*f.lhs, 4, out);
      break;
    case Conn::DynDia:
      out += "<" + f.act.name + (f.act.point.empty() ? "" : "@" + f.act.point) + ">";
      print_rec(*f.lhs, 4, out);
      break;
  }
  if (paren) out += ')';
}

}  // namespace detail

inline std::string print_formula(const FormulaPtr& f) {
  std::string out;
  detail::print_rec(*f, 0, out);
  return out;
}

}  // namespace ieak
