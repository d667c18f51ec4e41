#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ieak/algebra.hpp"
#include "ieak/core.hpp"
#include "ieak/model.hpp"
#include "ieak/syntax.hpp"

namespace ieak {

using Json = nlohmann::json;

inline ModelKind parse_kind(const std::string& s) {
  if (s == "classical") return ModelKind::Classical;
  if (s == "ik") return ModelKind::IK;
  if (s == "mipc") return ModelKind::MIPC;
  throw InputError("unknown model kind '" + s + "' (expected classical, ik or mipc)");
}

namespace detail {

inline int name_index(const std::vector<std::string>& names, const std::string& name,
                      const std::string& what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InputError("unknown " + what + " '" + name + "'");
  return static_cast<int>(it - names.begin());
}

inline void require_unique(const std::vector<std::string>& names, const std::string& what) {
  std::vector<std::string> s = names;
  std::sort(s.begin(), s.end());
  auto it = std::adjacent_find(s.begin(), s.end());
  if (it != s.end()) throw InputError("duplicate " + what + " '" + *it + "'");
  for (const std::string& n : s)
    if (n.empty()) throw InputError("empty " + what + " name");
}

inline std::vector<std::string> string_list(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw InputError(what + " must contain only strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline Rel rel_from_pairs(const Json& j, const std::vector<std::string>& names,
                          const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of [from, to] pairs");
  Rel r(static_cast<int>(names.size()));
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
      throw InputError(what + " entries must be [from, to] name pairs");
    r.set(name_index(names, p[0].get<std::string>(), "name in " + what),
          name_index(names, p[1].get<std::string>(), "name in " + what));
  }
  return r;
}

inline Json rel_to_pairs(const Rel& r, const std::vector<std::string>& names) {
  Json out = Json::array();
  int n = static_cast<int>(names.size());
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (r.at(x, y)) out.push_back(Json::array({names[static_cast<size_t>(x)], names[static_cast<size_t>(y)]}));
  return out;
}

inline Json mask_to_names(Mask m, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (int w : mask_members(m)) out.push_back(names.at(static_cast<size_t>(w)));
  return out;
}

// Covers of a partial order, for rendering only.
inline bool is_cover(const Rel& order, int x, int y) {
  if (x == y || !order.at(x, y)) return false;
  for (int z = 0; z < order.n(); ++z)
    if (z != x && z != y && order.at(x, z) && order.at(z, y)) return false;
  return true;
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    Json j;
    in >> j;
    return j;
  } catch (const Json::exception& e) {
    throw InputError("invalid json in '" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

// Model schema:
//   {"kind": "classical|ik|mipc", "worlds": [..], "agents": [..],
//    "order": [["w","v"], ..], "relations": {"a": [["w","v"], ..], ..},
//    "valuation": {"p": ["w", ..], ..}}
// The order lists generators; it is closed reflexively and transitively on
// load and must come out antisymmetric. Agents without an entry under
// "relations" get the identity relation. Frame conditions are not enforced
// here; run the frame check for that.
inline Model model_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw InputError("model json must be an object");
    Model m;
    m.frame.kind = parse_kind(j.at("kind").get<std::string>());
    m.frame.worlds = detail::string_list(j.at("worlds"), "worlds");
    detail::require_unique(m.frame.worlds, "world");
    int n = m.frame.n();
    if (n == 0) throw InputError("model has no worlds");
    if (n > kMaxPoints) throw InputError("model exceeds " + std::to_string(kMaxPoints) + " worlds");
    m.frame.agents = detail::string_list(j.value("agents", Json::array()), "agents");
    detail::require_unique(m.frame.agents, "agent");

    if (j.contains("order")) {
      Rel gen = detail::rel_from_pairs(j.at("order"), m.frame.worlds, "order");
      m.frame.order = gen.reflexive_transitive_closure();
      if (!m.frame.order.is_partial_order())
        throw InputError("order generators close into a cycle; the order must be a partial order");
    } else {
      m.frame.order = Rel::identity(n);
    }

    m.frame.rel.assign(m.frame.agents.size(), Rel::identity(n));
    if (j.contains("relations")) {
      const Json& rels = j.at("relations");
      if (!rels.is_object()) throw InputError("relations must map agents to pair lists");
      for (const auto& [ag, pairs] : rels.items()) {
        int ai = detail::name_index(m.frame.agents, ag, "agent");
        m.frame.rel[static_cast<size_t>(ai)] = detail::rel_from_pairs(pairs, m.frame.worlds, "relation of " + ag);
      }
    }

    if (j.contains("valuation")) {
      const Json& val = j.at("valuation");
      if (!val.is_object()) throw InputError("valuation must map atoms to world lists");
      for (const auto& [atom, worlds] : val.items()) {
        Mask x = 0;
        for (const std::string& w : detail::string_list(worlds, "valuation of " + atom))
          x |= mask_bit(detail::name_index(m.frame.worlds, w, "world"));
        m.val[atom] = x;
      }
    }
    return m;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed model: ") + e.what());
  }
}

inline Json model_to_json(const Model& m) {
  Json j;
  j["kind"] = to_string(m.frame.kind);
  j["worlds"] = m.frame.worlds;
  j["agents"] = m.frame.agents;
  j["order"] = detail::rel_to_pairs(m.frame.order, m.frame.worlds);
  Json rels = Json::object();
  for (size_t ai = 0; ai < m.frame.agents.size(); ++ai)
    rels[m.frame.agents[ai]] = detail::rel_to_pairs(m.frame.rel[ai], m.frame.worlds);
  j["relations"] = rels;
  Json val = Json::object();
  for (const auto& [atom, x] : m.val) val[atom] = detail::mask_to_names(x, m.frame.worlds);
  j["valuation"] = val;
  return j;
}

// Action schema:
//   {"name": "alpha", "states": [..], "designated": "k",
//    "relations": {"a": [["k","l"], ..], ..},
//    "pre": {"k": "<formula>", ..}}
// Preconditions are parsed against `env`, so actions loaded earlier may
// appear inside them. "designated" defaults to the first state; every state
// needs a precondition.
inline ActionStructure action_from_json(const Json& j, const Env& env) {
  try {
    if (!j.is_object()) throw InputError("action json must be an object");
    ActionStructure a;
    a.name = j.at("name").get<std::string>();
    if (a.name.empty()) throw InputError("action name must not be empty");
    a.states = detail::string_list(j.at("states"), "states");
    detail::require_unique(a.states, "state");
    int k = a.state_count();
    if (k == 0) throw InputError("action '" + a.name + "' has no states");
    if (k > kMaxPoints) throw InputError("action exceeds " + std::to_string(kMaxPoints) + " states");
    a.designated = j.contains("designated")
                       ? detail::name_index(a.states, j.at("designated").get<std::string>(), "state")
                       : 0;

    if (j.contains("relations")) {
      const Json& rels = j.at("relations");
      if (!rels.is_object()) throw InputError("relations must map agents to pair lists");
      for (const auto& [ag, pairs] : rels.items())
        a.rel[ag] = detail::rel_from_pairs(pairs, a.states, "relation of " + ag);
    }

    const Json& pre = j.at("pre");
    if (!pre.is_object()) throw InputError("pre must map states to formulas");
    a.pre.resize(static_cast<size_t>(k));
    std::vector<bool> seen(static_cast<size_t>(k), false);
    for (const auto& [state, text] : pre.items()) {
      int si = detail::name_index(a.states, state, "state");
      if (!text.is_string()) throw InputError("precondition of '" + state + "' must be a formula string");
      a.pre[static_cast<size_t>(si)] = parse_formula(text.get<std::string>(), env);
      seen[static_cast<size_t>(si)] = true;
    }
    for (int s = 0; s < k; ++s)
      if (!seen[static_cast<size_t>(s)])
        throw InputError("action '" + a.name + "' has no precondition for state '" +
                         a.states[static_cast<size_t>(s)] + "'");
    return a;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed action: ") + e.what());
  }
}

inline Json action_to_json(const ActionStructure& a) {
  Json j;
  j["name"] = a.name;
  j["states"] = a.states;
  j["designated"] = a.states.at(static_cast<size_t>(a.designated));
  Json rels = Json::object();
  for (const auto& [ag, r] : a.rel) rels[ag] = detail::rel_to_pairs(r, a.states);
  j["relations"] = rels;
  Json pre = Json::object();
  for (int s = 0; s < a.state_count(); ++s)
    pre[a.states[static_cast<size_t>(s)]] = print_formula(a.pre[static_cast<size_t>(s)]);
  j["pre"] = pre;
  return j;
}

// Algebra schema:
//   {"elements": [..], "leq": [["x","y"], ..], "agents": [..],
//    "dia": {"a": {"x": "y", ..}, ..}, "box": {"a": {..}, ..}}
// "leq" lists generators and is closed reflexively and transitively. The
// result is handed to the order analyzer, which reports whether it is a
// bounded distributive lattice with a relative pseudocomplement and
// well-formed operator tables.
struct AlgebraSpec {
  std::vector<std::string> names;
  std::vector<char> leq;
  std::vector<Agent> agents;
  std::vector<std::vector<int>> dia, box;
};

inline AlgebraSpec algebra_spec_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw InputError("algebra json must be an object");
    AlgebraSpec spec;
    spec.names = detail::string_list(j.at("elements"), "elements");
    detail::require_unique(spec.names, "element");
    int n = static_cast<int>(spec.names.size());
    if (n == 0) throw InputError("algebra has no elements");
    if (n > kMaxTableAlgebra) throw InputError("algebra exceeds " + std::to_string(kMaxTableAlgebra) + " elements");
    Rel ord = detail::rel_from_pairs(j.value("leq", Json::array()), spec.names, "leq")
                  .reflexive_transitive_closure();
    spec.leq.assign(static_cast<size_t>(n) * static_cast<size_t>(n), 0);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        spec.leq[static_cast<size_t>(x) * static_cast<size_t>(n) + static_cast<size_t>(y)] =
            ord.at(x, y) ? 1 : 0;
    spec.agents = detail::string_list(j.value("agents", Json::array()), "agents");
    detail::require_unique(spec.agents, "agent");
    for (const Agent& ag : spec.agents) {
      for (const char* table : {"dia", "box"}) {
        const Json& t = j.at(table).at(ag);
        if (!t.is_object()) throw InputError(std::string(table) + " of " + ag + " must map elements to elements");
        std::vector<int> f(static_cast<size_t>(n), -1);
        for (const auto& [el, img] : t.items()) {
          if (!img.is_string()) throw InputError(std::string(table) + " images must be element names");
          f[static_cast<size_t>(detail::name_index(spec.names, el, "element"))] =
              detail::name_index(spec.names, img.get<std::string>(), "element");
        }
        for (int x = 0; x < n; ++x)
          if (f[static_cast<size_t>(x)] < 0)
            throw InputError(std::string(table) + " of " + ag + " misses element '" +
                             spec.names[static_cast<size_t>(x)] + "'");
        (table[0] == 'd' ? spec.dia : spec.box).push_back(std::move(f));
      }
    }
    return spec;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed algebra: ") + e.what());
  }
}

inline std::shared_ptr<TableAlgebra> algebra_from_json(const Json& j) {
  AlgebraSpec s = algebra_spec_from_json(j);
  return algebra_from_order(s.names, std::move(s.leq), std::move(s.agents), std::move(s.dia),
                            std::move(s.box));
}

inline Json algebra_to_json(const AlgebraBase& a) {
  int n = a.isize();
  std::vector<std::string> names;
  names.reserve(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) names.push_back(a.element_name(x));
  Json j;
  j["elements"] = names;
  Json leq = Json::array();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y && a.leq(x, y))
        leq.push_back(Json::array({names[static_cast<size_t>(x)], names[static_cast<size_t>(y)]}));
  j["leq"] = leq;
  j["agents"] = a.agents();
  Json dia = Json::object(), box = Json::object();
  for (size_t ag = 0; ag < a.agents().size(); ++ag) {
    Json d = Json::object(), b = Json::object();
    for (int x = 0; x < n; ++x) {
      d[names[static_cast<size_t>(x)]] = names[static_cast<size_t>(a.dia(static_cast<int>(ag), x))];
      b[names[static_cast<size_t>(x)]] = names[static_cast<size_t>(a.box(static_cast<int>(ag), x))];
    }
    dia[a.agents()[ag]] = d;
    box[a.agents()[ag]] = b;
  }
  j["dia"] = dia;
  j["box"] = box;
  return j;
}

// Graphviz rendering. Order covers are dashed, epistemic edges solid and
// labeled by agent; reflexive epistemic loops are dotted to keep diagrams
// legible.
inline std::string model_to_dot(const Model& m) {
  std::ostringstream os;
  int n = m.frame.n();
  os << "digraph model {\n  rankdir=BT;\n  node [shape=box, fontsize=11];\n";
  for (int w = 0; w < n; ++w) {
    std::string atoms;
    for (const auto& [atom, x] : m.val)
      if (mask_get(x, w)) atoms += (atoms.empty() ? "" : " ") + atom;
    std::string label = detail::dot_escape(m.frame.worlds[static_cast<size_t>(w)]);
    if (!atoms.empty()) label += "\\n" + detail::dot_escape(atoms);
    os << "  n" << w << " [label=\"" << label << "\"];\n";
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (detail::is_cover(m.frame.order, x, y))
        os << "  n" << x << " -> n" << y << " [style=dashed, arrowhead=none];\n";
  for (size_t ai = 0; ai < m.frame.agents.size(); ++ai) {
    const Rel& r = m.frame.rel[ai];
    const Agent& ag = m.frame.agents[ai];
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (r.at(x, y) && x != y)
          os << "  n" << x << " -> n" << y << " [label=\"" << detail::dot_escape(ag) << "\"];\n";
    for (int x = 0; x < n; ++x)
      if (r.at(x, x))
        os << "  n" << x << " -> n" << x << " [label=\"" << detail::dot_escape(ag)
           << "\", style=dotted];\n";
  }
  os << "}\n";
  return os.str();
}

inline std::string algebra_to_dot(const AlgebraBase& a) {
  std::ostringstream os;
  int n = a.isize();
  os << "digraph algebra {\n  rankdir=BT;\n  node [shape=plaintext, fontsize=11];\n";
  for (int x = 0; x < n; ++x)
    os << "  n" << x << " [label=\"" << detail::dot_escape(a.element_name(x)) << "\"];\n";
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (x == y || !a.leq(x, y)) continue;
      bool cover = true;
      for (int z = 0; z < n && cover; ++z)
        if (z != x && z != y && a.leq(x, z) && a.leq(z, y)) cover = false;
      if (cover) os << "  n" << x << " -> n" << y << " [arrowhead=none];\n";
    }
  os << "}\n";
  return os.str();
}

}  // namespace ieak
