#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ieak/algebra.hpp"
#include "ieak/core.hpp"
#include "ieak/model.hpp"

namespace ieak {

// Downset algebra of a frame. Elements are the downsets of the order,
// enumerated in increasing mask value, so element 0 is the empty set and the
// last element is the full carrier. The mask of each element is kept so
// evaluation results can be compared across the relational and algebraic
// sides.
struct ComplexAlgebra {
  std::shared_ptr<TableAlgebra> algebra;
  std::vector<Mask> downsets;

  int index_of(Mask m) const {
    auto it = std::lower_bound(downsets.begin(), downsets.end(), m);
    if (it == downsets.end() || *it != m) throw InputError("set is not a downset of the frame order");
    return static_cast<int>(it - downsets.begin());
  }
};

inline std::string set_name(Mask m, const std::vector<std::string>& worlds) {
  std::string s = "{";
  bool first = true;
  for (int w : mask_members(m)) {
    if (!first) s += ",";
    s += worlds[w];
    first = false;
  }
  return s + "}";
}

inline ComplexAlgebra complex_algebra(const Frame& f) {
  int n = f.n();
  if (n > 20) throw LimitError("complex algebra: frame too large");
  Mask universe = mask_universe(n);
  Rel geq = f.order.converse();
  std::vector<Mask> downs;
  for (Mask m = 0;; ++m) {
    if (is_downset(m, geq)) downs.push_back(m);
    if (m == universe) break;
  }
  int cnt = static_cast<int>(downs.size());
  if (cnt > kMaxTableAlgebra) throw LimitError("complex algebra: too many downsets");

  std::map<Mask, int> idx;
  std::vector<std::string> names(cnt);
  for (int i = 0; i < cnt; ++i) {
    idx[downs[i]] = i;
    names[i] = set_name(downs[i], f.worlds);
  }

  std::vector<char> leq(static_cast<size_t>(cnt) * cnt);
  std::vector<int> meet(static_cast<size_t>(cnt) * cnt), join(static_cast<size_t>(cnt) * cnt),
      imp(static_cast<size_t>(cnt) * cnt);
  for (int x = 0; x < cnt; ++x)
    for (int y = 0; y < cnt; ++y) {
      size_t at = static_cast<size_t>(x) * cnt + y;
      leq[at] = (downs[x] & ~downs[y]) == 0 ? 1 : 0;
      meet[at] = idx.at(downs[x] & downs[y]);
      join[at] = idx.at(downs[x] | downs[y]);
      Mask bad = downs[x] & ~downs[y];
      imp[at] = idx.at(universe & ~up_closure(bad, geq));
    }

  std::vector<std::vector<int>> dia, box;
  for (size_t ag = 0; ag < f.agents.size(); ++ag) {
    const Rel& r = f.rel[ag];
    Rel reach = geq.compose(r);
    std::vector<int> dv(cnt), bv(cnt);
    for (int x = 0; x < cnt; ++x) {
      dv[x] = idx.at(r.preimage(downs[x]));
      bv[x] = idx.at(universe & ~reach.preimage(universe & ~downs[x]));
    }
    dia.push_back(std::move(dv));
    box.push_back(std::move(bv));
  }

  ComplexAlgebra out;
  out.algebra = std::make_shared<TableAlgebra>(names, std::move(leq), std::move(meet), std::move(join),
                                               std::move(imp), idx.at(0), idx.at(universe), f.agents,
                                               std::move(dia), std::move(box));
  out.downsets = std::move(downs);
  return out;
}

// kappa(x) = Join { u | x not<= u }: x is completely join-prime iff x != bot
// and x not<= kappa(x). lambda is the order dual.
inline int kappa(const AlgebraBase& a, int x) {
  int acc = a.bot();
  for (int u = 0; u < a.isize(); ++u)
    if (!a.leq(x, u)) acc = a.join(acc, u);
  return acc;
}

inline int lambda_of(const AlgebraBase& a, int y) {
  int acc = a.top();
  for (int u = 0; u < a.isize(); ++u)
    if (!a.leq(u, y)) acc = a.meet(acc, u);
  return acc;
}

inline std::vector<int> join_primes(const AlgebraBase& a) {
  std::vector<int> out;
  for (int x = 0; x < a.isize(); ++x)
    if (x != a.bot() && !a.leq(x, kappa(a, x))) out.push_back(x);
  return out;
}

inline std::vector<int> meet_primes(const AlgebraBase& a) {
  std::vector<int> out;
  for (int y = 0; y < a.isize(); ++y)
    if (y != a.top() && !a.leq(lambda_of(a, y), y)) out.push_back(y);
  return out;
}

// Prime structure of an algebra with tense operators: carrier is the set of
// completely join-prime elements under the restricted order, and
// x R y iff x <= dia y and y <= black-dia x.
inline Frame prime_structure(const AlgebraBase& a, ModelKind kind = ModelKind::IK) {
  std::vector<int> js = join_primes(a);
  int m = static_cast<int>(js.size());
  if (m > kMaxPoints) throw LimitError("prime structure: too many join-primes");
  Frame f;
  f.kind = kind;
  f.agents = a.agents();
  for (int j : js) f.worlds.push_back(a.element_name(j));
  f.order = Rel(m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      if (a.leq(js[x], js[y])) f.order.set(x, y);
  for (int ag = 0; ag < static_cast<int>(f.agents.size()); ++ag) {
    Rel r(m);
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y)
        if (a.leq(js[x], a.dia(ag, js[y])) && a.leq(js[y], a.black_dia(ag, js[x]))) r.set(x, y);
    f.rel.push_back(r);
  }
  return f;
}

// Finite relational signature: a carrier plus named binary relations. Used
// for isomorphism checks between frames and between operator graphs.
struct Structure {
  int n = 0;
  std::vector<std::string> labels;
  std::vector<std::pair<std::string, Rel>> rels;
};

inline Structure frame_structure(const Frame& f) {
  Structure s;
  s.n = f.n();
  s.labels = f.worlds;
  s.rels.emplace_back("order", f.order);
  for (size_t ag = 0; ag < f.agents.size(); ++ag) s.rels.emplace_back("rel:" + f.agents[ag], f.rel[ag]);
  return s;
}

// Functions become graphs: the signature keeps leq plus one graph per
// operator; a bijection preserving these is exactly an algebra isomorphism.
inline Structure algebra_structure(const AlgebraBase& a) {
  int n = a.isize();
  if (n > kMaxPoints) throw LimitError("structure view: algebra too large");
  Structure s;
  s.n = n;
  for (int x = 0; x < n; ++x) s.labels.push_back(a.element_name(x));
  Rel le(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (a.leq(x, y)) le.set(x, y);
  s.rels.emplace_back("leq", le);
  for (int ag = 0; ag < static_cast<int>(a.agents().size()); ++ag) {
    Rel d(n), b(n);
    for (int x = 0; x < n; ++x) {
      d.set(x, a.dia(ag, x));
      b.set(x, a.box(ag, x));
    }
    s.rels.emplace_back("dia:" + a.agents()[ag], d);
    s.rels.emplace_back("box:" + a.agents()[ag], b);
  }
  return s;
}

inline bool verify_isomorphism(const Structure& x, const Structure& y, const std::vector<int>& map) {
  if (x.n != y.n || static_cast<int>(map.size()) != x.n) return false;
  std::vector<char> hit(static_cast<size_t>(y.n), 0);
  for (int v : map) {
    if (v < 0 || v >= y.n || hit[v]) return false;
    hit[v] = 1;
  }
  if (x.rels.size() != y.rels.size()) return false;
  for (size_t r = 0; r < x.rels.size(); ++r) {
    if (x.rels[r].first != y.rels[r].first) return false;
    for (int a = 0; a < x.n; ++a)
      for (int b = 0; b < x.n; ++b)
        if (x.rels[r].second.at(a, b) != y.rels[r].second.at(map[a], map[b])) return false;
  }
  return true;
}

namespace detail {

inline uint64_t mix64(uint64_t v) {
  v ^= v >> 33;
  v *= 0xff51afd7ed558ccdULL;
  v ^= v >> 33;
  v *= 0xc4ceb9fe1a85ec53ULL;
  v ^= v >> 33;
  return v;
}

// Iterated color refinement, order independent within a round.
inline std::vector<uint64_t> refine_colors(const Structure& s) {
  std::vector<uint64_t> col(static_cast<size_t>(s.n), 0x9e3779b97f4a7c15ULL);
  for (int round = 0; round < s.n + 2; ++round) {
    std::vector<uint64_t> nxt(col.size());
    for (int v = 0; v < s.n; ++v) {
      uint64_t h = mix64(col[v]);
      uint64_t tag = 0x100;
      for (const auto& [name, r] : s.rels) {
        (void)name;
        uint64_t out = 0, in = 0;
        for (int u = 0; u < s.n; ++u) {
          if (r.at(v, u)) out += mix64(col[u] ^ tag);
          if (r.at(u, v)) in += mix64(col[u] ^ (tag << 1));
        }
        h ^= mix64(out + 3 * in + tag);
        tag += 0x101;
      }
      nxt[v] = h;
    }
    col.swap(nxt);
  }
  return col;
}

}  // namespace detail

// Backtracking search guided by refinement colors; any returned map is fully
// re-verified before it escapes.
inline std::optional<std::vector<int>> find_isomorphism(const Structure& x, const Structure& y) {
  if (x.n != y.n || x.rels.size() != y.rels.size()) return std::nullopt;
  for (size_t r = 0; r < x.rels.size(); ++r)
    if (x.rels[r].first != y.rels[r].first) return std::nullopt;
  if (x.n == 0) return std::vector<int>{};

  std::vector<uint64_t> cx = detail::refine_colors(x), cy = detail::refine_colors(y);
  {
    std::vector<uint64_t> a = cx, b = cy;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return std::nullopt;
  }

  std::vector<int> order(static_cast<size_t>(x.n));
  for (int i = 0; i < x.n; ++i) order[i] = i;
  std::vector<int> rarity(static_cast<size_t>(x.n), 0);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j)
      if (cy[j] == cx[i]) ++rarity[i];
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rarity[a] < rarity[b]; });

  std::vector<int> map(static_cast<size_t>(x.n), -1);
  std::vector<char> used(static_cast<size_t>(x.n), 0);

  auto compatible = [&](int v, int w) {
    for (const auto& [name, rx] : x.rels) {
      const Rel* ry = nullptr;
      for (const auto& p : y.rels)
        if (p.first == name) {
          ry = &p.second;
          break;
        }
      for (int u = 0; u < x.n; ++u) {
        if (map[u] < 0 && u != v) continue;
        int mu = (u == v) ? w : map[u];
        if (rx.at(v, u) != ry->at(w, mu)) return false;
        if (rx.at(u, v) != ry->at(mu, w)) return false;
      }
    }
    return true;
  };

  int depth = 0;
  std::vector<int> tries(static_cast<size_t>(x.n), 0);
  while (depth >= 0) {
    if (depth == x.n) {
      if (verify_isomorphism(x, y, map)) return map;
      --depth;
      if (depth < 0) break;
      used[map[order[depth]]] = 0;
      map[order[depth]] = -1;
      continue;
    }
    int v = order[depth];
    bool advanced = false;
    for (int w = tries[depth]; w < x.n; ++w) {
      if (used[w] || cy[w] != cx[v]) continue;
      if (!compatible(v, w)) continue;
      map[v] = w;
      used[w] = 1;
      tries[depth] = w + 1;
      ++depth;
      if (depth < x.n) tries[depth] = 0;
      advanced = true;
      break;
    }
    if (!advanced) {
      tries[depth] = 0;
      --depth;
      if (depth < 0) break;
      used[map[order[depth]]] = 0;
      map[order[depth]] = -1;
    }
  }
  return std::nullopt;
}

inline bool isomorphic(const Structure& x, const Structure& y) { return find_isomorphism(x, y).has_value(); }

}  // namespace ieak
