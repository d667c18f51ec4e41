#pragma once

#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ieak {

// Visits `want` indices of [0,total), every one when want >= total, else the
// multiples of a step coprime to total, which spreads samples across every
// digit of any mixed-radix decoding of the index.
template <class Fn>
void strided_indices(long long total, long long want, Fn&& fn) {
  if (total <= 0 || want <= 0) return;
  if (want >= total) {
    for (long long i = 0; i < total; ++i) fn(i);
    return;
  }
  long long step = total / want;
  while (std::gcd(step, total) != 1) ++step;
  long long at = 0;
  for (long long t = 0; t < want; ++t) {
    fn(at);
    at += step;
    if (at >= total) at -= total;
  }
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: bad files, dangling names, shape mismatches.
class InputError : public Error {
 public:
  using Error::Error;
};

// Rejected formula text; line/col are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : Error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// A configured resource cap was exceeded; the computation was not attempted.
class LimitError : public Error {
 public:
  using Error::Error;
};

using Agent = std::string;
using Atom = std::string;

// Subset of a universe of at most 64 points, one bit per point.
using Mask = std::uint64_t;

constexpr int kMaxPoints = 64;

inline bool mask_get(Mask m, int i) { return (m >> i) & 1u; }
inline Mask mask_bit(int i) { return Mask{1} << i; }
inline Mask mask_universe(int n) {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}
inline int mask_count(Mask m) { return std::popcount(m); }

inline std::vector<int> mask_members(Mask m) {
  std::vector<int> out;
  while (m) {
    int i = std::countr_zero(m);
    out.push_back(i);
    m &= m - 1;
  }
  return out;
}

// Binary relation on {0..n-1}; row(i) is the successor set of i.
class Rel {
 public:
  Rel() = default;
  explicit Rel(int n) : n_(n), rows_(static_cast<size_t>(n), 0) {
    if (n < 0 || n > kMaxPoints) throw LimitError("relation carrier exceeds 64 points");
  }

  static Rel identity(int n) {
    Rel r(n);
    for (int i = 0; i < n; ++i) r.rows_[i] = mask_bit(i);
    return r;
  }
  static Rel full(int n) {
    Rel r(n);
    for (int i = 0; i < n; ++i) r.rows_[i] = mask_universe(n);
    return r;
  }

  int n() const { return n_; }
  Mask row(int i) const { return rows_[i]; }
  void set_row(int i, Mask m) { rows_[i] = m; }
  bool at(int i, int j) const { return mask_get(rows_[i], j); }
  void set(int i, int j, bool v = true) {
    if (v)
      rows_[i] |= mask_bit(j);
    else
      rows_[i] &= ~mask_bit(j);
  }

  // Usual relational order: x (this;other) z iff exists y with x this y, y other z.
  Rel compose(const Rel& other) const {
    Rel out(n_);
    for (int x = 0; x < n_; ++x) {
      Mask acc = 0, ys = rows_[x];
      while (ys) {
        int y = std::countr_zero(ys);
        ys &= ys - 1;
        acc |= other.rows_[y];
      }
      out.rows_[x] = acc;
    }
    return out;
  }

  Rel converse() const {
    Rel out(n_);
    for (int x = 0; x < n_; ++x)
      for (int y = 0; y < n_; ++y)
        if (at(x, y)) out.set(y, x);
    return out;
  }

  Rel intersect(const Rel& other) const {
    Rel out(n_);
    for (int i = 0; i < n_; ++i) out.rows_[i] = rows_[i] & other.rows_[i];
    return out;
  }

  Rel unite(const Rel& other) const {
    Rel out(n_);
    for (int i = 0; i < n_; ++i) out.rows_[i] = rows_[i] | other.rows_[i];
    return out;
  }

  bool subset_of(const Rel& other) const {
    for (int i = 0; i < n_; ++i)
      if (rows_[i] & ~other.rows_[i]) return false;
    return true;
  }

  bool operator==(const Rel& other) const { return n_ == other.n_ && rows_ == other.rows_; }
  bool operator!=(const Rel& other) const { return !(*this == other); }

  // {x | row(x) meets X}
  Mask preimage(Mask xs) const {
    Mask out = 0;
    for (int i = 0; i < n_; ++i)
      if (rows_[i] & xs) out |= mask_bit(i);
    return out;
  }

  Mask image(Mask xs) const {
    Mask out = 0;
    while (xs) {
      int i = std::countr_zero(xs);
      xs &= xs - 1;
      out |= rows_[i];
    }
    return out;
  }

  bool reflexive() const {
    for (int i = 0; i < n_; ++i)
      if (!at(i, i)) return false;
    return true;
  }
  bool symmetric() const { return *this == converse(); }
  bool transitive() const { return compose(*this).subset_of(*this); }
  bool antisymmetric() const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (at(i, j) && at(j, i)) return false;
    return true;
  }
  bool is_equivalence() const { return reflexive() && symmetric() && transitive(); }
  bool is_partial_order() const { return reflexive() && transitive() && antisymmetric(); }

  Rel reflexive_transitive_closure() const {
    Rel out = unite(identity(n_));
    for (;;) {
      Rel next = out.unite(out.compose(out));
      if (next == out) return out;
      out = next;
    }
  }

  // Restriction to the listed points, reindexed by list position.
  Rel restrict_to(const std::vector<int>& keep) const {
    Rel out(static_cast<int>(keep.size()));
    for (size_t a = 0; a < keep.size(); ++a)
      for (size_t b = 0; b < keep.size(); ++b)
        if (at(keep[a], keep[b])) out.set(static_cast<int>(a), static_cast<int>(b));
    return out;
  }

 private:
  int n_ = 0;
  std::vector<Mask> rows_;
};

// Outcome of a structural validation pass; empty means the check succeeded.
struct CheckReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  void note(std::string v) { violations.push_back(std::move(v)); }
  std::string to_string() const {
    if (ok()) return "ok";
    std::string s;
    for (const auto& v : violations) {
      s += v;
      s += '\n';
    }
    return s;
  }
};

}  // namespace ieak
