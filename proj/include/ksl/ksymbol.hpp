#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksl/torsion.hpp"

namespace ksl {

// class of g_a modulo torsion: [g_{-a}] = [g_a], so the representative is the
// lexicographically smaller of {a, -a}
struct Atom {
  TorsionPoint p;

  Atom() = default;
  explicit Atom(const TorsionPoint& a) : p(std::min(a, -a)) {
    if (a.is_zero()) throw std::invalid_argument("atom at the zero point");
  }

  friend bool operator==(const Atom& x, const Atom& y) { return x.p == y.p; }
  friend bool operator!=(const Atom& x, const Atom& y) { return !(x.p == y.p); }
  friend bool operator<(const Atom& x, const Atom& y) { return x.p < y.p; }
};

inline std::string atom_str(const Atom& a) { return "[" + torsion_str(a.p) + "]"; }

// rational combination of atoms; the value space of mu at arity 1
struct K1El {
  std::map<Atom, QQ> terms;

  void add(const Atom& a, const QQ& c) {
    if (c == 0) return;
    auto [it, fresh] = terms.emplace(a, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }
  bool is_zero() const { return terms.empty(); }

  friend K1El operator+(K1El x, const K1El& y) {
    for (const auto& [a, c] : y.terms) x.add(a, c);
    return x;
  }
  friend K1El operator-(K1El x, const K1El& y) {
    for (const auto& [a, c] : y.terms) x.add(a, -c);
    return x;
  }
  friend K1El operator*(const QQ& s, const K1El& x) {
    K1El r;
    for (const auto& [a, c] : x.terms) r.add(a, s * c);
    return r;
  }
  friend bool operator==(const K1El& x, const K1El& y) { return x.terms == y.terms; }
};

// [g_p], which is 0 when p = 0
inline K1El k1(const TorsionPoint& p) {
  K1El r;
  if (!p.is_zero()) r.add(Atom(p), QQ(1));
  return r;
}

namespace kdetail {

// sort a tuple in place, returning the permutation sign, or 0 on a repeat
inline int canonicalize(std::vector<Atom>& t) {
  int sign = 1;
  for (size_t i = 1; i < t.size(); ++i)
    for (size_t j = i; j > 0 && !(t[j - 1] < t[j]); --j) {
      if (t[j - 1] == t[j]) return 0;
      std::swap(t[j - 1], t[j]);
      sign = -sign;
    }
  return sign;
}

}  // namespace kdetail

// formal symbol {g_a1, ..., g_an} space: strictly increasing atom tuples with
// rational coefficients; skew-symmetry and torsion-kill are the normal form
struct KnSym {
  long n = 0;
  std::map<std::vector<Atom>, QQ> terms;

  explicit KnSym(long arity = 0) : n(arity) {}

  void add_term(std::vector<Atom> t, const QQ& c) {
    if (static_cast<long>(t.size()) != n) throw std::invalid_argument("arity mismatch");
    if (c == 0) return;
    int s = kdetail::canonicalize(t);
    if (s == 0) return;
    QQ v = s > 0 ? c : QQ(-c);
    auto [it, fresh] = terms.emplace(std::move(t), v);
    if (!fresh) {
      it->second += v;
      if (it->second == 0) terms.erase(it);
    }
  }
  bool is_zero() const { return terms.empty(); }

  friend KnSym operator+(KnSym x, const KnSym& y) {
    if (x.n != y.n) throw std::invalid_argument("arity mismatch");
    for (const auto& [t, c] : y.terms) x.add_term(t, c);
    return x;
  }
  friend KnSym operator-(KnSym x, const KnSym& y) {
    if (x.n != y.n) throw std::invalid_argument("arity mismatch");
    for (const auto& [t, c] : y.terms) x.add_term(t, -c);
    return x;
  }
  friend KnSym operator-(const KnSym& x) {
    KnSym r(x.n);
    for (const auto& [t, c] : x.terms) r.terms.emplace(t, -c);
    return r;
  }
  friend KnSym operator*(const QQ& s, const KnSym& x) {
    KnSym r(x.n);
    if (s == 0) return r;
    for (const auto& [t, c] : x.terms) r.terms.emplace(t, s * c);
    return r;
  }
  friend bool operator==(const KnSym& x, const KnSym& y) {
    return x.n == y.n && x.terms == y.terms;
  }
};

// full multilinear expansion of {e1, ..., en} into canonical atom tuples
inline KnSym ksym(const std::vector<K1El>& entries) {
  if (entries.empty()) throw std::invalid_argument("arity must be at least 1");
  long n = static_cast<long>(entries.size());
  KnSym out(n);
  std::vector<Atom> tuple(n);

  auto rec = [&](auto&& self, long depth, const QQ& acc) -> void {
    if (depth == n) {
      out.add_term(tuple, acc);
      return;
    }
    for (const auto& [a, c] : entries[depth].terms) {
      tuple[depth] = a;
      self(self, depth + 1, QQ(acc * c));
    }
  };
  rec(rec, 0, QQ(1));
  return out;
}

// the symbol {g_{p1}, ..., g_{pn}}, zero if any point is zero
inline KnSym ksym_points(const std::vector<TorsionPoint>& pts) {
  KnSym out(static_cast<long>(pts.size()));
  std::vector<Atom> tuple;
  tuple.reserve(pts.size());
  for (const auto& p : pts) {
    if (p.is_zero()) return out;
    tuple.emplace_back(p);
  }
  out.add_term(std::move(tuple), QQ(1));
  return out;
}

// wedge concatenation, arity m + k
inline KnSym mul_kn(const KnSym& x, const KnSym& y) {
  KnSym out(x.n + y.n);
  for (const auto& [tx, cx] : x.terms)
    for (const auto& [ty, cy] : y.terms) {
      std::vector<Atom> t = tx;
      t.insert(t.end(), ty.begin(), ty.end());
      out.add_term(std::move(t), QQ(cx * cy));
    }
  return out;
}

namespace kdetail {

// theta with no distinctness guard: degenerate slots die by the zero-atom,
// negation, and repeat rules
inline KnSym theta_any(const TorsionPoint& a, const TorsionPoint& b, const TorsionPoint& c) {
  return ksym_points({a - b, c - a}) + ksym_points({c - a, b - c}) + ksym_points({b - c, a - b});
}

}  // namespace kdetail

// theta(a:b:c) = {g_{a-b}, g_{c-a}} + {g_{c-a}, g_{b-c}} + {g_{b-c}, g_{a-b}}
inline KnSym theta_expr(const TorsionPoint& a, const TorsionPoint& b, const TorsionPoint& c) {
  if (a == b || b == c || a == c) throw std::invalid_argument("theta needs distinct points");
  return kdetail::theta_any(a, b, c);
}

enum class FreeSlot { first, second, third };

// sum of theta over one slot running through all of A(N); identically zero in the
// normal form (terms cancel in pairs x <-> s - x, fixed points die by skew/repeat)
inline KnSym translate_sum(FreeSlot slot, const TorsionPoint& p, const TorsionPoint& q, long N) {
  if (N < 1) throw std::invalid_argument("level must be positive");
  if (N % p.level() != 0 || N % q.level() != 0)
    throw std::invalid_argument("fixed points must lie in A(N)");
  KnSym out(2);
  for (const auto& x : torsion_points(N)) {
    switch (slot) {
      case FreeSlot::first: out = out + kdetail::theta_any(x, p, q); break;
      case FreeSlot::second: out = out + kdetail::theta_any(p, x, q); break;
      case FreeSlot::third: out = out + kdetail::theta_any(p, q, x); break;
    }
  }
  return out;
}

// strictly increasing list of the canonical atoms of A(N)
inline std::vector<Atom> canonical_atoms(long N) {
  std::set<Atom> s;
  for (const auto& p : torsion_points(N, false)) s.insert(Atom(p));
  return {s.begin(), s.end()};
}

enum class RelatorKind { manin, distribution, product_lift };

struct RelatorSet {
  long level = 1;   // ambient level: every atom of every relator lies in A(level)
  long arity = 1;
  std::vector<KnSym> relators;
  std::vector<RelatorKind> kind_tags;
};

// [g_a] - sum_{t b = a} [g_b]; at a = 0 the right side keeps only nonzero preimages
// (the dropped constant is exactly t, torsion-constant in the operational model)
inline K1El distribution_relator(const TorsionPoint& a, long t) {
  if (t < 2) throw std::invalid_argument("scaling factor must be at least 2");
  K1El r = k1(a);
  for (const auto& b : preimages(a, t)) r = r - k1(b);
  return r;
}

// finite relator basis at level N, arity n; every relator is an identity proved at
// the source: manin three-term sums, distribution sums (up to the tN <= cap level
// cap), and manin relators wedged into higher arity by atom tuples of A(N)
inline RelatorSet relators(long N, long n, const std::set<RelatorKind>& kinds, long cap = 24) {
  if (N < 1 || n < 1) throw std::invalid_argument("level and arity must be positive");
  if (kinds.count(RelatorKind::manin) && n == 1)
    throw std::invalid_argument("manin relators need arity >= 2");
  RelatorSet out;
  out.level = N;
  out.arity = n;

  auto push = [&](KnSym r, RelatorKind k) {
    if (r.is_zero()) return;
    for (const auto& [t, c] : r.terms)
      for (const auto& a : t) out.level = lcm_l(out.level, a.p.level());
    out.relators.push_back(std::move(r));
    out.kind_tags.push_back(k);
  };

  std::vector<KnSym> manin2;
  if (kinds.count(RelatorKind::manin) || kinds.count(RelatorKind::product_lift)) {
    auto pts = torsion_points(N, false);
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = i; j < pts.size(); ++j) {
        TorsionPoint c = TorsionPoint() - pts[i] - pts[j];
        if (c.is_zero() || c < pts[j]) continue;  // enumerate unordered triples once
        KnSym r = ksym_points({pts[i], pts[j]}) + ksym_points({pts[j], c}) +
                  ksym_points({c, pts[i]});
        if (!r.is_zero()) manin2.push_back(std::move(r));
      }
  }

  if (kinds.count(RelatorKind::manin) && n == 2)
    for (const auto& r : manin2) push(r, RelatorKind::manin);

  if (kinds.count(RelatorKind::product_lift) && n > 2) {
    std::vector<Atom> atoms = canonical_atoms(N);
    std::vector<long> idx(n - 2);
    auto emit = [&](const std::vector<long>& sel) {
      KnSym partner(n - 2);
      std::vector<Atom> t;
      for (long k : sel) t.push_back(atoms[k]);
      partner.add_term(std::move(t), QQ(1));
      for (const auto& r : manin2) push(mul_kn(r, partner), RelatorKind::product_lift);
    };
    auto rec = [&](auto&& self, long depth, long from) -> void {
      if (depth == n - 2) {
        emit(idx);
        return;
      }
      for (long k = from; k < static_cast<long>(atoms.size()); ++k) {
        idx[depth] = k;
        self(self, depth + 1, k + 1);
      }
    };
    rec(rec, 0, 0);
  }

  if (kinds.count(RelatorKind::distribution)) {
    std::vector<Atom> atoms = canonical_atoms(N);
    for (long t = 2; t * N <= cap; ++t)
      for (const auto& a : torsion_points(N)) {
        K1El d = distribution_relator(a, t);
        if (d.is_zero()) continue;
        if (n == 1) {
          push(ksym({d}), RelatorKind::distribution);
          continue;
        }
        std::vector<long> idx(n - 1);
        auto emit = [&](const std::vector<long>& sel) {
          std::vector<K1El> entries{d};
          for (long k : sel) {
            K1El e;
            e.add(atoms[k], QQ(1));
            entries.push_back(std::move(e));
          }
          push(ksym(entries), RelatorKind::distribution);
        };
        auto rec = [&](auto&& self, long depth, long from) -> void {
          if (depth == n - 1) {
            emit(idx);
            return;
          }
          for (long k = from; k < static_cast<long>(atoms.size()); ++k) {
            idx[depth] = k;
            self(self, depth + 1, k + 1);
          }
        };
        rec(rec, 0, 0);
      }
  }
  return out;
}

// outcome of a span-membership query: either exact coefficients over the relator
// list (re-substituted before returning) or a rational functional separating x
struct SpanCert {
  bool member = false;
  std::map<size_t, QQ> coeff;
  std::map<std::vector<Atom>, QQ> witness;
};

namespace kdetail {

using Row = std::map<std::vector<Atom>, QQ>;
using Rep = std::map<size_t, QQ>;

struct Eliminator {
  // pivot column -> (reduced row, its expression over the original relators)
  std::map<std::vector<Atom>, std::pair<Row, Rep>> pivots;

  void reduce(Row& r, Rep& rep) const {
    for (auto it = r.begin(); it != r.end();) {
      auto p = pivots.find(it->first);
      if (p == pivots.end()) {
        ++it;
        continue;
      }
      QQ f = it->second / p->second.first.at(it->first);
      for (const auto& [col, v] : p->second.first) {
        auto [jt, fresh] = r.emplace(col, QQ(-f * v));
        if (!fresh) {
          jt->second -= f * v;
          if (jt->second == 0) r.erase(jt);
        }
      }
      for (const auto& [k, v] : p->second.second) {
        auto [jt, fresh] = rep.emplace(k, QQ(-f * v));
        if (!fresh) {
          jt->second -= f * v;
          if (jt->second == 0) rep.erase(jt);
        }
      }
      it = r.begin();  // erasures may touch earlier columns
    }
  }

  void feed(Row r, size_t index) {
    Rep rep{{index, QQ(1)}};
    reduce(r, rep);
    if (r.empty()) return;
    std::vector<Atom> lead = r.begin()->first;
    pivots.emplace(std::move(lead), std::make_pair(std::move(r), std::move(rep)));
  }
};

}  // namespace kdetail

inline SpanCert in_span(const KnSym& x, const RelatorSet& R) {
  if (x.n != R.arity) throw std::invalid_argument("arity mismatch");
  for (const auto& [t, c] : x.terms)
    for (const auto& a : t)
      if (R.level % a.p.level() != 0) throw std::invalid_argument("atom outside A(level)");

  kdetail::Eliminator elim;
  for (size_t i = 0; i < R.relators.size(); ++i) elim.feed(R.relators[i].terms, i);

  kdetail::Row res = x.terms;
  kdetail::Rep rep;
  elim.reduce(res, rep);

  SpanCert cert;
  if (res.empty()) {
    cert.member = true;
    for (const auto& [i, c] : rep) cert.coeff.emplace(i, QQ(-c));
    KnSym back(x.n);
    for (const auto& [i, c] : cert.coeff) back = back + c * R.relators[i];
    if (!(back == x)) throw std::logic_error("certificate failed re-substitution");
    return cert;
  }

  // functional: coefficient at the residue's leading column after full reduction
  const std::vector<Atom>& lead = res.begin()->first;
  std::set<std::vector<Atom>> support;
  for (const auto& [t, c] : x.terms) support.insert(t);
  for (const auto& r : R.relators)
    for (const auto& [t, c] : r.terms) support.insert(t);
  for (const auto& t : support) {
    kdetail::Row e{{t, QQ(1)}};
    kdetail::Rep er;
    elim.reduce(e, er);
    auto it = e.find(lead);
    if (it != e.end() && it->second != 0) cert.witness.emplace(t, it->second);
  }
  return cert;
}

// pairing of a witness functional with a symbol
inline QQ pair_witness(const std::map<std::vector<Atom>, QQ>& w, const KnSym& x) {
  QQ s(0);
  for (const auto& [t, c] : x.terms) {
    auto it = w.find(t);
    if (it != w.end()) s += it->second * c;
  }
  return s;
}

// sum_i (-1)^i {g_{a_0}, ..., omit a_i, ..., g_{a_n}} for a_0 = a_1 + ... + a_n
inline KnSym cocycle_sum(const std::vector<TorsionPoint>& pts) {
  if (pts.size() < 2) throw std::invalid_argument("need a_0 and at least one a_i");
  TorsionPoint sum;
  for (size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].is_zero()) throw std::invalid_argument("zero point outside the hypothesis");
    sum = sum + pts[i];
  }
  if (pts[0].is_zero()) throw std::invalid_argument("zero point outside the hypothesis");
  if (!(pts[0] == sum)) throw std::invalid_argument("a_0 must equal the sum of the others");
  KnSym out(static_cast<long>(pts.size()) - 1);
  for (size_t i = 0; i < pts.size(); ++i) {
    std::vector<TorsionPoint> rest;
    for (size_t j = 0; j < pts.size(); ++j)
      if (j != i) rest.push_back(pts[j]);
    KnSym term = ksym_points(rest);
    out = (i % 2 == 0) ? out + term : out - term;
  }
  return out;
}

}  // namespace ksl
