#pragma once

#include <map>
#include <optional>
#include <utility>

#include "ksl/cyclotomic.hpp"

namespace ksl {

// three-valued comparison of truncated series
struct EqResult {
  enum class V { equal, unequal, inconclusive };
  V v = V::inconclusive;
  std::optional<QQ> common_trunc;  // nullopt = exact on both sides
  QQ witness;                      // first differing exponent when unequal

  bool is_equal() const { return v == V::equal; }
  bool is_unequal() const { return v == V::unequal; }
  bool is_inconclusive() const { return v == V::inconclusive; }
};

inline std::optional<QQ> min_trunc(const std::optional<QQ>& a, const std::optional<QQ>& b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

namespace detail {
inline long denom_lcm(long d, const QQ& e) { return lcm_l(d, to_long(q_den(e))); }
}

// truncated q-series with exact cyclotomic coefficients
struct QExp {
  std::map<QQ, CycNumber> terms;
  std::optional<QQ> trunc;  // exponents >= trunc unknown; nullopt = exact
  long denom = 1;

  bool known_zero() const { return terms.empty(); }

  void add_term(const QQ& e, const CycNumber& c) {
    if (c.is_zero()) return;
    if (trunc && e >= *trunc) return;
    auto [it, fresh] = terms.emplace(e, c);
    if (!fresh) {
      it->second = it->second + c;
      if (it->second.is_zero()) terms.erase(it);
    }
    denom = detail::denom_lcm(denom, e);
  }

  static QExp zero(std::optional<QQ> T = {}) {
    QExp f;
    f.trunc = std::move(T);
    return f;
  }
  static QExp monomial(const QQ& e, const CycNumber& c, std::optional<QQ> T = {}) {
    QExp f;
    f.trunc = std::move(T);
    f.add_term(e, c);
    return f;
  }
  static QExp one() { return monomial(QQ(0), CycNumber(QQ(1))); }
};

inline QExp q_truncate(const QExp& f, const QQ& T) {
  QExp g;
  g.trunc = min_trunc(f.trunc, T);
  for (const auto& [e, c] : f.terms) {
    if (e >= *g.trunc) break;
    g.add_term(e, c);
  }
  return g;
}

// valuation: min stored exponent, or trunc when nothing is stored
inline std::optional<QQ> q_val(const QExp& f) {
  if (!f.terms.empty()) return f.terms.begin()->first;
  return f.trunc;  // zero to precision; exact zero gives nullopt
}

inline QExp q_add(const QExp& f, const QExp& g) {
  QExp r;
  r.trunc = min_trunc(f.trunc, g.trunc);
  for (const auto& [e, c] : f.terms) r.add_term(e, c);
  for (const auto& [e, c] : g.terms) r.add_term(e, c);
  return r;
}

inline QExp q_neg(const QExp& f) {
  QExp r = f;
  for (auto& [e, c] : r.terms) c = -c;
  return r;
}

inline QExp q_sub(const QExp& f, const QExp& g) { return q_add(f, q_neg(g)); }

inline QExp q_scale(const CycNumber& s, const QExp& f) {
  QExp r;
  r.trunc = f.trunc;
  r.denom = f.denom;
  if (s.is_zero()) return r;
  for (const auto& [e, c] : f.terms) r.add_term(e, s * c);
  return r;
}

inline QExp q_shift(const QQ& d, const QExp& f) {
  QExp r;
  if (f.trunc) r.trunc = *f.trunc + d;
  for (const auto& [e, c] : f.terms) r.add_term(e + d, c);
  return r;
}

inline QExp q_mul(const QExp& f, const QExp& g) {
  std::optional<QQ> T;
  auto vf = q_val(f), vg = q_val(g);
  if (f.trunc && vg) T = min_trunc(T, *f.trunc + *vg);
  if (g.trunc && vf) T = min_trunc(T, *g.trunc + *vf);
  if ((f.trunc && !vg) || (g.trunc && !vf)) {
    // truncated series times exact zero: zero, exactly
    return QExp::zero();
  }
  QExp r;
  r.trunc = T;
  for (const auto& [ef, cf] : f.terms)
    for (const auto& [eg, cg] : g.terms) {
      QQ e = ef + eg;
      if (T && e >= *T) break;  // g sorted ascending
      r.add_term(e, cf * cg);
    }
  return r;
}

// multiplicative inverse; target_trunc required for exact non-monomial input
inline QExp q_inv(const QExp& f, std::optional<QQ> target_trunc = {}) {
  if (f.terms.empty()) throw std::domain_error("inverse of zero series");
  QQ v = f.terms.begin()->first;
  CycNumber lead = f.terms.begin()->second;
  QExp g0 = QExp::monomial(-v, cyc_inv(lead));
  if (f.terms.size() == 1 && !f.trunc) {
    if (target_trunc) g0.trunc = target_trunc;
    return g0;
  }
  std::optional<QQ> T_out;  // absolute truncation of the result
  if (f.trunc) T_out = *f.trunc - 2 * v;
  if (target_trunc) T_out = min_trunc(T_out, *target_trunc);
  if (!T_out) throw std::invalid_argument("inverse of exact series needs a target truncation");
  QQ P = *T_out + v;  // relative precision, as truncation of f*g0 (valuation 0)
  QExp F = q_truncate(q_mul(f, g0), P);
  F.trunc = P;
  QExp X = QExp::one();
  X.trunc = P;
  for (;;) {  // Newton: error squares each round
    QExp err = q_truncate(q_sub(QExp::one(), q_mul(F, X)), P);
    if (err.terms.empty()) break;
    X = q_truncate(q_add(X, q_mul(X, err)), P);
    X.trunc = P;
  }
  QExp r = q_mul(X, g0);
  r.trunc = T_out;
  return q_truncate(r, *T_out);
}

inline QExp q_pow(const QExp& f, long n) {
  if (n < 0) return q_inv(q_pow(f, -n));
  QExp r = QExp::one();
  if (f.trunc) r.trunc = *f.trunc;  // refined by q_mul as valuations accumulate
  QExp b = f;
  while (n) {
    if (n & 1) r = q_mul(r, b);
    n >>= 1;
    if (n) b = q_mul(b, b);
  }
  return r;
}

inline EqResult qexp_eq(const QExp& f, const QExp& g, const std::optional<QQ>& T_min = {}) {
  EqResult res;
  res.common_trunc = min_trunc(f.trunc, g.trunc);
  QExp d = q_sub(f, g);
  for (const auto& [e, c] : d.terms) {
    if (!res.common_trunc || e < *res.common_trunc) {
      res.v = EqResult::V::unequal;
      res.witness = e;
      return res;
    }
  }
  if (!res.common_trunc || !T_min || *res.common_trunc >= *T_min)
    res.v = EqResult::V::equal;
  else
    res.v = EqResult::V::inconclusive;
  return res;
}

// two-variable series: t Laurent, q truncated; keys (q-exponent, t-exponent)
struct TQExp {
  std::map<std::pair<QQ, QQ>, CycNumber> terms;
  std::optional<QQ> trunc;
  long t_denom = 2;
  long q_denom = 1;

  void add_term(const QQ& qe, const QQ& te, const CycNumber& c) {
    if (c.is_zero()) return;
    if (trunc && qe >= *trunc) return;
    auto [it, fresh] = terms.emplace(std::make_pair(qe, te), c);
    if (!fresh) {
      it->second = it->second + c;
      if (it->second.is_zero()) terms.erase(it);
    }
    q_denom = detail::denom_lcm(q_denom, qe);
    t_denom = detail::denom_lcm(t_denom, te);
  }

  static TQExp zero(std::optional<QQ> T = {}) {
    TQExp f;
    f.trunc = std::move(T);
    return f;
  }
  static TQExp monomial(const QQ& qe, const QQ& te, const CycNumber& c, std::optional<QQ> T = {}) {
    TQExp f;
    f.trunc = std::move(T);
    f.add_term(qe, te, c);
    return f;
  }
  static TQExp one() { return monomial(QQ(0), QQ(0), CycNumber(QQ(1))); }
};

inline TQExp tq_truncate(const TQExp& f, const QQ& T) {
  TQExp g;
  g.trunc = min_trunc(f.trunc, T);
  for (const auto& [k, c] : f.terms) {
    if (k.first >= *g.trunc) break;
    g.add_term(k.first, k.second, c);
  }
  return g;
}

inline std::optional<QQ> tq_qval(const TQExp& f) {
  if (!f.terms.empty()) return f.terms.begin()->first.first;
  return f.trunc;
}

inline TQExp tq_add(const TQExp& f, const TQExp& g) {
  TQExp r;
  r.trunc = min_trunc(f.trunc, g.trunc);
  for (const auto& [k, c] : f.terms) r.add_term(k.first, k.second, c);
  for (const auto& [k, c] : g.terms) r.add_term(k.first, k.second, c);
  return r;
}

inline TQExp tq_neg(const TQExp& f) {
  TQExp r = f;
  for (auto& [k, c] : r.terms) c = -c;
  return r;
}

inline TQExp tq_sub(const TQExp& f, const TQExp& g) { return tq_add(f, tq_neg(g)); }

inline TQExp tq_scale(const CycNumber& s, const TQExp& f) {
  TQExp r;
  r.trunc = f.trunc;
  if (s.is_zero()) return r;
  for (const auto& [k, c] : f.terms) r.add_term(k.first, k.second, s * c);
  return r;
}

// multiply by c * q^qe * t^te
inline TQExp tq_shift(const TQExp& f, const QQ& qe, const QQ& te, const CycNumber& c) {
  TQExp r;
  if (f.trunc) r.trunc = *f.trunc + qe;
  for (const auto& [k, v] : f.terms) r.add_term(k.first + qe, k.second + te, c * v);
  return r;
}

inline TQExp tq_mul(const TQExp& f, const TQExp& g) {
  std::optional<QQ> T;
  auto vf = tq_qval(f), vg = tq_qval(g);
  if (f.trunc && vg) T = min_trunc(T, *f.trunc + *vg);
  if (g.trunc && vf) T = min_trunc(T, *g.trunc + *vf);
  if ((f.trunc && !vg) || (g.trunc && !vf)) return TQExp::zero();
  TQExp r;
  r.trunc = T;
  for (const auto& [kf, cf] : f.terms)
    for (const auto& [kg, cg] : g.terms) {
      QQ qe = kf.first + kg.first;
      if (T && qe >= *T) break;  // g sorted q-major ascending
      r.add_term(qe, kf.second + kg.second, cf * cg);
    }
  return r;
}

inline TQExp tq_pow(const TQExp& f, long n) {
  if (n < 0) throw std::invalid_argument("negative power of two-variable series");
  TQExp r = TQExp::one();
  if (f.trunc) r.trunc = *f.trunc;
  TQExp b = f;
  while (n) {
    if (n & 1) r = tq_mul(r, b);
    n >>= 1;
    if (n) b = tq_mul(b, b);
  }
  return r;
}

// inverse when the lowest q-level is a single t-monomial
inline TQExp tq_inv(const TQExp& f, std::optional<QQ> target_trunc = {}) {
  if (f.terms.empty()) throw std::domain_error("inverse of zero series");
  QQ v = f.terms.begin()->first.first;
  {
    auto it = std::next(f.terms.begin());
    if (it != f.terms.end() && it->first.first == v)
      throw std::domain_error("leading q-level is not a t-monomial");
  }
  QQ tv = f.terms.begin()->first.second;
  CycNumber lead = f.terms.begin()->second;
  TQExp g0 = TQExp::monomial(-v, -tv, cyc_inv(lead));
  if (f.terms.size() == 1 && !f.trunc) {
    if (target_trunc) g0.trunc = target_trunc;
    return g0;
  }
  std::optional<QQ> T_out;
  if (f.trunc) T_out = *f.trunc - 2 * v;
  if (target_trunc) T_out = min_trunc(T_out, *target_trunc);
  if (!T_out) throw std::invalid_argument("inverse of exact series needs a target truncation");
  QQ P = *T_out + v;
  TQExp F = tq_truncate(tq_mul(f, g0), P);
  F.trunc = P;
  TQExp X = TQExp::one();
  X.trunc = P;
  for (;;) {  // Newton: error squares each round
    TQExp err = tq_truncate(tq_sub(TQExp::one(), tq_mul(F, X)), P);
    if (err.terms.empty()) break;
    X = tq_truncate(tq_add(X, tq_mul(X, err)), P);
    X.trunc = P;
  }
  TQExp r = tq_mul(X, g0);
  r.trunc = T_out;
  return tq_truncate(r, *T_out);
}

// u -> u + r*tau + s on t = e^{2 pi i u}: t^a q^b -> e^{2 pi i s a} t^a q^{b+ar}
inline TQExp subst_rs(const TQExp& f, const QQ& r, const QQ& s) {
  TQExp g;
  if (f.trunc) {
    QQ shift(0);
    bool first = true;
    for (const auto& [k, c] : f.terms) {
      QQ d = k.second * r;
      if (first || d < shift) shift = d;
      first = false;
    }
    g.trunc = *f.trunc + shift;
  }
  for (const auto& [k, c] : f.terms)
    g.add_term(k.first + k.second * r, k.second, cyc_phase(s * k.second) * c);
  return g;
}

// recover s from c = e^{2 pi i s} by scanning the conductor, then substitute
inline TQExp tq_substitute(const TQExp& f, const QQ& r, const CycNumber& c) {
  long M = lcm_l(2, c.conductor);  // torsion units of Q(zeta_L) are the 2L-th roots
  for (long k = 0; k < M; ++k)
    if (zeta(M, k) == c) return subst_rs(f, r, make_q(k, M));
  throw std::invalid_argument("substitution scalar is not a root of unity");
}

// tau -> tau + 1: coefficient at q^e picks up e^{2 pi i e}
inline TQExp tau_shift(const TQExp& f) {
  TQExp g;
  g.trunc = f.trunc;
  for (const auto& [k, c] : f.terms) g.add_term(k.first, k.second, cyc_phase(k.first) * c);
  return g;
}

// t -> t^m (u -> m*u with q untouched)
inline TQExp t_power(const TQExp& f, long m) {
  TQExp g;
  g.trunc = f.trunc;
  for (const auto& [k, c] : f.terms) g.add_term(k.first, m * k.second, c);
  return g;
}

// specialize t = e^{2 pi i a2} q^{a1}
inline QExp spec_theta(const TQExp& f, const QQ& a1, const QQ& a2) {
  QExp g;
  if (f.trunc) {
    QQ shift(0);
    bool first = true;
    for (const auto& [k, c] : f.terms) {
      QQ d = k.second * a1;
      if (first || d < shift) shift = d;
      first = false;
    }
    g.trunc = *f.trunc + shift;
  }
  for (const auto& [k, c] : f.terms)
    g.add_term(k.first + k.second * a1, cyc_phase(a2 * k.second) * c);
  return g;
}

inline QExp spec_t1(const TQExp& f) {
  QExp g;
  g.trunc = f.trunc;
  for (const auto& [k, c] : f.terms) g.add_term(k.first, c);
  return g;
}

// order of vanishing at t = 1: min over stored q-levels of the (t-1)-multiplicity
inline long ord_t1(const TQExp& f) {
  if (f.terms.empty()) throw std::domain_error("t=1 order of zero series");
  long best = -1;
  auto it = f.terms.begin();
  while (it != f.terms.end()) {
    QQ qlev = it->first.first;
    // gather the integer-rescaled Laurent polynomial at this q-level
    std::map<long, CycNumber> poly;
    long lo = 0;
    for (; it != f.terms.end() && it->first.first == qlev; ++it) {
      long e = to_long(q_num(it->first.second * f.t_denom));
      poly[e] = it->second;
      lo = std::min(lo, e);
    }
    long mult = 0;
    std::map<long, CycNumber> cur = std::move(poly);
    while (true) {
      CycNumber at1;
      at1.c[0] = 0;
      for (const auto& [e, c] : cur) at1 = at1 + c;
      if (!at1.is_zero()) break;
      // divide by (s - 1): synthetic division from the top
      std::map<long, CycNumber> next;
      CycNumber carry;
      long hi = cur.rbegin()->first;
      long floor_e = cur.begin()->first;
      for (long e = hi; e > floor_e; --e) {
        auto f2 = cur.find(e);
        CycNumber coef = carry;
        if (f2 != cur.end()) coef = coef + f2->second;
        if (!coef.is_zero()) next[e - 1] = coef;
        carry = coef;
      }
      cur = std::move(next);
      ++mult;
      if (cur.empty()) break;  // exact power of (s-1); treat as its multiplicity
    }
    if (best < 0 || mult < best) best = mult;
    if (best == 0) break;
  }
  return best;
}

inline EqResult tq_eq(const TQExp& f, const TQExp& g, const std::optional<QQ>& T_min = {}) {
  EqResult res;
  res.common_trunc = min_trunc(f.trunc, g.trunc);
  TQExp d = tq_sub(f, g);
  for (const auto& [k, c] : d.terms) {
    if (!res.common_trunc || k.first < *res.common_trunc) {
      res.v = EqResult::V::unequal;
      res.witness = k.first;
      return res;
    }
  }
  if (!res.common_trunc || !T_min || *res.common_trunc >= *T_min)
    res.v = EqResult::V::equal;
  else
    res.v = EqResult::V::inconclusive;
  return res;
}

enum class QOp { add, mul, inv, truncate };

inline QExp qexp_arith(QOp op, const QExp& f, const QExp& g) {
  switch (op) {
    case QOp::add: return q_add(f, g);
    case QOp::mul: return q_mul(f, g);
    case QOp::inv: return q_inv(f);
    case QOp::truncate: {
      if (g.terms.size() != 1) throw std::invalid_argument("truncate order must be a monomial");
      return q_truncate(f, g.terms.begin()->first);
    }
  }
  throw std::logic_error("bad op");
}

inline TQExp qexp_arith(QOp op, const TQExp& f, const TQExp& g) {
  switch (op) {
    case QOp::add: return tq_add(f, g);
    case QOp::mul: return tq_mul(f, g);
    case QOp::inv: return tq_inv(f);
    case QOp::truncate: {
      if (g.terms.size() != 1) throw std::invalid_argument("truncate order must be a monomial");
      return tq_truncate(f, g.terms.begin()->first.first);
    }
  }
  throw std::logic_error("bad op");
}

}  // namespace ksl
