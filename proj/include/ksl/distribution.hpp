#pragma once

#include <map>
#include <string>
#include <vector>

#include "ksl/check.hpp"
#include "ksl/ksymbol.hpp"
#include "ksl/lattice.hpp"
#include "ksl/theta.hpp"

namespace ksl {

namespace ddetail {

// refine one 2k-dimensional coset at scale r and collect the torsion tuples
// (w/r mod Z^2k read off in pairs), keeping multiplicities
inline std::vector<std::vector<TorsionPoint>> refined_tuples(const Coset& c, const QQ& r) {
  long m = c.lattice.dim;
  std::vector<std::vector<TorsionPoint>> out;
  for (const auto& piece : decompose_to(c, lattice_scaled(r, m))) {
    std::vector<TorsionPoint> tup;
    for (long i = 0; i + 1 < m; i += 2)
      tup.emplace_back(piece.shift[i] / r, piece.shift[i + 1] / r);
    out.push_back(std::move(tup));
  }
  return out;
}

// signed multiset of torsion points hit by an r-refinement of f (dim 2 only);
// raw points, no mod +- folding, for the unit-product oracle
inline std::map<TorsionPoint, long> refined_points(const TestFn& f, const QQ& r) {
  std::map<TorsionPoint, long> pts;
  for (const auto& [c, coef] : f.terms)
    for (const auto& tup : refined_tuples(c, r)) {
      auto it = pts.emplace(tup[0], 0).first;
      it->second += coef;
      if (it->second == 0) pts.erase(it);
    }
  return pts;
}

}  // namespace ddetail

// the Q^x-invariant distribution on 2-dimensional test functions, valued in
// formal unit classes: [a + Z^2] goes to [g_a], general cosets via the finest
// refinement r Z^2 that their own lattice admits
inline K1El mu1_refined(const TestFn& f, const QQ& r) {
  if (f.dim != 2) throw std::invalid_argument("test function must be 2-dimensional");
  K1El out;
  for (const auto& [pt, coef] : ddetail::refined_points(f, r)) out = out + QQ(coef) * k1(pt);
  return out;
}

inline K1El mu1(const TestFn& f) {
  if (f.dim != 2) throw std::invalid_argument("test function must be 2-dimensional");
  K1El out;
  for (const auto& [c, coef] : f.terms) {
    QQ r = minimal_r(c.lattice);
    for (const auto& tup : ddetail::refined_tuples(c, r)) out = out + QQ(coef) * k1(tup[0]);
  }
  return out;
}

namespace ddetail {

// canonical bases of direct sums split along the coordinate pairs; detect that
inline bool splits_in_pairs(const LatticeQ& L) {
  for (long i = 0; i < L.dim; ++i)
    for (long j = 0; j < L.dim; ++j)
      if (i / 2 != j / 2 && L.basis[i][j] != 0) return false;
  return true;
}

inline Coset pair_block(const Coset& c, long b) {
  Mat rows(2, Vec(2));
  for (long i = 0; i < 2; ++i)
    for (long j = 0; j < 2; ++j) rows[i][j] = c.lattice.basis[2 * b + i][2 * b + j];
  return coset({c.shift[2 * b], c.shift[2 * b + 1]}, lattice(rows));
}

}  // namespace ddetail

// n-fold version on 2n-dimensional test functions, valued in K-symbols; product
// cosets factor and go to the symbol of their factors' unit classes, each factor
// refined at its own minimal scale so that the value on a product of unit-class
// cosets is literally the symbol of the factors' unit classes
inline KnSym mu_n(const TestFn& f, long n) {
  if (n < 1) throw std::invalid_argument("arity must be positive");
  if (f.dim != 2 * n) throw std::invalid_argument("test function must be 2n-dimensional");
  KnSym out(n);
  for (const auto& [c, coef] : f.terms) {
    if (ddetail::splits_in_pairs(c.lattice)) {
      std::vector<std::vector<TorsionPoint>> per_block(n);
      for (long b = 0; b < n; ++b) {
        Coset cb = ddetail::pair_block(c, b);
        QQ r = minimal_r(cb.lattice);
        for (const auto& tup : ddetail::refined_tuples(cb, r)) per_block[b].push_back(tup[0]);
      }
      std::vector<size_t> idx(n, 0);
      while (true) {
        std::vector<TorsionPoint> tup(n);
        for (long b = 0; b < n; ++b) tup[b] = per_block[b][idx[b]];
        out = out + QQ(coef) * ksym_points(tup);
        long b = n - 1;
        while (b >= 0 && ++idx[b] == per_block[b].size()) idx[b--] = 0;
        if (b < 0) break;
      }
    } else {
      QQ r = minimal_r(c.lattice);
      for (const auto& tup : ddetail::refined_tuples(c, r)) out = out + QQ(coef) * ksym_points(tup);
    }
  }
  return out;
}

inline KnSym mu_n_refined(const TestFn& f, long n, const QQ& r) {
  if (n < 1) throw std::invalid_argument("arity must be positive");
  if (f.dim != 2 * n) throw std::invalid_argument("test function must be 2n-dimensional");
  KnSym out(n);
  for (const auto& [c, coef] : f.terms)
    for (const auto& tup : ddetail::refined_tuples(c, r)) out = out + QQ(coef) * ksym_points(tup);
  return out;
}

namespace ddetail {

// product of Siegel units with positive integer exponents, truncated exactly at T
inline QExp unit_product(const std::vector<std::pair<TorsionPoint, long>>& factors, const QQ& T) {
  QQ vsum(0), vmax(0);
  bool any = false;
  for (const auto& [a, e] : factors) {
    if (a.is_zero()) continue;  // the unit there is the constant 1
    QQ v = bernoulli2_half(a.a1);
    vsum += v * e;
    vmax = any ? qmax(vmax, v) : v;
    any = true;
  }
  if (!any) return QExp::monomial(QQ(0), CycNumber(QQ(1)), T);
  QQ Tb = qmax(T + vmax - vsum, vmax + T);
  QExp acc = QExp::monomial(QQ(0), CycNumber(QQ(1)), Tb);
  for (const auto& [a, e] : factors) {
    if (a.is_zero()) continue;
    QExp u = siegel_unit(a, Tb);
    for (long i = 0; i < e; ++i) acc = q_mul(acc, u);
  }
  return q_truncate(acc, T);
}

}  // namespace ddetail

// two refinements of the same test function must give the same unit class; checked
// through relator span (formal route) and through actual q-expansions of the unit
// products (oracle route), the latter up to one positive rational constant, which
// is reported
inline CheckResult verify_mu_welldef(const TestFn& f, const QQ& r1, const QQ& r2,
                                     const QQ& T = QQ(3)) {
  if (f.dim != 2) throw std::invalid_argument("test function must be 2-dimensional");
  K1El m1 = mu1_refined(f, r1), m2 = mu1_refined(f, r2);
  K1El diff = m1 - m2;

  std::string label = "mu well-defined across refinements " + q_str(r1) + " vs " + q_str(r2);
  if (diff.is_zero() && r1 == r2) return CheckResult::pass(label + " (identical)");

  bool span_ok = true;
  if (!diff.is_zero()) {
    long N = 1;
    for (const auto& [atom, coef] : diff.terms) N = lcm_l(N, atom.p.level());
    QQ r12 = QQ(lcm_z(q_num(r1), q_num(r2))) / QQ(gcd_z(q_den(r1), q_den(r2)));
    long tmax = std::max(to_long(q_num(r12 / r1)), to_long(q_num(r12 / r2)));
    RelatorSet rs = relators(N, 1, {RelatorKind::distribution}, N * std::max(tmax, 2L));
    span_ok = in_span(ksym({diff}), rs).member;
  }

  auto pts1 = ddetail::refined_points(f, r1);
  auto pts2 = ddetail::refined_points(f, r2);
  std::vector<std::pair<TorsionPoint, long>> lhs, rhs;
  for (const auto& [a, e] : pts1) (e > 0 ? lhs : rhs).emplace_back(a, std::abs(e));
  for (const auto& [a, e] : pts2) (e > 0 ? rhs : lhs).emplace_back(a, std::abs(e));
  QExp pl = ddetail::unit_product(lhs, T);
  QExp pr = ddetail::unit_product(rhs, T);

  if (pl.terms.empty() || pr.terms.empty())
    return CheckResult::inconclusive(label + ": truncation left no terms to compare");
  auto [el, cl] = *pl.terms.begin();
  auto [er, cr] = *pr.terms.begin();
  if (el != er)
    return CheckResult::fail(label + ": leading exponents differ, " + q_str(el) + " vs " +
                             q_str(er));
  QQ kappa(1);
  if (cl.is_rational() && cr.is_rational()) {
    kappa = cl.rational_value() / cr.rational_value();
    if (kappa <= 0) return CheckResult::fail(label + ": negative constant " + q_str(kappa));
  } else if (!(cl == cr)) {
    return CheckResult::inconclusive(label + ": leading constant not rational");
  }
  EqResult eq = qexp_eq(pl, q_scale(CycNumber(kappa), pr));

  if (eq.is_unequal())
    return CheckResult::fail(label + ": unit products differ at exponent " + q_str(eq.witness));
  if (!span_ok)
    return CheckResult::inconclusive(label +
                                     ": no relator certificate; q-expansions agree only up to "
                                     "truncation " +
                                     q_str(T));
  std::string tail = kappa == 1 ? "" : " (constant " + q_str(kappa) + ")";
  return CheckResult::pass(label + tail);
}

}  // namespace ksl
