#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ksl/check.hpp"
#include "ksl/distribution.hpp"
#include "ksl/ksymbol.hpp"
#include "ksl/lattice.hpp"

namespace ksl {

// point of the rational projective line; canonical: gcd(p,q) = 1, q > 0, and the
// point at infinity is (1,0)
struct Cusp {
  ZZ p{1}, q{0};

  friend bool operator==(const Cusp& x, const Cusp& y) { return x.p == y.p && x.q == y.q; }
  friend bool operator!=(const Cusp& x, const Cusp& y) { return !(x == y); }
  friend bool operator<(const Cusp& x, const Cusp& y) {
    if (x.q != y.q) return x.q < y.q;
    return x.p < y.p;
  }
};

inline Cusp cusp(const ZZ& p, const ZZ& q) {
  if (p == 0 && q == 0) throw std::invalid_argument("cusp needs a nonzero vector");
  ZZ g = gcd_z(p, q);
  Cusp c{p / g, q / g};
  if (c.q < 0 || (c.q == 0 && c.p < 0)) {
    c.p = -c.p;
    c.q = -c.q;
  }
  return c;
}

inline Cusp cusp_infinity() { return Cusp{1, 0}; }
inline Cusp cusp_of(const QQ& x) { return cusp(q_num(x), q_den(x)); }

// slope p/q of a nonzero vector (x, y), as a point of the projective line
inline Cusp cusp_slope(const QQ& x, const QQ& y) {
  ZZ d = lcm_z(q_den(x), q_den(y));
  return cusp(q_num(x * d), q_num(y * d));
}

inline std::string cusp_str(const Cusp& c) {
  if (c.q == 0) return "inf";
  std::string s = c.p.get_str();
  if (c.q != 1) s += "/" + c.q.get_str();
  return s;
}

inline Cusp cusp_parse(const std::string& s) {
  if (s == "inf") return cusp_infinity();
  return cusp_of(parse_q(s));
}

// fractional-linear action of an invertible matrix
inline Cusp mobius(const Mat& g, const Cusp& c) {
  QQ x = g[0][0] * QQ(c.p) + g[0][1] * QQ(c.q);
  QQ y = g[1][0] * QQ(c.p) + g[1][1] * QQ(c.q);
  return cusp_slope(x, y);
}

// degree-zero divisor on the projective line
struct DivisorDelta0 {
  std::map<Cusp, long> terms;
  bool is_zero() const { return terms.empty(); }

  friend bool operator==(const DivisorDelta0& x, const DivisorDelta0& y) {
    return x.terms == y.terms;
  }
};

inline DivisorDelta0 divisor(const std::vector<std::pair<Cusp, long>>& parts) {
  DivisorDelta0 d;
  long deg = 0;
  for (const auto& [c, m] : parts) {
    deg += m;
    auto [it, fresh] = d.terms.emplace(c, m);
    if (!fresh) it->second += m;
    if (it->second == 0) d.terms.erase(c);
  }
  if (deg != 0) throw std::invalid_argument("divisor must have degree zero");
  return d;
}

// an n x n matrix acting on n x 2 matrices written row by row as coordinate pairs
inline Mat Phi_pairs(const Mat& m) {
  long n = static_cast<long>(m.size());
  Mat out(2 * n, Vec(2 * n, QQ(0)));
  for (long i = 0; i < n; ++i) {
    if (static_cast<long>(m[i].size()) != n) throw std::invalid_argument("matrix must be square");
    for (long j = 0; j < n; ++j) {
      out[2 * i][2 * j] = m[i][j];
      out[2 * i + 1][2 * j + 1] = m[i][j];
    }
  }
  return out;
}

namespace msdetail {

inline long rank_of(Mat rows) {
  size_t m = rows.size();
  long rank = 0;
  size_t cols = m ? rows[0].size() : 0;
  for (size_t c = 0, r = 0; c < cols && r < m; ++c) {
    size_t piv = r;
    while (piv < m && rows[piv][c] == 0) ++piv;
    if (piv == m) continue;
    std::swap(rows[piv], rows[r]);
    for (size_t i = r + 1; i < m; ++i) {
      if (rows[i][c] == 0) continue;
      QQ f = rows[i][c] / rows[r][c];
      for (size_t j = c; j < cols; ++j) rows[i][j] -= f * rows[r][j];
    }
    ++r;
    ++rank;
  }
  return rank;
}

inline bool dependent(const Mat& rows) {
  return rank_of(rows) < static_cast<long>(rows.size());
}

// smallest level whose torsion subgroup holds every atom of the symbol
inline long working_level(const KnSym& x, long base = 1) {
  long N = base;
  for (const auto& [t, c] : x.terms)
    for (const auto& a : t) N = lcm_l(N, a.p.level());
  return N;
}

// the equality ladder: exact canonical form first, then relator-span membership
// at the minimal working level, else failure with a separating witness
inline CheckResult eq_or_span(const std::string& label, const KnSym& lhs, const KnSym& rhs,
                              const std::set<RelatorKind>& kinds, long cap = 24) {
  if (lhs == rhs) return CheckResult::pass(label + " (exact)");
  KnSym diff = lhs - rhs;
  long N = working_level(diff);
  SpanCert cert = in_span(diff, relators(N, diff.n, kinds, cap));
  if (cert.member)
    return CheckResult::pass(label + " (span at level " + std::to_string(N) + " with " +
                             std::to_string(cert.coeff.size()) + " relators)");
  return CheckResult::fail(label + ": difference escapes the span at level " +
                           std::to_string(N) + ", witness pairing " +
                           q_str(pair_witness(cert.witness, diff)));
}

}  // namespace msdetail

// the matrix sending the standard cusp pair (inf, 0) to (r, s): columns are the
// canonical coprime representatives
inline Mat alpha_for(const Cusp& r, const Cusp& s) {
  if (r == s) throw std::invalid_argument("cusps must be distinct");
  return {{QQ(r.p), QQ(s.p)}, {QQ(r.q), QQ(s.q)}};
}

// value of the cusp-pair symbol on a 4-dimensional test function
inline KnSym xi2(const Cusp& r, const Cusp& s, const TestFn& phi) {
  if (phi.dim != 4) throw std::invalid_argument("test function must be 4-dimensional");
  return mu_n(pullback(phi, Phi_pairs(alpha_for(r, s))), 2);
}

// extension to degree-zero divisors: peel off one path at a time
inline KnSym xi_divisor(const DivisorDelta0& d, const TestFn& phi) {
  KnSym out(2);
  std::map<Cusp, long> left = d.terms;
  while (!left.empty()) {
    auto pos = std::find_if(left.begin(), left.end(), [](const auto& kv) { return kv.second > 0; });
    auto neg = std::find_if(left.begin(), left.end(), [](const auto& kv) { return kv.second < 0; });
    out = out + xi2(neg->first, pos->first, phi);
    if (--pos->second == 0) left.erase(pos);
    if (++neg->second == 0) left.erase(neg);
  }
  return out;
}

// evaluating through alpha and through alpha * diag(t) must give the same class:
// identical symbols when each factor keeps its own scale, distribution relators
// once the refinements genuinely differ
inline bool verify_torus_independence(const Cusp& r, const Cusp& s, const TestFn& phi,
                                      const std::pair<QQ, QQ>& t, long cap = 24) {
  if (t.first == 0 || t.second == 0) throw std::invalid_argument("torus entries must be nonzero");
  Mat a = alpha_for(r, s);
  Mat at = mat_mul(a, {{t.first, QQ(0)}, {QQ(0), t.second}});
  KnSym v1 = mu_n(pullback(phi, Phi_pairs(a)), 2);
  KnSym v2 = mu_n(pullback(phi, Phi_pairs(at)), 2);
  return msdetail::eq_or_span("torus independence", v1, v2, {RelatorKind::distribution}, cap).ok();
}

struct ManinCertificates {
  SpanCert two_term;    // xi(r,s) + xi(s,r), certified against the empty span: exactly zero
  SpanCert three_term;  // xi(r,s) + xi(s,t) + xi(t,r) over the relator span
  long level = 1;
};

inline ManinCertificates verify_manin_modsym(const Cusp& r, const Cusp& s, const Cusp& t,
                                             const TestFn& phi, long cap = 24) {
  if (r == s || s == t || t == r) throw std::invalid_argument("cusps must be pairwise distinct");
  ManinCertificates out;
  KnSym two = xi2(r, s, phi) + xi2(s, r, phi);
  out.two_term = in_span(two, RelatorSet{msdetail::working_level(two), 2, {}, {}});
  KnSym three = xi2(r, s, phi) + xi2(s, t, phi) + xi2(t, r, phi);
  out.level = msdetail::working_level(three);
  out.three_term =
      in_span(three, relators(out.level, 2, {RelatorKind::manin, RelatorKind::distribution}, cap));
  return out;
}

// the rank-n symbol on a tuple of functionals (rows of a square matrix):
// dependent tuples carry the zero symbol, bases transport the n-fold unit class
inline KnSym xi_n(const Mat& lambda, const TestFn& phi) {
  long n = static_cast<long>(lambda.size());
  if (n < 1) throw std::invalid_argument("functional tuple must be nonempty");
  for (const auto& row : lambda)
    if (static_cast<long>(row.size()) != n) throw std::invalid_argument("functional tuple must be square");
  if (phi.dim != 2 * n) throw std::invalid_argument("test function dimension mismatch");
  if (msdetail::dependent(lambda)) return KnSym(n);
  return mu_n(pullback(phi, mat_inverse(Phi_pairs(lambda))), n);
}

// divisor of the two kernel slopes; dependent pairs land on zero
inline DivisorDelta0 slope_nu(const Vec& l1, const Vec& l2) {
  if (l1.size() != 2 || l2.size() != 2)
    throw std::invalid_argument("functionals must live on the plane");
  if (l1[0] * l2[1] - l1[1] * l2[0] == 0) return DivisorDelta0{};
  Cusp k1c = cusp_slope(l1[1], -l1[0]);
  Cusp k2c = cusp_slope(l2[1], -l2[0]);
  return divisor({{k1c, 1}, {k2c, -1}});
}

// the rank-two symbol agrees with the cusp symbol of the kernel-slope divisor
// once the test function is transported through the pair's matrix
inline bool verify_cgcom(const Mat& lambda, const TestFn& phi, long cap = 24) {
  if (lambda.size() != 2) throw std::invalid_argument("needs a pair of functionals");
  KnSym lhs = xi_n(lambda, phi);
  DivisorDelta0 nu = slope_nu(lambda[0], lambda[1]);
  if (nu.is_zero()) return lhs.is_zero();
  TestFn moved = pullback(phi, mat_inverse(Phi_pairs(lambda)));
  KnSym rhs = xi_divisor(nu, moved);
  return msdetail::eq_or_span("kernel-slope compatibility", lhs, rhs,
                              {RelatorKind::manin, RelatorKind::distribution}, cap)
      .ok();
}

namespace msdetail {

inline Mat random_unimodular(std::mt19937& rng, long n) {
  Mat m = mat_identity(n);
  std::uniform_int_distribution<long> pick(0, n - 1);
  std::uniform_int_distribution<long> coef(-2, 2);
  long ops = 3 + static_cast<long>(rng() % 4);
  for (long k = 0; k < ops; ++k) {
    long i = pick(rng), j = pick(rng);
    if (i == j) continue;
    long c = coef(rng);
    if (c == 0) c = 1;
    for (long col = 0; col < n; ++col) m[i][col] += QQ(c) * m[j][col];
  }
  return m;
}

inline TorsionPoint random_point(std::mt19937& rng, long N) {
  while (true) {
    long a = static_cast<long>(rng() % N), b = static_cast<long>(rng() % N);
    if (a || b) return TorsionPoint(make_q(a, N), make_q(b, N));
  }
}

// unit-lattice product coset with the given pair of coordinates per block
inline TestFn block_fn(const std::vector<TorsionPoint>& pts) {
  long n = static_cast<long>(pts.size());
  Vec shift(2 * n);
  for (long i = 0; i < n; ++i) {
    shift[2 * i] = pts[i].a1;
    shift[2 * i + 1] = pts[i].a2;
  }
  return test_fn(2 * n, {{coset(shift, lattice(mat_identity(2 * n))), 1}});
}

// first (by size, then lexicographically) linearly dependent index subset
inline std::vector<long> min_dependent_subset(const Mat& rows) {
  long m = static_cast<long>(rows.size());
  for (long sz = 1; sz <= m; ++sz) {
    std::vector<long> idx(sz);
    auto rec = [&](auto&& self, long depth, long from) -> std::vector<long> {
      if (depth == sz) {
        Mat sub;
        for (long k : idx) sub.push_back(rows[k]);
        if (dependent(sub)) return idx;
        return {};
      }
      for (long k = from; k < m; ++k) {
        idx[depth] = k;
        auto got = self(self, depth + 1, k + 1);
        if (!got.empty()) return got;
      }
      return {};
    };
    auto got = rec(rec, 0, 0);
    if (!got.empty()) return got;
  }
  return {};
}

}  // namespace msdetail

struct AxiomReport {
  long n = 0;
  long level = 0;
  unsigned seed = 0;
  std::vector<CheckResult> checks;

  bool ok() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
      if (!c.ok()) return false;
    return true;
  }
};

// seeded battery for the defining properties of the rank-n symbol: basis-change
// compatibility, row scaling, permutation parity, vanishing on dependent tuples,
// and the alternating boundary sum, including the degenerate reduction through a
// minimal dependent subset. Halts at the first failed certificate.
inline AxiomReport verify_axioms(long n, long N, unsigned seed, long cases = 5, long cap = 24) {
  if (n < 2 || n > 3) throw std::invalid_argument("arity must be 2 or 3 at this scale");
  if (N < 2) throw std::invalid_argument("level must be at least 2");
  AxiomReport rep;
  rep.n = n;
  rep.level = N;
  rep.seed = seed;
  std::mt19937 rng(seed);

  std::set<RelatorKind> kinds = n == 2
      ? std::set<RelatorKind>{RelatorKind::manin}
      : std::set<RelatorKind>{RelatorKind::manin, RelatorKind::product_lift};
  RelatorSet boundary_span = relators(N, n, kinds, cap);
  RelatorSet pair_span = n == 2 ? boundary_span : relators(N, 2, {RelatorKind::manin}, cap);

  auto push = [&](CheckResult c) {
    rep.checks.push_back(std::move(c));
    return rep.checks.back().ok();
  };
  auto exact = [&](const std::string& label, const KnSym& lhs, const KnSym& rhs) {
    if (lhs == rhs) return CheckResult::pass(label + " (exact)");
    return CheckResult::fail(label + ": canonical forms differ");
  };

  const QQ scale_pool[] = {QQ(2), make_q(1, 3), QQ(-1), make_q(5, 2), QQ(-3)};

  for (long c = 0; c < cases; ++c) {
    Mat U = msdetail::random_unimodular(rng, n);
    std::vector<TorsionPoint> W(n);
    TorsionPoint wsum;
    do {
      for (long i = 0; i < n; ++i) W[i] = msdetail::random_point(rng, N);
      wsum = TorsionPoint();
      for (const auto& w : W) wsum = wsum + w;
    } while (wsum.is_zero());
    TestFn base = msdetail::block_fn(W);
    TestFn adapted = pullback(base, Phi_pairs(U));

    if (!push(exact("adapted coset evaluation", xi_n(U, adapted), ksym_points(W)))) return rep;

    Mat g = msdetail::random_unimodular(rng, n);
    if (c % 2)
      for (auto& row : g)
        for (auto& x : row) x *= scale_pool[c % 5];
    TestFn moved = pullback(adapted, Phi_pairs(mat_inverse(g)));
    if (!push(exact("basis change", xi_n(mat_mul(U, g), adapted), xi_n(U, moved)))) return rep;

    Mat scaled = U;
    for (long i = 0; i < n; ++i) {
      const QQ& t = scale_pool[(c + i) % 5];
      for (auto& x : scaled[i]) x *= t;
    }
    if (!push(exact("row scaling on an adapted coset", xi_n(scaled, adapted), xi_n(U, adapted))))
      return rep;

    Mat swapped = U;
    std::swap(swapped[0], swapped[(c % (n - 1)) + 1]);
    if (!push(exact("row swap parity", xi_n(swapped, adapted), -xi_n(U, adapted)))) return rep;

    Mat sing = U;
    long dup = static_cast<long>(rng() % n);
    sing[dup] = U[(dup + 1) % n];
    for (auto& x : sing[dup]) x *= QQ(c % 3);
    if (!xi_n(sing, base).is_zero()) {
      push(CheckResult::fail("dependent tuple must vanish"));
      return rep;
    }
    push(CheckResult::pass("dependent tuple vanishes (exact)"));

    // boundary alternating sum, general position: the extra functional is the
    // row sum, so the adapted points satisfy the same linear relation
    std::vector<Mat> tuples;
    std::vector<TorsionPoint> pts{wsum};
    for (long i = 0; i < n; ++i) pts.push_back(W[i]);
    Mat full(n + 1, Vec(n, QQ(0)));
    for (long j = 0; j < n; ++j)
      for (long i = 0; i < n; ++i) {
        full[0][i] += U[j][i];
        full[j + 1][i] = U[j][i];
      }
    KnSym S(n);
    long sign = 1;
    for (long i = 0; i <= n; ++i) {
      Mat tup;
      for (long j = 0; j <= n; ++j)
        if (j != i) tup.push_back(full[j]);
      S = S + QQ(sign) * xi_n(tup, adapted);
      sign = -sign;
    }
    if (!push(exact("boundary sum matches the point cocycle", S, cocycle_sum(pts)))) return rep;
    SpanCert cert = in_span(S, boundary_span);
    if (!cert.member) {
      push(CheckResult::fail("boundary sum escapes the relator span, witness pairing " +
                             q_str(pair_witness(cert.witness, S))));
      return rep;
    }
    push(CheckResult::pass("boundary sum in the relator span (" +
                           std::to_string(cert.coeff.size()) + " relators)"));

    // degenerate tuple with a proportional pair: every surviving term cancels
    // exactly after row rescaling
    Mat prop(n + 1, Vec(n));
    for (long i = 0; i < n; ++i) {
      prop[0][i] = QQ(2) * U[0][i];
      for (long j = 0; j < n; ++j) prop[j + 1][i] = U[j][i];
    }
    KnSym P(n);
    sign = 1;
    for (long i = 0; i <= n; ++i) {
      Mat tup;
      for (long j = 0; j <= n; ++j)
        if (j != i) tup.push_back(prop[j]);
      P = P + QQ(sign) * xi_n(tup, adapted);
      sign = -sign;
    }
    auto minset = msdetail::min_dependent_subset(prop);
    if (minset != std::vector<long>{0, 1} || !P.is_zero()) {
      push(CheckResult::fail("proportional-pair boundary sum must cancel exactly"));
      return rep;
    }
    push(CheckResult::pass("proportional-pair reduction (exact)"));

    if (n == 3) {
      // dependent triple among four: terms omitting an outside index vanish and
      // the remaining sum factors through the lower-arity cocycle
      TorsionPoint w01 = W[0] + W[1];
      if (w01.is_zero()) continue;
      Mat dg(n + 1, Vec(n));
      for (long i = 0; i < n; ++i) {
        dg[0][i] = U[0][i] + U[1][i];
        for (long j = 0; j < n; ++j) dg[j + 1][i] = U[j][i];
      }
      auto J = msdetail::min_dependent_subset(dg);
      if (J != std::vector<long>{0, 1, 2}) {
        push(CheckResult::fail("minimal dependent subset not located"));
        return rep;
      }
      push(CheckResult::pass("minimal dependent subset located (size 3 of 4)"));

      Mat outside{dg[0], dg[1], dg[2]};
      if (!xi_n(outside, adapted).is_zero()) {
        push(CheckResult::fail("tuple omitting an outside index must vanish"));
        return rep;
      }
      push(CheckResult::pass("tuples omitting outside indices vanish (exact)"));

      KnSym D(n);
      sign = 1;
      for (long i = 0; i <= n; ++i) {
        Mat tup;
        for (long j = 0; j <= n; ++j)
          if (j != i) tup.push_back(dg[j]);
        D = D + QQ(sign) * xi_n(tup, adapted);
        sign = -sign;
      }
      std::vector<TorsionPoint> head{w01, W[0], W[1]};
      KnSym low(2);
      sign = 1;
      for (long i = 0; i < 3; ++i) {
        std::vector<TorsionPoint> rest;
        for (long j = 0; j < 3; ++j)
          if (j != i) rest.push_back(head[j]);
        low = low + QQ(sign) * ksym_points(rest);
        sign = -sign;
      }
      if (!push(exact("degenerate sum factors through the lower arity", D,
                      mul_kn(low, ksym_points({W[2]})))))
        return rep;
      SpanCert lower = in_span(low, pair_span);
      SpanCert direct = in_span(D, boundary_span);
      if (!lower.member || !direct.member) {
        push(CheckResult::fail("degenerate boundary certificates disagree"));
        return rep;
      }
      push(CheckResult::pass("degenerate boundary sum certified on both routes"));
    }
  }
  return rep;
}

}  // namespace ksl
