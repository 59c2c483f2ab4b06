#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ksl/rational.hpp"

namespace ksl {

using Vec = std::vector<QQ>;
using Mat = std::vector<std::vector<QQ>>;

inline Mat mat_identity(long m) {
  Mat a(m, Vec(m));
  for (long i = 0; i < m; ++i) a[i][i] = 1;
  return a;
}

inline Mat mat_scalar(const QQ& t, long m) {
  Mat a(m, Vec(m));
  for (long i = 0; i < m; ++i) a[i][i] = t;
  return a;
}

inline Mat mat_transpose(const Mat& a) {
  Mat t(a[0].size(), Vec(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline Vec mat_apply(const Mat& a, const Vec& x) {
  if (a[0].size() != x.size()) throw std::invalid_argument("dimension mismatch");
  Vec y(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
  Mat c(a.size(), Vec(b[0].size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

// Gauss-Jordan; throws on singular input
inline Mat mat_inverse(Mat a) {
  size_t m = a.size();
  Mat inv = mat_identity(static_cast<long>(m));
  for (size_t col = 0; col < m; ++col) {
    size_t piv = col;
    while (piv < m && a[piv][col] == 0) ++piv;
    if (piv == m) throw std::invalid_argument("singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    QQ d = a[col][col];
    for (size_t j = 0; j < m; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (size_t i = 0; i < m; ++i) {
      if (i == col || a[i][col] == 0) continue;
      QQ f = a[i][col];
      for (size_t j = 0; j < m; ++j) {
        a[i][j] -= f * a[col][j];
        inv[i][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// row Hermite form: upper echelon, positive pivots, entries above a pivot reduced
// into [0, pivot); zero rows are dropped
inline std::vector<std::vector<ZZ>> hnf_rows(std::vector<std::vector<ZZ>> a) {
  if (a.empty()) return a;
  size_t rows = a.size(), cols = a[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    while (true) {
      size_t first = rows, second = rows;
      for (size_t i = r; i < rows; ++i)
        if (a[i][c] != 0) {
          if (first == rows) {
            first = i;
          } else {
            second = i;
            break;
          }
        }
      if (first == rows) break;
      if (second == rows) {
        std::swap(a[first], a[r]);
        break;
      }
      size_t big = first, small = second;
      if (abs(a[big][c]) < abs(a[small][c])) std::swap(big, small);
      ZZ q = a[big][c] / a[small][c];
      for (size_t j = 0; j < cols; ++j) a[big][j] -= q * a[small][j];
    }
    if (a[r][c] == 0) continue;
    if (a[r][c] < 0)
      for (size_t j = 0; j < cols; ++j) a[r][j] = -a[r][j];
    for (size_t i = 0; i < r; ++i) {
      ZZ q;
      mpz_fdiv_q(q.get_mpz_t(), a[i][c].get_mpz_t(), a[r][c].get_mpz_t());
      if (q != 0)
        for (size_t j = 0; j < cols; ++j) a[i][j] -= q * a[r][j];
    }
    ++r;
  }
  a.resize(r);
  return a;
}

// full-rank lattice in Q^m, rows of `basis` generate; canonical form is the scaled
// integer Hermite form, so equal lattices have equal bases
struct LatticeQ {
  long dim = 0;
  Mat basis;

  bool operator==(const LatticeQ& o) const { return dim == o.dim && basis == o.basis; }
  bool operator!=(const LatticeQ& o) const { return !(*this == o); }
  bool operator<(const LatticeQ& o) const {
    if (dim != o.dim) return dim < o.dim;
    for (long i = 0; i < dim; ++i)
      for (long j = 0; j < dim; ++j) {
        if (basis[i][j] < o.basis[i][j]) return true;
        if (o.basis[i][j] < basis[i][j]) return false;
      }
    return false;
  }
};

inline LatticeQ lattice(const Mat& rows) {
  if (rows.empty()) throw std::invalid_argument("empty basis");
  size_t m = rows[0].size();
  if (m == 0) throw std::invalid_argument("zero-dimensional ambient space");
  ZZ d(1);
  for (const auto& row : rows) {
    if (row.size() != m) throw std::invalid_argument("ragged basis");
    for (const auto& x : row) d = lcm_z(d, q_den(x));
  }
  std::vector<std::vector<ZZ>> z(rows.size(), std::vector<ZZ>(m));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < m; ++j) {
      QQ s = rows[i][j] * QQ(d);
      z[i][j] = q_num(s);
    }
  z = hnf_rows(std::move(z));
  if (z.size() != m) throw std::invalid_argument("basis does not have full rank");
  LatticeQ L;
  L.dim = static_cast<long>(m);
  L.basis.assign(m, Vec(m));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) L.basis[i][j] = QQ(z[i][j]) / QQ(d);
  return L;
}

inline LatticeQ lattice_scaled(const QQ& r, long m) {
  if (r <= 0) throw std::invalid_argument("scale must be positive");
  return lattice(mat_scalar(r, m));
}

// coordinates of v in the basis rows: the c with c^T basis = v
inline Vec lattice_coords(const LatticeQ& L, const Vec& v) {
  return mat_apply(mat_inverse(mat_transpose(L.basis)), v);
}

inline bool lattice_contains(const LatticeQ& L, const Vec& v) {
  for (const auto& x : lattice_coords(L, v))
    if (!is_integer(x)) return false;
  return true;
}

inline bool lattice_subset(const LatticeQ& inner, const LatticeQ& outer) {
  for (const auto& row : inner.basis)
    if (!lattice_contains(outer, row)) return false;
  return true;
}

// positive generator of { t : t Z^m is contained in L }
inline QQ minimal_r(const LatticeQ& L) {
  Mat inv = mat_inverse(L.basis);
  QQ r(0);
  for (const auto& row : inv)
    for (const auto& x : row) {
      if (x == 0) continue;
      QQ g = QQ(1) / qabs(x);
      r = r == 0 ? g : QQ(lcm_z(q_num(r), q_num(g))) / QQ(gcd_z(q_den(r), q_den(g)));
    }
  return r;
}

inline LatticeQ dual_lattice(const LatticeQ& L) { return lattice(mat_transpose(mat_inverse(L.basis))); }

inline LatticeQ lattice_sum(const LatticeQ& a, const LatticeQ& b) {
  if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch");
  Mat rows = a.basis;
  rows.insert(rows.end(), b.basis.begin(), b.basis.end());
  return lattice(rows);
}

inline LatticeQ intersect(const LatticeQ& a, const LatticeQ& b) {
  return dual_lattice(lattice_sum(dual_lattice(a), dual_lattice(b)));
}

// coset shift + L with the shift reduced to the canonical representative
struct Coset {
  Vec shift;
  LatticeQ lattice;

  bool operator==(const Coset& o) const { return lattice == o.lattice && shift == o.shift; }
  bool operator<(const Coset& o) const {
    if (lattice != o.lattice) return lattice < o.lattice;
    for (size_t i = 0; i < shift.size(); ++i) {
      if (shift[i] < o.shift[i]) return true;
      if (o.shift[i] < shift[i]) return false;
    }
    return false;
  }
};

inline Coset coset(const Vec& shift, LatticeQ L) {
  if (static_cast<long>(shift.size()) != L.dim) throw std::invalid_argument("dimension mismatch");
  Vec c = lattice_coords(L, shift);
  for (auto& x : c) x = frac_q(x);
  Vec red(L.dim, QQ(0));
  for (long i = 0; i < L.dim; ++i)
    for (long j = 0; j < L.dim; ++j) red[j] += c[i] * L.basis[i][j];
  return Coset{std::move(red), std::move(L)};
}

inline bool coset_contains(const Coset& c, const Vec& x) {
  Vec d(x.size());
  for (size_t i = 0; i < x.size(); ++i) d[i] = x[i] - c.shift[i];
  return lattice_contains(c.lattice, d);
}

// partition of c into cosets of the sublattice; exact, length = index
inline std::vector<Coset> decompose_to(const Coset& c, const LatticeQ& sub) {
  if (!lattice_subset(sub, c.lattice)) throw std::invalid_argument("containment violated");
  long m = c.lattice.dim;
  std::vector<std::vector<ZZ>> rel(m, std::vector<ZZ>(m));
  for (long i = 0; i < m; ++i) {
    Vec coords = lattice_coords(c.lattice, sub.basis[i]);
    for (long j = 0; j < m; ++j) rel[i][j] = q_num(coords[j]);
  }
  rel = hnf_rows(std::move(rel));

  std::vector<Coset> out;
  std::vector<long> k(m, 0);
  while (true) {
    Vec p = c.shift;
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < m; ++j) p[j] += QQ(k[i]) * c.lattice.basis[i][j];
    out.push_back(coset(p, sub));
    long i = m - 1;
    while (i >= 0 && k[i] + 1 >= to_long(rel[i][i])) k[i--] = 0;
    if (i < 0) break;
    ++k[i];
  }
  return out;
}

inline std::vector<Coset> coset_decompose(const Coset& c, const QQ& r) {
  return decompose_to(c, lattice_scaled(r, c.lattice.dim));
}

// integer combination of coset indicators; canonical form refines everything to
// the common intersection lattice and merges
struct TestFn {
  long dim = 0;
  std::map<Coset, long> terms;

  bool is_zero() const { return terms.empty(); }
};

inline TestFn test_fn(long dim, const std::vector<std::pair<Coset, long>>& parts) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  TestFn f;
  f.dim = dim;
  if (parts.empty()) return f;
  LatticeQ common = parts[0].first.lattice;
  for (const auto& [c, coef] : parts) {
    if (c.lattice.dim != dim) throw std::invalid_argument("dimension mismatch");
    common = intersect(common, c.lattice);
  }
  for (const auto& [c, coef] : parts) {
    if (coef == 0) continue;
    for (const auto& piece : decompose_to(c, common)) {
      auto it = f.terms.emplace(piece, 0).first;
      it->second += coef;
      if (it->second == 0) f.terms.erase(it);
    }
  }
  return f;
}

inline TestFn operator+(const TestFn& a, const TestFn& b) {
  if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch");
  std::vector<std::pair<Coset, long>> parts(a.terms.begin(), a.terms.end());
  parts.insert(parts.end(), b.terms.begin(), b.terms.end());
  return test_fn(a.dim, parts);
}

inline TestFn operator-(const TestFn& a, const TestFn& b) {
  if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch");
  std::vector<std::pair<Coset, long>> parts(a.terms.begin(), a.terms.end());
  for (const auto& [c, coef] : b.terms) parts.emplace_back(c, -coef);
  return test_fn(a.dim, parts);
}

inline long value_at(const TestFn& f, const Vec& x) {
  long v = 0;
  for (const auto& [c, coef] : f.terms)
    if (coset_contains(c, x)) v += coef;
  return v;
}

// (M^* f)(x) = f(M x)
inline TestFn pullback(const TestFn& f, const Mat& M) {
  Mat minv = mat_inverse(M);
  std::vector<std::pair<Coset, long>> parts;
  for (const auto& [c, coef] : f.terms) {
    Mat rows;
    for (const auto& g : c.lattice.basis) rows.push_back(mat_apply(minv, g));
    parts.emplace_back(coset(mat_apply(minv, c.shift), lattice(rows)), coef);
  }
  return test_fn(f.dim, parts);
}

}  // namespace ksl
