#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <sstream>

#include "ksl/rational.hpp"

namespace ksl {

inline long euler_phi(long n) {
  long result = n;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

namespace detail {

// quotient of integer polynomials, exact division assumed (num % den == 0)
inline std::vector<ZZ> zpoly_div(std::vector<ZZ> num, const std::vector<ZZ>& den) {
  std::vector<ZZ> q(num.size() - den.size() + 1);
  for (long i = static_cast<long>(q.size()) - 1; i >= 0; --i) {
    ZZ c = num[i + den.size() - 1] / den.back();
    q[i] = c;
    if (c != 0)
      for (size_t j = 0; j < den.size(); ++j) num[i + j] -= c * den[j];
  }
  return q;
}

inline std::mutex& cyclo_mutex() {
  static std::mutex m;
  return m;
}

inline const std::vector<ZZ>& cyclo_poly_locked(long L, std::map<long, std::vector<ZZ>>& cache) {
  auto it = cache.find(L);
  if (it != cache.end()) return it->second;
  std::vector<ZZ> poly(L + 1);
  poly[0] = -1;
  poly[L] = 1;  // x^L - 1
  for (long d = 1; d < L; ++d)
    if (L % d == 0) poly = zpoly_div(std::move(poly), cyclo_poly_locked(d, cache));
  return cache.emplace(L, std::move(poly)).first->second;
}

}  // namespace detail

// coefficients of the L-th cyclotomic polynomial, ascending degree
inline const std::vector<ZZ>& cyclo_poly(long L) {
  if (L < 1) throw std::invalid_argument("conductor must be positive");
  static std::map<long, std::vector<ZZ>> cache;
  std::lock_guard<std::mutex> lock(detail::cyclo_mutex());
  return detail::cyclo_poly_locked(L, cache);
}

// element of Q(zeta_L): polynomial in zeta_L reduced mod Phi_L, phi(L) coefficients
struct CycNumber {
  long conductor = 1;
  std::vector<QQ> c;

  CycNumber() : c(1) {}
  explicit CycNumber(const QQ& r) : c(1, r) {}
  explicit CycNumber(long r) : c(1, QQ(r)) {}
  CycNumber(long L, std::vector<QQ> coeffs) : conductor(L), c(std::move(coeffs)) {}

  bool is_zero() const {
    for (const auto& x : c)
      if (x != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (size_t k = 1; k < c.size(); ++k)
      if (c[k] != 0) return false;
    return true;
  }
  QQ rational_value() const {
    if (!is_rational()) throw std::domain_error("not a rational number");
    return c[0];
  }
};

// reduce arbitrary polynomial in zeta_L mod Phi_L to length phi(L)
inline CycNumber cyc_reduce(long L, std::vector<QQ> poly) {
  const auto& phi = cyclo_poly(L);
  size_t deg = phi.size() - 1;
  if (poly.size() < deg) poly.resize(deg);
  for (size_t i = poly.size(); i-- > deg;) {
    QQ lead = poly[i];
    if (lead != 0) {
      poly[i] = 0;
      for (size_t j = 0; j < deg; ++j) poly[i - deg + j] -= lead * QQ(phi[j]);
    }
  }
  poly.resize(deg);
  return CycNumber(L, std::move(poly));
}

inline CycNumber cyc_embed(const CycNumber& x, long M) {
  if (M == x.conductor) return x;
  if (M % x.conductor != 0) throw std::invalid_argument("embed target not a multiple of conductor");
  long step = M / x.conductor;
  std::vector<QQ> poly(static_cast<size_t>(x.c.size() - 1) * step + 1);
  for (size_t k = 0; k < x.c.size(); ++k) poly[k * step] = x.c[k];
  return cyc_reduce(M, std::move(poly));
}

inline long common_conductor(const CycNumber& a, const CycNumber& b) {
  return lcm_l(a.conductor, b.conductor);
}

inline CycNumber operator+(const CycNumber& a, const CycNumber& b) {
  long L = common_conductor(a, b);
  CycNumber x = cyc_embed(a, L), y = cyc_embed(b, L);
  for (size_t k = 0; k < x.c.size(); ++k) x.c[k] += y.c[k];
  return x;
}

inline CycNumber operator-(const CycNumber& a) {
  CycNumber x = a;
  for (auto& v : x.c) v = -v;
  return x;
}

inline CycNumber operator-(const CycNumber& a, const CycNumber& b) { return a + (-b); }

inline CycNumber operator*(const CycNumber& a, const CycNumber& b) {
  long L = common_conductor(a, b);
  CycNumber x = cyc_embed(a, L), y = cyc_embed(b, L);
  std::vector<QQ> prod(x.c.size() + y.c.size() - 1);
  for (size_t i = 0; i < x.c.size(); ++i) {
    if (x.c[i] == 0) continue;
    for (size_t j = 0; j < y.c.size(); ++j)
      if (y.c[j] != 0) prod[i + j] += x.c[i] * y.c[j];
  }
  return cyc_reduce(L, std::move(prod));
}

inline CycNumber operator*(const QQ& r, const CycNumber& a) {
  CycNumber x = a;
  for (auto& v : x.c) v *= r;
  return x;
}

inline bool operator==(const CycNumber& a, const CycNumber& b) {
  long L = common_conductor(a, b);
  return cyc_embed(a, L).c == cyc_embed(b, L).c;
}

inline bool operator!=(const CycNumber& a, const CycNumber& b) { return !(a == b); }

namespace detail {

struct QPoly {
  std::vector<QQ> c;  // ascending, may have zero leading entries
  long deg() const {
    for (size_t i = c.size(); i-- > 0;)
      if (c[i] != 0) return static_cast<long>(i);
    return -1;
  }
};

inline QPoly qpoly_sub_mul(const QPoly& a, const QQ& s, long shift, const QPoly& b) {
  // a - s*x^shift*b
  QPoly r = a;
  if (r.c.size() < b.c.size() + shift) r.c.resize(b.c.size() + shift);
  for (size_t j = 0; j < b.c.size(); ++j) r.c[j + shift] -= s * b.c[j];
  return r;
}

}  // namespace detail

// multiplicative inverse via extended euclid against Phi_L
inline CycNumber cyc_inv(const CycNumber& a) {
  if (a.is_zero()) throw std::domain_error("inversion of zero");
  if (a.is_rational()) return CycNumber(a.conductor == 1 ? 1 : a.conductor,
                                        [&] {
                                          std::vector<QQ> v(a.c.size());
                                          v[0] = QQ(1) / a.c[0];
                                          return v;
                                        }());
  long L = a.conductor;
  const auto& phiz = cyclo_poly(L);
  detail::QPoly r0, r1, s0, s1;
  r0.c.assign(phiz.begin(), phiz.end());
  r1.c = a.c;
  s0.c = {QQ(0)};
  s1.c = {QQ(1)};
  while (r1.deg() > 0) {
    // divide r0 by r1
    detail::QPoly rem = r0, quo_s = s0;
    long d1 = r1.deg();
    QQ lead1 = r1.c[d1];
    while (rem.deg() >= d1) {
      long d = rem.deg();
      QQ f = rem.c[d] / lead1;
      rem = detail::qpoly_sub_mul(rem, f, d - d1, r1);
      rem.c[d] = 0;
      quo_s = detail::qpoly_sub_mul(quo_s, f, d - d1, s1);
    }
    r0 = r1;
    s0 = s1;
    r1 = rem;
    s1 = quo_s;
  }
  if (r1.deg() != 0) throw std::logic_error("cyclotomic gcd not constant");
  QQ g = r1.c[0];
  std::vector<QQ> inv = s1.c;
  for (auto& v : inv) v /= g;
  return cyc_reduce(L, std::move(inv));
}

inline CycNumber zeta(long L, long k) {
  if (L < 1) throw std::invalid_argument("conductor must be positive");
  long e = ((k % L) + L) % L;
  std::vector<QQ> poly(static_cast<size_t>(e) + 1);
  poly[e] = 1;
  return cyc_reduce(L, std::move(poly));
}

// e^{2 pi i x} for rational x, exact
inline CycNumber cyc_phase(const QQ& x) {
  QQ f = frac_q(x);
  long den = to_long(q_den(f));
  long num = to_long(q_num(f));
  return zeta(den, num);
}

enum class CycOp { add, mul, inv, embed };

inline CycNumber cyc_arith(CycOp op, const CycNumber& x, const CycNumber& y) {
  switch (op) {
    case CycOp::add: return x + y;
    case CycOp::mul: return x * y;
    case CycOp::inv: return cyc_inv(x);
    case CycOp::embed: {
      if (!y.is_rational() || !is_integer(y.rational_value()))
        throw std::invalid_argument("embed target must be an integer conductor");
      return cyc_embed(x, to_long(q_num(y.rational_value())));
    }
  }
  throw std::logic_error("bad op");
}

inline std::complex<double> cyc_eval(const CycNumber& a) {
  const double two_pi = 6.283185307179586476925286766559;
  std::complex<double> z(0.0, 0.0);
  for (size_t k = 0; k < a.c.size(); ++k) {
    if (a.c[k] == 0) continue;
    double ang = two_pi * static_cast<double>(k) / static_cast<double>(a.conductor);
    z += a.c[k].get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return z;
}

// polynomial-in-z rendering, deterministic, parseable
inline std::string cyc_str(const CycNumber& a) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t k = 0; k < a.c.size(); ++k) {
    if (a.c[k] == 0) continue;
    QQ v = a.c[k];
    if (first) {
      os << q_str(v);
      first = false;
    } else if (v < 0) {
      os << " - " << q_str(-v);
    } else {
      os << " + " << q_str(v);
    }
    if (k > 0) os << "*z^" << k;
  }
  return os.str();
}

inline CycNumber cyc_parse(long conductor, const std::string& s) {
  std::vector<QQ> poly(static_cast<size_t>(euler_phi(conductor)));
  if (s == "0") return CycNumber(conductor, std::move(poly));
  size_t pos = 0;
  int sign = 1;
  while (pos < s.size()) {
    while (pos < s.size() && s[pos] == ' ') ++pos;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
      while (pos < s.size() && s[pos] == ' ') ++pos;
    }
    size_t end = s.find_first_of("+-", pos);
    // '-' inside a number only occurs at term start, handled above
    std::string term = s.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    while (!term.empty() && term.back() == ' ') term.pop_back();
    if (term.empty()) throw std::invalid_argument("bad cyclotomic literal: " + s);
    size_t star = term.find("*z^");
    QQ coef;
    size_t idx = 0;
    if (star == std::string::npos) {
      coef = parse_q(term);
    } else {
      coef = parse_q(term.substr(0, star));
      idx = std::stoul(term.substr(star + 3));
    }
    if (idx >= poly.size()) throw std::invalid_argument("exponent exceeds phi(conductor)");
    poly[idx] += sign * coef;
    if (end == std::string::npos) break;
    pos = end;
  }
  return CycNumber(conductor, std::move(poly));
}

}  // namespace ksl
