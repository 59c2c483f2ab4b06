#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksl {

using ZZ = mpz_class;
using QQ = mpq_class;

inline QQ make_q(long num, long den = 1) {
  QQ r(num, den);
  r.canonicalize();
  return r;
}

inline ZZ q_num(const QQ& x) { return x.get_num(); }
inline ZZ q_den(const QQ& x) { return x.get_den(); }

inline ZZ floor_q(const QQ& x) {
  ZZ q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

// fractional part in [0,1)
inline QQ frac_q(const QQ& x) { return x - QQ(floor_q(x)); }

inline bool is_integer(const QQ& x) { return x.get_den() == 1; }

inline ZZ gcd_z(const ZZ& a, const ZZ& b) {
  ZZ g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline ZZ lcm_z(const ZZ& a, const ZZ& b) {
  ZZ l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline long lcm_l(long a, long b) {
  if (a == 0 || b == 0) return 0;
  return std::abs(a / std::gcd(a, b) * b);
}

inline long to_long(const ZZ& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer too large for long");
  return z.get_si();
}

inline QQ qmax(const QQ& a, const QQ& b) { return a < b ? b : a; }
inline QQ qmin(const QQ& a, const QQ& b) { return a < b ? a : b; }
inline QQ qabs(const QQ& a) { return a < 0 ? QQ(-a) : a; }
inline QQ pow_q(const QQ& x, long e) {
  if (e == 0) return QQ(1);
  QQ b = e > 0 ? x : QQ(1) / x;
  unsigned long n = e > 0 ? e : -e;
  QQ r(1);
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

inline std::string q_str(const QQ& x) { return x.get_str(); }

inline QQ parse_q(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational");
  QQ r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  r.canonicalize();
  return r;
}

}  // namespace ksl
