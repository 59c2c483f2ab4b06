#pragma once

#include <compare>
#include <vector>

#include "ksl/rational.hpp"

namespace ksl {

// point of (Q/Z)^2, coordinates normalized to [0,1)
struct TorsionPoint {
  QQ a1, a2;

  TorsionPoint() : a1(0), a2(0) {}
  TorsionPoint(const QQ& x, const QQ& y) : a1(frac_q(x)), a2(frac_q(y)) {}

  bool is_zero() const { return a1 == 0 && a2 == 0; }

  long level() const {
    return lcm_l(to_long(q_den(a1)), to_long(q_den(a2)));
  }

  friend TorsionPoint operator+(const TorsionPoint& p, const TorsionPoint& q) {
    return TorsionPoint(p.a1 + q.a1, p.a2 + q.a2);
  }
  friend TorsionPoint operator-(const TorsionPoint& p, const TorsionPoint& q) {
    return TorsionPoint(p.a1 - q.a1, p.a2 - q.a2);
  }
  friend TorsionPoint operator-(const TorsionPoint& p) {
    return TorsionPoint(-p.a1, -p.a2);
  }
  friend TorsionPoint operator*(long t, const TorsionPoint& p) {
    return TorsionPoint(t * p.a1, t * p.a2);
  }

  friend bool operator==(const TorsionPoint& p, const TorsionPoint& q) {
    return p.a1 == q.a1 && p.a2 == q.a2;
  }
  friend bool operator<(const TorsionPoint& p, const TorsionPoint& q) {
    if (p.a1 != q.a1) return p.a1 < q.a1;
    return p.a2 < q.a2;
  }
};

// all points killed by N, row-major in (i,j)
inline std::vector<TorsionPoint> torsion_points(long N, bool include_zero = true) {
  std::vector<TorsionPoint> out;
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j) {
      if (i == 0 && j == 0 && !include_zero) continue;
      out.emplace_back(make_q(i, N), make_q(j, N));
    }
  return out;
}

// the t^2 solutions of t*b = a
inline std::vector<TorsionPoint> preimages(const TorsionPoint& a, long t) {
  std::vector<TorsionPoint> out;
  out.reserve(t * t);
  for (long i = 0; i < t; ++i)
    for (long j = 0; j < t; ++j)
      out.emplace_back((a.a1 + i) / t, (a.a2 + j) / t);
  return out;
}

inline std::string torsion_str(const TorsionPoint& p) {
  return q_str(p.a1) + "," + q_str(p.a2);
}

inline TorsionPoint torsion_parse(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("bad torsion point: " + s);
  return TorsionPoint(parse_q(s.substr(0, comma)), parse_q(s.substr(comma + 1)));
}

}  // namespace ksl
