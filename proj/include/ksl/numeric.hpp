#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ksl/check.hpp"
#include "ksl/theta.hpp"

namespace ksl {

using CD = std::complex<double>;

// value of a truncated evaluation together with a rigorous tail bound; the bound
// formulas dominate the dropped factors by geometric series and require |q| < 1/2
struct NumericResult {
  CD value{};
  double bound = 0;
};

namespace numdetail {

inline constexpr double two_pi = 2 * std::numbers::pi_v<double>;
inline constexpr double im_tau_min = 0.11031780996267462;  // ln 2 / (2 pi)

inline CD e2pi(CD z) { return std::exp(CD(0, two_pi) * z); }

inline void require_domain(CD tau, long nmax) {
  if (!(tau.imag() > im_tau_min)) throw std::invalid_argument("need Im(tau) > ln2/(2pi)");
  if (nmax < 1) throw std::invalid_argument("nmax must be >= 1");
}

// |prod_{n>nmax}(1 - x_n) - 1| <= expm1(L) when every |x_n| <= 1/2 and
// sum |x_n| <= L; callers pass the geometric-series sum for L
inline double tail_factor(double L) { return std::expm1(L); }

inline CD int_pow(CD z, long k) {
  CD r(1);
  for (long i = 0; i < k; ++i) r *= z;
  return r;
}

inline CD i_pow(long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return CD(1, 0);
    case 1: return CD(0, 1);
    case 2: return CD(-1, 0);
    default: return CD(0, -1);
  }
}

}  // namespace numdetail

// q^{1/12} (t^{1/2} - t^{-1/2}) prod_{n=1}^{nmax} (1 - q^n t)(1 - q^n / t)
inline NumericResult theta_num(CD u, CD tau, long nmax) {
  numdetail::require_domain(tau, nmax);
  CD q = numdetail::e2pi(tau);
  CD t = numdetail::e2pi(u);
  double aq = std::abs(q), at = std::abs(t);
  double m = std::max(at, 1.0 / at);
  if (!(std::pow(aq, nmax + 1) * m <= 0.5))
    throw std::invalid_argument("tail not dominated: need |q|^{nmax+1} max(|t|,1/|t|) <= 1/2");
  CD acc = std::exp(CD(0, std::numbers::pi_v<double>) * tau / 6.0) *
           (numdetail::e2pi(u / 2.0) - numdetail::e2pi(-u / 2.0));
  CD qn(1);
  for (long n = 1; n <= nmax; ++n) {
    qn *= q;
    acc *= (1.0 - qn * t) * (1.0 - qn / t);
  }
  double L = 2.0 * (at + 1.0 / at) * std::pow(aq, nmax + 1) / (1.0 - aq);
  double av = std::abs(acc);
  double rounding = av * std::numeric_limits<double>::epsilon() * (8.0 * nmax + 64.0);
  return {acc, av * numdetail::tail_factor(L) + rounding};
}

// q^{1/24} prod_{n=1}^{nmax} (1 - q^n)
inline NumericResult eta_num(CD tau, long nmax) {
  numdetail::require_domain(tau, nmax);
  CD q = numdetail::e2pi(tau);
  double aq = std::abs(q);
  CD acc = std::exp(CD(0, std::numbers::pi_v<double>) * tau / 12.0);
  CD qn(1);
  for (long n = 1; n <= nmax; ++n) {
    qn *= q;
    acc *= 1.0 - qn;
  }
  double L = 2.0 * std::pow(aq, nmax + 1) / (1.0 - aq);
  double av = std::abs(acc);
  double rounding = av * std::numeric_limits<double>::epsilon() * (4.0 * nmax + 32.0);
  return {acc, av * numdetail::tail_factor(L) + rounding};
}

// Theta(u)^{N^2} / Theta(Nu), bound by relative-error propagation through the quotient
inline NumericResult ntheta_num(CD u, CD tau, long N, long nmax) {
  if (N < 1) throw std::invalid_argument("level must be positive");
  NumericResult A = theta_num(u, tau, nmax);
  NumericResult B = theta_num(static_cast<double>(N) * u, tau, nmax);
  double aA = std::abs(A.value), aB = std::abs(B.value);
  if (!(aB > B.bound)) return {CD(0), std::numeric_limits<double>::infinity()};
  CD v = numdetail::int_pow(A.value, N * N) / B.value;
  double rA = aA > 0 ? A.bound / aA : std::numeric_limits<double>::infinity();
  double rB = B.bound / aB;
  double rel = std::pow(1.0 + rA, static_cast<double>(N) * N) / (1.0 - rB) - 1.0;
  return {v, std::abs(v) * rel};
}

// g_a as the direct product q^{B2(a1)/2} prod (1 - q^{n+a1} e(a2)) prod (1 - q^{n-a1} e(-a2))
inline NumericResult siegel_num(const TorsionPoint& a, CD tau, long nmax) {
  numdetail::require_domain(tau, nmax);
  if (a.is_zero()) return {CD(1), 0.0};
  CD q = numdetail::e2pi(tau);
  double aq = std::abs(q);
  double a1 = a.a1.get_d(), a2 = a.a2.get_d();
  CD zp = numdetail::e2pi(CD(a2)), zm = numdetail::e2pi(CD(-a2));
  CD acc = std::exp(CD(0, numdetail::two_pi) * tau * bernoulli2_half(a.a1).get_d());
  for (long n = 0; n <= nmax; ++n) acc *= 1.0 - numdetail::e2pi(tau * (static_cast<double>(n) + a1)) * zp;
  for (long n = 1; n <= nmax; ++n) acc *= 1.0 - numdetail::e2pi(tau * (static_cast<double>(n) - a1)) * zm;
  double L = 4.0 * std::pow(aq, nmax) / (1.0 - aq);
  double av = std::abs(acc);
  double rounding = av * std::numeric_limits<double>::epsilon() * (8.0 * nmax + 64.0);
  return {acc, av * numdetail::tail_factor(L) + rounding};
}

// partial sum of a q-expansion at q = e^{2 pi i tau}; the bound covers rounding only,
// the dropped tail beyond f.trunc is the caller's problem (see siegel_tail_bound)
inline NumericResult qexp_eval_num(const QExp& f, CD tau) {
  CD acc(0);
  double mag = 0;
  long terms = 0;
  for (const auto& [e, c] : f.terms) {
    CD term = cyc_eval(c) * numdetail::e2pi(tau * e.get_d());
    acc += term;
    mag += std::abs(term);
    ++terms;
  }
  return {acc, mag * std::numeric_limits<double>::epsilon() * (8.0 * terms + 32.0)};
}

// |sum_{e >= T} c_e q^e| for a Siegel unit g_a truncated at T: coefficients at offset
// e past the valuation are sums of at most 4^{e+1} roots of unity (subset expansion of
// the two products), and exponents live on the grid v + Z/g, so the tail is dominated
// by 4 |q|^v sum_{j >= g(T-v)} (4|q|)^{j/g} with x = (4|q|)^{1/g} < 1
inline double siegel_tail_bound(const TorsionPoint& a, const QQ& T, CD tau) {
  double aq = std::abs(numdetail::e2pi(tau));
  if (!(4.0 * aq < 1.0)) throw std::invalid_argument("tail bound requires |q| < 1/4");
  QQ v = a.is_zero() ? QQ(0) : bernoulli2_half(a.a1);
  long g = lcm_l(to_long(q_den(v)), to_long(q_den(a.a1)));
  double x = std::pow(4.0 * aq, 1.0 / static_cast<double>(g));
  double lead = std::pow(aq, v.get_d()) * std::pow(4.0 * aq, QQ(T - v).get_d());
  return 4.0 * lead / (1.0 - x);
}

struct Snap {
  long k = 0;
  CD root{1, 0};
  double residual = 0;
};

// nearest M-th root of unity e^{2 pi i k / M}
inline Snap snap_root_of_unity(CD z, long M) {
  if (M < 1) throw std::invalid_argument("root order must be positive");
  Snap best;
  best.residual = std::numeric_limits<double>::infinity();
  for (long k = 0; k < M; ++k) {
    CD r = numdetail::e2pi(CD(static_cast<double>(k) / static_cast<double>(M)));
    double d = std::abs(z - r);
    if (d < best.residual) best = {k, r, d};
  }
  return best;
}

// ratio _N Theta(u, tau+1) / _N Theta(u, tau); should be e^{2 pi i (N^2-1)/12}
inline NumericResult measure_eps_T(CD u, CD tau, long N, long nmax = 80) {
  NumericResult p = ntheta_num(u, tau + 1.0, N, nmax);
  NumericResult b = ntheta_num(u, tau, N, nmax);
  double ab = std::abs(b.value);
  if (!(ab > b.bound)) return {CD(0), std::numeric_limits<double>::infinity()};
  CD v = p.value / b.value;
  double rel = (1.0 + p.bound / std::max(std::abs(p.value), 1e-300)) / (1.0 - b.bound / ab) - 1.0;
  return {v, std::abs(v) * rel};
}

// ratio _N Theta(-u/tau, -1/tau) / _N Theta(u, tau); should be i^{N^2-1}
inline NumericResult measure_eps_S(CD u, CD tau, long N, long nmax = 80) {
  NumericResult p = ntheta_num(-u / tau, -1.0 / tau, N, nmax);
  NumericResult b = ntheta_num(u, tau, N, nmax);
  double ab = std::abs(b.value);
  if (!(ab > b.bound)) return {CD(0), std::numeric_limits<double>::infinity()};
  CD v = p.value / b.value;
  double rel = (1.0 + p.bound / std::max(std::abs(p.value), 1e-300)) / (1.0 - b.bound / ab) - 1.0;
  return {v, std::abs(v) * rel};
}

// _N Theta(-u/tau, -1/tau) = i^{N^2-1} _N Theta(u, tau); at N = 1 the normalized base
// identity Theta(-u/tau, -1/tau) = i e^{pi i u^2 / tau} Theta(u, tau) is checked instead
inline CheckResult verify_S_transform(CD u, CD tau, long N, double tol, long nmax = 80) {
  CD lhs_v, rhs_v;
  double combined;
  if (N == 1) {
    NumericResult lhs = theta_num(-u / tau, -1.0 / tau, nmax);
    NumericResult rhs = theta_num(u, tau, nmax);
    CD factor = CD(0, 1) * std::exp(CD(0, std::numbers::pi_v<double>) * u * u / tau);
    lhs_v = lhs.value;
    rhs_v = factor * rhs.value;
    combined = lhs.bound + std::abs(factor) * rhs.bound;
  } else {
    NumericResult lhs = ntheta_num(-u / tau, -1.0 / tau, N, nmax);
    NumericResult rhs = ntheta_num(u, tau, N, nmax);
    lhs_v = lhs.value;
    rhs_v = numdetail::i_pow(N * N - 1) * rhs.value;
    combined = lhs.bound + rhs.bound;
  }
  double scale = std::max({std::abs(lhs_v), std::abs(rhs_v), 1e-300});
  std::string label = "S-transform N=" + std::to_string(N);
  if (!(combined < tol * scale))
    return CheckResult::inconclusive(label + ": accumulated bound exceeds tolerance");
  double diff = std::abs(lhs_v - rhs_v);
  if (diff < tol * scale) return CheckResult::pass(label);
  return CheckResult::fail(label + ": residual " + std::to_string(diff / scale));
}

// eta(tau)^2 = (i/tau) eta(-1/tau)^2, and the normalized quotient at the origin
// psi(0, tau) = -tau eta(tau)^2 / eta(-1/tau)^2 = -i
inline CheckResult verify_eta_psi(CD tau, double tol, long nmax = 80) {
  NumericResult e1 = eta_num(tau, nmax);
  NumericResult e2 = eta_num(-1.0 / tau, nmax);
  double a1 = std::abs(e1.value), a2 = std::abs(e2.value);
  if (!(a2 > e2.bound) || !(a1 > e1.bound))
    return CheckResult::inconclusive("eta values smaller than their bounds");
  CD sq1 = e1.value * e1.value, sq2 = e2.value * e2.value;
  double bsq1 = 2.0 * a1 * e1.bound + e1.bound * e1.bound;
  double bsq2 = 2.0 * a2 * e2.bound + e2.bound * e2.bound;

  CD rhs = CD(0, 1) / tau * sq2;
  double scale = std::max({std::abs(sq1), std::abs(rhs), 1e-300});
  double combined = bsq1 + std::abs(CD(0, 1) / tau) * bsq2;
  if (!(combined < tol * scale))
    return CheckResult::inconclusive("eta: accumulated bound exceeds tolerance");
  if (!(std::abs(sq1 - rhs) < tol * scale))
    return CheckResult::fail("eta functional equation: residual " +
                             std::to_string(std::abs(sq1 - rhs) / scale));

  CD psi0 = -tau * sq1 / sq2;
  double r1 = bsq1 / std::abs(sq1), r2 = bsq2 / std::abs(sq2);
  double bpsi = std::abs(psi0) * ((1.0 + r1) / (1.0 - r2) - 1.0);
  if (!(bpsi < tol)) return CheckResult::inconclusive("psi: accumulated bound exceeds tolerance");
  if (!(std::abs(psi0 - CD(0, -1)) < tol))
    return CheckResult::fail("psi(0) != -i: residual " + std::to_string(std::abs(psi0 + CD(0, 1))));
  return CheckResult::pass("eta functional equation and psi(0) = -i");
}

// cross-layer agreement: the truncated expansion of g_a summed at q = e^{2 pi i tau}
// matches the direct numeric product within combined (tail + rounding) bounds
inline CheckResult verify_exact_numeric_agreement(const TorsionPoint& a, const QQ& T, CD tau,
                                                  long nmax = 80) {
  NumericResult series = qexp_eval_num(siegel_unit(a, T), tau);
  NumericResult direct = siegel_num(a, tau, nmax);
  double combined = series.bound + siegel_tail_bound(a, T, tau) + direct.bound;
  double diff = std::abs(series.value - direct.value);
  std::string label = "series vs product at " + torsion_str(a);
  if (diff <= combined) return CheckResult::pass(label);
  return CheckResult::fail(label + ": off by " + std::to_string(diff) + " > bound " +
                           std::to_string(combined));
}

}  // namespace ksl
