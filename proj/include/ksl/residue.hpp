#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ksl/ksymbol.hpp"

namespace ksl {

// theta_a / theta_x on the level-N curve, carried as divisor + restriction data:
// divisor 12N^2 (D_a - D_x), restriction along D_w the unit (g_{w-a}/g_{w-x})^{12N^2}
struct ThetaQuot {
  long N = 3;
  TorsionPoint a, x;
};

inline ThetaQuot theta_quot(long N, const TorsionPoint& a, const TorsionPoint& x) {
  if (N < 3) throw std::invalid_argument("level must be at least 3");
  if (a == x) throw std::invalid_argument("zero and pole sections coincide");
  if (N % a.level() != 0 || N % x.level() != 0)
    throw std::invalid_argument("sections must lie in A(N)");
  return {N, a, x};
}

inline long valuation_of(const ThetaQuot& f, const TorsionPoint& w) {
  long kappa = 12 * f.N * f.N;
  return (w == f.a ? kappa : 0) - (w == f.x ? kappa : 0);
}

namespace rdetail {

// the restriction formula applied blindly: 12N^2 ([g_{w-a}] - [g_{w-x}]), with
// zero atoms dropping out; correct as stated off the divisor, and the right
// unit-part ingredient on it
inline K1El blind_restrict(const ThetaQuot& f, const TorsionPoint& w) {
  QQ kappa(12 * f.N * f.N);
  return kappa * (k1(w - f.a) - k1(w - f.x));
}

}  // namespace rdetail

// restriction of f along D_w; on the divisor of f a reference with nonzero
// valuation at w is required, and the unit part f * ref^{-v_w(f)/v_w(ref)} is
// restricted instead
inline K1El restrict_quot(const ThetaQuot& f, const TorsionPoint& w,
                          const ThetaQuot* ref = nullptr) {
  long vw = valuation_of(f, w);
  if (vw == 0) return rdetail::blind_restrict(f, w);
  if (ref == nullptr) throw std::invalid_argument("restriction on the divisor needs a reference");
  long vr = valuation_of(*ref, w);
  if (vr == 0) throw std::invalid_argument("reference must have nonzero valuation at w");
  QQ e = make_q(vw, vr);
  return rdetail::blind_restrict(f, w) - e * rdetail::blind_restrict(*ref, w);
}

// mod-torsion boundary at D_w of {f1, f2, f3}: r1 {u2, u3} - r2 {u1, u3} + r3 {u1, u2},
// r_i the valuations and u_i the reference-corrected restrictions; ref_choice picks
// which function serves as the reference (default: first with nonzero valuation)
inline KnSym boundary(const ThetaQuot& f1, const ThetaQuot& f2, const ThetaQuot& f3,
                      const TorsionPoint& w, std::optional<int> ref_choice = {}) {
  if (!(f1.x == f2.x) || !(f2.x == f3.x) || f1.N != f2.N || f2.N != f3.N)
    throw std::invalid_argument("functions must share the pole section and level");
  std::array<const ThetaQuot*, 3> fs{&f1, &f2, &f3};
  std::array<long, 3> r{valuation_of(f1, w), valuation_of(f2, w), valuation_of(f3, w)};
  if (r[0] == 0 && r[1] == 0 && r[2] == 0) return KnSym(2);

  int ri = ref_choice.value_or(-1);
  if (ri > 2) throw std::invalid_argument("reference index out of range");
  if (ri < 0)
    for (int i = 0; i < 3; ++i)
      if (r[i] != 0) {
        ri = i;
        break;
      }
  if (r[ri] == 0) throw std::invalid_argument("chosen reference has zero valuation at w");

  std::array<K1El, 3> u;
  for (int i = 0; i < 3; ++i) u[i] = restrict_quot(*fs[i], w, fs[ri]);
  return QQ(r[0]) * ksym({u[1], u[2]}) - QQ(r[1]) * ksym({u[0], u[2]}) +
         QQ(r[2]) * ksym({u[0], u[1]});
}

// total residue of {theta_a/theta_x, theta_b/theta_x, theta_c/theta_x}: only the
// four sections a, b, c, x carry boundary
inline KnSym residue_sum(long N, const TorsionPoint& a, const TorsionPoint& b,
                         const TorsionPoint& c, const TorsionPoint& x) {
  std::array<TorsionPoint, 4> pts{a, b, c, x};
  for (int i = 0; i < 4; ++i) {
    if (pts[i].is_zero()) throw std::invalid_argument("sections must be nonzero");
    for (int j = i + 1; j < 4; ++j)
      if (pts[i] == pts[j]) throw std::invalid_argument("sections must be distinct");
  }
  ThetaQuot fa = theta_quot(N, a, x), fb = theta_quot(N, b, x), fc = theta_quot(N, c, x);
  KnSym out(2);
  for (const auto& w : pts) out = out + boundary(fa, fb, fc, w);
  return out;
}

// derivation of the three-term relation: lift below level 3, shift into a theta
// triple, sum the residues over A(M), cancel the translation sums, and conclude
// by reciprocity (the one axiomatic step); emits {g_a,g_b} + {g_b,g_c} + {g_c,g_a}
inline KnSym derive_manin(long N, const TorsionPoint& a, const TorsionPoint& b,
                          const TorsionPoint& c) {
  if (N < 1) throw std::invalid_argument("level must be positive");
  if (!((a + b + c).is_zero())) throw std::invalid_argument("points must sum to zero");
  if (N % a.level() != 0 || N % b.level() != 0 || N % c.level() != 0)
    throw std::invalid_argument("points must lie in A(N)");
  if (a.is_zero() && b.is_zero() && c.is_zero()) return KnSym(2);
  if (a.is_zero() || b.is_zero() || c.is_zero())
    throw std::invalid_argument("mixed zero and nonzero points");

  long M = N >= 3 ? N : 4;
  QQ kappa(12 * M * M);

  TorsionPoint B;
  bool found = false;
  for (const auto& cand : torsion_points(M)) {
    if (cand.is_zero() || (cand + a).is_zero() || (cand - c).is_zero()) continue;
    B = cand;
    found = true;
    break;
  }
  if (!found) throw std::logic_error("no valid shift at level >= 3");
  TorsionPoint A = B + a, C = B - c;

  KnSym total(2);
  for (const auto& x : torsion_points(M)) {
    bool degenerate = x.is_zero() || x == A || x == B || x == C;
    if (!degenerate) {
      total = total + residue_sum(M, A, B, C, x);
    } else {
      KnSym res = kdetail::theta_any(A, B, C) - kdetail::theta_any(A, B, x) -
                  kdetail::theta_any(A, x, C) - kdetail::theta_any(x, B, C);
      total = total + kappa * kappa * kappa * res;
    }
  }

  if (!translate_sum(FreeSlot::third, A, B, M).is_zero() ||
      !translate_sum(FreeSlot::second, A, C, M).is_zero() ||
      !translate_sum(FreeSlot::first, B, C, M).is_zero())
    throw std::logic_error("translation sums failed to vanish");

  KnSym relator = theta_expr(A, B, C);
  if (!(total == QQ(kappa * kappa * kappa * M * M) * relator))
    throw std::logic_error("residue total does not match the theta multiple");
  return relator;
}

}  // namespace ksl
