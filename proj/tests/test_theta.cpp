#include <doctest.h>

#include "ksl/theta.hpp"

using namespace ksl;

namespace {

TQExp euler_product(const QQ& T) {
  TQExp acc = TQExp::one();
  acc.trunc = T;
  for (QQ n = QQ(1); n < T; n += 1) {
    TQExp f = TQExp::one();
    f.add_term(n, QQ(0), CycNumber(QQ(-1)));
    acc = tq_mul(acc, f);
  }
  return acc;
}

// q^{1/12} sum_n (-1)^n q^{n(n+1)/2} (t^{n+1/2} - t^{-n-1/2})
TQExp jacobi_sum_form(const QQ& T) {
  TQExp s = TQExp::zero(T);
  for (long n = 0; QQ(n) * (n + 1) / 2 + make_q(1, 12) < T; ++n) {
    CycNumber c(QQ(n % 2 ? -1 : 1));
    s.add_term(QQ(n) * (n + 1) / 2 + make_q(1, 12), QQ(n) + make_q(1, 2), c);
    s.add_term(QQ(n) * (n + 1) / 2 + make_q(1, 12), -QQ(n) - make_q(1, 2), -c);
  }
  return s;
}

CycNumber coeff(const TQExp& f, const QQ& qe, const QQ& te) {
  auto it = f.terms.find({qe, te});
  return it == f.terms.end() ? CycNumber() : it->second;
}

CycNumber coeff(const QExp& f, const QQ& e) {
  auto it = f.terms.find(e);
  return it == f.terms.end() ? CycNumber() : it->second;
}

TorsionPoint tp(long n1, long d1, long n2, long d2) {
  return TorsionPoint{make_q(n1, d1), make_q(n2, d2)};
}

}  // namespace

TEST_SUITE("theta") {
  TEST_CASE("theta series matches the triple product sum form") {
    QQ T(7);
    TQExp lhs = tq_mul(theta_series(T), euler_product(T));
    CHECK(tq_eq(lhs, jacobi_sum_form(T), T).is_equal());
  }

  TEST_CASE("theta coefficients") {
    TQExp th = theta_series(QQ(3));
    CHECK(coeff(th, make_q(1, 12), make_q(1, 2)) == CycNumber(QQ(1)));
    CHECK(coeff(th, make_q(1, 12), make_q(-1, 2)) == CycNumber(QQ(-1)));
    CHECK(coeff(th, make_q(13, 12), make_q(3, 2)) == CycNumber(QQ(-1)));
    CHECK(coeff(th, make_q(13, 12), make_q(1, 2)) == CycNumber(QQ(1)));
    CHECK(coeff(th, make_q(13, 12), make_q(-1, 2)) == CycNumber(QQ(-1)));
    CHECK(coeff(th, make_q(13, 12), make_q(-3, 2)) == CycNumber(QQ(1)));
    CHECK(*tq_qval(th) == make_q(1, 12));
  }

  TEST_CASE("siegel unit leading terms") {
    QExp g0 = siegel_unit(TorsionPoint(), QQ(5));
    CHECK(g0.terms.size() == 1);
    CHECK(coeff(g0, QQ(0)) == CycNumber(QQ(1)));

    QExp gh = siegel_unit(tp(1, 2, 0, 1), QQ(3));
    CHECK(*q_val(gh) == make_q(-1, 24));
    CHECK(coeff(gh, make_q(-1, 24)) == CycNumber(QQ(1)));
    CHECK(coeff(gh, make_q(-1, 24) + make_q(1, 2)) == CycNumber(QQ(-2)));

    // 2 q^{1/12} prod (1+q^n)^2 = 2 q^{1/12} (1 + 2q + 3q^2 + 6q^3 + 9q^4 + ...)
    QExp gv = siegel_unit(tp(0, 1, 1, 2), QQ(5));
    CHECK(*q_val(gv) == make_q(1, 12));
    long expect[] = {2, 4, 6, 12, 18};
    for (long k = 0; k < 5; ++k)
      CHECK(coeff(gv, make_q(1, 12) + k) == CycNumber(QQ(expect[k])));
  }

  TEST_CASE("sign flip: g_{-a} / g_a is the pinned root of unity") {
    // the ratio is 1 for a1 != 0 (negation swaps the two product halves) and
    // -e(-a2) for a1 = 0 (the constant factor 1 - e(a2) flips)
    for (auto a : {tp(1, 2, 0, 1), tp(0, 1, 1, 3), tp(1, 4, 3, 4), tp(1, 6, 1, 2), tp(0, 1, 1, 2),
                   tp(2, 3, 1, 3)}) {
      QExp lhs = siegel_unit(TorsionPoint() - a, QQ(3));
      QExp rhs = q_scale(siegel_sign_flip(a), siegel_unit(a, QQ(3)));
      CHECK(qexp_eq(lhs, rhs, QQ(3)).is_equal());
    }
    CHECK(siegel_sign_flip(tp(1, 2, 0, 1)) == CycNumber(QQ(1)));
    CHECK(siegel_sign_flip(tp(0, 1, 1, 3)) == -cyc_phase(make_q(-1, 3)));
    CHECK(siegel_sign_flip(tp(0, 1, 1, 2)) == CycNumber(QQ(1)));  // -e(-1/2) = 1
  }

  TEST_CASE("distribution relation") {
    CHECK(verify_distribution(TorsionPoint(), 2, QQ(5)).ok());
    CHECK(verify_distribution(TorsionPoint(), 3, QQ(4)).ok());
    CHECK(verify_distribution(tp(1, 3, 0, 1), 2, QQ(4)).ok());
    CHECK(verify_distribution(tp(1, 2, 1, 2), 2, QQ(4)).ok());
    CHECK(verify_distribution(tp(1, 4, 1, 2), 3, QQ(3)).ok());

    // direct form at the origin, t = 2: the three nonzero 2-torsion units multiply
    // to the constant 2 (eta-quotient identity), not to 1
    QExp prod = QExp::one();
    for (auto b : {tp(1, 2, 0, 1), tp(0, 1, 1, 2), tp(1, 2, 1, 2)})
      prod = q_mul(prod, siegel_unit(b, make_q(9, 2)));
    CHECK(qexp_eq(prod, QExp::monomial(QQ(0), CycNumber(QQ(2)), QQ(4)), QQ(4)).is_equal());
  }

  TEST_CASE("translation law") {
    CHECK(verify_transform(0, 1, QQ(5)).ok());
    CHECK(verify_transform(1, 0, QQ(5)).ok());
    CHECK(verify_transform(1, 1, QQ(5)).ok());
    CHECK(verify_transform(-1, 0, QQ(4)).ok());
    CHECK(verify_transform(2, 1, QQ(5)).ok());
  }

  TEST_CASE("translation factors compose as a cocycle") {
    CHECK(verify_transform_composition(2, 2).ok());
    CHECK(transform_factor(0, 0).terms == TQExp::one().terms);
    TQExp f10 = transform_factor(1, 0);  // -t^{-1} q^{-1/2}
    CHECK(f10.terms == TQExp::monomial(make_q(-1, 2), QQ(-1), CycNumber(QQ(-1))).terms);
  }

  TEST_CASE("specialized theta valuations") {
    CHECK(*q_val(theta_specialized(make_q(1, 3), QQ(0), QQ(3))) == make_q(1, 12) - make_q(1, 6));
    CHECK(*q_val(theta_specialized(make_q(-2, 3), QQ(0), QQ(3))) == make_q(1, 12) - make_q(1, 3));
    CHECK(*q_val(theta_specialized(QQ(0), make_q(1, 2), QQ(3))) == make_q(1, 12));
  }

  TEST_CASE("siegel link") {
    CHECK(verify_siegel_link(tp(0, 1, 1, 2), QQ(5)).ok());
    CHECK(verify_siegel_link(tp(1, 2, 0, 1), QQ(5)).ok());
    CHECK(verify_siegel_link(tp(1, 3, 2, 3), QQ(4)).ok());
    CHECK(verify_siegel_link(tp(1, 4, 1, 4), QQ(4)).ok());
  }

  TEST_CASE("ntheta leading exponents") {
    NTheta f1 = ntheta_a(1, TorsionPoint(), QQ(4));
    CHECK(tq_eq(f1.num, f1.den, QQ(4)).is_equal());

    NTheta f2 = ntheta_a(2, TorsionPoint(), QQ(3));
    CHECK(*f2.qval() == make_q(1, 4));

    NTheta f3 = ntheta_a(3, tp(1, 3, 0, 1), QQ(3));
    CHECK(*f3.qval() == make_q(-1, 3));
  }

  TEST_CASE("ntheta translates the origin series") {
    // _3 Theta_{(1/3,0)}(u) = _3 Theta(u - tau/3)
    NTheta fa = ntheta_a(3, tp(1, 3, 0, 1), QQ(5));
    NTheta f0 = ntheta_a(3, TorsionPoint(), QQ(5));
    TQExp n0 = subst_rs(f0.num, make_q(-1, 3), QQ(0));
    TQExp d0 = subst_rs(f0.den, make_q(-1, 3), QQ(0));
    CHECK(fraction_eq(fa.num, fa.den, CycNumber(QQ(1)), n0, d0, QQ(1)).is_equal());
  }

  TEST_CASE("invariance under the torus generators") {
    CHECK(verify_invariance(InvarianceGen::translate, 1, 0, 2, QQ(4)).ok());
    CHECK(verify_invariance(InvarianceGen::translate, 0, 1, 2, QQ(4)).ok());
    CHECK(verify_invariance(InvarianceGen::translate, 1, 1, 3, QQ(4)).ok());
    CHECK(verify_invariance(InvarianceGen::translate, 1, 0, 5, QQ(3)).ok());
    for (long N = 1; N <= 6; ++N)
      CHECK(verify_invariance(InvarianceGen::T_matrix, 0, 0, N, QQ(4)).ok());
  }

  TEST_CASE("normalized zero-section restriction is the unit series") {
    QExp one = QExp::monomial(QQ(0), CycNumber(QQ(1)), QQ(3));
    for (auto a : {tp(1, 2, 0, 1), tp(0, 1, 1, 2), tp(1, 2, 1, 2)})
      CHECK(qexp_eq(detail::restriction_unit0(2, a, QQ(3)), one, QQ(3)).is_equal());
    for (auto a : {tp(1, 3, 0, 1), tp(2, 3, 1, 3), tp(0, 1, 2, 3)})
      CHECK(qexp_eq(detail::restriction_unit0(3, a, QQ(3)), one, QQ(3)).is_equal());
  }

  TEST_CASE("restriction of ratios to sections") {
    CHECK(verify_restriction(tp(1, 2, 0, 1), tp(0, 1, 1, 2), 2, QQ(4)).ok());
    CHECK(verify_restriction(tp(1, 3, 0, 1), tp(2, 3, 0, 1), 3, QQ(4)).ok());
    CHECK(verify_restriction(tp(1, 2, 1, 2), tp(0, 1, 1, 2), 2, QQ(4)).ok());
    CHECK(verify_restriction(tp(1, 3, 0, 1), tp(0, 1, 1, 3), 3, QQ(3), tp(1, 3, 1, 3)).ok());
    CHECK(verify_restriction_all(2, QQ(3)).ok());
    CHECK(verify_restriction_all(3, QQ(3)).ok());

    QExp ua = detail::restriction_unit0(2, tp(1, 2, 0, 1), QQ(2));
    QExp ub = detail::restriction_unit0(2, tp(0, 1, 1, 2), QQ(2));
    CHECK(qexp_eq(ua, q_neg(ub), QQ(1)).is_unequal());
  }

  TEST_CASE("divisor profile") {
    CHECK(verify_divisor_profile(2, tp(1, 2, 0, 1), QQ(4)).ok());
    CHECK(verify_divisor_profile(2, TorsionPoint(), QQ(4)).ok());
    CHECK(verify_divisor_profile(3, tp(1, 3, 2, 3), QQ(4)).ok());
  }

  TEST_CASE("guards") {
    CHECK_THROWS_AS(siegel_unit(tp(1, 2, 0, 1), QQ(0)), std::invalid_argument);
    CHECK_THROWS_AS(ntheta_a(2, tp(1, 3, 0, 1), QQ(3)), std::invalid_argument);
    CHECK_THROWS_AS(verify_restriction(tp(1, 2, 0, 1), tp(0, 1, 1, 2), 2, QQ(3), tp(1, 2, 0, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_siegel_link(TorsionPoint(), QQ(3)), std::invalid_argument);
  }
}
