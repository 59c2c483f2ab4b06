#include <doctest.h>

#include "ksl/residue.hpp"
#include "ksl/theta.hpp"

using namespace ksl;

namespace {

TorsionPoint tp(long n1, long d1, long n2, long d2) {
  return TorsionPoint(make_q(n1, d1), make_q(n2, d2));
}

KnSym s2(const TorsionPoint& p, const TorsionPoint& q) { return ksym_points({p, q}); }

bool k1_eq(const K1El& x, const K1El& y) { return (x - y).is_zero(); }

// the four boundary displays, scaled down by (12N^2)^3
KnSym display_a(const TorsionPoint& a, const TorsionPoint& b, const TorsionPoint& c,
                const TorsionPoint& x) {
  return s2(a - b, c - a) - s2(a - b, x - a) - s2(a - x, c - a);
}
KnSym display_b(const TorsionPoint& a, const TorsionPoint& b, const TorsionPoint& c,
                const TorsionPoint& x) {
  return s2(b - c, a - b) - s2(b - c, x - b) - s2(b - x, a - b);
}
KnSym display_c(const TorsionPoint& a, const TorsionPoint& b, const TorsionPoint& c,
                const TorsionPoint& x) {
  return s2(c - a, b - c) - s2(c - a, x - c) - s2(c - x, b - c);
}
KnSym display_x(const TorsionPoint& a, const TorsionPoint& b, const TorsionPoint& c,
                const TorsionPoint& x) {
  return -(s2(x - c, a - x) + s2(x - a, b - x) + s2(x - b, c - x));
}

}  // namespace

TEST_SUITE("residue") {
  TEST_CASE("divisor data") {
    TorsionPoint a = tp(1, 3, 0, 1), x = tp(2, 3, 0, 1);
    ThetaQuot f = theta_quot(3, a, x);
    CHECK(valuation_of(f, a) == 108);
    CHECK(valuation_of(f, x) == -108);
    CHECK(valuation_of(f, tp(0, 1, 1, 3)) == 0);
    long degree = 0;
    for (const auto& w : torsion_points(3)) degree += valuation_of(f, w);
    CHECK(degree == 0);
    CHECK_THROWS_AS(theta_quot(2, a, x), std::invalid_argument);
    CHECK_THROWS_AS(theta_quot(3, a, a), std::invalid_argument);
  }

  TEST_CASE("restriction") {
    TorsionPoint a = tp(1, 3, 0, 1), b = tp(0, 1, 1, 3), x = tp(2, 3, 0, 1), c = tp(1, 3, 1, 3);
    ThetaQuot fa = theta_quot(3, a, x), fb = theta_quot(3, b, x);
    QQ kappa(108);

    CHECK(k1_eq(restrict_quot(fa, c), kappa * (k1(c - a) - k1(c - x))));
    CHECK(k1_eq(restrict_quot(fb, a), kappa * (k1(a - b) - k1(a - x))));
    CHECK(restrict_quot(fa, a, &fa).is_zero());
    CHECK_THROWS_AS(restrict_quot(fa, a), std::invalid_argument);
    CHECK_THROWS_AS(restrict_quot(fa, a, &fb), std::invalid_argument);
  }

  TEST_CASE("boundary matches the four displays at N=3") {
    TorsionPoint a = tp(1, 3, 0, 1), b = tp(0, 1, 1, 3), c = tp(1, 3, 1, 3), x = tp(2, 3, 0, 1);
    ThetaQuot fa = theta_quot(3, a, x), fb = theta_quot(3, b, x), fc = theta_quot(3, c, x);
    QQ k3 = QQ(108) * 108 * 108;
    CHECK(boundary(fa, fb, fc, a) == k3 * display_a(a, b, c, x));
    CHECK(boundary(fa, fb, fc, b) == k3 * display_b(a, b, c, x));
    CHECK(boundary(fa, fb, fc, c) == k3 * display_c(a, b, c, x));
    CHECK(boundary(fa, fb, fc, x) == k3 * display_x(a, b, c, x));
    CHECK(boundary(fa, fb, fc, tp(2, 3, 2, 3)).is_zero());
  }

  TEST_CASE("boundary matches the four displays at N=5") {
    TorsionPoint a = tp(1, 5, 2, 5), b = tp(2, 5, 0, 1), c = tp(0, 1, 1, 5), x = tp(3, 5, 4, 5);
    ThetaQuot fa = theta_quot(5, a, x), fb = theta_quot(5, b, x), fc = theta_quot(5, c, x);
    QQ k3 = QQ(300) * 300 * 300;
    CHECK(boundary(fa, fb, fc, a) == k3 * display_a(a, b, c, x));
    CHECK(boundary(fa, fb, fc, b) == k3 * display_b(a, b, c, x));
    CHECK(boundary(fa, fb, fc, c) == k3 * display_c(a, b, c, x));
    CHECK(boundary(fa, fb, fc, x) == k3 * display_x(a, b, c, x));
  }

  TEST_CASE("uniformizer independence at the shared pole") {
    TorsionPoint a = tp(1, 3, 0, 1), b = tp(0, 1, 1, 3), c = tp(1, 3, 1, 3), x = tp(2, 3, 0, 1);
    ThetaQuot fa = theta_quot(3, a, x), fb = theta_quot(3, b, x), fc = theta_quot(3, c, x);
    KnSym ref0 = boundary(fa, fb, fc, x, 0);
    CHECK(boundary(fa, fb, fc, x, 1) == ref0);
    CHECK(boundary(fa, fb, fc, x, 2) == ref0);
    CHECK_THROWS_AS(boundary(fa, fb, fc, a, 1), std::invalid_argument);  // f2 is a unit at a
  }

  TEST_CASE("residue sum equals the theta combination") {
    TorsionPoint a = tp(1, 3, 0, 1), b = tp(0, 1, 1, 3), c = tp(1, 3, 1, 3), x = tp(2, 3, 0, 1);
    QQ k3 = QQ(108) * 108 * 108;
    KnSym combo = theta_expr(a, b, c) - theta_expr(a, b, x) - theta_expr(a, x, c) -
                  theta_expr(x, b, c);
    CHECK(residue_sum(3, a, b, c, x) == k3 * combo);

    TorsionPoint a5 = tp(1, 5, 2, 5), b5 = tp(2, 5, 0, 1), c5 = tp(0, 1, 1, 5),
                 x5 = tp(3, 5, 4, 5);
    QQ k5 = QQ(300) * 300 * 300;
    KnSym combo5 = theta_expr(a5, b5, c5) - theta_expr(a5, b5, x5) - theta_expr(a5, x5, c5) -
                   theta_expr(x5, b5, c5);
    CHECK(residue_sum(5, a5, b5, c5, x5) == k5 * combo5);

    // cyclic moves of (a, b, c) act the same way on both sides
    KnSym cyc = theta_expr(b, c, a) - theta_expr(b, c, x) - theta_expr(b, x, a) -
                theta_expr(x, c, a);
    CHECK(residue_sum(3, b, c, a, x) == k3 * cyc);
    KnSym cyc2 = theta_expr(c, a, b) - theta_expr(c, a, x) - theta_expr(c, x, b) -
                 theta_expr(x, a, b);
    CHECK(residue_sum(3, c, a, b, x) == k3 * cyc2);

    CHECK_THROWS_AS(residue_sum(3, a, b, c, a), std::invalid_argument);
  }

  TEST_CASE("manin derivation") {
    TorsionPoint a = tp(1, 3, 0, 1), b = tp(0, 1, 1, 3), c = tp(2, 3, 2, 3);
    KnSym rel = derive_manin(3, a, b, c);
    CHECK(rel == s2(a, b) + s2(b, c) + s2(c, a));
    CHECK(in_span(rel, relators(3, 2, {RelatorKind::manin})).member);

    // without any relators the output is visibly nonzero
    RelatorSet empty;
    empty.level = 3;
    empty.arity = 2;
    SpanCert cert = in_span(rel, empty);
    CHECK(!cert.member);
    CHECK(pair_witness(cert.witness, rel) != 0);
  }

  TEST_CASE("manin derivation below level 3") {
    TorsionPoint a = tp(0, 1, 1, 2), b = tp(1, 2, 0, 1), c = tp(1, 2, 1, 2);
    // the level-4 lift leaves the q-expansions untouched
    CHECK(qexp_eq(siegel_unit(a, QQ(3)), siegel_unit(tp(0, 4, 2, 4), QQ(3)), QQ(3)).is_equal());
    KnSym rel = derive_manin(2, a, b, c);
    CHECK(rel == s2(a, b) + s2(b, c) + s2(c, a));

    CHECK(derive_manin(1, TorsionPoint(), TorsionPoint(), TorsionPoint()).is_zero());
  }

  TEST_CASE("manin derivation at level 5") {
    TorsionPoint a = tp(1, 5, 0, 1), b = tp(0, 1, 1, 5), c = tp(4, 5, 4, 5);
    CHECK(derive_manin(5, a, b, c) == s2(a, b) + s2(b, c) + s2(c, a));
  }

  TEST_CASE("derivation guards") {
    CHECK_THROWS_AS(derive_manin(3, tp(1, 3, 0, 1), tp(1, 3, 0, 1), tp(2, 3, 0, 1)),
                    std::invalid_argument);  // sums to (1/3,0) != 0
    CHECK_THROWS_AS(derive_manin(3, tp(1, 3, 0, 1), tp(2, 3, 0, 1), TorsionPoint()),
                    std::invalid_argument);  // mixed zero
  }
}
