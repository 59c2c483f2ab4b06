#include <doctest.h>

#include <cmath>
#include <complex>

#include "ksl/numeric.hpp"

using namespace ksl;

namespace {

TorsionPoint tp(long n1, long d1, long n2, long d2) {
  return TorsionPoint(make_q(n1, d1), make_q(n2, d2));
}

const double kPi = 3.14159265358979323846;

}  // namespace

TEST_SUITE("numeric") {
  TEST_CASE("theta at the half period, tau = i") {
    // t = -1 specialization: value = 2i e^{-pi/6} prod (1 + e^{-2 pi n})^2
    NumericResult r = theta_num(CD(0.5), CD(0, 1), 40);
    CD ref = CD(0, 2) * std::exp(CD(-kPi / 6));
    double qn = 1;
    for (int n = 1; n <= 60; ++n) {
      qn *= std::exp(-2 * kPi);
      ref *= (1 + qn) * (1 + qn);
    }
    CHECK(std::abs(r.value - ref) <= r.bound + 1e-13 * std::abs(ref));

    // same point through the exact layer: specialized series summed at q = e^{-2 pi}
    NumericResult s = qexp_eval_num(theta_specialized(QQ(0), make_q(1, 2), QQ(6)), CD(0, 1));
    CHECK(std::abs(s.value - r.value) < 1e-10 * std::abs(r.value));
  }

  TEST_CASE("periodicity and lattice zeros") {
    CD u(0.3, 0.1), tau(0, 2);
    NumericResult a = theta_num(u + 1.0, tau, 50);
    NumericResult b = theta_num(u, tau, 50);
    CHECK(std::abs(a.value + b.value) < 1e-12 * std::abs(b.value));

    CHECK(std::abs(theta_num(CD(1), CD(0, 1), 40).value) < 1e-12);
    CHECK(std::abs(theta_num(CD(0, 1), CD(0, 1), 40).value) < 1e-14);
    // u = 2 tau + 3 sits behind a transform factor of size e^{8 pi} ~ 9e10, which
    // amplifies the rounding of the 6 pi phase; 1e-8 is ~1e-19 relative to that scale
    CHECK(std::abs(theta_num(2.0 * CD(0, 1) + 3.0, CD(0, 1), 40).value) < 1e-8);
  }

  TEST_CASE("truncation bound is honest") {
    CD u(0.17, 0.03), tau(0.25, 1.1);
    NumericResult coarse = theta_num(u, tau, 3);
    NumericResult fine = theta_num(u, tau, 80);
    CHECK(std::abs(coarse.value - fine.value) <= coarse.bound + fine.bound);
    CHECK(coarse.bound > std::abs(coarse.value - fine.value) / 1e6);  // not absurdly slack
  }

  TEST_CASE("eta at i") {
    // Gamma(1/4) / (2 pi^{3/4})
    NumericResult r = eta_num(CD(0, 1), 60);
    CHECK(std::abs(r.value - CD(0.7682254223260566)) < 1e-12);
  }

  TEST_CASE("S transform") {
    CD u(0.21, 0.05), tau(0, 1.7);
    CHECK(verify_S_transform(u, tau, 2, 1e-9).ok());   // factor i^3 = -i
    CHECK(verify_S_transform(u, tau, 5, 1e-9).ok());   // factor i^24 = 1
    CHECK(verify_S_transform(u, tau, 1, 1e-9).ok());   // psi-normalized base identity
    CHECK(verify_S_transform(u, tau, 3, 1e-9, 60).ok());
    CHECK(verify_S_transform(CD(0.1, -0.02), CD(-0.3, 1.2), 2, 1e-8).ok());

    CheckResult too_tight = verify_S_transform(u, tau, 2, 1e-30);
    CHECK(too_tight.status == CheckResult::Status::inconclusive);
  }

  TEST_CASE("measured characters snap to the pinned twelfth roots") {
    CD u(0.21, 0.05), tau(0, 1.7);
    for (long N = 1; N <= 6; ++N) {
      Snap s = snap_root_of_unity(measure_eps_S(u, tau, N).value, 12);
      CHECK(s.k == (3 * (N * N - 1)) % 12);
      CHECK(s.residual < 1e-8);
      Snap t = snap_root_of_unity(measure_eps_T(u, tau, N).value, 12);
      CHECK(t.k == (N * N - 1) % 12);
      CHECK(t.residual < 1e-8);
    }
  }

  TEST_CASE("eta functional equation and psi(0) = -i") {
    CHECK(verify_eta_psi(CD(0, 1), 1e-10).ok());
    CHECK(verify_eta_psi(CD(0, 2), 1e-9).ok());
    CHECK(verify_eta_psi(CD(0.3, 1.5), 1e-8).ok());
    CHECK(verify_eta_psi(CD(0, 1), 1e-30).status == CheckResult::Status::inconclusive);
  }

  TEST_CASE("series and product evaluations agree") {
    CD tau(0, 2);
    TorsionPoint pts[] = {tp(1, 2, 0, 1), tp(0, 1, 1, 2), tp(1, 2, 1, 2), tp(1, 3, 0, 1),
                          tp(0, 1, 1, 3), tp(1, 3, 1, 3), tp(1, 3, 2, 3), tp(1, 4, 1, 4),
                          tp(1, 5, 2, 5), tp(1, 6, 5, 6)};
    for (const auto& a : pts) CHECK(verify_exact_numeric_agreement(a, QQ(5), tau).ok());

    // mismatched pair must be visibly apart
    NumericResult wrong = qexp_eval_num(siegel_unit(tp(1, 2, 0, 1), QQ(5)), tau);
    NumericResult direct = siegel_num(tp(0, 1, 1, 2), tau, 80);
    CHECK(std::abs(wrong.value - direct.value) > 1e-3);
  }

  TEST_CASE("snapping") {
    Snap s = snap_root_of_unity(std::exp(CD(0, 2 * kPi * 5 / 12)), 12);
    CHECK(s.k == 5);
    CHECK(s.residual < 1e-14);
    Snap t = snap_root_of_unity(CD(0, 1.001), 4);
    CHECK(t.k == 1);
    CHECK(t.residual == doctest::Approx(0.001).epsilon(1e-6));
  }

  TEST_CASE("domain guards") {
    CHECK_THROWS_AS(theta_num(CD(0.3), CD(0, 0.05), 40), std::invalid_argument);
    CHECK_THROWS_AS(theta_num(CD(0.3), CD(0, 1), 0), std::invalid_argument);
    CHECK_THROWS_AS(theta_num(CD(0, 3), CD(0, 0.12), 1), std::invalid_argument);
    CHECK_THROWS_AS(ntheta_num(CD(0.3), CD(0, 1), 0, 40), std::invalid_argument);
    CHECK_THROWS_AS(siegel_tail_bound(tp(1, 2, 0, 1), QQ(5), CD(0, 0.15)), std::invalid_argument);
    CHECK_THROWS_AS(snap_root_of_unity(CD(1), 0), std::invalid_argument);
  }
}
