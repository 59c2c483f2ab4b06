#include <doctest.h>

#include "ksl/json_io.hpp"
#include "ksl/theta.hpp"

using namespace ksl;

namespace {
TorsionPoint tp(long a, long b, long c, long d) { return TorsionPoint(make_q(a, b), make_q(c, d)); }
}

TEST_SUITE("serialization") {
  TEST_CASE("symbol json round-trip") {
    KnSym x = ksym_points({tp(1, 3, 0, 1), tp(0, 1, 1, 2)});
    x = x + make_q(5, 7) * ksym_points({tp(1, 2, 1, 2), tp(1, 3, 2, 3)});
    njson j = knsym_to_json(x);
    CHECK(knsym_from_json(j) == x);
    CHECK(j.dump() == knsym_to_json(x).dump());
    CHECK(j.at("level").get<long>() == 6);

    KnSym small = ksym_points({tp(1, 3, 0, 1), tp(0, 1, 1, 2)});
    CHECK(knsym_to_json(small).dump() ==
          R"({"level":6,"n":2,"terms":[{"atoms":[[0,1,1,2],[1,3,0,1]],"coef":"-1"}]})");

    KnSym zero(3);
    njson jz = knsym_to_json(zero);
    CHECK(jz.at("level").get<long>() == 1);
    CHECK(knsym_from_json(jz) == zero);

    njson bad = njson::parse(R"({"n":1,"level":2,"terms":[{"coef":"1","atoms":[[1,2]]}]})");
    CHECK_THROWS_AS(knsym_from_json(bad), std::invalid_argument);
  }

  TEST_CASE("test function json round-trip") {
    TestFn f = test_fn(2, {{coset({make_q(1, 3), QQ(0)}, lattice(mat_identity(2))), 2},
                           {coset({QQ(0), QQ(0)}, lattice_scaled(QQ(2), 2)), -1}});
    njson j = testfn_to_json(f);
    TestFn g = testfn_from_json(j);
    CHECK(g.dim == f.dim);
    CHECK(g.terms == f.terms);
    CHECK(testfn_to_json(g).dump() == j.dump());

    TestFn empty = test_fn(4, {});
    CHECK(testfn_from_json(testfn_to_json(empty)).is_zero());
  }

  TEST_CASE("divisor json round-trip") {
    DivisorDelta0 d =
        divisor({{cusp_infinity(), -2}, {cusp(1, 2), 1}, {cusp(-1, 3), 1}, {cusp(0, 1), 0}});
    njson j = divisor_to_json(d);
    CHECK(divisor_from_json(j) == d);
    CHECK(j.dump() == R"({"terms":[{"coef":-2,"cusp":"inf"},{"coef":1,"cusp":"1/2"},{"coef":1,"cusp":"-1/3"}]})");

    njson bad = njson::parse(R"({"terms":[{"cusp":"inf","coef":1}]})");
    CHECK_THROWS_AS(divisor_from_json(bad), std::invalid_argument);
  }

  TEST_CASE("series text round-trip") {
    QExp f = siegel_unit(tp(1, 3, 0, 1), QQ(3));
    std::string text = qexp_to_text(f);
    QExp g = qexp_from_text(text);
    CHECK(g.terms == f.terms);
    CHECK(g.trunc == f.trunc);
    CHECK(qexp_to_text(g) == text);

    QExp h = QExp::monomial(make_q(1, 12), CycNumber(QQ(2)), make_q(5, 2));
    h.add_term(QQ(1), zeta(3, 1) - CycNumber(QQ(1)));
    std::string t2 = qexp_to_text(h);
    CHECK(t2.substr(0, t2.find('\n')) == "conductor 3, trunc 5/2");
    QExp h2 = qexp_from_text(t2);
    CHECK(qexp_to_text(h2) == t2);
    CHECK(h2.terms.begin()->second == CycNumber(QQ(2)));

    QExp exact = QExp::one();
    QExp e2 = qexp_from_text(qexp_to_text(exact));
    CHECK(!e2.trunc.has_value());
    CHECK(e2.terms == exact.terms);

    CHECK_THROWS_AS(qexp_from_text("trunc 5\n0 : 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(qexp_from_text("conductor 2, trunc 3\nnot a line\n"), std::invalid_argument);
  }
}
