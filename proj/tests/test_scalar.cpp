#include <catch_amalgamated.hpp>

#include <random>

#include "orthoq/scalar.hpp"

using namespace orthoq;

namespace {

Scalar s_(int k) { return Scalar::s_pow(k); }

Scalar random_scalar(std::mt19937& rng, const ParamSpace& ps) {
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> ex(-2, 2);
  std::uniform_int_distribution<int> var(1, ps.num_vars() - 1);
  auto poly = [&](bool s_only) {
    Scalar acc;
    for (int t = 0; t < 3; ++t) {
      Monomial m = Monomial::var(0, ex(rng));
      if (!s_only && ps.num_vars() > 1) m = m * Monomial::var(var(rng), ex(rng));
      acc += Scalar::monomial(m, coef(rng));
    }
    return acc;
  };
  Scalar num = poly(false);
  Scalar den = poly(true);
  if (den.is_zero()) den = Scalar(1);
  return num / den;
}

}  // namespace

TEST_CASE("basic arithmetic canonicalizes") {
  CHECK(s_(2) + s_(2) == Scalar::monomial(Monomial::var(0, 2), 2));
  CHECK((s_(1) - s_(-1)) * (s_(1) + s_(-1)) == s_(2) - s_(-2));
  Scalar lambda = s_(2) - s_(-2);
  Scalar back = Scalar::fraction(lambda.num(), lambda.den());
  CHECK(back == lambda);
  CHECK((lambda - back).is_zero());
}

TEST_CASE("inverse") {
  CHECK(s_(2).inverse() == s_(-2));
  Scalar rr = s_(2) + s_(-2);
  Scalar inv = rr.inverse();
  CHECK(inv * rr == Scalar(1));
  // denominator normalized to monic in s: s^2/(s^4+1)
  CHECK(inv.den().terms().back().second == 1);

  Scalar g1 = Scalar::monomial(Monomial::var(1));
  Scalar x = g1 * (s_(1) - Scalar(1));
  Scalar y = x.inverse();
  CHECK(y * x == Scalar(1));
  CHECK(y == g1.inverse() / (s_(1) - Scalar(1)));
  CHECK_THROWS_AS(Scalar().inverse(), ZeroInverse);
  Scalar mixed = g1 + s_(1);
  CHECK_THROWS_AS(mixed.inverse(), DenominatorClass);
}

TEST_CASE("specialize") {
  ParamSpace ps(4);
  Point p1 = make_point(ps, {{"s", 1}});
  CHECK((s_(2) - s_(-2)).specialize(p1) == 0);
  Point p = make_point(ps, {{"s", 2}, {"g12", 3}});
  Scalar r_over_q = ps.r() / ps.q(0, 1);
  CHECK(r_over_q.specialize(p) == Rational(4, 3));
  CHECK((s_(2) + Scalar(1) + s_(-2)).specialize(p1) == 3);
  CHECK_THROWS_AS((s_(1) - Scalar(1)).inverse().specialize(p1), PoleAtPoint);
  CHECK_THROWS_AS(make_point(ps, {{"s", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_point(ps, {{"zz", 2}}), std::invalid_argument);
}

TEST_CASE("limit at s = 1") {
  Scalar lambda = s_(2) - s_(-2);
  CHECK((lambda / lambda).limit_s_to_1() == Scalar(1));
  CHECK(((s_(2) - Scalar(1)) / lambda).limit_s_to_1() == Scalar(Rational(1, 2)));
  CHECK_THROWS_AS(lambda.inverse().limit_s_to_1(), PoleAtOne);
  Scalar g1 = Scalar::monomial(Monomial::var(1));
  CHECK(((g1 * s_(3) - g1) / (s_(1) - Scalar(1))).limit_s_to_1() == g1 * Scalar(3));
}

TEST_CASE("canonical q relations for every supported dimension") {
  for (int m = 3; m <= 8; ++m) {
    ParamSpace ps(m);
    const Scalar r = ps.r();
    auto prime = [m](int a) { return m - 1 - a; };
    for (int a = 0; a < m; ++a) {
      CHECK(ps.q(a, a) == r);
      CHECK(ps.q(a, prime(a)) == r);
      for (int b = 0; b < m; ++b) {
        Scalar q = ps.q(a, b);
        CHECK(q.is_polynomial());
        CHECK(q.num().is_monomial());
        CHECK(q * ps.q(b, a) == r * r);
        CHECK(q == ps.q(prime(a), prime(b)));
        CHECK(q * ps.q(a, prime(b)) == r * r);
      }
    }
    if (m % 2 == 1)
      for (int a = 0; a < m; ++a) CHECK(ps.q(a, (m - 1) / 2) == r);
  }
  ParamSpace ps(3);
  CHECK(ps.q(1, 0) == ps.r());  // B1: the only pair touches n2
  ParamSpace ps5(5);
  Scalar g12 = Scalar::monomial(Monomial::var(ps5.g_slot(1, 2)));
  CHECK(ps5.q(0, 1) == g12);
  CHECK(ps5.q(1, 0) == s_(4) / g12);
}

TEST_CASE("block parameter spaces share the parent's symbols") {
  ParamSpace big(7);
  ParamSpace inner(5, 1, 7);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) CHECK(inner.q(a, b) == big.q(a + 1, b + 1));
  CHECK(inner.var_names() == big.var_names());
}

TEST_CASE("field axioms on random triples") {
  std::mt19937 rng(12345);
  ParamSpace ps(6);
  for (int trial = 0; trial < 60; ++trial) {
    Scalar a = random_scalar(rng, ps);
    Scalar b = random_scalar(rng, ps);
    Scalar c = random_scalar(rng, ps);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a - a).is_zero());
    Point p = generic_point(ps);
    Rational ab = (a * b).specialize(p);
    CHECK(ab == a.specialize(p) * b.specialize(p));
    CHECK((a + b).specialize(p) == a.specialize(p) + b.specialize(p));
  }
}

TEST_CASE("parameter maps") {
  ParamSpace ps(5);
  Scalar q = ps.q(0, 1);
  CHECK(q.substitute(inversion_map()) == q.inverse());
  CHECK(q.substitute(transpose_map()) == ps.q(1, 0));
  CHECK(q.substitute(uniparametric_map()) == ps.r());
  Scalar x = (q + s_(3)) / (s_(2) - s_(-2));
  CHECK(x.substitute(inversion_map()).substitute(inversion_map()) == x);
}
