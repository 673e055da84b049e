#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "orthoq/presentation.hpp"

using namespace orthoq;

namespace {

Point all_ones(const ParamSpace& ps) {
  Point p;
  for (int v = 0; v < ps.num_vars(); ++v) p[v] = Rational(1);
  return p;
}

long binom(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int perm_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

using Triple = std::map<std::array<Word, 3>, Scalar>;

void add_triple(Triple& t, const std::array<Word, 3>& k, const Scalar& c) {
  auto [it, ins] = t.try_emplace(k, c);
  if (!ins) {
    it->second += c;
    if (it->second.is_zero()) t.erase(it);
  }
}

}  // namespace

TEST_CASE("plane rules for N=3") {
  IsoContext ctx(3);
  RewriteSystem rs = ctx.plane_rules();
  REQUIRE(rs.size() == 3);
  CHECK(rs.has_rule(gen_x(2), gen_x(0)));
  CHECK(rs.has_rule(gen_x(2), gen_x(1)));
  CHECK(rs.has_rule(gen_x(1), gen_x(0)));
  const AlgebraElement& r31 = rs.rules().at({gen_x(2), gen_x(0)});
  CHECK_FALSE(r31.coeff({gen_x(1), gen_x(1)}).is_zero());
  CHECK(ctx.plane_presentation().relations.size() >= 3);

  // Independent oracle: lhs - rhs of each rule lies in the row space of P_A,
  // i.e. it is annihilated by P_S + P_0 acting from the right.
  const auto& B = ctx.inner_bundle();
  SparseTensor4 keep = B.PS + B.P0;
  for (const auto& [lead, rhs] : rs.rules()) {
    AlgebraElement rel = AlgebraElement::word({lead.first, lead.second}) - rhs;
    for (int e = 0; e < 3; ++e)
      for (int f = 0; f < 3; ++f) {
        Scalar s;
        for (const auto& [w, coef] : rel.terms()) s += coef * keep(gen_i(w[0]), gen_i(w[1]), e, f);
        CHECK(s.is_zero());
      }
  }
}

TEST_CASE("plane rules commute classically") {
  IsoContext ctx(4);
  Point p = all_ones(ctx.big()->params());
  RewriteSystem plane = ctx.plane_rules();
  for (const auto& [lead, rhs] : plane.rules()) {
    REQUIRE(rhs.size() >= 1);
    Word swapped{lead.second, lead.first};
    Rational total = 0;
    for (const auto& [w, c] : rhs.terms()) {
      Rational v = c.specialize(p);
      if (w == swapped)
        CHECK(v == 1);
      else
        CHECK(v == 0);
      total += v;
    }
    CHECK(total == 1);
  }
}

TEST_CASE("reduction examples") {
  IsoContext ctx(3);
  AlgebraElement x11 = AlgebraElement::word({gen_x(0), gen_x(0)});
  CHECK(ctx.reduce(x11) == x11);
  for (int b = 0; b < 3; ++b) {
    AlgebraElement xu = AlgebraElement::word({gen_x(b), gen_u()});
    CHECK(ctx.reduce(xu) == AlgebraElement::word({gen_u(), gen_x(b)}, ctx.q_bullet(b).inverse()));
  }
  CHECK(ctx.reduce(AlgebraElement::word({gen_v(), gen_u()})) == AlgebraElement::one());
  CHECK(ctx.reduce(AlgebraElement::word({gen_u(), gen_v()})) == AlgebraElement::one());
  // idempotence on mixed words
  AlgebraElement w = AlgebraElement::word({gen_t(0, 1), gen_x(2), gen_x(0), gen_u(), gen_v(), gen_x(1)});
  AlgebraElement r1 = ctx.reduce(w);
  CHECK(ctx.reduce(r1) == r1);
  for (const auto& [word, c] : r1.terms()) CHECK(ctx.rules().is_normal(word));
}

TEST_CASE("iso presentation contains the listed relations") {
  IsoContext ctx(3);
  Presentation p = ctx.presentation();
  // T^b_d x^a - (r/q_{d bullet}) R^{ab}_{ef} x^e T^f_d with a=1,b=2,d=3
  AlgebraElement want = AlgebraElement::word({gen_t(1, 2), gen_x(0)});
  const Scalar k = ctx.big()->r() / ctx.q_bullet(2);
  for (int e = 0; e < 3; ++e)
    for (int f = 0; f < 3; ++f) want.add({gen_x(e), gen_t(f, 2)}, -k * ctx.R()(0, 1, e, f));
  bool found = false;
  for (const auto& r : p.relations) found = found || (r.label == "PRTT33" && r.value == want);
  CHECK(found);
  // u x^b - q_{b bullet} x^b u
  AlgebraElement ux = AlgebraElement::word({gen_u(), gen_x(1)});
  ux.add({gen_x(1), gen_u()}, -ctx.q_bullet(1));
  found = false;
  for (const auto& r : p.relations) found = found || r.value == ux;
  CHECK(found);
}

TEST_CASE("confluence and Hilbert counts") {
  for (int n = 3; n <= 4; ++n) {
    IsoContext ctx(n);
    RewriteSystem zeta = ctx.plane_rules();
    zeta.merge(ctx.dilatation_rules());
    Report plane = check_confluence(ctx.plane_rules(), ctx.x_alphabet(), ctx.names(), "plane");
    CHECK(plane.ok());
    Report rep = check_confluence(zeta, ctx.zeta_alphabet(), ctx.names(), "plane+dilatation");
    INFO(rep.to_text());
    CHECK(rep.ok());
    for (std::size_t d = 0; d <= 4; ++d) {
      CHECK(hilbert_dimension(ctx.plane_rules(), ctx.x_alphabet(), d) == static_cast<std::size_t>(binom(n + d - 1, d)));
      for (int k = -2; k <= 2; ++k) CHECK(dilatation_count(zeta, n, k, d) == static_cast<std::size_t>(binom(n + d - 1, d)));
    }
  }
  IsoContext ctx(3);
  CHECK(hilbert_dimension(ctx.plane_rules(), ctx.x_alphabet(), 2) == 6);
  CHECK(hilbert_dimension(ctx.plane_rules(), ctx.x_alphabet(), 3) == 10);
}

TEST_CASE("mixed rules are confluent with the plane") {
  IsoContext ctx(3);
  Report rep = check_confluence(ctx.rules(), ctx.alphabet(), ctx.names(), "iso");
  INFO(rep.to_text());
  CHECK(rep.ok());
}

TEST_CASE("dropping a plane rule breaks confluence") {
  IsoContext ctx(3);
  RewriteSystem plane = ctx.plane_rules();
  CHECK(check_confluence(plane, ctx.plane_presentation()).ok());
  plane.remove_rule(gen_x(2), gen_x(1));
  Report rep = check_confluence(plane, ctx.plane_presentation());
  CHECK_FALSE(rep.ok());
  const CheckResult* bad = nullptr;
  for (const auto& r : rep.results())
    if (!r.pass) bad = &r;
  REQUIRE(bad != nullptr);
  CHECK(bad->witness.contains("residue"));
}

TEST_CASE("exterior algebra and determinant") {
  auto g3 = make_geometry(3);
  Presentation ext = build_exterior(g3);
  RewriteSystem rs = exterior_rules(ext);
  CHECK(hilbert_dimension(rs, ext.alphabet, 3) == 1);
  CHECK(hilbert_dimension(rs, ext.alphabet, 2) == 3);
  CHECK(check_confluence(rs, ext.alphabet, g3->params().var_names(), "exterior").ok());

  AlgebraElement det = quantum_determinant(g3);
  CHECK(det.coeff({gen_t(0, 0), gen_t(1, 1), gen_t(2, 2)}) == Scalar(1));
  Point p = all_ones(g3->params());
  std::vector<int> idx(3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        Rational v = det.coeff({gen_t(0, a), gen_t(1, b), gen_t(2, c)}).specialize(p);
        const bool perm = a != b && b != c && a != c;
        CHECK(v == (perm ? Rational(perm_sign({a, b, c})) : Rational(0)));
      }
  for (int n = 4; n <= 5; ++n) {
    auto g = make_geometry(n);
    AlgebraElement d = quantum_determinant(g);
    CHECK(d.coeff([&] {
      Word w;
      for (int a = 0; a < n; ++a) w.push_back(gen_t(a, a));
      return w;
    }()) == Scalar(1));
  }
}

TEST_CASE("costructures on ISO(N) generators") {
  IsoContext ctx(3);
  CHECK(ctx.counit(AlgebraElement::gen(gen_x(0))).is_zero());
  CHECK(ctx.counit(AlgebraElement::gen(gen_u())) == Scalar(1));
  CHECK(ctx.coproduct(AlgebraElement::gen(gen_u())) == TensorElement::pure({gen_u()}, {gen_u()}));
  AlgebraElement kT = ctx.antipode(AlgebraElement::gen(gen_t(0, 1)));
  // kappa(T^a_b) = C^{ac} T^d_c C_{db}: a=1,b=2 -> T^{2'}_{1'} = T^2_3 (N=3)
  CHECK(kT == AlgebraElement::gen(gen_t(1, 2), ctx.C()(0, 2) * ctx.C()(1, 1)));
  CHECK(ctx.antipode(AlgebraElement::gen(gen_u())) == AlgebraElement::gen(gen_v()));

  for (Gen g : ctx.alphabet()) {
    AlgebraElement e = AlgebraElement::gen(g);
    TensorElement d = ctx.coproduct(e);
    Triple left, right;
    for (const auto& [k, c] : d.terms()) {
      TensorElement dl = ctx.coproduct(AlgebraElement::word(k.first));
      for (const auto& [k2, c2] : dl.terms()) add_triple(left, {k2.first, k2.second, k.second}, c * c2);
      TensorElement dr = ctx.coproduct(AlgebraElement::word(k.second));
      for (const auto& [k2, c2] : dr.terms()) add_triple(right, {k.first, k2.first, k2.second}, c * c2);
    }
    CHECK(left == right);
    // counit laws
    AlgebraElement l, r;
    for (const auto& [k, c] : d.terms()) {
      l.add(k.second, c * ctx.counit(AlgebraElement::word(k.first)));
      r.add(k.first, c * ctx.counit(AlgebraElement::word(k.second)));
    }
    CHECK(l == e);
    CHECK(r == e);
  }
}

TEST_CASE("antipode twice is metric conjugation") {
  auto g = make_geometry(4);
  MetricVec C(g);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      AlgebraElement k2 = antipode_matrix(antipode_matrix(AlgebraElement::gen(gen_big(a, b)), C, GenKind::BigT), C,
                                          GenKind::BigT);
      REQUIRE(k2.size() == 1);
      CHECK(k2.terms().begin()->first == Word{gen_big(a, b)});
      const Scalar once = C(a, 3 - a) * C(3 - b, b);
      CHECK(k2.terms().begin()->second == once * once);
    }
}

TEST_CASE("projection") {
  IsoContext ctx(3);
  CHECK(ctx.project(AlgebraElement::gen(gen_big(1, 0))).is_zero());
  CHECK(ctx.project(AlgebraElement::gen(gen_big(0, 4))) == ctx.z());
  CHECK(ctx.project(AlgebraElement::one()) == AlgebraElement::one());
  CHECK(ctx.project(AlgebraElement::gen(gen_big(2, 4))) == AlgebraElement::gen(gen_x(1)));
  const Scalar k = -(Scalar::s_pow(-3) + Scalar::s_pow(-1)).inverse();
  CHECK(ctx.z().coeff({gen_x(0), gen_x(2), gen_u()}) == k * ctx.C()(0, 2));
}

TEST_CASE("Hopf ideal") {
  for (int n = 3; n <= 4; ++n) {
    Report rep = check_hopf_ideal(n);
    CHECK(rep.results().size() == static_cast<std::size_t>(3 * (2 * n + 1)));
    INFO(rep.to_text());
    CHECK(rep.ok());
  }
}

TEST_CASE("ideal membership") {
  IsoContext ctx(3);
  Presentation plane = ctx.plane_presentation();
  for (const auto& r : plane.relations) CHECK(ideal_membership(r.value, plane, 2).member);
  AlgebraElement comm = AlgebraElement::word({gen_x(0), gen_x(1)}) - AlgebraElement::word({gen_x(1), gen_x(0)});
  MembershipResult m = ideal_membership(comm, plane, 2);
  CHECK_FALSE(m.member);
  // degree-3 consequence with certificate
  AlgebraElement rel = plane.relations.front().value;
  AlgebraElement e = AlgebraElement::gen(gen_x(2)) * rel;
  MembershipResult m3 = ideal_membership(e, plane, 3);
  CHECK(m3.member);
  CHECK_FALSE(m3.certificate.empty());
  Point p = generic_point(ctx.big()->params());
  CHECK(ideal_membership_at(e, plane.values(), plane.alphabet, 3, p).member);
  CHECK_FALSE(ideal_membership_at(comm, plane.values(), plane.alphabet, 3, p).member);
}
